#pragma once

#include <limits>
#include <map>
#include <optional>

#include "mpelab/kernel.hpp"

namespace mpelab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Minorization {
    /// Largest d with inf_x P_n(x, .) >= d * eta(.).
    double d = 0.0;
    /// Absent when d == 0.
    std::optional<Distribution> eta;
};

/// Ergodicity coefficients of a kernel, keyed by the step count n.
struct MixingReport {
    std::map<std::size_t, double> lambda;
    std::map<std::size_t, Minorization> minorization;
    /// Entries may be +infinity.
    std::map<std::size_t, double> strong_ratio;
};

/// Dobrushin coefficient: max over state pairs of the total-variation distance
/// between the n-step rows.
double dobrushin_coefficient(const FiniteKernel& kernel, std::size_t n);
double dobrushin_coefficient(const Matrix& stochastic);

Minorization minorization(const FiniteKernel& kernel, std::size_t n);
Minorization minorization(const Matrix& stochastic);

/// max_{x,x',y} P_n(x,y) / P_n(x',y) with 0/0 = 0 and c/0 = infinity.
/// The kernel overload decides zeros on the support pattern of P^n and
/// falls back to log-space powers when positive entries underflow.
double strong_mixing_ratio(const FiniteKernel& kernel, std::size_t n);
double strong_mixing_ratio(const Matrix& stochastic);

MixingReport mixing_report(const FiniteKernel& kernel, std::size_t n_max);

struct RelationReport {
    std::size_t n_max = 0;
    /// Largest positive slack over all checked inequalities; <= 0 when all hold.
    double max_violation = 0.0;
    std::map<std::size_t, double> lambda;
    std::map<std::size_t, double> d;
};

/// Checks, for n, m <= n_max: Lambda_n <= 1 - d_n, Lambda_{n+m} <= Lambda_n
/// Lambda_m and Lambda_n <= Lambda_1^n, each up to 1e-12. A violation is an
/// implementation bug and raises RelationViolated with the witness.
RelationReport check_relations(const FiniteKernel& kernel, std::size_t n_max);

}  // namespace mpelab
