#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mpelab/entropy.hpp"

namespace mpelab {

/// (max f - min f) / 2.
double span_seminorm(const Vector& f);

/// Tf(x) = g(x) + mu_x(f).
Vector apply_T(const FiniteKernel& kernel, const Vector& g, const Vector& f);

enum class SolveStatus { Solved, Diverged, Inconclusive };
std::string_view to_string(SolveStatus status);

enum class DivergenceReason {
    None,
    /// Iterate span exceeded SolveOptions::span_cap.
    SpanCap,
    /// Iteration stalled at max_iter and the spectral class test proves that
    /// no bounded solution exists.
    SpectralCertificate,
};
std::string_view to_string(DivergenceReason reason);

struct SolveOptions {
    double tol = 1e-10;
    std::size_t max_iter = 100000;
    double span_cap = 1e4;
    /// Reference state for relative value iteration. Iterates are then
    /// recentred at this state instead of at their minimum; the returned w is
    /// still normalised to inf w = 0.
    std::optional<StateIndex> anchor;
    /// Run the spectral class test when max_iter is reached without
    /// convergence, upgrading Inconclusive to Diverged when it applies.
    bool certify = true;

    void validate(std::size_t n_states) const;
};

struct MpeSolution {
    Vector w;
    double lambda = 0.0;
    double residual = 0.0;
    SolveStatus status = SolveStatus::Inconclusive;
    DivergenceReason reason = DivergenceReason::None;
    std::size_t iterations = 0;
    /// trace[n - 1] = span of T^n 0.
    std::vector<double> trace;
};

MpeSolution solve_mpe(const FiniteKernel& kernel, const RewardFunction& g, const SolveOptions& opts = {});

/// max_x |w(x) - g(x) + lambda - mu_x(w)|.
double verify_mpe(const FiniteKernel& kernel, const Vector& g, const Vector& w, double lambda);

/// -ln(x) / 2 on (0, 1).
double sharp_bound(double dobrushin);
/// -ln(1 - d) / 2 on (0, 1).
double sharp_bound_minorization(double d);

struct ExistenceGuarantee {
    bool guaranteed = false;
    /// Smallest step count n with n * span(g) < -ln(Lambda_n) / 2.
    std::size_t steps = 0;
};

/// Sufficient test only: a negative answer says nothing about existence.
ExistenceGuarantee guaranteed_existence(const FiniteKernel& kernel, const RewardFunction& g, std::size_t n_max);

/// Upper bound on the span of T^n 0 under a one-step Dobrushin coefficient.
/// Finite for every n; bounded in n exactly when Lambda e^{2 span(g)} < 1.
double iterate_span_envelope(double dobrushin, double span_g, std::size_t n);

/// Limit of iterate_span_envelope as n grows; infinite when
/// Lambda e^{2 span(g)} >= 1.
double iterate_span_limit(double dobrushin, double span_g);

struct ApeSolution {
    Vector w;
    double lambda = 0.0;
    double residual = 0.0;
};

/// Risk-neutral equation w = g - lambda + P w with inf w = 0.
ApeSolution solve_ape(const FiniteKernel& kernel, const RewardFunction& g);

/// Largest observed ratio span(Tf1 - Tf2) / span(f1 - f2) over random pairs
/// whose oscillation max f - min f is at most bound.
double local_contraction_estimate(const FiniteKernel& kernel, const RewardFunction& g, double bound,
                                  std::size_t samples, std::uint64_t seed);

/// Spectral test for bounded solutions on a finite space. With
/// A = diag(e^g) P, a bounded solution exists iff A has a positive
/// eigenvector, which holds iff the communicating classes of maximal spectral
/// radius are exactly the closed ones. lambda = ln of that radius.
struct SpectralCertificate {
    bool bounded_solution = false;
    double lambda = 0.0;
    /// Per communicating class, same order as communicating_classes().
    std::vector<double> class_log_radius;
    /// Non-closed classes attaining the maximal radius.
    std::vector<std::size_t> blocking_classes;
    /// Closed classes below the maximal radius.
    std::vector<std::size_t> deficient_closed_classes;
};

/// Throws BadParameters above max_states (dense eigen-decompositions).
SpectralCertificate spectral_certificate(const FiniteKernel& kernel, const RewardFunction& g,
                                         std::size_t max_states = 4000);

enum class ExistenceClass { AllG, NotAllG, Unknown };
std::string_view to_string(ExistenceClass c);

struct Classification {
    ExistenceClass verdict = ExistenceClass::Unknown;
    /// Reward without a bounded solution (NotAllG only).
    std::optional<RewardFunction> witness;
    StateSet witness_support;
    /// Geometric stay rate on the witness support.
    double stay_rate = 0.0;
    StateSet recurrent_class;
    std::size_t period = 0;
    /// Smallest n with P^n strictly positive on the recurrent class (AllG).
    std::size_t positive_power = 0;
    std::string detail;
};

Classification finite_existence_classifier(const FiniteKernel& kernel);

/// Iterate-level diagnostics along the minorization argument: for each n the
/// case (1, 2 or 3) taken by g_n = T^n 0 and the resulting bound on the span
/// of g_{n+1}.
struct MinorizationStep {
    std::size_t n = 0;
    double span = 0.0;
    int case_id = 0;
    double next_bound = 0.0;
    double next_span = 0.0;
};

struct MinorizationDiagnostics {
    double d = 0.0;
    double epsilon = 0.0;
    double threshold = 0.0;
    std::vector<MinorizationStep> steps;
};

/// epsilon defaults to d/4, shrunk until 1 - d + 2 epsilon < e^{-2 span(g)}.
/// Throws DomainError when span(g) >= -ln(1 - d)/2 or d == 0.
MinorizationDiagnostics minorization_diagnostics(const FiniteKernel& kernel, const RewardFunction& g,
                                                 std::size_t n_max, std::optional<double> epsilon = std::nullopt);

}  // namespace mpelab
