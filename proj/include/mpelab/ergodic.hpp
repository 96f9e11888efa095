#pragma once

#include <optional>
#include <vector>

#include "mpelab/mpe.hpp"

namespace mpelab {

/// T^n 0 (x) / n, the normalised entropic value of sum_{i<n} g(x_i) from x.
double risk_sensitive_average(const FiniteKernel& kernel, const RewardFunction& g, StateIndex x, std::size_t n);

/// Per-n averages T^n 0 (x) / n for a set of states, with the envelope
/// lambda +- 2 ||w|| / n when a solution is supplied.
struct AverageTrace {
    StateSet states;
    std::vector<std::size_t> steps;
    /// values[i][j] = T^{steps[i]} 0 (states[j]) / steps[i].
    std::vector<std::vector<double>> values;
    std::optional<double> lambda;
    /// 2 ||w|| / n per step, present with lambda.
    std::vector<double> envelope;
};

AverageTrace average_trace(const FiniteKernel& kernel, const RewardFunction& g, const StateSet& states,
                           std::size_t n_max, const MpeSolution* solution = nullptr);

/// max over x and n <= n_max of |lambda - T^n 0(x)/n| - 2 ||w|| / n, with
/// ||w|| the sup norm of the normalised solution. Nonpositive when the
/// envelope holds. Throws BadParameters unless the solution is Solved.
double lambda_convergence_check(const FiniteKernel& kernel, const RewardFunction& g, const MpeSolution& solution,
                                std::size_t n_max);

struct EscapeResult {
    double alpha = 0.0;
    bool passed = false;
    /// Smallest n with sup_{x outside support} P_x[tau > n] <= alpha^n.
    std::size_t n = 0;
    /// Support covers every state; nothing to escape from.
    bool vacuous = false;
};

/// For each alpha in (0, 1), looks for n <= n_max with
/// sup_{x not in support} P_x[tau_support > n] <= alpha^n.
std::vector<EscapeResult> escape_geometric_test(const FiniteKernel& kernel, const StateSet& support,
                                                const std::vector<double>& alphas, std::size_t n_max = 1000);

/// Law of N(A, n) = #{1 <= t <= n : x_t in A} from x; entry k is P[N = k].
std::vector<double> visit_count_tail(const FiniteKernel& kernel, const StateSet& visits, StateIndex x, std::size_t n);

}  // namespace mpelab
