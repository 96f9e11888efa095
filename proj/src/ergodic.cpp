#include "mpelab/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mpelab {

double risk_sensitive_average(const FiniteKernel& kernel, const RewardFunction& g, StateIndex x, std::size_t n) {
    kernel.check_state(x);
    if (n == 0) throw Error(ErrorCode::BadParameters, "horizon must be at least 1");
    Vector u = Vector::Zero(static_cast<Eigen::Index>(kernel.size()));
    for (std::size_t i = 0; i < n; ++i) u = apply_T(kernel, g.values(), u);
    return u(static_cast<Eigen::Index>(x)) / static_cast<double>(n);
}

AverageTrace average_trace(const FiniteKernel& kernel, const RewardFunction& g, const StateSet& states,
                           std::size_t n_max, const MpeSolution* solution) {
    if (n_max == 0) throw Error(ErrorCode::BadParameters, "n_max must be at least 1");
    for (StateIndex s : states) kernel.check_state(s);
    AverageTrace trace;
    trace.states = states;
    double w_norm = 0.0;
    if (solution) {
        if (solution->status != SolveStatus::Solved) {
            throw Error(ErrorCode::BadParameters, "envelope needs a solved equation");
        }
        trace.lambda = solution->lambda;
        w_norm = solution->w.cwiseAbs().maxCoeff();
    }
    Vector u = Vector::Zero(static_cast<Eigen::Index>(kernel.size()));
    for (std::size_t n = 1; n <= n_max; ++n) {
        u = apply_T(kernel, g.values(), u);
        trace.steps.push_back(n);
        std::vector<double> row;
        row.reserve(states.size());
        for (StateIndex s : states) row.push_back(u(static_cast<Eigen::Index>(s)) / static_cast<double>(n));
        trace.values.push_back(std::move(row));
        if (solution) trace.envelope.push_back(2.0 * w_norm / static_cast<double>(n));
    }
    return trace;
}

double lambda_convergence_check(const FiniteKernel& kernel, const RewardFunction& g, const MpeSolution& solution,
                                std::size_t n_max) {
    StateSet all(kernel.size());
    for (StateIndex i = 0; i < kernel.size(); ++i) all[i] = i;
    const AverageTrace trace = average_trace(kernel, g, all, n_max, &solution);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        for (double v : trace.values[i]) worst = std::max(worst, std::abs(solution.lambda - v) - trace.envelope[i]);
    }
    return worst;
}

std::vector<EscapeResult> escape_geometric_test(const FiniteKernel& kernel, const StateSet& support,
                                                const std::vector<double>& alphas, std::size_t n_max) {
    for (double a : alphas) {
        if (!(a > 0.0 && a < 1.0)) throw Error(ErrorCode::BadParameters, "alpha must lie in (0, 1)");
    }
    const StateSet outside = complement(support, kernel.size());
    std::vector<EscapeResult> out;
    if (outside.empty()) {
        for (double a : alphas) out.push_back({a, true, 0, true});
        return out;
    }
    const Matrix tails = taboo_tail_profile(kernel, support, n_max);
    std::vector<double> worst(n_max + 1, 0.0);
    for (std::size_t n = 0; n <= n_max; ++n) {
        for (StateIndex x : outside) {
            worst[n] = std::max(worst[n], tails(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(x)));
        }
    }
    for (double a : alphas) {
        EscapeResult r{a, false, 0, false};
        double power = 1.0;
        for (std::size_t n = 1; n <= n_max; ++n) {
            power *= a;
            if (worst[n] <= power) {
                r.passed = true;
                r.n = n;
                break;
            }
        }
        out.push_back(r);
    }
    return out;
}

std::vector<double> visit_count_tail(const FiniteKernel& kernel, const StateSet& visits, StateIndex x, std::size_t n) {
    kernel.check_state(x);
    if (n > 1000) throw Error(ErrorCode::BadParameters, "visit counts limited to n <= 1000");
    const auto in = membership(visits, kernel.size());
    const auto m = static_cast<Eigen::Index>(kernel.size());
    const auto counts = static_cast<Eigen::Index>(n + 1);
    // mass(y, k) = P[x_t = y, N(A, t) = k]
    Matrix mass = Matrix::Zero(m, counts);
    mass(static_cast<Eigen::Index>(x), 0) = 1.0;
    for (std::size_t t = 1; t <= n; ++t) {
        const Matrix moved = kernel.matrix().transpose() * mass;
        mass.setZero();
        for (Eigen::Index y = 0; y < m; ++y) {
            if (in[static_cast<std::size_t>(y)]) {
                mass.row(y).tail(counts - 1) = moved.row(y).head(counts - 1);
            } else {
                mass.row(y) = moved.row(y);
            }
        }
    }
    const Vector law = mass.colwise().sum().transpose();
    return {law.data(), law.data() + law.size()};
}

}  // namespace mpelab
