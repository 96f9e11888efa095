#include "mpelab/entropy.hpp"

#include <cmath>
#include <limits>

namespace mpelab {

RewardFunction::RewardFunction(Vector values) : values_(std::move(values)) {
    for (Eigen::Index i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_(i))) {
            throw Error(ErrorCode::BadParameters, "reward value " + std::to_string(i) + " is not finite");
        }
    }
}

RewardFunction::RewardFunction(std::initializer_list<double> values)
    : RewardFunction(Vector(Eigen::Map<const Vector>(values.begin(), static_cast<Eigen::Index>(values.size())))) {}

RewardFunction RewardFunction::constant(std::size_t n, double c) {
    return RewardFunction(Vector::Constant(static_cast<Eigen::Index>(n), c));
}

namespace {

void check_dims(const FiniteKernel& kernel, const Vector& f) {
    if (static_cast<std::size_t>(f.size()) != kernel.size()) {
        throw Error(ErrorCode::DimensionMismatch, "function has " + std::to_string(f.size()) + " entries, kernel has " +
                                                      std::to_string(kernel.size()) + " states");
    }
}

double row_log_sum_exp(const FiniteKernel& kernel, StateIndex x, const Vector& f) {
    const auto n = static_cast<Eigen::Index>(kernel.size());
    double shift = -std::numeric_limits<double>::infinity();
    for (Eigen::Index y = 0; y < n; ++y) {
        if (kernel(x, static_cast<StateIndex>(y)) > 0.0) shift = std::max(shift, f(y));
    }
    double acc = 0.0;
    for (Eigen::Index y = 0; y < n; ++y) {
        const double p = kernel(x, static_cast<StateIndex>(y));
        if (p > 0.0) acc += p * std::exp(f(y) - shift);
    }
    return shift + std::log(acc);
}

}  // namespace

double entropic_utility(const FiniteKernel& kernel, StateIndex x, const Vector& f) {
    kernel.check_state(x);
    check_dims(kernel, f);
    return row_log_sum_exp(kernel, x, f);
}

Vector entropic_utility(const FiniteKernel& kernel, const Vector& f) {
    check_dims(kernel, f);
    const auto n = static_cast<Eigen::Index>(kernel.size());
    Vector out(n);
    for (Eigen::Index x = 0; x < n; ++x) out(x) = row_log_sum_exp(kernel, static_cast<StateIndex>(x), f);
    return out;
}

Distribution esscher_measure(const FiniteKernel& kernel, StateIndex x, const Vector& f) {
    const double log_norm = entropic_utility(kernel, x, f);
    const auto n = static_cast<Eigen::Index>(kernel.size());
    Vector w = Vector::Zero(n);
    for (Eigen::Index y = 0; y < n; ++y) {
        const double p = kernel(x, static_cast<StateIndex>(y));
        if (p > 0.0) w(y) = p * std::exp(f(y) - log_norm);
    }
    w /= w.sum();
    return Distribution(std::move(w));
}

double relative_entropy(const Distribution& nu, const Distribution& mu) {
    if (nu.size() != mu.size()) throw Error(ErrorCode::DimensionMismatch, "distributions live on different spaces");
    double h = 0.0;
    for (StateIndex y = 0; y < nu.size(); ++y) {
        if (nu[y] == 0.0) continue;
        if (mu[y] == 0.0) return std::numeric_limits<double>::infinity();
        h += nu[y] * std::log(nu[y] / mu[y]);
    }
    return std::max(h, 0.0);
}

double dual_gap(const FiniteKernel& kernel, StateIndex x, const Vector& f, const Distribution& mu) {
    check_dims(kernel, f);
    if (mu.size() != kernel.size()) throw Error(ErrorCode::DimensionMismatch, "measure lives on a different space");
    const double h = relative_entropy(mu, kernel.row(x));
    if (std::isinf(h)) return std::numeric_limits<double>::infinity();
    return entropic_utility(kernel, x, f) - (mu.weights().dot(f) - h);
}

RewardFunction rescale_risk(const RewardFunction& f, double gamma) {
    if (gamma == 0.0) throw Error(ErrorCode::ZeroGamma, "risk aversion must be nonzero");
    return RewardFunction(Vector(gamma * f.values()));
}

double risk_sensitive_utility(const FiniteKernel& kernel, StateIndex x, const Vector& f, double gamma) {
    if (gamma == 0.0) throw Error(ErrorCode::ZeroGamma, "risk aversion must be nonzero");
    return entropic_utility(kernel, x, Vector(gamma * f)) / gamma;
}

double rescale_identity_defect(const FiniteKernel& kernel, const RewardFunction& f, double gamma) {
    const RewardFunction scaled = rescale_risk(f, gamma);
    double worst = 0.0;
    for (StateIndex x = 0; x < kernel.size(); ++x) {
        const double direct = risk_sensitive_utility(kernel, x, f, gamma);
        const Distribution tilted = esscher_measure(kernel, x, scaled);
        const double variational =
            (tilted.weights().dot(scaled.values()) - relative_entropy(tilted, kernel.row(x))) / gamma;
        worst = std::max(worst, std::abs(direct - variational));
    }
    return worst;
}

}  // namespace mpelab
