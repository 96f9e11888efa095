#pragma once

#include "mpelab/kernel.hpp"

namespace mpelab {

/// Bounded reward g over the states of a kernel, in kernel state order.
class RewardFunction {
public:
    RewardFunction() = default;
    explicit RewardFunction(Vector values);
    RewardFunction(std::initializer_list<double> values);

    static RewardFunction constant(std::size_t n, double c);

    std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
    double operator[](StateIndex x) const { return values_(static_cast<Eigen::Index>(x)); }
    const Vector& values() const { return values_; }
    operator const Vector&() const { return values_; }

private:
    Vector values_;
};

/// ln sum_y exp(f(y)) P(x, y), stabilised by the maximum of f on the support
/// of P(x, .). Zero-probability states never enter the exponentials.
double entropic_utility(const FiniteKernel& kernel, StateIndex x, const Vector& f);

/// All states at once.
Vector entropic_utility(const FiniteKernel& kernel, const Vector& f);

/// Exponentially tilted row: weights proportional to exp(f(y)) P(x, y).
Distribution esscher_measure(const FiniteKernel& kernel, StateIndex x, const Vector& f);

/// H[nu || mu] = sum nu ln(nu / mu); +infinity unless nu << mu.
double relative_entropy(const Distribution& nu, const Distribution& mu);

/// mu_x(f) - (integral of f d(mu) - H[mu || P(x, .)]). Nonnegative, zero at the
/// Esscher measure.
double dual_gap(const FiniteKernel& kernel, StateIndex x, const Vector& f, const Distribution& mu);

/// gamma * f. Throws ZeroGamma for gamma == 0.
RewardFunction rescale_risk(const RewardFunction& f, double gamma);

/// (1/gamma) mu_x(gamma f).
double risk_sensitive_utility(const FiniteKernel& kernel, StateIndex x, const Vector& f, double gamma);

/// Largest deviation, over states, between (1/gamma) mu_x(gamma f) evaluated by
/// log-sum-exp and by the variational formula at the tilted measure.
double rescale_identity_defect(const FiniteKernel& kernel, const RewardFunction& f, double gamma);

}  // namespace mpelab
