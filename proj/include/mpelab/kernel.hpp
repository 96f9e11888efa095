#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mpelab/error.hpp"

namespace mpelab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using StateIndex = std::size_t;

/// Sorted, duplicate-free list of state indices.
using StateSet = std::vector<StateIndex>;

/// Absolute tolerance for row sums and distribution totals.
inline constexpr double kStochasticTolerance = 1e-12;

StateSet make_state_set(std::vector<StateIndex> states);
StateSet complement(const StateSet& set, std::size_t n);
std::vector<bool> membership(const StateSet& set, std::size_t n);

enum class MetricKind { None, AbsDiff, Explicit };

/// Ordered state labels plus an optional metric rho.
///
/// Integer-labelled spaces default to rho(i, j) = |i - j|. An explicit metric
/// must be symmetric, vanish on the diagonal and satisfy the triangle
/// inequality up to 1e-12.
class StateSpace {
public:
    StateSpace() = default;

    /// States labelled first, first+1, ..., first+n-1 with the abs-diff metric.
    static StateSpace integers(std::size_t n, long first = 1);

    /// Arbitrary labels. Uses the abs-diff metric when every label is an integer.
    static StateSpace labeled(std::vector<std::string> labels);

    static StateSpace with_metric(std::vector<std::string> labels, Matrix distances);

    std::size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(StateIndex i) const { return labels_.at(i); }
    std::optional<StateIndex> index_of(const std::string& label) const;

    MetricKind metric_kind() const { return kind_; }
    bool has_metric() const { return kind_ != MetricKind::None; }
    double distance(StateIndex i, StateIndex j) const;

    bool operator==(const StateSpace& other) const;

private:
    std::vector<std::string> labels_;
    MetricKind kind_ = MetricKind::None;
    std::vector<double> numeric_labels_;
    Matrix distances_;
};

/// Probability vector over a finite state space.
class Distribution {
public:
    Distribution() = default;
    explicit Distribution(Vector weights);

    static Distribution point_mass(std::size_t n, StateIndex at);
    static Distribution uniform(std::size_t n);

    std::size_t size() const { return static_cast<std::size_t>(weights_.size()); }
    double operator[](StateIndex i) const { return weights_(static_cast<Eigen::Index>(i)); }
    const Vector& weights() const { return weights_; }
    StateSet support() const;

private:
    Vector weights_;
};

/// Row-stochastic transition matrix; row x is P(x, .).
///
/// Only build_kernel and iterate_kernel create instances, so every kernel in
/// circulation has been validated.
class FiniteKernel {
public:
    const StateSpace& space() const { return space_; }
    const Matrix& matrix() const { return matrix_; }
    std::size_t size() const { return space_.size(); }
    double operator()(StateIndex x, StateIndex y) const {
        return matrix_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
    }
    Distribution row(StateIndex x) const;
    void check_state(StateIndex x) const;

private:
    friend FiniteKernel build_kernel(StateSpace space, const Matrix& rows);
    friend FiniteKernel iterate_kernel(const FiniteKernel& kernel, std::size_t n);

    FiniteKernel(StateSpace space, Matrix matrix)
        : space_(std::move(space)), matrix_(std::move(matrix)) {}

    StateSpace space_;
    Matrix matrix_;
};

struct SignedMeasureDecomposition {
    StateSet positive_set;
    double tv_norm = 0.0;
};

struct CommunicatingClass {
    StateSet states;
    /// Closed classes are exactly the recurrent ones on a finite space.
    bool recurrent = false;
};

/// Validates rows: entries >= 0, each row sum within 1e-12 of one (such rows
/// are renormalised), square and matching the space.
FiniteKernel build_kernel(StateSpace space, const Matrix& rows);
FiniteKernel build_kernel(const Matrix& rows);

/// n-step kernel P^n, 1 <= n <= 1e6.
FiniteKernel iterate_kernel(const FiniteKernel& kernel, std::size_t n);

/// Unique invariant measure. Throws NonUniqueInvariant when there is more
/// than one closed class.
Distribution invariant_measure(const FiniteKernel& kernel);

/// Hahn positive set {y : mu1(y) > mu2(y)} and the total-variation norm.
SignedMeasureDecomposition hahn_decomposition(const Distribution& mu1, const Distribution& mu2);

/// P_x[tau_B > n] with tau_B = inf{n >= 1 : x_n in B}. The starting state is
/// never counted, even when it lies in B.
double taboo_tail(const FiniteKernel& kernel, const StateSet& taboo, StateIndex x, std::size_t n);

/// Row n holds P_x[tau_B > n] for every start state x, n = 0..n_max.
Matrix taboo_tail_profile(const FiniteKernel& kernel, const StateSet& taboo, std::size_t n_max);

/// Strongly connected components of the positive-transition digraph, ordered
/// by their smallest state.
std::vector<CommunicatingClass> communicating_classes(const FiniteKernel& kernel);

}  // namespace mpelab
