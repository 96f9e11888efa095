#include "mpelab/kernel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mpelab {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonStochasticRow: return "NonStochasticRow";
        case ErrorCode::NegativeEntry: return "NegativeEntry";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NonUniqueInvariant: return "NonUniqueInvariant";
        case ErrorCode::EmptyTaboo: return "EmptyTaboo";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::ZeroGamma: return "ZeroGamma";
        case ErrorCode::RelationViolated: return "RelationViolated";
        case ErrorCode::NonLatticeReward: return "NonLatticeReward";
        case ErrorCode::BadParameters: return "BadParameters";
        case ErrorCode::InvalidState: return "InvalidState";
        case ErrorCode::Io: return "Io";
        case ErrorCode::Parse: return "Parse";
    }
    return "Unknown";
}

StateSet make_state_set(std::vector<StateIndex> states) {
    std::sort(states.begin(), states.end());
    states.erase(std::unique(states.begin(), states.end()), states.end());
    return states;
}

StateSet complement(const StateSet& set, std::size_t n) {
    const auto in = membership(set, n);
    StateSet out;
    for (StateIndex i = 0; i < n; ++i) {
        if (!in[i]) out.push_back(i);
    }
    return out;
}

std::vector<bool> membership(const StateSet& set, std::size_t n) {
    std::vector<bool> in(n, false);
    for (auto s : set) {
        if (s >= n) throw Error(ErrorCode::InvalidState, "state index " + std::to_string(s) + " out of range");
        in[s] = true;
    }
    return in;
}

// --- StateSpace -------------------------------------------------------------

namespace {

std::optional<long> parse_integer(const std::string& text) {
    long value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || text.empty()) return std::nullopt;
    return value;
}

}  // namespace

StateSpace StateSpace::integers(std::size_t n, long first) {
    std::vector<std::string> labels;
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(first + static_cast<long>(i)));
    return labeled(std::move(labels));
}

StateSpace StateSpace::labeled(std::vector<std::string> labels) {
    StateSpace space;
    auto sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw Error(ErrorCode::BadParameters, "state labels must be distinct");
    }
    space.labels_ = std::move(labels);
    std::vector<double> numeric;
    numeric.reserve(space.labels_.size());
    for (const auto& l : space.labels_) {
        auto v = parse_integer(l);
        if (!v) {
            numeric.clear();
            break;
        }
        numeric.push_back(static_cast<double>(*v));
    }
    if (!space.labels_.empty() && numeric.size() == space.labels_.size()) {
        space.kind_ = MetricKind::AbsDiff;
        space.numeric_labels_ = std::move(numeric);
    }
    return space;
}

StateSpace StateSpace::with_metric(std::vector<std::string> labels, Matrix distances) {
    StateSpace space = labeled(std::move(labels));
    const auto n = static_cast<Eigen::Index>(space.size());
    if (distances.rows() != n || distances.cols() != n) {
        throw Error(ErrorCode::DimensionMismatch, "metric must be " + std::to_string(n) + "x" + std::to_string(n));
    }
    constexpr double tol = 1e-12;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(distances(i, i)) > tol) throw Error(ErrorCode::BadParameters, "metric must vanish on the diagonal");
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!(distances(i, j) >= 0.0)) throw Error(ErrorCode::BadParameters, "metric must be nonnegative");
            if (std::abs(distances(i, j) - distances(j, i)) > tol) {
                throw Error(ErrorCode::BadParameters, "metric must be symmetric");
            }
            for (Eigen::Index k = 0; k < n; ++k) {
                if (distances(i, k) > distances(i, j) + distances(j, k) + tol) {
                    throw Error(ErrorCode::BadParameters, "metric violates the triangle inequality");
                }
            }
        }
    }
    space.kind_ = MetricKind::Explicit;
    space.distances_ = std::move(distances);
    space.numeric_labels_.clear();
    return space;
}

std::optional<StateIndex> StateSpace::index_of(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) return std::nullopt;
    return static_cast<StateIndex>(it - labels_.begin());
}

double StateSpace::distance(StateIndex i, StateIndex j) const {
    if (i >= size() || j >= size()) throw Error(ErrorCode::InvalidState, "distance: state out of range");
    switch (kind_) {
        case MetricKind::AbsDiff: return std::abs(numeric_labels_[i] - numeric_labels_[j]);
        case MetricKind::Explicit:
            return distances_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        case MetricKind::None: break;
    }
    throw Error(ErrorCode::BadParameters, "state space has no metric");
}

bool StateSpace::operator==(const StateSpace& other) const {
    if (labels_ != other.labels_ || kind_ != other.kind_) return false;
    if (kind_ == MetricKind::Explicit) return distances_ == other.distances_;
    return true;
}

// --- Distribution -----------------------------------------------------------

Distribution::Distribution(Vector weights) : weights_(std::move(weights)) {
    for (Eigen::Index i = 0; i < weights_.size(); ++i) {
        if (!std::isfinite(weights_(i)) || weights_(i) < 0.0) {
            throw Error(ErrorCode::NegativeEntry, "distribution weight " + std::to_string(i) + " is negative or not finite");
        }
    }
    const double total = weights_.sum();
    if (std::abs(total - 1.0) >= kStochasticTolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "distribution sums to " << total;
        throw Error(ErrorCode::NonStochasticRow, msg.str());
    }
}

Distribution Distribution::point_mass(std::size_t n, StateIndex at) {
    if (at >= n) throw Error(ErrorCode::InvalidState, "point mass outside the space");
    Vector w = Vector::Zero(static_cast<Eigen::Index>(n));
    w(static_cast<Eigen::Index>(at)) = 1.0;
    return Distribution(std::move(w));
}

Distribution Distribution::uniform(std::size_t n) {
    if (n == 0) throw Error(ErrorCode::BadParameters, "empty space");
    return Distribution(Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n)));
}

StateSet Distribution::support() const {
    StateSet s;
    for (Eigen::Index i = 0; i < weights_.size(); ++i) {
        if (weights_(i) > 0.0) s.push_back(static_cast<StateIndex>(i));
    }
    return s;
}

// --- FiniteKernel -----------------------------------------------------------

Distribution FiniteKernel::row(StateIndex x) const {
    check_state(x);
    return Distribution(matrix_.row(static_cast<Eigen::Index>(x)).transpose());
}

void FiniteKernel::check_state(StateIndex x) const {
    if (x >= size()) {
        throw Error(ErrorCode::InvalidState, "state index " + std::to_string(x) + " out of range for " +
                                                 std::to_string(size()) + " states");
    }
}

namespace {

void normalise_rows(Matrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (!std::isfinite(m(r, c))) {
                throw Error(ErrorCode::NonStochasticRow, "row " + std::to_string(r) + " has a non-finite entry");
            }
            if (m(r, c) < 0.0) {
                std::ostringstream msg;
                msg << "entry (" << r << "," << c << ") = " << m(r, c);
                throw Error(ErrorCode::NegativeEntry, msg.str());
            }
        }
        const double total = m.row(r).sum();
        if (std::abs(total - 1.0) >= kStochasticTolerance) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "row " << r << " sums to " << total;
            throw Error(ErrorCode::NonStochasticRow, msg.str());
        }
        m.row(r) /= total;
    }
}

}  // namespace

FiniteKernel build_kernel(StateSpace space, const Matrix& rows) {
    const auto n = static_cast<Eigen::Index>(space.size());
    if (n == 0) throw Error(ErrorCode::DimensionMismatch, "kernel needs at least one state");
    if (rows.rows() != n || rows.cols() != n) {
        throw Error(ErrorCode::DimensionMismatch, "matrix is " + std::to_string(rows.rows()) + "x" +
                                                      std::to_string(rows.cols()) + ", expected " +
                                                      std::to_string(n) + "x" + std::to_string(n));
    }
    Matrix m = rows;
    normalise_rows(m);
    return FiniteKernel(std::move(space), std::move(m));
}

FiniteKernel build_kernel(const Matrix& rows) {
    if (rows.rows() != rows.cols()) throw Error(ErrorCode::DimensionMismatch, "matrix must be square");
    return build_kernel(StateSpace::integers(static_cast<std::size_t>(rows.rows())), rows);
}

FiniteKernel iterate_kernel(const FiniteKernel& kernel, std::size_t n) {
    if (n == 0 || n > 1'000'000) throw Error(ErrorCode::DomainError, "iterate_kernel needs 1 <= n <= 1e6");
    Matrix result;
    Matrix base = kernel.matrix();
    bool have = false;
    for (std::size_t e = n; e > 0; e >>= 1) {
        if (e & 1U) {
            result = have ? Matrix(result * base) : base;
            have = true;
        }
        if (e > 1) base = base * base;
    }
    normalise_rows(result);
    return FiniteKernel(kernel.space(), std::move(result));
}

// --- classes and invariant measure ------------------------------------------

std::vector<CommunicatingClass> communicating_classes(const FiniteKernel& kernel) {
    const std::size_t n = kernel.size();
    std::vector<std::vector<StateIndex>> adj(n);
    for (StateIndex x = 0; x < n; ++x) {
        for (StateIndex y = 0; y < n; ++y) {
            if (kernel(x, y) > 0.0) adj[x].push_back(y);
        }
    }

    // Iterative Tarjan.
    constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, unvisited), low(n, 0), comp(n, unvisited);
    std::vector<bool> on_stack(n, false);
    std::vector<StateIndex> stack;
    std::vector<std::pair<StateIndex, std::size_t>> call;
    std::size_t counter = 0, n_comp = 0;
    for (StateIndex root = 0; root < n; ++root) {
        if (index[root] != unvisited) continue;
        call.emplace_back(root, 0);
        while (!call.empty()) {
            auto& [v, edge] = call.back();
            if (edge == 0 && index[v] == unvisited) {
                index[v] = low[v] = counter++;
                stack.push_back(v);
                on_stack[v] = true;
            }
            if (edge < adj[v].size()) {
                const StateIndex w = adj[v][edge++];
                if (index[w] == unvisited) {
                    call.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                StateIndex w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = n_comp;
                } while (w != v);
                ++n_comp;
            }
            const StateIndex finished = v;
            call.pop_back();
            if (!call.empty()) {
                const StateIndex parent = call.back().first;
                low[parent] = std::min(low[parent], low[finished]);
            }
        }
    }

    std::vector<CommunicatingClass> classes(n_comp);
    for (StateIndex x = 0; x < n; ++x) classes[comp[x]].states.push_back(x);
    for (auto& c : classes) {
        c.recurrent = true;
        for (auto x : c.states) {
            for (auto y : adj[x]) {
                if (comp[y] != comp[x]) c.recurrent = false;
            }
        }
    }
    std::sort(classes.begin(), classes.end(),
              [](const CommunicatingClass& a, const CommunicatingClass& b) { return a.states.front() < b.states.front(); });
    return classes;
}

namespace {

Vector stationary_direct(const Matrix& p) {
    const auto m = p.rows();
    Matrix a = Matrix::Identity(m, m) - p.transpose();
    a.row(m - 1).setOnes();
    Vector b = Vector::Zero(m);
    b(m - 1) = 1.0;
    Eigen::ColPivHouseholderQR<Matrix> qr(a);
    Vector nu = qr.solve(b);
    // One step of iterative refinement.
    nu += qr.solve(b - a * nu);
    return nu;
}

Vector stationary_power(const Matrix& p) {
    const auto m = p.rows();
    // Lazy chain (P + I)/2 shares the invariant measure and is aperiodic.
    Vector nu = Vector::Constant(m, 1.0 / static_cast<double>(m));
    for (int it = 0; it < 1'000'000; ++it) {
        Vector next = 0.5 * (nu + p.transpose() * nu);
        next /= next.sum();
        const double change = (next - nu).lpNorm<1>();
        nu = std::move(next);
        if (change < 1e-14) break;
    }
    return nu;
}

}  // namespace

Distribution invariant_measure(const FiniteKernel& kernel) {
    const auto classes = communicating_classes(kernel);
    std::vector<const CommunicatingClass*> closed;
    for (const auto& c : classes) {
        if (c.recurrent) closed.push_back(&c);
    }
    if (closed.size() != 1) {
        throw Error(ErrorCode::NonUniqueInvariant,
                    std::to_string(closed.size()) + " recurrent classes; the invariant measure is not unique");
    }
    const auto& states = closed.front()->states;
    const auto m = static_cast<Eigen::Index>(states.size());
    Matrix sub(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) sub(i, j) = kernel(states[i], states[j]);
    }
    Vector local = (m <= 2000) ? stationary_direct(sub) : stationary_power(sub);
    local = local.cwiseMax(0.0);
    local /= local.sum();

    Vector nu = Vector::Zero(static_cast<Eigen::Index>(kernel.size()));
    for (Eigen::Index i = 0; i < m; ++i) nu(static_cast<Eigen::Index>(states[i])) = local(i);
    return Distribution(std::move(nu));
}

// --- signed measures and hitting times --------------------------------------

SignedMeasureDecomposition hahn_decomposition(const Distribution& mu1, const Distribution& mu2) {
    if (mu1.size() != mu2.size()) throw Error(ErrorCode::DimensionMismatch, "distributions live on different spaces");
    SignedMeasureDecomposition out;
    for (StateIndex y = 0; y < mu1.size(); ++y) {
        const double diff = mu1[y] - mu2[y];
        if (diff > 0.0) {
            out.positive_set.push_back(y);
            out.tv_norm += diff;
        }
    }
    return out;
}

Matrix taboo_tail_profile(const FiniteKernel& kernel, const StateSet& taboo, std::size_t n_max) {
    if (taboo.empty()) throw Error(ErrorCode::EmptyTaboo, "taboo set must be nonempty");
    const std::size_t n = kernel.size();
    const auto free = complement(taboo, n);
    const auto nf = static_cast<Eigen::Index>(free.size());
    const auto nn = static_cast<Eigen::Index>(n);

    // exit(x, y) = P(x, y) for y outside the taboo set, any x.
    Matrix exit(nn, nf);
    for (Eigen::Index x = 0; x < nn; ++x) {
        for (Eigen::Index j = 0; j < nf; ++j) exit(x, j) = kernel(static_cast<StateIndex>(x), free[j]);
    }
    Matrix q(nf, nf);
    for (Eigen::Index i = 0; i < nf; ++i) {
        for (Eigen::Index j = 0; j < nf; ++j) q(i, j) = kernel(free[i], free[j]);
    }

    Matrix out(static_cast<Eigen::Index>(n_max + 1), nn);
    out.row(0).setOnes();
    // h = Q^{k} 1 restricted to the free states.
    Vector h = Vector::Ones(nf);
    for (std::size_t k = 1; k <= n_max; ++k) {
        out.row(static_cast<Eigen::Index>(k)) = (exit * h).transpose();
        h = q * h;
    }
    return out;
}

double taboo_tail(const FiniteKernel& kernel, const StateSet& taboo, StateIndex x, std::size_t n) {
    kernel.check_state(x);
    if (taboo.empty()) throw Error(ErrorCode::EmptyTaboo, "taboo set must be nonempty");
    if (n == 0) return 1.0;
    const auto free = complement(taboo, kernel.size());
    const auto nf = static_cast<Eigen::Index>(free.size());
    if (nf == 0) return 0.0;
    Eigen::RowVectorXd v(nf);
    for (Eigen::Index j = 0; j < nf; ++j) v(j) = kernel(x, free[j]);
    Matrix q(nf, nf);
    for (Eigen::Index i = 0; i < nf; ++i) {
        for (Eigen::Index j = 0; j < nf; ++j) q(i, j) = kernel(free[i], free[j]);
    }
    for (std::size_t k = 1; k < n; ++k) v = v * q;
    return std::clamp(v.sum(), 0.0, 1.0);
}

}  // namespace mpelab
