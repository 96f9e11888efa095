#include "mpelab/corpus.hpp"

#include "mpelab/mpe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

namespace mpelab {

namespace {

constexpr std::size_t kMinTruncation = 8;
constexpr std::size_t kMaxTruncation = 1u << 20;
constexpr double kApery = 1.2020569031595942;

void require_truncation(std::size_t n, const char* who) {
    if (n < kMinTruncation || n > kMaxTruncation) {
        throw Error(ErrorCode::BadParameters,
                    std::string(who) + ": truncation size must lie in [8, 2^20], got " +
                        std::to_string(n));
    }
}

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw Error(ErrorCode::BadParameters, std::string(what) + " must be finite");
    }
}

/// Probability that a path started at `from` reaches the last state before
/// visiting state 1, for chains that only move forward, stay, or reset.
double boundary_hit_probability(const Matrix& p, std::size_t from) {
    const auto n = static_cast<std::size_t>(p.rows());
    double prob = 1.0;
    for (std::size_t i = from; i + 1 < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        const double stay = i == 0 ? 0.0 : p(r, r);
        prob *= p(r, r + 1) / (1.0 - stay);
    }
    return prob;
}

TruncationPolicy reset_truncation(const Matrix& p, std::vector<double> redirected, std::size_t from) {
    TruncationPolicy policy;
    policy.size = static_cast<std::size_t>(p.rows());
    policy.redirect_state = 0;
    policy.redirected_mass = std::move(redirected);
    policy.error_bound = boundary_hit_probability(p, from);
    return policy;
}

std::size_t floor_log2(std::size_t i) {
    std::size_t j = 0;
    while ((i >> (j + 1)) != 0) ++j;
    return j;
}

}  // namespace

CorpusChain two_state(double stay) {
    if (!(stay >= 0.0 && stay < 1.0)) {
        throw Error(ErrorCode::BadParameters, "two_state: stay probability must lie in [0, 1)");
    }
    Matrix p(2, 2);
    p << 1.0, 0.0, 1.0 - stay, stay;
    return CorpusChain{"two_state", build_kernel(StateSpace::integers(2), p), std::nullopt, {},
                       {{"stay", stay}}};
}

CorpusChain cyclic_three() {
    Matrix p(3, 3);
    p << 0.0, 0.5, 0.5, 0.5, 0.0, 0.5, 0.5, 0.5, 0.0;
    return CorpusChain{"cyclic_three", build_kernel(StateSpace::integers(3), p), std::nullopt, {},
                       {}};
}

CorpusChain shift_chain(std::size_t n) {
    require_truncation(n, "shift_chain");
    Matrix p = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::vector<double> redirected(n, 0.0);
    p(0, 0) = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        const double forward = std::ldexp(1.0, -static_cast<int>(i));
        if (i + 1 < n) {
            p(r, 0) = 1.0 - forward;
            p(r, r + 1) = forward;
        } else {
            p(r, 0) = 1.0;
            redirected[i] = forward;
        }
    }
    auto policy = reset_truncation(p, std::move(redirected), 1);
    return CorpusChain{"shift_chain", build_kernel(StateSpace::integers(n), p), std::move(policy), {},
                       {{"n", static_cast<double>(n)}}};
}

CorpusChain full_support_shift(std::size_t n, double epsilon) {
    require_truncation(n, "full_support_shift");
    require_finite(epsilon, "full_support_shift: epsilon");
    if (epsilon <= 0.0) {
        throw Error(ErrorCode::BadParameters, "full_support_shift: epsilon must be positive");
    }
    Matrix p = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::vector<double> redirected(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        p(r, 0) += 0.5;
        if (i + 1 < n) {
            p(r, r + 1) += 0.5;
        } else {
            p(r, 0) += 0.5;
            redirected[i] = 0.5;
        }
    }
    auto policy = reset_truncation(p, std::move(redirected), 0);
    std::vector<NamedReward> rewards;
    rewards.push_back({"block", dyadic_block_reward(n, 2.0 * (std::numbers::ln2 + epsilon))});
    return CorpusChain{"full_support_shift", build_kernel(StateSpace::integers(n), p),
                       std::move(policy), std::move(rewards),
                       {{"n", static_cast<double>(n)}, {"epsilon", epsilon}}};
}

CorpusChain recurrent_shift(std::size_t n, double k) {
    require_truncation(n, "recurrent_shift");
    require_finite(k, "recurrent_shift: k");
    Matrix p = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::vector<double> redirected(n, 0.0);
    p(0, 0) = 0.75;
    p(0, 1) = 0.25;
    for (std::size_t i = 1; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        p(r, 0) = 0.5;
        p(r, r) = 0.25;
        if (i + 1 < n) {
            p(r, r + 1) = 0.25;
        } else {
            p(r, 0) += 0.25;
            redirected[i] = 0.25;
        }
    }
    auto policy = reset_truncation(p, std::move(redirected), 0);
    std::vector<NamedReward> rewards;
    rewards.push_back({"alternating", alternating_reward(n, k)});
    rewards.push_back({"dyadic_block", dyadic_block_reward(n, k)});
    return CorpusChain{"recurrent_shift", build_kernel(StateSpace::integers(n), p), std::move(policy),
                       std::move(rewards), {{"n", static_cast<double>(n)}, {"k", k}}};
}

CorpusChain branching_chain(std::size_t n, double k) {
    require_truncation(n, "branching_chain");
    require_finite(k, "branching_chain: k");
    // Complete blocks A_1..A_B with 1 + sum_{i<=B} (i + 1) <= n.
    std::size_t blocks = 0;
    std::size_t size = 1;
    while (size + blocks + 2 <= n) {
        ++blocks;
        size += blocks + 1;
    }
    const auto s = static_cast<Eigen::Index>(size);
    Matrix p = Matrix::Zero(s, s);
    Vector g = Vector::Zero(s);
    double entry = 0.0;
    std::size_t start = 1;
    for (std::size_t i = 1; i <= blocks; ++i) {
        const double block_mass = std::exp(-std::ldexp(1.0, static_cast<int>(i)));
        entry += block_mass;
        for (std::size_t j = 0; j <= i; ++j) {
            const auto r = static_cast<Eigen::Index>(start + j);
            p(0, r) = block_mass / static_cast<double>(i + 1);
            if (j < i) {
                p(r, 0) = 0.5;
                p(r, r + 1) = 0.5;
                g(r) = k;
            } else {
                p(r, 0) = 1.0;
            }
        }
        start += i + 1;
    }
    p(0, 0) = 1.0 - entry;
    // The untruncated chain keeps 1/2 + p = 1 - sum_i e^{-2^i} at state 1;
    // the dropped blocks' entry mass is redirected there.
    double dropped = 0.0;
    for (std::size_t i = blocks + 1; i < 64; ++i) {
        dropped += std::exp(-std::ldexp(1.0, static_cast<int>(i)));
    }
    TruncationPolicy policy;
    policy.size = size;
    policy.redirect_state = 0;
    policy.redirected_mass.assign(size, 0.0);
    policy.redirected_mass[0] = dropped;
    policy.error_bound = dropped;
    std::vector<NamedReward> rewards;
    rewards.push_back({"block_tail", RewardFunction(g)});
    return CorpusChain{"branching_chain", build_kernel(StateSpace::integers(size), p),
                       std::move(policy), std::move(rewards),
                       {{"n", static_cast<double>(n)},
                        {"k", k},
                        {"blocks", static_cast<double>(blocks)},
                        {"states", static_cast<double>(size)}}};
}

CorpusChain local_geometric(const std::vector<double>& weights, std::size_t n) {
    require_truncation(n, "local_geometric");
    if (weights.size() + 1 < n) {
        throw Error(ErrorCode::BadParameters,
                    "local_geometric: need at least n - 1 weights, got " +
                        std::to_string(weights.size()));
    }
    double total = 0.0;
    for (double a : weights) {
        if (!std::isfinite(a) || a <= 0.0) {
            throw Error(ErrorCode::BadParameters, "local_geometric: weights must be positive");
        }
        total += a;
    }
    if (total > 0.5 + 1e-12) {
        throw Error(ErrorCode::BadParameters, "local_geometric: weights must sum to at most 1/2");
    }
    double prefix = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) prefix += weights[i];

    const auto s = static_cast<Eigen::Index>(n);
    Matrix p = Matrix::Zero(s, s);
    p(0, 0) = 0.5;
    for (std::size_t i = 1; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        p(0, r) = 0.5 * weights[i - 1] / prefix;
        p(r, 0) = 0.5;
        p(r, r) = 0.5;
    }

    // Decreasing subsequence with a_{i_k} < zeta(3) / (1 + k)^3.
    Vector g = Vector::Zero(s);
    std::size_t level = 0;
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < n; ++i) {
        const double a = p(0, static_cast<Eigen::Index>(i));
        const double cap = kApery / std::pow(1.0 + static_cast<double>(level), 3);
        if (a < previous && a < cap) {
            g(static_cast<Eigen::Index>(i)) =
                2.0 * (std::numbers::ln2 + std::log(1.0 - 1.0 / (static_cast<double>(level) + 2.0)));
            previous = a;
            ++level;
        }
    }

    TruncationPolicy policy;
    policy.size = n;
    policy.redirect_state = 0;
    policy.redirected_mass.assign(n, 0.0);
    policy.redirected_mass[0] = 0.5 - prefix;
    policy.error_bound = std::max(0.0, 0.5 - prefix);
    std::vector<NamedReward> rewards;
    rewards.push_back({"sparse_levels", RewardFunction(g)});
    return CorpusChain{"local_geometric", build_kernel(StateSpace::integers(n), p),
                       std::move(policy), std::move(rewards), {{"n", static_cast<double>(n)}}};
}

CorpusChain local_geometric(std::size_t n) {
    require_truncation(n, "local_geometric");
    std::vector<double> weights(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        weights[i] = std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(i + 2, 1000)));
    }
    return local_geometric(weights, n);
}

RewardFunction bump_reward(const StateSpace& space, StateIndex centre, double radius, double m) {
    if (!space.has_metric()) {
        throw Error(ErrorCode::BadParameters, "bump_reward: state space has no metric");
    }
    if (centre >= space.size()) {
        throw Error(ErrorCode::BadParameters, "bump_reward: centre out of range");
    }
    if (!std::isfinite(radius) || radius <= 0.0 || !std::isfinite(m) || m <= 0.0) {
        throw Error(ErrorCode::BadParameters, "bump_reward: radius and m must be positive");
    }
    const double inner = radius - 1.0 / m;
    const std::size_t n = space.size();
    std::vector<StateIndex> ball;
    for (StateIndex y = 0; y < n; ++y) {
        if (space.distance(centre, y) <= inner) ball.push_back(y);
    }
    Vector g(static_cast<Eigen::Index>(n));
    for (StateIndex x = 0; x < n; ++x) {
        double dist = std::numeric_limits<double>::infinity();
        for (StateIndex y : ball) dist = std::min(dist, space.distance(x, y));
        g(static_cast<Eigen::Index>(x)) = std::min(1.0, m * dist);
    }
    return RewardFunction(g);
}

RewardFunction dyadic_block_reward(std::size_t n, double level) {
    require_finite(level, "dyadic_block_reward: level");
    Vector g(static_cast<Eigen::Index>(n));
    for (std::size_t i = 1; i <= n; ++i) {
        const std::size_t j = floor_log2(i);
        // Upper half-block [2^j + 2^{j-1}, 2^{j+1}) for j >= 1.
        const bool upper = j >= 1 && i >= (std::size_t{1} << j) + (std::size_t{1} << (j - 1));
        g(static_cast<Eigen::Index>(i - 1)) = upper ? level : 0.0;
    }
    return RewardFunction(g);
}

RewardFunction alternating_reward(std::size_t n, double k) {
    require_finite(k, "alternating_reward: k");
    Vector g(static_cast<Eigen::Index>(n));
    for (std::size_t i = 1; i <= n; ++i) {
        g(static_cast<Eigen::Index>(i - 1)) = (i >= 3 && i % 2 == 1) ? k : 0.0;
    }
    return RewardFunction(g);
}

bool two_state_solution_exists(double stay, const RewardFunction& g) {
    if (g.size() != 2) {
        throw Error(ErrorCode::BadParameters, "two_state_solution_exists: reward must have two states");
    }
    if (g[0] > g[1]) return true;
    const double threshold = -0.5 * std::log(stay);
    return span_seminorm(g.values()) < threshold;
}

std::optional<ClosedForm> two_state_closed_form(double stay, const RewardFunction& g) {
    if (!two_state_solution_exists(stay, g)) return std::nullopt;
    const double ratio = (std::exp(g[0] - g[1]) - stay) / (1.0 - stay);
    const double delta = std::log(ratio);
    ClosedForm out;
    out.lambda = g[0];
    out.w = Vector(2);
    out.w << std::max(0.0, delta), std::max(0.0, -delta);
    return out;
}

double recurrent_shift_lambda(double k) {
    if (!std::isfinite(k) || k < 0.0) {
        throw Error(ErrorCode::BadParameters, "recurrent_shift_lambda: k must be finite and >= 0");
    }
    const double ek = std::exp(k);
    return std::log(0.5 + 0.125 * (std::sqrt(12.0 + ek * ek - 4.0 * ek) + ek));
}

std::vector<std::string> corpus_names() {
    return {"two_state",       "cyclic_three",    "shift_chain",    "full_support_shift",
            "recurrent_shift", "branching_chain", "local_geometric"};
}

namespace {

class ParamReader {
public:
    ParamReader(std::string chain, const std::map<std::string, double>& params)
        : chain_(std::move(chain)), params_(params) {}

    double real(const std::string& key, std::optional<double> fallback) {
        used_.insert(key);
        auto it = params_.find(key);
        if (it == params_.end()) {
            if (!fallback) {
                throw Error(ErrorCode::BadParameters, chain_ + ": missing parameter '" + key + "'");
            }
            return *fallback;
        }
        return it->second;
    }

    std::size_t count(const std::string& key, std::optional<std::size_t> fallback) {
        const double v = real(key, fallback ? std::optional<double>(static_cast<double>(*fallback))
                                            : std::nullopt);
        if (!(v >= 0.0) || v != std::floor(v) || v > 1e9) {
            throw Error(ErrorCode::BadParameters, chain_ + ": parameter '" + key +
                                                      "' must be a non-negative integer");
        }
        return static_cast<std::size_t>(v);
    }

    void finish() const {
        for (const auto& [key, value] : params_) {
            if (!used_.count(key)) {
                throw Error(ErrorCode::BadParameters,
                            chain_ + ": unknown parameter '" + key + "'");
            }
        }
    }

private:
    std::string chain_;
    const std::map<std::string, double>& params_;
    std::set<std::string> used_;
};

}  // namespace

CorpusChain build_corpus(const std::string& name, const std::map<std::string, double>& params) {
    ParamReader read(name, params);
    std::optional<CorpusChain> out;
    if (name == "two_state") {
        out = two_state(read.real("stay", 0.5));
    } else if (name == "cyclic_three") {
        out = cyclic_three();
    } else if (name == "shift_chain") {
        out = shift_chain(read.count("n", 64));
    } else if (name == "full_support_shift") {
        const auto n = read.count("n", 256);
        out = full_support_shift(n, read.real("epsilon", 0.5));
    } else if (name == "recurrent_shift") {
        const auto n = read.count("n", 200);
        out = recurrent_shift(n, read.real("k", 1.0));
    } else if (name == "branching_chain") {
        const auto n = read.count("n", 64);
        out = branching_chain(n, read.real("k", 2.0));
    } else if (name == "local_geometric") {
        const auto n = read.count("n", 64);
        const double ratio = read.real("ratio", 0.5);
        if (!(ratio > 0.0 && ratio < 1.0)) {
            throw Error(ErrorCode::BadParameters, "local_geometric: ratio must lie in (0, 1)");
        }
        if (n < kMinTruncation) require_truncation(n, "local_geometric");
        // a_i = c * ratio^i with sum_{i>=1} a_i = 1/2.
        std::vector<double> weights(n - 1);
        const double scale = 0.5 * (1.0 - ratio) / ratio;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            weights[i] = scale * std::pow(ratio, static_cast<double>(i + 1));
        }
        if (weights.back() <= 0.0) {
            throw Error(ErrorCode::BadParameters, "local_geometric: weights underflow at this n");
        }
        out = local_geometric(weights, n);
        out->parameters["ratio"] = ratio;
    } else {
        throw Error(ErrorCode::BadParameters, "unknown corpus chain '" + name + "'");
    }
    read.finish();
    return std::move(*out);
}

}  // namespace mpelab
