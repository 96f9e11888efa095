#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "mpelab/entropy.hpp"

namespace mpelab {

/// Name of the per-path generator, recorded in report metadata.
inline constexpr std::string_view kRngAlgorithm = "philox4x32-10";

/// Worker count: MPELAB_THREADS when set to a positive integer, else the
/// hardware concurrency.
std::size_t worker_count();

/// Splits [0, count) into contiguous chunks and runs body(begin, end) on up
/// to worker_count() threads. Rethrows the first exception.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body);

/// One Philox4x32-10 block: ten rounds keyed by a 64-bit key.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Counter-based generator for substream `stream` of a master seed: key =
/// seed, counter = (block index, stream). The sequence depends only on
/// (seed, stream), never on scheduling.
class StreamRng {
public:
    StreamRng(std::uint64_t seed, std::uint64_t stream);
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    std::uint64_t next();

private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
};

/// m sample paths x_0 .. x_n, stored row-major by path.
struct PathBatch {
    std::uint64_t seed = 0;
    std::size_t horizon = 0;
    std::size_t paths = 0;
    StateIndex start = 0;
    std::vector<StateIndex> states;

    StateIndex state(std::size_t path, std::size_t t) const { return states[path * (horizon + 1) + t]; }
    /// S_n = sum_{i < n} g(x_i) per path.
    std::vector<double> reward_sums(const RewardFunction& g) const;
};

/// Path i uses substream i; inverse-CDF transitions.
PathBatch sample_paths(const FiniteKernel& kernel, StateIndex x0, std::size_t n, std::size_t m, std::uint64_t seed);

struct EntropicEstimate {
    /// ln(mean_j e^{S_n^{(j)}}) / n. Biased downwards for finite m (Jensen).
    double estimate = 0.0;
    /// Bootstrap standard deviation of the estimate.
    double std_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t paths = 0;
    std::size_t horizon = 0;
    std::size_t resamples = 0;
};

/// Plug-in estimate of mu_{x0}(S_n) / n with a percentile bootstrap interval
/// (95%). With m = 1 the estimate is S_n / n and the interval is degenerate.
EntropicEstimate mc_entropic_estimate(const FiniteKernel& kernel, const RewardFunction& g, StateIndex x0,
                                      std::size_t n, std::size_t m, std::uint64_t seed,
                                      std::size_t resamples = 1000);

/// Probability masses on offset + k * step, k = 0 .. size-1.
struct LatticeDistribution {
    double step = 1.0;
    double offset = 0.0;
    std::vector<double> probabilities;

    double value(std::size_t k) const { return offset + static_cast<double>(k) * step; }
    double mean() const;
};

/// Common grid for the reward values: value(x) = base + k(x) * step with
/// integer k(x) >= 0. Throws NonLatticeReward when the nonzero differences
/// are not rational multiples of each other (denominators up to 1e6, error
/// 1e-9).
struct RewardLattice {
    double base = 0.0;
    double step = 1.0;
    std::vector<long> units;
};
RewardLattice detect_lattice(const RewardFunction& g);

/// Exact law of S_n = sum_{i<n} g(x_i) started at x0. Requires n * max units
/// <= 1e7.
LatticeDistribution partial_sum_distribution(const FiniteKernel& kernel, const RewardFunction& g, StateIndex x0,
                                             std::size_t n);

enum class Dominance { Dominates, DominatedBy, Incomparable, Equal };
std::string_view to_string(Dominance d);

/// First-order dominance: first dominates second iff CDF_first <= CDF_second
/// + 1e-12 at every support point, strictly somewhere.
Dominance stochastic_dominance(const LatticeDistribution& first, const LatticeDistribution& second);

}  // namespace mpelab
