#include "mpelab/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <numeric>
#include <string>
#include <thread>

namespace mpelab {

std::size_t worker_count() {
    if (const char* env = std::getenv("MPELAB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body) {
    const std::size_t workers = std::min(worker_count(), std::max<std::size_t>(count, 1));
    if (workers <= 1) {
        body(0, count);
        return;
    }
    const std::size_t chunk = (count + workers - 1) / workers;
    std::exception_ptr failure;
    std::mutex guard;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        threads.emplace_back([&, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                const std::lock_guard lock(guard);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
}

namespace {

// Stream ids above 2^63 are reserved for auxiliary draws such as bootstrap
// resampling, keeping them disjoint from path streams.
constexpr std::uint64_t kAuxiliaryStreams = std::uint64_t{1} << 63;

// Cumulative rows for inverse-CDF sampling.
struct TransitionSampler {
    explicit TransitionSampler(const FiniteKernel& kernel) : n(kernel.size()), cumulative(n * n) {
        for (std::size_t x = 0; x < n; ++x) {
            double acc = 0.0;
            for (std::size_t y = 0; y < n; ++y) {
                acc += kernel(x, y);
                cumulative[x * n + y] = acc;
            }
            // Guard the last nonzero entry against round-off below 1.
            for (std::size_t y = n; y-- > 0;) {
                if (kernel(x, y) > 0.0) {
                    for (std::size_t z = y; z < n; ++z) cumulative[x * n + z] = 1.0;
                    break;
                }
            }
        }
    }

    StateIndex step(StateIndex x, double u) const {
        const auto first = cumulative.begin() + static_cast<std::ptrdiff_t>(x * n);
        const auto it = std::upper_bound(first, first + static_cast<std::ptrdiff_t>(n), u);
        return static_cast<StateIndex>(it - first);
    }

    std::size_t n;
    std::vector<double> cumulative;
};

void check_sizes(std::size_t n, std::size_t m) {
    if (n == 0 || m == 0) throw Error(ErrorCode::BadParameters, "horizon and path count must be at least 1");
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
    constexpr std::uint64_t kMul0 = 0xD2511F53;
    constexpr std::uint64_t kMul1 = 0xCD9E8D57;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = kMul0 * ctr[0];
        const std::uint64_t p1 = kMul1 * ctr[2];
        ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
               static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

StreamRng::StreamRng(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, stream_(stream) {}

std::uint64_t StreamRng::next() {
    if (used_ == 4) {
        buffer_ = philox4x32_10({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                 static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                                key_);
        ++block_;
        used_ = 0;
    }
    const std::uint64_t out = (std::uint64_t{buffer_[used_]} << 32) | buffer_[used_ + 1];
    used_ += 2;
    return out;
}

std::vector<double> PathBatch::reward_sums(const RewardFunction& g) const {
    std::vector<double> sums(paths, 0.0);
    for (std::size_t p = 0; p < paths; ++p) {
        double s = 0.0;
        for (std::size_t t = 0; t < horizon; ++t) s += g[state(p, t)];
        sums[p] = s;
    }
    return sums;
}

PathBatch sample_paths(const FiniteKernel& kernel, StateIndex x0, std::size_t n, std::size_t m, std::uint64_t seed) {
    kernel.check_state(x0);
    check_sizes(n, m);
    PathBatch batch;
    batch.seed = seed;
    batch.horizon = n;
    batch.paths = m;
    batch.start = x0;
    batch.states.resize(m * (n + 1));
    const TransitionSampler sampler(kernel);
    parallel_for(m, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            StreamRng rng(seed, p);
            StateIndex x = x0;
            StateIndex* row = batch.states.data() + p * (n + 1);
            row[0] = x;
            for (std::size_t t = 1; t <= n; ++t) {
                x = sampler.step(x, rng.uniform());
                row[t] = x;
            }
        }
    });
    return batch;
}

EntropicEstimate mc_entropic_estimate(const FiniteKernel& kernel, const RewardFunction& g, StateIndex x0,
                                      std::size_t n, std::size_t m, std::uint64_t seed, std::size_t resamples) {
    kernel.check_state(x0);
    check_sizes(n, m);
    if (g.size() != kernel.size()) throw Error(ErrorCode::DimensionMismatch, "reward does not match kernel");

    // Same substreams as sample_paths, so the sums agree with a PathBatch.
    std::vector<double> sums(m);
    const TransitionSampler sampler(kernel);
    parallel_for(m, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            StreamRng rng(seed, p);
            StateIndex x = x0;
            double s = g[x];
            for (std::size_t t = 1; t < n; ++t) {
                x = sampler.step(x, rng.uniform());
                s += g[x];
            }
            sums[p] = s;
        }
    });

    const double top = *std::max_element(sums.begin(), sums.end());
    std::vector<double> scaled(m);
    for (std::size_t p = 0; p < m; ++p) scaled[p] = std::exp(sums[p] - top);
    const double horizon = static_cast<double>(n);
    auto estimate_from = [&](double mean_scaled) { return (top + std::log(mean_scaled)) / horizon; };

    EntropicEstimate out;
    out.paths = m;
    out.horizon = n;
    out.resamples = resamples;
    out.estimate = estimate_from(std::accumulate(scaled.begin(), scaled.end(), 0.0) / static_cast<double>(m));
    out.ci_low = out.ci_high = out.estimate;
    if (resamples == 0 || m == 1) return out;

    std::vector<double> boot(resamples);
    parallel_for(resamples, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            StreamRng rng(seed, kAuxiliaryStreams + r);
            double acc = 0.0;
            for (std::size_t j = 0; j < m; ++j) acc += scaled[static_cast<std::size_t>(rng.uniform() * static_cast<double>(m))];
            boot[r] = estimate_from(acc / static_cast<double>(m));
        }
    });
    // Deviations from the first draw keep identical resamples at exactly 0.
    double shift_sum = 0.0;
    for (double b : boot) shift_sum += b - boot[0];
    const double mean_shift = shift_sum / static_cast<double>(resamples);
    double var = 0.0;
    for (double b : boot) var += (b - boot[0] - mean_shift) * (b - boot[0] - mean_shift);
    out.std_error = resamples > 1 ? std::sqrt(var / static_cast<double>(resamples - 1)) : 0.0;
    std::sort(boot.begin(), boot.end());
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(resamples - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, resamples - 1);
        return boot[lo] + (pos - static_cast<double>(lo)) * (boot[hi] - boot[lo]);
    };
    out.ci_low = quantile(0.025);
    out.ci_high = quantile(0.975);
    return out;
}

double LatticeDistribution::mean() const {
    double acc = 0.0;
    for (std::size_t k = 0; k < probabilities.size(); ++k) acc += probabilities[k] * value(k);
    return acc;
}

namespace {

struct Fraction {
    long num = 0;
    long den = 1;
};

// Best continued-fraction approximation of x with denominator <= max_den
// whose error is below tol; nullopt otherwise.
std::optional<Fraction> rational_approximation(double x, long max_den, double tol) {
    long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double rest = x;
    for (int iter = 0; iter < 64; ++iter) {
        const double a_real = std::floor(rest);
        if (std::abs(a_real) > 1e15) break;
        const auto a = static_cast<long>(a_real);
        const long h2 = a * h1 + h0;
        const long k2 = a * k1 + k0;
        if (k2 > max_den) break;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        if (std::abs(x - static_cast<double>(h1) / static_cast<double>(k1)) <= tol * std::max(1.0, std::abs(x))) {
            return Fraction{h1, k1};
        }
        const double frac = rest - a_real;
        if (frac < 1e-300) break;
        rest = 1.0 / frac;
    }
    return std::nullopt;
}

}  // namespace

RewardLattice detect_lattice(const RewardFunction& g) {
    if (g.size() == 0) throw Error(ErrorCode::BadParameters, "empty reward");
    RewardLattice out;
    out.base = g.values().minCoeff();
    out.units.assign(g.size(), 0);
    double unit = 0.0;
    for (std::size_t x = 0; x < g.size(); ++x) {
        const double d = g[x] - out.base;
        if (d > 0.0 && (unit == 0.0 || d < unit)) unit = d;
    }
    if (unit == 0.0) return out;

    long common = 1;
    std::vector<Fraction> ratios(g.size());
    for (std::size_t x = 0; x < g.size(); ++x) {
        const double d = g[x] - out.base;
        if (d == 0.0) continue;
        const auto frac = rational_approximation(d / unit, 1000000, 1e-9);
        if (!frac) {
            throw Error(ErrorCode::NonLatticeReward,
                        "reward differences " + std::to_string(d) + " and " + std::to_string(unit) + " are incommensurable");
        }
        ratios[x] = *frac;
        common = std::lcm(common, frac->den);
        if (common > 1000000) throw Error(ErrorCode::NonLatticeReward, "lattice denominator exceeds 1e6");
    }
    out.step = unit / static_cast<double>(common);
    for (std::size_t x = 0; x < g.size(); ++x) {
        if (g[x] == out.base) continue;
        out.units[x] = ratios[x].num * (common / ratios[x].den);
    }
    return out;
}

LatticeDistribution partial_sum_distribution(const FiniteKernel& kernel, const RewardFunction& g, StateIndex x0,
                                             std::size_t n) {
    kernel.check_state(x0);
    if (g.size() != kernel.size()) throw Error(ErrorCode::DimensionMismatch, "reward does not match kernel");
    if (n == 0) throw Error(ErrorCode::BadParameters, "horizon must be at least 1");
    const RewardLattice lattice = detect_lattice(g);
    const long top_unit = *std::max_element(lattice.units.begin(), lattice.units.end());
    const double points = static_cast<double>(n) * static_cast<double>(top_unit) + 1.0;
    if (points > 1e7) {
        throw Error(ErrorCode::NonLatticeReward, "reward lattice with step " + std::to_string(lattice.step) +
                                                     " needs more than 1e7 points at this horizon");
    }

    const auto m = static_cast<Eigen::Index>(kernel.size());
    const auto width = static_cast<Eigen::Index>(points);
    // mass(y, s): P[x_t = y, sum of units over x_0 .. x_{t-1} = s]
    Matrix mass = Matrix::Zero(m, width);
    mass(static_cast<Eigen::Index>(x0), 0) = 1.0;
    for (std::size_t t = 0; t < n; ++t) {
        Matrix shifted = Matrix::Zero(m, width);
        for (Eigen::Index y = 0; y < m; ++y) {
            const auto u = static_cast<Eigen::Index>(lattice.units[static_cast<std::size_t>(y)]);
            shifted.row(y).tail(width - u) = mass.row(y).head(width - u);
        }
        mass = t + 1 < n ? Matrix(kernel.matrix().transpose() * shifted) : shifted;
    }

    LatticeDistribution out;
    out.step = lattice.step;
    out.offset = static_cast<double>(n) * lattice.base;
    const Vector law = mass.colwise().sum().transpose();
    out.probabilities.assign(law.data(), law.data() + law.size());
    while (out.probabilities.size() > 1 && out.probabilities.back() == 0.0) out.probabilities.pop_back();
    return out;
}

std::string_view to_string(Dominance d) {
    switch (d) {
        case Dominance::Dominates: return "Dominates";
        case Dominance::DominatedBy: return "DominatedBy";
        case Dominance::Incomparable: return "Incomparable";
        case Dominance::Equal: return "Equal";
    }
    return "Incomparable";
}

Dominance stochastic_dominance(const LatticeDistribution& first, const LatticeDistribution& second) {
    constexpr double tol = 1e-12;
    struct Point {
        double value;
        double p1;
        double p2;
    };
    std::vector<Point> points;
    for (std::size_t k = 0; k < first.probabilities.size(); ++k) points.push_back({first.value(k), first.probabilities[k], 0.0});
    for (std::size_t k = 0; k < second.probabilities.size(); ++k) points.push_back({second.value(k), 0.0, second.probabilities[k]});
    std::sort(points.begin(), points.end(), [](const Point& a, const Point& b) { return a.value < b.value; });

    bool first_below = false;
    bool second_below = false;
    double cdf1 = 0.0;
    double cdf2 = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        cdf1 += points[i].p1;
        cdf2 += points[i].p2;
        // Lattice values closer than this are the same point.
        const bool last = i + 1 == points.size() ||
                          points[i + 1].value - points[i].value > 1e-9 * std::max(1.0, std::abs(points[i].value));
        if (!last) continue;
        if (cdf1 < cdf2 - tol) first_below = true;
        if (cdf2 < cdf1 - tol) second_below = true;
    }
    if (first_below && second_below) return Dominance::Incomparable;
    if (first_below) return Dominance::Dominates;
    if (second_below) return Dominance::DominatedBy;
    return Dominance::Equal;
}

}  // namespace mpelab
