#include "mpelab/mpe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "mpelab/mixing.hpp"

namespace mpelab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRadiusTieTolerance = 1e-9;

void check_reward(const FiniteKernel& kernel, const Vector& g, const char* what) {
    if (static_cast<std::size_t>(g.size()) != kernel.size()) {
        throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has " + std::to_string(g.size()) +
                                                      " entries, kernel has " + std::to_string(kernel.size()) +
                                                      " states");
    }
}

}  // namespace

std::string_view to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Solved: return "Solved";
        case SolveStatus::Diverged: return "Diverged";
        case SolveStatus::Inconclusive: return "Inconclusive";
    }
    return "Unknown";
}

std::string_view to_string(DivergenceReason reason) {
    switch (reason) {
        case DivergenceReason::None: return "none";
        case DivergenceReason::SpanCap: return "span-cap";
        case DivergenceReason::SpectralCertificate: return "spectral-certificate";
    }
    return "unknown";
}

std::string_view to_string(ExistenceClass c) {
    switch (c) {
        case ExistenceClass::AllG: return "AllG";
        case ExistenceClass::NotAllG: return "NotAllG";
        case ExistenceClass::Unknown: return "Unknown";
    }
    return "Unknown";
}

double span_seminorm(const Vector& f) {
    if (f.size() == 0) return 0.0;
    return (f.maxCoeff() - f.minCoeff()) / 2.0;
}

Vector apply_T(const FiniteKernel& kernel, const Vector& g, const Vector& f) {
    check_reward(kernel, g, "reward");
    return g + entropic_utility(kernel, f);
}

double verify_mpe(const FiniteKernel& kernel, const Vector& g, const Vector& w, double lambda) {
    check_reward(kernel, g, "reward");
    check_reward(kernel, w, "solution");
    const Vector mu = entropic_utility(kernel, w);
    return (w - g + Vector::Constant(w.size(), lambda) - mu).cwiseAbs().maxCoeff();
}

void SolveOptions::validate(std::size_t n_states) const {
    if (!(tol > 0.0)) throw Error(ErrorCode::BadParameters, "tol must be positive");
    if (!(span_cap > 1.0)) throw Error(ErrorCode::BadParameters, "span_cap must exceed 1");
    if (max_iter == 0) throw Error(ErrorCode::BadParameters, "max_iter must be at least 1");
    if (anchor && *anchor >= n_states) {
        throw Error(ErrorCode::InvalidState, "anchor state " + std::to_string(*anchor) + " out of range");
    }
}

MpeSolution solve_mpe(const FiniteKernel& kernel, const RewardFunction& g, const SolveOptions& opts) {
    check_reward(kernel, g, "reward");
    opts.validate(kernel.size());

    MpeSolution out;
    const auto n = static_cast<Eigen::Index>(kernel.size());
    Vector f = Vector::Zero(n);
    out.trace.reserve(std::min<std::size_t>(opts.max_iter, 1u << 16));

    for (std::size_t it = 1; it <= opts.max_iter; ++it) {
        Vector next = apply_T(kernel, g, f);
        const double shift = opts.anchor ? next(static_cast<Eigen::Index>(*opts.anchor)) : next.minCoeff();
        next.array() -= shift;
        const double span = span_seminorm(next);
        const double step = span_seminorm(next - f);
        out.trace.push_back(span);
        out.iterations = it;
        f = std::move(next);
        if (!std::isfinite(span) || span > opts.span_cap) {
            out.status = SolveStatus::Diverged;
            out.reason = DivergenceReason::SpanCap;
            break;
        }
        if (step < opts.tol) {
            out.status = SolveStatus::Solved;
            break;
        }
    }

    f.array() -= f.minCoeff();
    out.w = f;
    if (out.status == SolveStatus::Diverged) {
        out.lambda = kInf;
        out.residual = kInf;
        return out;
    }
    const Vector tf = apply_T(kernel, g, f);
    out.lambda = (tf - f).mean();
    out.residual = verify_mpe(kernel, g, f, out.lambda);

    if (out.status == SolveStatus::Inconclusive && opts.certify && kernel.size() <= 4000) {
        const SpectralCertificate cert = spectral_certificate(kernel, g);
        if (!cert.bounded_solution) {
            out.status = SolveStatus::Diverged;
            out.reason = DivergenceReason::SpectralCertificate;
        }
    }
    return out;
}

double sharp_bound(double dobrushin) {
    if (!(dobrushin > 0.0 && dobrushin < 1.0)) {
        throw Error(ErrorCode::DomainError, "sharp bound needs an argument in (0, 1), got " + std::to_string(dobrushin));
    }
    return -0.5 * std::log(dobrushin);
}

double sharp_bound_minorization(double d) {
    if (!(d > 0.0 && d < 1.0)) {
        throw Error(ErrorCode::DomainError, "minorization constant must lie in (0, 1), got " + std::to_string(d));
    }
    return -0.5 * std::log1p(-d);
}

ExistenceGuarantee guaranteed_existence(const FiniteKernel& kernel, const RewardFunction& g, std::size_t n_max) {
    check_reward(kernel, g, "reward");
    if (n_max == 0) throw Error(ErrorCode::BadParameters, "n_max must be at least 1");
    const double sp = span_seminorm(g.values());
    if (sp == 0.0) return {true, 1};
    Matrix power = kernel.matrix();
    for (std::size_t n = 1; n <= n_max; ++n) {
        if (n > 1) power = power * kernel.matrix();
        const double lam = dobrushin_coefficient(power);
        const double bound = lam <= 0.0 ? kInf : -0.5 * std::log(lam);
        if (static_cast<double>(n) * sp < bound) return {true, n};
    }
    return {false, 0};
}

double iterate_span_envelope(double dobrushin, double span_g, std::size_t n) {
    if (n == 0) return 0.0;
    const double q = dobrushin * std::exp(2.0 * span_g);
    double sum = 1.0;
    double term = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        term *= q;
        sum += term;
    }
    sum += dobrushin * term;
    return span_g + 0.5 * std::log(sum);
}

double iterate_span_limit(double dobrushin, double span_g) {
    const double q = dobrushin * std::exp(2.0 * span_g);
    if (q >= 1.0) return kInf;
    return span_g + 0.5 * std::log(1.0 / (1.0 - q));
}

ApeSolution solve_ape(const FiniteKernel& kernel, const RewardFunction& g) {
    check_reward(kernel, g, "reward");
    const Distribution nu = invariant_measure(kernel);
    const auto n = static_cast<Eigen::Index>(kernel.size());
    const Matrix& p = kernel.matrix();

    ApeSolution out;
    out.lambda = nu.weights().dot(g.values());
    Matrix system = Matrix::Identity(n, n) - p + Vector::Ones(n) * nu.weights().transpose();
    const Vector rhs = g.values() - Vector::Constant(n, out.lambda);
    const Eigen::PartialPivLU<Matrix> lu(system);
    Vector w = lu.solve(rhs);
    w += lu.solve(rhs - system * w);
    w.array() -= w.minCoeff();
    out.w = w;
    out.residual = (w - g.values() + Vector::Constant(n, out.lambda) - p * w).cwiseAbs().maxCoeff();
    return out;
}

double local_contraction_estimate(const FiniteKernel& kernel, const RewardFunction& g, double bound,
                                  std::size_t samples, std::uint64_t seed) {
    check_reward(kernel, g, "reward");
    if (!(bound > 0.0)) throw Error(ErrorCode::BadParameters, "oscillation bound must be positive");
    if (samples == 0) throw Error(ErrorCode::BadParameters, "samples must be at least 1");
    const auto n = static_cast<Eigen::Index>(kernel.size());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);

    // Corners of [0, bound]^n and nearby pairs matter most: the ratio is an
    // average of tilted weights along the segment between f1 and f2, so the
    // supremum is approached by short segments near a corner.
    auto draw = [&]() {
        Vector f(n);
        const bool corner = coin(rng);
        for (Eigen::Index i = 0; i < n; ++i) f(i) = corner ? (coin(rng) ? bound : 0.0) : bound * unit(rng);
        return f;
    };
    auto nearby = [&](const Vector& f) {
        Vector h(n);
        for (Eigen::Index i = 0; i < n; ++i) h(i) = std::clamp(f(i) + 1e-4 * bound * (2.0 * unit(rng) - 1.0), 0.0, bound);
        return h;
    };

    double worst = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const Vector f1 = draw();
        const Vector f2 = coin(rng) ? nearby(f1) : draw();
        const double denom = span_seminorm(f1 - f2);
        if (denom < 1e-12) continue;
        // g cancels in Tf1 - Tf2; dropping it avoids rounding noise.
        const double num = span_seminorm(entropic_utility(kernel, f1) - entropic_utility(kernel, f2));
        worst = std::max(worst, num / denom);
    }
    return worst;
}

namespace {

double log_spectral_radius(const Matrix& p, const Vector& g, const StateSet& states) {
    const auto m = static_cast<Eigen::Index>(states.size());
    if (m == 1) {
        const double stay = p(static_cast<Eigen::Index>(states[0]), static_cast<Eigen::Index>(states[0]));
        return stay > 0.0 ? g(static_cast<Eigen::Index>(states[0])) + std::log(stay) : -kInf;
    }
    double top = -kInf;
    for (StateIndex s : states) top = std::max(top, g(static_cast<Eigen::Index>(s)));
    Matrix a(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto si = static_cast<Eigen::Index>(states[static_cast<std::size_t>(i)]);
        const double scale = std::exp(g(si) - top);
        for (Eigen::Index j = 0; j < m; ++j) {
            a(i, j) = scale * p(si, static_cast<Eigen::Index>(states[static_cast<std::size_t>(j)]));
        }
    }
    const Eigen::EigenSolver<Matrix> solver(a, false);
    const double rho = solver.eigenvalues().cwiseAbs().maxCoeff();
    return rho > 0.0 ? top + std::log(rho) : -kInf;
}

}  // namespace

SpectralCertificate spectral_certificate(const FiniteKernel& kernel, const RewardFunction& g, std::size_t max_states) {
    check_reward(kernel, g, "reward");
    if (kernel.size() > max_states) {
        throw Error(ErrorCode::BadParameters, "spectral certificate limited to " + std::to_string(max_states) + " states");
    }
    const auto classes = communicating_classes(kernel);
    SpectralCertificate cert;
    double top = -kInf;
    for (const auto& c : classes) {
        cert.class_log_radius.push_back(log_spectral_radius(kernel.matrix(), g.values(), c.states));
        top = std::max(top, cert.class_log_radius.back());
    }
    const double tie = std::isfinite(top) ? kRadiusTieTolerance * std::max(1.0, std::abs(top)) : 0.0;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const bool basic = cert.class_log_radius[i] >= top - tie;
        if (basic && !classes[i].recurrent) cert.blocking_classes.push_back(i);
        if (!basic && classes[i].recurrent) cert.deficient_closed_classes.push_back(i);
    }
    cert.lambda = top;
    cert.bounded_solution = cert.blocking_classes.empty() && cert.deficient_closed_classes.empty();
    return cert;
}

namespace {

std::size_t class_period(const Matrix& p, const StateSet& cls) {
    const std::vector<bool> inside = membership(cls, static_cast<std::size_t>(p.rows()));
    std::vector<long> level(static_cast<std::size_t>(p.rows()), -1);
    std::vector<StateIndex> queue{cls.front()};
    level[cls.front()] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const StateIndex u = queue[head];
        for (StateIndex v : cls) {
            if (p(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) > 0.0 && level[v] < 0) {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    long period = 0;
    for (StateIndex u : cls) {
        for (StateIndex v : cls) {
            if (inside[v] && p(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) > 0.0) {
                period = std::gcd(period, std::abs(level[u] + 1 - level[v]));
            }
        }
    }
    return static_cast<std::size_t>(period);
}

// Smallest n with the n-step pattern strictly positive on the class, tracked
// with row bitsets; 0 when none exists up to the Wielandt bound.
std::size_t first_positive_power(const Matrix& p, const StateSet& cls) {
    const std::size_t m = cls.size();
    const std::size_t words = (m + 63) / 64;
    using Row = std::vector<std::uint64_t>;
    auto full = [&](const Row& r) {
        for (std::size_t k = 0; k < m; ++k) {
            if (!((r[k / 64] >> (k % 64)) & 1u)) return false;
        }
        return true;
    };
    std::vector<Row> step(m, Row(words, 0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (p(static_cast<Eigen::Index>(cls[i]), static_cast<Eigen::Index>(cls[j])) > 0.0) {
                step[i][j / 64] |= std::uint64_t{1} << (j % 64);
            }
        }
    }
    std::vector<Row> cur = step;
    const std::size_t limit = (m - 1) * (m - 1) + 1;
    for (std::size_t n = 1; n <= limit; ++n) {
        if (std::all_of(cur.begin(), cur.end(), full)) return n;
        std::vector<Row> next(m, Row(words, 0));
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t k = 0; k < m; ++k) {
                if ((cur[i][k / 64] >> (k % 64)) & 1u) {
                    for (std::size_t w = 0; w < words; ++w) next[i][w] |= step[k][w];
                }
            }
        }
        if (next == cur) return 0;
        cur = std::move(next);
    }
    return 0;
}

}  // namespace

Classification finite_existence_classifier(const FiniteKernel& kernel) {
    const auto classes = communicating_classes(kernel);
    const Matrix& p = kernel.matrix();
    const std::size_t n = kernel.size();
    Classification out;

    std::size_t closed = 0;
    for (const auto& c : classes) {
        if (c.recurrent) {
            ++closed;
            out.recurrent_class = c.states;
        }
    }
    if (closed != 1) {
        throw Error(ErrorCode::NonUniqueInvariant, std::to_string(closed) + " closed classes");
    }

    // A transient class that can hold the chain (self-loop or nontrivial
    // cycle) admits a reward without bounded solution.
    for (const auto& c : classes) {
        if (c.recurrent) continue;
        const bool sticky = c.states.size() > 1 ||
                            p(static_cast<Eigen::Index>(c.states[0]), static_cast<Eigen::Index>(c.states[0])) > 0.0;
        if (!sticky) continue;
        const double stay = std::exp(log_spectral_radius(p, Vector::Zero(static_cast<Eigen::Index>(n)), c.states));
        const double level = 2.0 * (std::log(2.0) - std::log(stay));
        Vector w = Vector::Zero(static_cast<Eigen::Index>(n));
        for (StateIndex s : c.states) w(static_cast<Eigen::Index>(s)) = level;
        out.verdict = ExistenceClass::NotAllG;
        out.witness = RewardFunction(std::move(w));
        out.witness_support = c.states;
        out.stay_rate = stay;
        out.detail = "transient class with stay rate " + std::to_string(stay);
        return out;
    }

    out.period = class_period(p, out.recurrent_class);
    if (out.period != 1) {
        out.verdict = ExistenceClass::Unknown;
        out.detail = "recurrent class has period " + std::to_string(out.period);
        return out;
    }
    out.positive_power = first_positive_power(p, out.recurrent_class);
    if (out.positive_power == 0) {
        out.verdict = ExistenceClass::Unknown;
        out.detail = "no strictly positive power on the recurrent class";
        return out;
    }
    out.verdict = ExistenceClass::AllG;
    out.detail = "acyclic transient part, P^" + std::to_string(out.positive_power) +
                 " strictly positive on the recurrent class";
    return out;
}

MinorizationDiagnostics minorization_diagnostics(const FiniteKernel& kernel, const RewardFunction& g,
                                                 std::size_t n_max, std::optional<double> epsilon) {
    check_reward(kernel, g, "reward");
    MinorizationDiagnostics out;
    out.d = minorization(kernel, 1).d;
    const double sp = span_seminorm(g.values());
    if (!(out.d > 0.0)) throw Error(ErrorCode::DomainError, "kernel has no one-step minorization");
    out.threshold = out.d < 1.0 ? sharp_bound_minorization(out.d) : kInf;
    if (sp >= out.threshold) {
        throw Error(ErrorCode::DomainError, "reward span " + std::to_string(sp) + " is not below " +
                                                std::to_string(out.threshold));
    }
    const double ceiling = std::exp(-2.0 * sp);
    double eps = epsilon.value_or(out.d / 4.0);
    if (epsilon) {
        if (!(eps > 0.0 && eps < out.d / 2.0 && 1.0 - out.d + 2.0 * eps < ceiling)) {
            throw Error(ErrorCode::DomainError, "epsilon " + std::to_string(eps) + " is not admissible");
        }
    } else {
        while (1.0 - out.d + 2.0 * eps >= ceiling) eps /= 2.0;
    }
    out.epsilon = eps;
    const double big_k = std::log(out.d - eps) - std::log(eps);

    const Matrix& p = kernel.matrix();
    Vector gn = g.values();
    for (std::size_t n = 1; n <= n_max; ++n) {
        MinorizationStep step;
        step.n = n;
        step.span = span_seminorm(gn);
        const double centre = -(gn.maxCoeff() + gn.minCoeff()) / 2.0;
        Vector escape(gn.size());
        for (Eigen::Index x = 0; x < gn.size(); ++x) {
            double mass = 0.0;
            for (Eigen::Index y = 0; y < gn.size(); ++y) {
                if (gn(y) + centre > 0.0) mass += p(x, y);
            }
            escape(x) = mass;
        }
        if (step.span <= big_k) {
            step.case_id = 1;
            step.next_bound = big_k + sp;
        } else if (escape.minCoeff() >= eps) {
            step.case_id = 2;
            step.next_bound = 0.5 * step.span + sp - 0.5 * std::log(eps);
        } else {
            step.case_id = 3;
            step.next_bound = step.span + sp + 0.5 * std::log(1.0 - out.d + 2.0 * eps);
        }
        gn = apply_T(kernel, g.values(), gn);
        gn.array() -= gn.minCoeff();
        step.next_span = span_seminorm(gn);
        out.steps.push_back(step);
    }
    return out;
}

}  // namespace mpelab
