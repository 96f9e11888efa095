#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "mpelab/ergodic.hpp"
#include "mpelab/simulate.hpp"

using namespace mpelab;

namespace {

Matrix cyclic_three_matrix() {
    Matrix p(3, 3);
    p << 0.0, 0.5, 0.5, 0.5, 0.0, 0.5, 0.5, 0.5, 0.0;
    return p;
}

// ln E_x exp(sum_{i<n} g(x_i)) by summing over all paths.
double enumerate_entropic_value(const Matrix& p, const Vector& g, StateIndex x, std::size_t n) {
    if (n == 1) return g(static_cast<Eigen::Index>(x));
    double acc = 0.0;
    for (Eigen::Index y = 0; y < p.cols(); ++y) {
        const double step = p(static_cast<Eigen::Index>(x), y);
        if (step > 0.0) acc += step * std::exp(enumerate_entropic_value(p, g, static_cast<StateIndex>(y), n - 1));
    }
    return g(static_cast<Eigen::Index>(x)) + std::log(acc);
}

void enumerate_visits(const Matrix& p, const std::vector<bool>& in, StateIndex x, std::size_t remaining,
                      std::size_t count, double prob, std::vector<double>& law) {
    if (remaining == 0) {
        law[count] += prob;
        return;
    }
    for (Eigen::Index y = 0; y < p.cols(); ++y) {
        const double step = p(static_cast<Eigen::Index>(x), y);
        if (step == 0.0) continue;
        enumerate_visits(p, in, static_cast<StateIndex>(y), remaining - 1, count + (in[static_cast<std::size_t>(y)] ? 1 : 0),
                         prob * step, law);
    }
}

}  // namespace

TEST_CASE("risk sensitive averages") {
    const auto k = build_kernel(fixtures::two_state_matrix(0.5));
    for (std::size_t n : {1u, 2u, 7u}) {
        for (StateIndex x = 0; x < 2; ++x) {
            CHECK(risk_sensitive_average(k, RewardFunction::constant(2, 1.25), x, n) == doctest::Approx(1.25));
        }
    }
    const RewardFunction g{0.0, std::log(3.0)};
    CHECK(risk_sensitive_average(k, g, 1, 1) == doctest::Approx(std::log(3.0)));
    // Spans along the two-state recursion: e^{u_n} = sum_{i<n}(k/2)^i + 2(k/2)^n.
    for (std::size_t n = 1; n <= 12; ++n) {
        double e_u = 2.0 * std::pow(1.5, static_cast<double>(n));
        for (std::size_t i = 1; i < n; ++i) e_u += std::pow(1.5, static_cast<double>(i));
        CHECK(risk_sensitive_average(k, g, 1, n) * static_cast<double>(n) == doctest::Approx(std::log(e_u)));
        CHECK(risk_sensitive_average(k, g, 0, n) == 0.0);
    }

    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n_states = 2 + static_cast<std::size_t>(trial % 3);
        const Matrix p = fixtures::sparse_matrix(n_states, rng);
        const auto kk = build_kernel(p);
        const Vector gg = fixtures::uniform_vector(n_states, -1.0, 1.0, rng);
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 5);
        for (StateIndex x = 0; x < n_states; ++x) {
            const double dp = risk_sensitive_average(kk, RewardFunction(gg), x, n);
            CHECK(dp * static_cast<double>(n) == doctest::Approx(enumerate_entropic_value(p, gg, x, n)).epsilon(1e-12));
            const double shifted = risk_sensitive_average(kk, RewardFunction(Vector(gg.array() + 0.75)), x, n);
            CHECK(std::abs(shifted - dp - 0.75) < 1e-12);
        }
    }
}

TEST_CASE("lambda convergence envelope") {
    const auto k = build_kernel(fixtures::two_state_matrix(0.5));
    const RewardFunction g{0.0, std::log(1.5)};
    const auto sol = solve_mpe(k, g);
    REQUIRE(sol.status == SolveStatus::Solved);
    CHECK(lambda_convergence_check(k, g, sol, 200) <= 1e-8);

    const auto cyc = build_kernel(cyclic_three_matrix());
    const auto flat = solve_mpe(cyc, RewardFunction::constant(3, 0.3));
    CHECK(lambda_convergence_check(cyc, RewardFunction::constant(3, 0.3), flat, 50) <= 1e-12);

    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 20; ++trial) {
        const RewardFunction gg(fixtures::uniform_vector(3, -2.0, 2.0, rng));
        const auto s = solve_mpe(cyc, gg);
        REQUIRE(s.status == SolveStatus::Solved);
        CHECK(lambda_convergence_check(cyc, gg, s, 200) <= 1e-8);
    }

    const auto trace = average_trace(cyc, RewardFunction{1.0, 0.0, 0.0}, {0, 2}, 10);
    CHECK(trace.values.size() == 10);
    CHECK(trace.values[0][0] == 1.0);
    CHECK_FALSE(trace.lambda.has_value());

    SolveOptions opts;
    opts.max_iter = 2;
    opts.certify = false;
    const auto unfinished = solve_mpe(k, RewardFunction{0.0, std::log(1.9)}, opts);
    CHECK_THROWS_AS(lambda_convergence_check(k, RewardFunction{0.0, std::log(1.9)}, unfinished, 5), Error);
}

TEST_CASE("geometric escape test") {
    const auto k = build_kernel(fixtures::two_state_matrix(0.5));
    const auto r = escape_geometric_test(k, {0}, {0.25, 0.5, 0.75}, 200);
    CHECK_FALSE(r[0].passed);
    CHECK(r[1].passed);  // tail 2^-n equals alpha^n at n = 1
    CHECK(r[1].n == 1);
    CHECK(r[2].passed);

    Matrix chain(3, 3);
    chain << 1, 0, 0, 1, 0, 0, 0, 1, 0;
    const auto acyclic = escape_geometric_test(build_kernel(chain), {0}, {0.9, 0.5, 0.1}, 50);
    for (const auto& e : acyclic) {
        CHECK(e.passed);
        CHECK(e.n == 2);
    }

    const auto whole = escape_geometric_test(k, {0, 1}, {0.1}, 10);
    CHECK(whole[0].passed);
    CHECK(whole[0].vacuous);
    CHECK_THROWS_AS(escape_geometric_test(k, {0}, {1.0}, 10), Error);
}

TEST_CASE("visit counts") {
    const auto k = build_kernel(fixtures::two_state_matrix(0.5));
    const auto law = visit_count_tail(k, {1}, 1, 3);
    REQUIRE(law.size() == 4);
    CHECK(law[0] == doctest::Approx(0.5));
    CHECK(law[1] == doctest::Approx(0.25));
    CHECK(law[2] == doctest::Approx(0.125));
    CHECK(law[3] == doctest::Approx(0.125));

    const auto none = visit_count_tail(k, {}, 1, 5);
    CHECK(none[0] == 1.0);
    const auto all = visit_count_tail(k, {0, 1}, 1, 5);
    CHECK(all[5] == 1.0);
    CHECK_THROWS_AS(visit_count_tail(k, {1}, 1, 1001), Error);

    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n_states = 2 + static_cast<std::size_t>(trial % 3);
        const Matrix p = fixtures::sparse_matrix(n_states, rng);
        const StateSet visits{static_cast<StateIndex>(trial % n_states)};
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 5);
        std::vector<double> exact(n + 1, 0.0);
        enumerate_visits(p, membership(visits, n_states), 0, n, 0, 1.0, exact);
        const auto dp = visit_count_tail(build_kernel(p), visits, 0, n);
        double total = 0.0;
        for (std::size_t c = 0; c <= n; ++c) {
            CHECK(std::abs(dp[c] - exact[c]) < 1e-14);
            total += dp[c];
        }
        CHECK(std::abs(total - 1.0) < 1e-12);
    }
}

TEST_CASE("visit counts and taboo tails agree with simulation") {
    const auto k = build_kernel(cyclic_three_matrix());
    const std::size_t n = 8;
    const std::size_t m = 40000;
    const auto batch = sample_paths(k, 0, n, m, 123);
    const auto law = visit_count_tail(k, {1}, 0, n);
    std::vector<double> freq(n + 1, 0.0);
    double avoided = 0.0;
    for (std::size_t path = 0; path < m; ++path) {
        std::size_t count = 0;
        bool hit = false;
        for (std::size_t t = 1; t <= n; ++t) {
            if (batch.state(path, t) == 1) {
                ++count;
                hit = true;
            }
        }
        freq[count] += 1.0 / static_cast<double>(m);
        if (!hit) avoided += 1.0 / static_cast<double>(m);
    }
    for (std::size_t c = 0; c <= n; ++c) {
        const double sigma = std::sqrt(law[c] * (1.0 - law[c]) / static_cast<double>(m));
        CHECK(std::abs(freq[c] - law[c]) <= 4.0 * sigma + 1e-12);
    }
    const double tail = taboo_tail(k, {1}, 0, n);
    CHECK(std::abs(avoided - tail) <= 4.0 * std::sqrt(tail * (1.0 - tail) / static_cast<double>(m)) + 1e-12);
}
