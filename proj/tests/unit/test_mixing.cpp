#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "mpelab/mixing.hpp"

using namespace mpelab;

namespace {

Matrix cyclic_three_matrix() {
    Matrix p(3, 3);
    p << 0.0, 0.5, 0.5, 0.5, 0.0, 0.5, 0.5, 0.5, 0.0;
    return p;
}

// sup over subsets B and pairs of rows of |P(x, B) - P(x', B)|.
double brute_force_dobrushin(const Matrix& p) {
    const auto n = static_cast<std::uint32_t>(p.rows());
    double best = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        Vector mass = Vector::Zero(p.rows());
        for (std::uint32_t y = 0; y < n; ++y) {
            if (mask & (1u << y)) mass += p.col(y);
        }
        best = std::max(best, mass.maxCoeff() - mass.minCoeff());
    }
    return best;
}

// Set version of the strong mixing ratio with 0/0 = 0, c/0 = infinity.
double brute_force_ratio(const Matrix& p) {
    const auto n = static_cast<std::uint32_t>(p.rows());
    double best = 0.0;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        Vector mass = Vector::Zero(p.rows());
        for (std::uint32_t y = 0; y < n; ++y) {
            if (mask & (1u << y)) mass += p.col(y);
        }
        const double hi = mass.maxCoeff();
        const double lo = mass.minCoeff();
        if (hi == 0.0) continue;
        best = std::max(best, lo == 0.0 ? kInfinity : hi / lo);
    }
    return best;
}

}  // namespace

TEST_CASE("dobrushin coefficient") {
    CHECK(dobrushin_coefficient(build_kernel(cyclic_three_matrix()), 1) == doctest::Approx(0.5));
    CHECK(dobrushin_coefficient(build_kernel(fixtures::two_state_matrix(0.3)), 1) == doctest::Approx(0.3));
    Matrix rank_one(3, 3);
    rank_one.rowwise() = Eigen::RowVector3d(0.2, 0.3, 0.5);
    for (std::size_t n = 1; n <= 3; ++n) CHECK(dobrushin_coefficient(build_kernel(rank_one), n) == 0.0);

    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 80; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 9);
        const Matrix p = trial % 2 ? fixtures::sparse_matrix(n, rng) : fixtures::dirichlet_matrix(n, rng);
        CHECK(std::abs(dobrushin_coefficient(p) - brute_force_dobrushin(p)) < 1e-12);
    }
}

TEST_CASE("minorization") {
    const auto cyc = build_kernel(cyclic_three_matrix());
    const auto one = minorization(cyc, 1);
    CHECK(one.d == 0.0);
    CHECK_FALSE(one.eta.has_value());
    const auto two = minorization(cyc, 2);
    CHECK(two.d == doctest::Approx(0.75));
    REQUIRE(two.eta.has_value());
    for (StateIndex y = 0; y < 3; ++y) CHECK((*two.eta)[y] == doctest::Approx(1.0 / 3.0));

    Matrix rank_one(3, 3);
    rank_one.rowwise() = Eigen::RowVector3d(0.2, 0.3, 0.5);
    const auto r = minorization(build_kernel(rank_one), 1);
    CHECK(r.d == doctest::Approx(1.0));
    CHECK((*r.eta)[2] == doctest::Approx(0.5));
}

TEST_CASE("strong mixing ratio") {
    Matrix rank_one(2, 2);
    rank_one << 0.4, 0.6, 0.4, 0.6;
    CHECK(strong_mixing_ratio(build_kernel(rank_one), 1) == doctest::Approx(1.0));

    Matrix pos(2, 2);
    pos << 0.9, 0.1, 0.5, 0.5;
    CHECK(strong_mixing_ratio(build_kernel(pos), 1) == doctest::Approx(5.0));
    CHECK(std::isinf(strong_mixing_ratio(build_kernel(fixtures::two_state_matrix(0.5)), 1)));

    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 80; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 9);
        const Matrix p = trial % 2 ? fixtures::sparse_matrix(n, rng) : fixtures::dirichlet_matrix(n, rng);
        const double singleton = strong_mixing_ratio(p);
        const double sets = brute_force_ratio(p);
        if (std::isinf(sets)) {
            CHECK(std::isinf(singleton));
        } else {
            CHECK(std::abs(singleton - sets) < 1e-9 * sets);
        }
        // A finite ratio forces every row to share one support.
        if (std::isfinite(singleton)) {
            for (Eigen::Index y = 0; y < p.cols(); ++y) {
                const bool any = (p.col(y).array() > 0.0).any();
                const bool all = (p.col(y).array() > 0.0).all();
                CHECK(any == all);
            }
        }
    }
}

TEST_CASE("strong mixing ratio survives underflow") {
    // Shift chain: P_n(2, n + 2) = 2^{-n(n+1)/2} underflows past n ~ 45
    // while P_n(1, n + 2) = 0, so the ratio stays infinite.
    const std::size_t n = 64;
    Matrix p = Matrix::Zero(n, n);
    p(0, 0) = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        const double forward = std::ldexp(1.0, -static_cast<int>(i));
        if (i + 1 < n) {
            p(r, 0) = 1.0 - forward;
            p(r, r + 1) = forward;
        } else {
            p(r, 0) = 1.0;
        }
    }
    const auto k = build_kernel(p);
    for (std::size_t steps : {45u, 50u, 62u}) CHECK(std::isinf(strong_mixing_ratio(k, steps)));

    // Every entry of P^2 is positive but column 1 holds e^2 = 1e-340.
    const double e = 1e-170;
    Matrix cyc(3, 3);
    cyc << 1 - e, e, 0, 0, 1 - e, e, e, 0, 1 - e;
    const auto kc = build_kernel(cyc);
    CHECK(iterate_kernel(kc, 2).matrix().minCoeff() == 0.0);
    CHECK(strong_mixing_ratio(kc, 2) > 1e300);
    // Without underflow the kernel overload matches the matrix overload.
    Matrix mild(3, 3);
    mild << 0.5, 0.5, 0, 0, 0.5, 0.5, 0.5, 0, 0.5;
    CHECK(strong_mixing_ratio(build_kernel(mild), 2) ==
          doctest::Approx(strong_mixing_ratio(iterate_kernel(build_kernel(mild), 2).matrix())));
}

TEST_CASE("mixing relations hold on random kernels") {
    const auto cyc = check_relations(build_kernel(cyclic_three_matrix()), 4);
    CHECK(cyc.max_violation < 1e-12);

    Matrix rank_one(3, 3);
    rank_one.rowwise() = Eigen::RowVector3d(0.2, 0.3, 0.5);
    const auto r = check_relations(build_kernel(rank_one), 4);
    CHECK(r.lambda.at(3) == 0.0);
    CHECK(r.d.at(3) == doctest::Approx(1.0));

    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 3 + static_cast<std::size_t>(trial % 8);
        const Matrix p = trial % 3 ? fixtures::dirichlet_matrix(n, rng) : fixtures::sparse_matrix(n, rng);
        CHECK_NOTHROW(check_relations(build_kernel(p), 4));
    }
}

TEST_CASE("mixing report") {
    const auto report = mixing_report(build_kernel(cyclic_three_matrix()), 3);
    CHECK(report.lambda.size() == 3);
    CHECK(report.lambda.at(2) == doctest::Approx(0.25));
    CHECK(report.minorization.at(2).d == doctest::Approx(0.75));
    CHECK(std::isinf(report.strong_ratio.at(1)));
    CHECK(report.strong_ratio.at(2) == doctest::Approx(2.0));
}
