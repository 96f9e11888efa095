#pragma once

#include <cstdint>
#include <random>

#include "mpelab/kernel.hpp"

namespace fixtures {

using mpelab::Matrix;
using mpelab::Vector;

inline Matrix two_state_matrix(double stay) {
    Matrix p(2, 2);
    p << 1.0, 0.0, 1.0 - stay, stay;
    return p;
}

/// Rows drawn from a flat Dirichlet distribution.
inline Matrix dirichlet_matrix(std::size_t n, std::mt19937_64& rng) {
    std::gamma_distribution<double> gamma(1.0, 1.0);
    const auto m = static_cast<Eigen::Index>(n);
    Matrix p(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) p(i, j) = gamma(rng);
        p.row(i) /= p.row(i).sum();
    }
    return p;
}

/// Dirichlet rows with roughly a third of the entries zeroed, keeping each
/// row nonempty.
inline Matrix sparse_matrix(std::size_t n, std::mt19937_64& rng) {
    Matrix p = dirichlet_matrix(n, rng);
    std::bernoulli_distribution drop(0.35);
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        for (Eigen::Index j = 0; j < p.cols(); ++j) {
            if (drop(rng)) p(i, j) = 0.0;
        }
        if (p.row(i).sum() == 0.0) p(i, i) = 1.0;
        p.row(i) /= p.row(i).sum();
    }
    return p;
}

inline Vector uniform_vector(std::size_t n, double lo, double hi, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = u(rng);
    return v;
}

inline mpelab::Distribution random_distribution(std::size_t n, std::mt19937_64& rng) {
    std::gamma_distribution<double> gamma(1.0, 1.0);
    Vector w(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = gamma(rng);
    return mpelab::Distribution(w / w.sum());
}

}  // namespace fixtures
