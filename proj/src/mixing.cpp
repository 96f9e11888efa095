#include "mpelab/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace mpelab {

double dobrushin_coefficient(const Matrix& p) {
    double best = 0.0;
    for (Eigen::Index x = 0; x < p.rows(); ++x) {
        for (Eigen::Index x2 = x + 1; x2 < p.rows(); ++x2) {
            const double tv = 0.5 * (p.row(x) - p.row(x2)).cwiseAbs().sum();
            best = std::max(best, tv);
        }
    }
    return std::clamp(best, 0.0, 1.0);
}

double dobrushin_coefficient(const FiniteKernel& kernel, std::size_t n) {
    if (n == 0) throw Error(ErrorCode::DomainError, "step count must be positive");
    return dobrushin_coefficient(n == 1 ? kernel.matrix() : iterate_kernel(kernel, n).matrix());
}

Minorization minorization(const Matrix& p) {
    Vector column_min = p.colwise().minCoeff().transpose();
    Minorization out;
    out.d = std::min(1.0, column_min.sum());
    if (out.d > 0.0) out.eta = Distribution(column_min / column_min.sum());
    return out;
}

Minorization minorization(const FiniteKernel& kernel, std::size_t n) {
    if (n == 0) throw Error(ErrorCode::DomainError, "step count must be positive");
    return minorization(n == 1 ? kernel.matrix() : iterate_kernel(kernel, n).matrix());
}

double strong_mixing_ratio(const Matrix& p) {
    double best = 0.0;
    for (Eigen::Index y = 0; y < p.cols(); ++y) {
        const double hi = p.col(y).maxCoeff();
        const double lo = p.col(y).minCoeff();
        if (hi == 0.0) continue;  // 0/0 = 0
        if (lo == 0.0) return kInfinity;
        best = std::max(best, hi / lo);
    }
    return best;
}

namespace {

Matrix support_product(const Matrix& a, const Matrix& b) {
    return (a * b).unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
}

/// 0/1 pattern of P^n, exact regardless of underflow.
Matrix support_power(const Matrix& p, std::size_t n) {
    Matrix base = p.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
    Matrix result = Matrix::Identity(p.rows(), p.cols());
    while (n > 0) {
        if (n & 1u) result = support_product(result, base);
        n >>= 1u;
        if (n > 0) base = support_product(base, base);
    }
    return result;
}

Matrix log_product(const Matrix& a, const Matrix& b) {
    const auto n = a.rows();
    Matrix out(n, b.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < b.cols(); ++j) {
            double top = -kInfinity;
            for (Eigen::Index k = 0; k < a.cols(); ++k) top = std::max(top, a(i, k) + b(k, j));
            if (top == -kInfinity) {
                out(i, j) = top;
                continue;
            }
            double sum = 0.0;
            for (Eigen::Index k = 0; k < a.cols(); ++k) sum += std::exp(a(i, k) + b(k, j) - top);
            out(i, j) = top + std::log(sum);
        }
    }
    return out;
}

/// ln P^n entrywise, for entries below the double range.
Matrix log_power(const Matrix& p, std::size_t n) {
    Matrix base = p.unaryExpr([](double v) { return std::log(v); });
    Matrix result = Matrix::Constant(p.rows(), p.cols(), -kInfinity);
    result.diagonal().setZero();
    while (n > 0) {
        if (n & 1u) result = log_product(result, base);
        n >>= 1u;
        if (n > 0) base = log_product(base, base);
    }
    return result;
}

/// Zero and positive entries of P^n are decided on the support pattern, so
/// products that underflow still count as positive.
double strong_mixing_ratio(const Matrix& p, const Matrix& pn, std::size_t n) {
    const Matrix support = support_power(p, n);
    double best = 0.0;
    std::vector<Eigen::Index> underflowed;
    for (Eigen::Index y = 0; y < pn.cols(); ++y) {
        if (support.col(y).maxCoeff() == 0.0) continue;  // 0/0 = 0
        if (support.col(y).minCoeff() == 0.0) return kInfinity;
        const double lo = pn.col(y).minCoeff();
        if (lo == 0.0) {
            underflowed.push_back(y);
            continue;
        }
        best = std::max(best, pn.col(y).maxCoeff() / lo);
    }
    if (!underflowed.empty()) {
        const Matrix logs = log_power(p, n);
        for (Eigen::Index y : underflowed) {
            best = std::max(best, std::exp(logs.col(y).maxCoeff() - logs.col(y).minCoeff()));
        }
    }
    return best;
}

}  // namespace

double strong_mixing_ratio(const FiniteKernel& kernel, std::size_t n) {
    if (n == 0) throw Error(ErrorCode::DomainError, "step count must be positive");
    const Matrix pn = n == 1 ? kernel.matrix() : iterate_kernel(kernel, n).matrix();
    return strong_mixing_ratio(kernel.matrix(), pn, n);
}

MixingReport mixing_report(const FiniteKernel& kernel, std::size_t n_max) {
    if (n_max == 0) throw Error(ErrorCode::DomainError, "n_max must be positive");
    MixingReport report;
    Matrix power = kernel.matrix();
    for (std::size_t n = 1; n <= n_max; ++n) {
        if (n > 1) power = iterate_kernel(kernel, n).matrix();
        report.lambda[n] = dobrushin_coefficient(power);
        report.minorization[n] = minorization(power);
        report.strong_ratio[n] = strong_mixing_ratio(kernel.matrix(), power, n);
    }
    return report;
}

RelationReport check_relations(const FiniteKernel& kernel, std::size_t n_max) {
    if (n_max < 2) throw Error(ErrorCode::DomainError, "check_relations needs n_max >= 2");
    constexpr double tol = 1e-12;
    RelationReport report;
    report.n_max = n_max;
    report.max_violation = -kInfinity;
    for (std::size_t n = 1; n <= 2 * n_max; ++n) {
        const Matrix pn = iterate_kernel(kernel, n).matrix();
        report.lambda[n] = dobrushin_coefficient(pn);
        report.d[n] = minorization(pn).d;
    }
    auto record = [&](double slack, const std::string& what) {
        report.max_violation = std::max(report.max_violation, slack);
        if (slack > tol) {
            std::ostringstream msg;
            msg.precision(17);
            msg << what << " violated by " << slack;
            throw Error(ErrorCode::RelationViolated, msg.str());
        }
    };
    const double lambda1 = report.lambda.at(1);
    for (std::size_t n = 1; n <= n_max; ++n) {
        const double ln = report.lambda.at(n);
        record(ln - (1.0 - report.d.at(n)), "Lambda_" + std::to_string(n) + " <= 1 - d_" + std::to_string(n));
        record(ln - std::pow(lambda1, static_cast<double>(n)), "Lambda_" + std::to_string(n) + " <= Lambda_1^n");
        for (std::size_t m = 1; m <= n_max; ++m) {
            record(report.lambda.at(n + m) - ln * report.lambda.at(m),
                   "Lambda_" + std::to_string(n + m) + " <= Lambda_" + std::to_string(n) + " * Lambda_" +
                       std::to_string(m));
        }
    }
    return report;
}

}  // namespace mpelab
