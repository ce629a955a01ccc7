#pragma once

// Shared construction helpers for the test suites. These build inputs with
// exactly known properties (empirical correlation equal to a target matrix,
// separated blobs, ...) so expected values come from independent hand
// computation rather than from the code under test.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dimaudit/linalg.hpp"
#include "dimaudit/rng.hpp"
#include "dimaudit/table.hpp"

namespace testutil {

using dimaudit::Matrix;

// n x p matrix with exact column means 0 and empirical (population) covariance
// exactly I: random Gaussians, centered, twice modified Gram-Schmidt, scaled.
inline Matrix orthonormal_columns(std::size_t n, std::size_t p, std::uint64_t seed) {
    if (n < p + 1) throw std::invalid_argument("orthonormal_columns: need n > p");
    dimaudit::Rng rng(seed);
    Matrix z(n, p);
    for (auto& cell : z.data()) cell = rng.next_gaussian();

    auto center = [&](std::size_t col) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m += z(i, col);
        m /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) z(i, col) -= m;
    };
    auto project_out = [&](std::size_t col, std::size_t against) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            num += z(i, col) * z(i, against);
            den += z(i, against) * z(i, against);
        }
        const double coef = num / den;
        for (std::size_t i = 0; i < n; ++i) z(i, col) -= coef * z(i, against);
    };

    for (std::size_t col = 0; col < p; ++col) {
        center(col);
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t prev = 0; prev < col; ++prev) project_out(col, prev);
        center(col);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) ss += z(i, col) * z(i, col);
        const double scale = std::sqrt(static_cast<double>(n) / ss);
        for (std::size_t i = 0; i < n; ++i) z(i, col) *= scale;
    }
    return z;
}

// Data whose empirical correlation matrix equals `target` up to rounding:
// X = Z * chol(target)', with Z from orthonormal_columns.
inline Matrix data_with_correlation(const Matrix& target, std::size_t n, std::uint64_t seed) {
    const std::size_t p = target.rows();
    const Matrix z = orthonormal_columns(n, p, seed);
    const Matrix l = dimaudit::cholesky_factor(target);
    Matrix x(n, p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k <= j; ++k) acc += z(i, k) * l(j, k);
            x(i, j) = acc;
        }
    return x;
}

inline Matrix equicorrelation(std::size_t p, double r) {
    Matrix m(p, p, r);
    for (std::size_t i = 0; i < p; ++i) m(i, i) = 1.0;
    return m;
}

inline dimaudit::AttributeMatrix wrap_matrix(Matrix values, std::vector<double> overall = {}) {
    dimaudit::AttributeMatrix out;
    const std::size_t n = values.rows();
    const std::size_t p = values.cols();
    out.values = std::move(values);
    for (std::size_t j = 0; j < p; ++j) out.attribute_names.push_back("a" + std::to_string(j + 1));
    for (std::size_t i = 0; i < n; ++i) out.player_ids.push_back("p" + std::to_string(i + 1));
    out.overall = overall.empty() ? std::vector<double>(n, 0.0) : std::move(overall);
    return out;
}

// Max |A - B| over all entries.
inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
    return worst;
}

} // namespace testutil
