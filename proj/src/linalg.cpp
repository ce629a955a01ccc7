#include "dimaudit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dimaudit {

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double mean_of(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

double variance_of(std::span<const double> v, bool sample) {
    const double m = mean_of(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    const double denom = sample ? static_cast<double>(v.size() - 1) : static_cast<double>(v.size());
    return acc / denom;
}

Scaler compute_scaler(const Matrix& values, const std::vector<std::string>& names) {
    const std::size_t n = values.rows();
    const std::size_t p = values.cols();
    if (n == 0 || p == 0) throw std::invalid_argument("compute_scaler: empty matrix");

    Scaler scaler;
    scaler.means.assign(p, 0.0);
    scaler.sds.assign(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = values.row(i);
        for (std::size_t j = 0; j < p; ++j) scaler.means[j] += row[j];
    }
    for (double& m : scaler.means) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = values.row(i);
        for (std::size_t j = 0; j < p; ++j) {
            const double d = row[j] - scaler.means[j];
            scaler.sds[j] += d * d;
        }
    }
    for (std::size_t j = 0; j < p; ++j) {
        scaler.sds[j] = std::sqrt(scaler.sds[j] / static_cast<double>(n));
        if (!(scaler.sds[j] > 0.0)) {
            const std::string label = j < names.size() ? names[j] : ("column " + std::to_string(j));
            throw std::invalid_argument("standardize: constant column '" + label + "'");
        }
    }
    return scaler;
}

Matrix apply_scaler(const Matrix& values, const Scaler& scaler) {
    if (values.cols() != scaler.means.size())
        throw std::invalid_argument("apply_scaler: column count mismatch");
    Matrix out(values.rows(), values.cols());
    for (std::size_t i = 0; i < values.rows(); ++i) {
        const auto src = values.row(i);
        auto dst = out.row(i);
        for (std::size_t j = 0; j < values.cols(); ++j)
            dst[j] = (src[j] - scaler.means[j]) / scaler.sds[j];
    }
    return out;
}

StandardizedMatrix standardize(const Matrix& values, const std::vector<std::string>& names) {
    StandardizedMatrix out;
    out.scaler = compute_scaler(values, names);
    out.values = apply_scaler(values, out.scaler);
    out.names = names;
    return out;
}

CorrelationMatrix correlation(const StandardizedMatrix& std_matrix) {
    const Matrix& x = std_matrix.values;
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();
    Matrix r(p, p);
    // Accumulate the upper triangle of X'X row by row, then mirror.
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = x.row(i);
        for (std::size_t a = 0; a < p; ++a) {
            const double xa = row[a];
            double* out = &r(a, a);
            for (std::size_t b = a; b < p; ++b) out[b - a] += xa * row[b];
        }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t a = 0; a < p; ++a) {
        r(a, a) = 1.0; // exact by construction
        for (std::size_t b = a + 1; b < p; ++b) {
            const double v = r(a, b) * inv_n;
            r(a, b) = v;
            r(b, a) = v;
        }
    }
    return {std::move(r), std_matrix.names};
}

EigenSystem symmetric_eigen(const Matrix& symmetric, double tol, int max_sweeps) {
    const std::size_t p = symmetric.rows();
    if (p == 0 || symmetric.cols() != p)
        throw std::invalid_argument("symmetric_eigen: matrix must be square");

    Matrix a = symmetric; // private working copy
    Matrix v = Matrix::identity(p);

    auto max_offdiag = [&]() {
        double m = 0.0;
        for (std::size_t i = 0; i + 1 < p; ++i)
            for (std::size_t j = i + 1; j < p; ++j) m = std::max(m, std::abs(a(i, j)));
        return m;
    };

    int sweeps = 0;
    while (max_offdiag() > tol) {
        if (sweeps >= max_sweeps)
            throw std::runtime_error("symmetric_eigen: no convergence after " +
                                     std::to_string(sweeps) + " sweeps");
        // One cyclic sweep: rotate away every off-diagonal entry in turn.
        for (std::size_t pcol = 0; pcol + 1 < p; ++pcol) {
            for (std::size_t q = pcol + 1; q < p; ++q) {
                const double apq = a(pcol, q);
                if (std::abs(apq) <= tol) continue;
                const double app = a(pcol, pcol);
                const double aqq = a(q, q);
                const double theta = 0.5 * (aqq - app) / apq;
                double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta < 0.0) t = -t;
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                a(pcol, pcol) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(pcol, q) = 0.0;
                a(q, pcol) = 0.0;
                for (std::size_t k = 0; k < p; ++k) {
                    if (k == pcol || k == q) continue;
                    const double akp = a(k, pcol);
                    const double akq = a(k, q);
                    a(k, pcol) = akp - s * (akq + tau * akp);
                    a(pcol, k) = a(k, pcol);
                    a(k, q) = akq + s * (akp - tau * akq);
                    a(q, k) = a(k, q);
                }
                for (std::size_t k = 0; k < p; ++k) {
                    const double vkp = v(k, pcol);
                    const double vkq = v(k, q);
                    v(k, pcol) = vkp - s * (vkq + tau * vkp);
                    v(k, q) = vkq + s * (vkp - tau * vkq);
                }
            }
        }
        ++sweeps;
    }

    // Sort descending; equal values keep ascending original index.
    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return a(i, i) > a(j, j);
    });

    EigenSystem out;
    out.eigenvalues.resize(p);
    out.eigenvectors = Matrix(p, p);
    for (std::size_t k = 0; k < p; ++k) {
        out.eigenvalues[k] = a(order[k], order[k]);
        for (std::size_t r = 0; r < p; ++r) out.eigenvectors(r, k) = v(r, order[k]);
    }
    out.sweeps = sweeps;
    return out;
}

Matrix cholesky_factor(const Matrix& spd) {
    const std::size_t n = spd.rows();
    Matrix l(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = spd(i, j);
            for (std::size_t k = 0; k < j; ++k) sum -= l(i, k) * l(j, k);
            if (i == j) {
                // relative pivot floor: cancellation down to rounding noise
                // means the matrix is numerically singular
                if (sum <= 1e-12 * std::abs(spd(i, i)))
                    throw std::runtime_error("cholesky: matrix not positive definite at pivot " +
                                             std::to_string(i));
                l(i, i) = std::sqrt(sum);
            } else {
                l(i, j) = sum / l(j, j);
            }
        }
    }
    return l;
}

std::vector<double> cholesky_solve(const Matrix& spd, const std::vector<double>& rhs) {
    const std::size_t n = spd.rows();
    if (rhs.size() != n) throw std::invalid_argument("cholesky_solve: size mismatch");
    const Matrix l = cholesky_factor(spd);
    std::vector<double> y(n), x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = rhs[i];
        for (std::size_t k = 0; k < i; ++k) sum -= l(i, k) * y[k];
        y[i] = sum / l(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double sum = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) sum -= l(k, ii) * x[k];
        x[ii] = sum / l(ii, ii);
    }
    return x;
}

std::vector<double> matvec(const Matrix& m, const std::vector<double>& v) {
    if (v.size() != m.cols()) throw std::invalid_argument("matvec: size mismatch");
    std::vector<double> out(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) out[i] = dot(m.row(i), v);
    return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: shape mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const auto brow = b.row(k);
            auto crow = c.row(i);
            for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

} // namespace dimaudit
