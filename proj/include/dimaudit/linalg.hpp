#pragma once

// Dense numerical substrate: a small row-major matrix, column standardization,
// correlation matrices, a cyclic Jacobi eigensolver for symmetric matrices,
// and a Cholesky solve for SPD systems.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace dimaudit {

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Per-column location/scale pair captured at fit time and reapplied verbatim
// to held-out rows.
struct Scaler {
    std::vector<double> means;
    std::vector<double> sds; // population (n denominator), strictly positive
};

struct StandardizedMatrix {
    Matrix values;
    Scaler scaler;
    std::vector<std::string> names; // empty when standardizing anonymous data
};

struct CorrelationMatrix {
    Matrix values; // p x p, symmetric, unit diagonal
    std::vector<std::string> names;
};

struct EigenSystem {
    std::vector<double> eigenvalues; // descending; ties keep ascending original index
    Matrix eigenvectors;             // column k pairs with eigenvalues[k]
    int sweeps = 0;                  // Jacobi sweeps used
};

// Column means and population standard deviations. Throws if a column is
// constant, naming it (index used when names are empty).
Scaler compute_scaler(const Matrix& values, const std::vector<std::string>& names = {});

// (x - mean) / sd per column with a previously captured scaler.
Matrix apply_scaler(const Matrix& values, const Scaler& scaler);

StandardizedMatrix standardize(const Matrix& values, const std::vector<std::string>& names = {});

// R = (1/n) Xstd' Xstd with the diagonal forced to exactly 1.
CorrelationMatrix correlation(const StandardizedMatrix& std_matrix);

// Full spectrum of a symmetric matrix by cyclic Jacobi sweeps. Converged when
// every off-diagonal magnitude is <= tol; throws after max_sweeps reporting the
// sweep count. Operates on a private copy of the input.
EigenSystem symmetric_eigen(const Matrix& symmetric, double tol = 1e-12, int max_sweeps = 64);

// Solves A x = b for symmetric positive definite A via Cholesky.
std::vector<double> cholesky_solve(const Matrix& spd, const std::vector<double>& rhs);

// Lower-triangular Cholesky factor of an SPD matrix.
Matrix cholesky_factor(const Matrix& spd);

// y = M v
std::vector<double> matvec(const Matrix& m, const std::vector<double>& v);

// C = A B
Matrix matmul(const Matrix& a, const Matrix& b);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);

double mean_of(std::span<const double> v);
// Variance with selectable denominator; sample = n-1, population = n.
double variance_of(std::span<const double> v, bool sample);

} // namespace dimaudit
