#include <doctest.h>

#include <cmath>

#include "dimaudit/linalg.hpp"
#include "dimaudit/rng.hpp"
#include "test_helpers.hpp"

using namespace dimaudit;
using testutil::equicorrelation;

TEST_CASE("standardize: hand-computed z-scores, population sd") {
    Matrix x(3, 1);
    x(0, 0) = 1.0;
    x(1, 0) = 2.0;
    x(2, 0) = 3.0;
    const StandardizedMatrix s = standardize(x);
    // population sd of {1,2,3} is sqrt(2/3); z = +-1/sqrt(2/3)
    const double z = 1.224744871391589;
    CHECK(s.values(0, 0) == doctest::Approx(-z).epsilon(1e-12));
    CHECK(s.values(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s.values(2, 0) == doctest::Approx(z).epsilon(1e-12));
    CHECK(s.scaler.means[0] == doctest::Approx(2.0));
    CHECK(s.scaler.sds[0] == doctest::Approx(std::sqrt(2.0 / 3.0)));
}

TEST_CASE("standardize: idempotent within 1e-9") {
    Rng rng(7);
    Matrix x(50, 4);
    for (auto& cell : x.data()) cell = 10.0 + 5.0 * rng.next_gaussian();
    const Matrix once = standardize(x).values;
    const Matrix twice = standardize(once).values;
    CHECK(testutil::max_abs_diff(once, twice) < 1e-9);
}

TEST_CASE("standardize: constant column rejected with its name") {
    Matrix x(4, 2);
    for (std::size_t i = 0; i < 4; ++i) {
        x(i, 0) = static_cast<double>(i);
        x(i, 1) = 5.0;
    }
    CHECK_THROWS_WITH_AS(standardize(x, {"speed", "height"}),
                         "standardize: constant column 'height'", std::invalid_argument);
}

TEST_CASE("correlation: identical columns give off-diagonal 1") {
    Matrix x(10, 2);
    for (std::size_t i = 0; i < 10; ++i) {
        x(i, 0) = static_cast<double>(i * i);
        x(i, 1) = x(i, 0);
    }
    const CorrelationMatrix r = correlation(standardize(x));
    CHECK(r.values(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.values(0, 0) == 1.0);
    CHECK(r.values(1, 1) == 1.0);
}

TEST_CASE("correlation: constructed r = 0.5 exact within 1e-10") {
    // y = 0.5 x + sqrt(0.75) z with z orthogonalized against x, both unit
    // population variance => corr(x, y) = 0.5 exactly.
    const Matrix z = testutil::orthonormal_columns(200, 2, 11);
    Matrix x(200, 2);
    for (std::size_t i = 0; i < 200; ++i) {
        x(i, 0) = z(i, 0);
        x(i, 1) = 0.5 * z(i, 0) + std::sqrt(0.75) * z(i, 1);
    }
    const CorrelationMatrix r = correlation(standardize(x));
    CHECK(r.values(0, 1) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("correlation: independent long columns are near zero") {
    const std::size_t n = 20000;
    Rng rng(3);
    Matrix x(n, 2);
    for (auto& cell : x.data()) cell = rng.next_gaussian();
    const CorrelationMatrix r = correlation(standardize(x));
    CHECK(std::abs(r.values(0, 1)) < 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("symmetric_eigen: identity spectrum") {
    const EigenSystem eigen = symmetric_eigen(Matrix::identity(4));
    for (double lambda : eigen.eigenvalues) CHECK(lambda == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(testutil::max_abs_diff(eigen.eigenvectors, Matrix::identity(4)) < 1e-12);
}

TEST_CASE("symmetric_eigen: 2x2 analytic 1 +- r") {
    const EigenSystem eigen = symmetric_eigen(equicorrelation(2, 0.6));
    REQUIRE(eigen.eigenvalues.size() == 2);
    CHECK(eigen.eigenvalues[0] == doctest::Approx(1.6).epsilon(1e-12));
    CHECK(eigen.eigenvalues[1] == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("symmetric_eigen: equicorrelation p=5 r=0.3 analytic spectrum") {
    const EigenSystem eigen = symmetric_eigen(equicorrelation(5, 0.3));
    CHECK(eigen.eigenvalues[0] == doctest::Approx(2.2).epsilon(1e-10));
    for (std::size_t k = 1; k < 5; ++k)
        CHECK(eigen.eigenvalues[k] == doctest::Approx(0.7).epsilon(1e-10));
}

TEST_CASE("symmetric_eigen: contract on random correlation matrices") {
    // residual, orthonormality, trace preservation, reconstruction,
    // non-negativity for genuine correlation inputs
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Rng rng(seed);
        Matrix x(80, 12);
        for (auto& cell : x.data()) cell = rng.next_gaussian();
        const CorrelationMatrix r = correlation(standardize(x));
        const EigenSystem eigen = symmetric_eigen(r.values);
        const std::size_t p = 12;

        double trace = 0.0;
        for (double lambda : eigen.eigenvalues) trace += lambda;
        CHECK(std::abs(trace - static_cast<double>(p)) < 1e-8);

        // descending order and non-negative
        for (std::size_t k = 0; k + 1 < p; ++k)
            CHECK(eigen.eigenvalues[k] >= eigen.eigenvalues[k + 1]);
        for (double lambda : eigen.eigenvalues) CHECK(lambda > -1e-8);

        // V'V = I
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = 0; b < p; ++b) {
                double acc = 0.0;
                for (std::size_t k = 0; k < p; ++k)
                    acc += eigen.eigenvectors(k, a) * eigen.eigenvectors(k, b);
                CHECK(std::abs(acc - (a == b ? 1.0 : 0.0)) < 1e-8);
            }

        // residual R v = lambda v
        for (std::size_t k = 0; k < p; ++k) {
            std::vector<double> v(p);
            for (std::size_t i = 0; i < p; ++i) v[i] = eigen.eigenvectors(i, k);
            const std::vector<double> rv = matvec(r.values, v);
            for (std::size_t i = 0; i < p; ++i)
                CHECK(std::abs(rv[i] - eigen.eigenvalues[k] * v[i]) < 1e-8);
        }

        // V diag(lambda) V' = R
        Matrix recon(p, p);
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j) {
                double acc = 0.0;
                for (std::size_t k = 0; k < p; ++k)
                    acc += eigen.eigenvectors(i, k) * eigen.eigenvalues[k] *
                           eigen.eigenvectors(j, k);
                recon(i, j) = acc;
            }
        CHECK(testutil::max_abs_diff(recon, r.values) < 1e-7);
    }
}

TEST_CASE("cholesky: solve round-trip on an SPD system") {
    Matrix a = equicorrelation(4, 0.4);
    const std::vector<double> x_true = {1.0, -2.0, 0.5, 3.0};
    const std::vector<double> b = matvec(a, x_true);
    const std::vector<double> x = cholesky_solve(a, b);
    for (std::size_t i = 0; i < 4; ++i) CHECK(x[i] == doctest::Approx(x_true[i]).epsilon(1e-10));
}

TEST_CASE("cholesky: rejects indefinite input") {
    Matrix a(2, 2);
    a(0, 0) = 1.0;
    a(0, 1) = 2.0;
    a(1, 0) = 2.0;
    a(1, 1) = 1.0; // eigenvalues 3, -1
    CHECK_THROWS_AS(cholesky_factor(a), std::runtime_error);
}
