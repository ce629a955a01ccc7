#include <doctest.h>

#include <algorithm>

#include "dimaudit/consistency.hpp"
#include "test_helpers.hpp"

using namespace dimaudit;

TEST_CASE("cronbach_alpha: two identical columns give alpha 1") {
    Matrix x(6, 2);
    for (std::size_t i = 0; i < 6; ++i) {
        x(i, 0) = static_cast<double>(i) * 3.0 + 1.0;
        x(i, 1) = x(i, 0);
    }
    const AlphaReport report = cronbach_alpha(testutil::wrap_matrix(x));
    CHECK(report.alpha == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.avg_inter_item_r == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cronbach_alpha: 3 items at exact pairwise r=0.5 gives 0.75") {
    // direct check of the definition: with unit variances and r=0.5,
    // total variance = 3 + 2*3*0.5 = 6, alpha = 1.5 * (1 - 3/6) = 0.75
    const Matrix x = testutil::data_with_correlation(testutil::equicorrelation(3, 0.5), 120, 21);
    const AlphaReport report = cronbach_alpha(testutil::wrap_matrix(x));
    CHECK(report.alpha == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(report.k == 3);
    CHECK(report.n == 120);
}

TEST_CASE("cronbach_alpha: equicorrelated analytic value k r / (1 + (k-1) r)") {
    for (const std::size_t k : {4, 7}) {
        for (const double r : {0.2, 0.6}) {
            const Matrix x = testutil::data_with_correlation(
                testutil::equicorrelation(k, r), 150, 1000 + k * 10 + static_cast<int>(r * 10));
            const AlphaReport report = cronbach_alpha(testutil::wrap_matrix(x));
            const double analytic =
                static_cast<double>(k) * r / (1.0 + static_cast<double>(k - 1) * r);
            CHECK(report.alpha == doctest::Approx(analytic).epsilon(1e-9));
            CHECK(report.alpha_standardized == doctest::Approx(analytic).epsilon(1e-9));
            CHECK(report.avg_inter_item_r == doctest::Approx(r).epsilon(1e-9));
        }
    }
}

TEST_CASE("cronbach_alpha: invariant to column permutation") {
    dimaudit::Rng rng(17);
    Matrix x(60, 5);
    for (auto& cell : x.data()) cell = 50.0 + 8.0 * rng.next_gaussian();
    // add a shared component so alpha is not near zero
    for (std::size_t i = 0; i < 60; ++i) {
        const double shared = 6.0 * rng.next_gaussian();
        for (std::size_t j = 0; j < 5; ++j) x(i, j) += shared;
    }
    const AlphaReport base = cronbach_alpha(testutil::wrap_matrix(x));

    Matrix permuted(60, 5);
    const std::size_t perm[5] = {3, 0, 4, 1, 2};
    for (std::size_t i = 0; i < 60; ++i)
        for (std::size_t j = 0; j < 5; ++j) permuted(i, j) = x(i, perm[j]);
    const AlphaReport other = cronbach_alpha(testutil::wrap_matrix(permuted));
    CHECK(other.alpha == doctest::Approx(base.alpha).epsilon(1e-12));
    CHECK(other.avg_inter_item_r == doctest::Approx(base.avg_inter_item_r).epsilon(1e-12));

    // with a positive average correlation the total variance dominates every
    // single item's variance
    CHECK(base.avg_inter_item_r > 0.0);
    double max_item = 0.0;
    for (double v : base.item_variances) max_item = std::max(max_item, v);
    CHECK(base.total_variance >= max_item);
    CHECK(base.alpha <= 1.0);
}

TEST_CASE("cronbach_alpha: standardized variant invariant to positive rescaling") {
    dimaudit::Rng rng(23);
    Matrix x(80, 4);
    for (std::size_t i = 0; i < 80; ++i) {
        const double shared = rng.next_gaussian();
        for (std::size_t j = 0; j < 4; ++j) x(i, j) = shared + 0.8 * rng.next_gaussian();
    }
    const AlphaReport base = cronbach_alpha(testutil::wrap_matrix(x));

    Matrix scaled(80, 4);
    const double scales[4] = {2.0, 0.5, 10.0, 7.5};
    const double offsets[4] = {-3.0, 40.0, 0.0, 12.0};
    for (std::size_t i = 0; i < 80; ++i)
        for (std::size_t j = 0; j < 4; ++j) scaled(i, j) = scales[j] * x(i, j) + offsets[j];
    const AlphaReport other = cronbach_alpha(testutil::wrap_matrix(scaled));
    CHECK(other.alpha_standardized ==
          doctest::Approx(base.alpha_standardized).epsilon(1e-9));
    // raw alpha is NOT invariant; just confirm both stay <= 1
    CHECK(base.alpha <= 1.0);
    CHECK(other.alpha <= 1.0);
}

TEST_CASE("cronbach_alpha: rejects fewer than 2 items") {
    Matrix x(5, 1);
    for (std::size_t i = 0; i < 5; ++i) x(i, 0) = static_cast<double>(i);
    AttributeMatrix m;
    m.values = x;
    m.attribute_names = {"only"};
    m.player_ids = {"a", "b", "c", "d", "e"};
    m.overall = {1, 2, 3, 4, 5};
    CHECK_THROWS_AS(cronbach_alpha(m), std::invalid_argument);
}
