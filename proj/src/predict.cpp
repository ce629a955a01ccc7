#include "dimaudit/predict.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "dimaudit/pca.hpp"
#include "dimaudit/rng.hpp"

namespace dimaudit {

FoldAssignment kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("kfold_split: need k >= 2");
    if (n < k) throw std::invalid_argument("kfold_split: need n >= k");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = n; i-- > 1;) {
        const std::size_t j = rng.next_index(i + 1);
        std::swap(order[i], order[j]);
    }

    FoldAssignment folds;
    folds.k = k;
    folds.seed = seed;
    folds.fold_of_row.resize(n);
    // Contiguous blocks over the shuffled order; the first n % k folds get one
    // extra row.
    const std::size_t base = n / k;
    const std::size_t extra = n % k;
    std::size_t cursor = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = base + (f < extra ? 1 : 0);
        for (std::size_t i = 0; i < size; ++i) folds.fold_of_row[order[cursor++]] = f;
    }
    return folds;
}

RidgeModel ridge_fit(const Matrix& x, const std::vector<double>& y, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("ridge_fit: lambda must be >= 0");
    if (x.rows() != y.size()) throw std::invalid_argument("ridge_fit: row count mismatch");
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();

    RidgeModel model;
    model.lambda = lambda;
    model.scaler = compute_scaler(x);
    const Matrix xs = apply_scaler(x, model.scaler);

    model.intercept = mean_of(y);
    std::vector<double> xty(p, 0.0);
    Matrix gram(p, p);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = xs.row(i);
        const double resid = y[i] - model.intercept;
        for (std::size_t a = 0; a < p; ++a) {
            xty[a] += row[a] * resid;
            const double xa = row[a];
            double* out = &gram(a, a);
            for (std::size_t b = a; b < p; ++b) out[b - a] += xa * row[b];
        }
    }
    for (std::size_t a = 0; a < p; ++a) {
        gram(a, a) += lambda;
        for (std::size_t b = a + 1; b < p; ++b) gram(b, a) = gram(a, b);
    }
    try {
        model.coefficients = cholesky_solve(gram, xty);
    } catch (const std::runtime_error&) {
        throw std::runtime_error(
            "ridge_fit: singular system (collinear columns need lambda > 0)");
    }
    return model;
}

std::vector<double> ridge_predict(const RidgeModel& model, const Matrix& x) {
    if (x.cols() != model.coefficients.size())
        throw std::invalid_argument("ridge_predict: column count mismatch");
    const Matrix xs = apply_scaler(x, model.scaler);
    std::vector<double> out(x.rows(), model.intercept);
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] += dot(xs.row(i), model.coefficients);
    return out;
}

std::vector<double> default_lambda_grid() {
    std::vector<double> grid;
    grid.reserve(15);
    // log-spaced over [1e-3, 1e4]
    for (int i = 0; i < 15; ++i) grid.push_back(std::pow(10.0, -3.0 + 7.0 * i / 14.0));
    return grid;
}

double r_squared_with_baseline(std::span<const double> y, std::span<const double> yhat,
                               double baseline_mean) {
    if (y.size() != yhat.size() || y.empty())
        throw std::invalid_argument("r_squared: length mismatch");
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss_res += (y[i] - yhat[i]) * (y[i] - yhat[i]);
        ss_tot += (y[i] - baseline_mean) * (y[i] - baseline_mean);
    }
    if (ss_tot == 0.0) throw std::invalid_argument("r_squared: constant target");
    return 1.0 - ss_res / ss_tot;
}

double r_squared(std::span<const double> y, std::span<const double> yhat) {
    return r_squared_with_baseline(y, yhat, mean_of(y));
}

double rmse(std::span<const double> y, std::span<const double> yhat) {
    if (y.size() != yhat.size() || y.empty())
        throw std::invalid_argument("rmse: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) acc += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    return std::sqrt(acc / static_cast<double>(y.size()));
}

namespace {

struct FoldView {
    Matrix x;
    std::vector<double> y;
    std::vector<std::size_t> rows; // original indices
};

FoldView gather(const Matrix& values, const std::vector<double>& target,
                const FoldAssignment& folds, std::size_t fold, bool training) {
    FoldView view;
    for (std::size_t i = 0; i < folds.fold_of_row.size(); ++i)
        if ((folds.fold_of_row[i] == fold) != training) view.rows.push_back(i);
    view.x = Matrix(view.rows.size(), values.cols());
    view.y.reserve(view.rows.size());
    for (std::size_t r = 0; r < view.rows.size(); ++r) {
        const auto src = values.row(view.rows[r]);
        std::copy(src.begin(), src.end(), view.x.row(r).begin());
        view.y.push_back(target[view.rows[r]]);
    }
    return view;
}

void finalize_means(PredictionReport& report) {
    report.mean_r2 = mean_of(report.per_fold_r2);
    report.mean_rmse = mean_of(report.per_fold_rmse);
}

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

} // namespace

PredictionReport cross_validate_ridge(const AttributeMatrix& matrix, const FoldAssignment& folds,
                                      const std::vector<double>& lambda_grid,
                                      R2Baseline baseline) {
    if (lambda_grid.empty()) throw std::invalid_argument("cross_validate_ridge: empty grid");
    const std::size_t n = matrix.values.rows();

    PredictionReport report;
    report.model_name = "ridge_all_attributes";
    report.predictions.assign(n, 0.0);

    for (std::size_t fold = 0; fold < folds.k; ++fold) {
        const FoldView train = gather(matrix.values, matrix.overall, folds, fold, true);
        const FoldView test = gather(matrix.values, matrix.overall, folds, fold, false);

        // Inner 5-fold CV on the training rows only, seeded off the outer
        // assignment so reruns are reproducible.
        const std::size_t inner_k = std::min<std::size_t>(5, train.rows.size());
        const FoldAssignment inner =
            kfold_split(train.rows.size(), inner_k, mix_seed(folds.seed, 1000 + fold));
        double best_lambda = lambda_grid.front();
        double best_rmse = std::numeric_limits<double>::infinity();
        for (const double lambda : lambda_grid) {
            double rmse_acc = 0.0;
            for (std::size_t inner_fold = 0; inner_fold < inner.k; ++inner_fold) {
                const FoldView itrain = gather(train.x, train.y, inner, inner_fold, true);
                const FoldView itest = gather(train.x, train.y, inner, inner_fold, false);
                const RidgeModel m = ridge_fit(itrain.x, itrain.y, lambda);
                rmse_acc += rmse(itest.y, ridge_predict(m, itest.x));
            }
            const double mean_inner = rmse_acc / static_cast<double>(inner.k);
            if (mean_inner < best_rmse) {
                best_rmse = mean_inner;
                best_lambda = lambda;
            }
        }

        const RidgeModel model = ridge_fit(train.x, train.y, best_lambda);
        const std::vector<double> yhat = ridge_predict(model, test.x);
        report.per_fold_lambda.push_back(best_lambda);
        report.per_fold_r2.push_back(
            baseline == R2Baseline::EvalFold
                ? r_squared(test.y, yhat)
                : r_squared_with_baseline(test.y, yhat, mean_of(train.y)));
        report.per_fold_rmse.push_back(rmse(test.y, yhat));
        for (std::size_t r = 0; r < test.rows.size(); ++r)
            report.predictions[test.rows[r]] = yhat[r];
    }
    finalize_means(report);
    report.lambda_chosen = median(report.per_fold_lambda);
    return report;
}

PredictionReport cross_validate_pc1(const AttributeMatrix& matrix, const FoldAssignment& folds,
                                    R2Baseline baseline) {
    const std::size_t n = matrix.values.rows();
    PredictionReport report;
    report.model_name = "linear_pc1_only";
    report.predictions.assign(n, 0.0);

    for (std::size_t fold = 0; fold < folds.k; ++fold) {
        const FoldView train = gather(matrix.values, matrix.overall, folds, fold, true);
        const FoldView test = gather(matrix.values, matrix.overall, folds, fold, false);

        AttributeMatrix train_matrix;
        train_matrix.values = train.x;
        train_matrix.attribute_names = matrix.attribute_names;
        train_matrix.overall = train.y;
        const PcaModel model = pca_fit(train_matrix);

        // PC1 score = standardized row . first loading column
        const std::size_t p = matrix.attribute_names.size();
        std::vector<double> pc1(p);
        for (std::size_t r = 0; r < p; ++r) pc1[r] = model.loadings(r, 0);
        auto project = [&](const Matrix& x) {
            const Matrix xs = apply_scaler(x, model.scaler);
            std::vector<double> s(x.rows());
            for (std::size_t i = 0; i < x.rows(); ++i) s[i] = dot(xs.row(i), pc1);
            return s;
        };
        const std::vector<double> s_train = project(train.x);
        const std::vector<double> s_test = project(test.x);

        // Simple regression y = a + b s on the training fold.
        const double s_mean = mean_of(s_train);
        const double y_mean = mean_of(train.y);
        double sxy = 0.0;
        double sxx = 0.0;
        for (std::size_t i = 0; i < s_train.size(); ++i) {
            sxy += (s_train[i] - s_mean) * (train.y[i] - y_mean);
            sxx += (s_train[i] - s_mean) * (s_train[i] - s_mean);
        }
        const double slope = sxy / sxx;
        const double intercept = y_mean - slope * s_mean;

        std::vector<double> yhat(s_test.size());
        for (std::size_t i = 0; i < s_test.size(); ++i) yhat[i] = intercept + slope * s_test[i];
        report.per_fold_r2.push_back(
            baseline == R2Baseline::EvalFold
                ? r_squared(test.y, yhat)
                : r_squared_with_baseline(test.y, yhat, mean_of(train.y)));
        report.per_fold_rmse.push_back(rmse(test.y, yhat));
        for (std::size_t r = 0; r < test.rows.size(); ++r)
            report.predictions[test.rows[r]] = yhat[r];
    }
    finalize_means(report);
    return report;
}

} // namespace dimaudit
