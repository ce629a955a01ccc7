#pragma once

// Cross-validated prediction of the overall rating: a ridge model on all
// attributes (penalty chosen by nested CV) versus a simple regression on the
// first principal component alone.

#include <cstdint>

#include "dimaudit/table.hpp"

namespace dimaudit {

struct RidgeModel {
    std::vector<double> coefficients; // on standardized columns
    double intercept = 0.0;           // mean of the training target
    double lambda = 0.0;
    Scaler scaler; // training-fold means / sds
};

struct FoldAssignment {
    std::vector<std::size_t> fold_of_row;
    std::size_t k = 0;
    std::uint64_t seed = 0;
};

struct PredictionReport {
    std::string model_name;
    std::vector<double> per_fold_r2;
    std::vector<double> per_fold_rmse;
    double mean_r2 = 0.0;
    double mean_rmse = 0.0;
    double lambda_chosen = 0.0;          // median of per-fold selections (ridge only)
    std::vector<double> per_fold_lambda; // ridge only
    std::vector<double> predictions;     // out-of-fold, length n
};

// Seeded uniform shuffle, then contiguous blocks; fold sizes differ by at most
// one. Deterministic in (n, k, seed).
FoldAssignment kfold_split(std::size_t n, std::size_t k, std::uint64_t seed);

// Solves (Xs'Xs + lambda I) beta = Xs'(y - ybar) on internally standardized
// columns; the intercept absorbs ybar and carries no penalty.
RidgeModel ridge_fit(const Matrix& x, const std::vector<double>& y, double lambda);

std::vector<double> ridge_predict(const RidgeModel& model, const Matrix& x);

// 15-point log grid over [1e-3, 1e4].
std::vector<double> default_lambda_grid();

// Which mean anchors the R^2 denominator: the evaluation fold's own mean
// (default) or the training fold's mean.
enum class R2Baseline { EvalFold, TrainMean };

// Per outer fold: select lambda by inner 5-fold CV on the training rows (mean
// RMSE, ties to the smaller lambda), refit on the full training fold, predict
// the held-out rows. Standardization is refit inside each training fold.
PredictionReport cross_validate_ridge(const AttributeMatrix& matrix, const FoldAssignment& folds,
                                      const std::vector<double>& lambda_grid,
                                      R2Baseline baseline = R2Baseline::EvalFold);

// Per fold: PCA on training rows only, project train and test onto PC1, simple
// regression of the overall rating on that score.
PredictionReport cross_validate_pc1(const AttributeMatrix& matrix, const FoldAssignment& folds,
                                    R2Baseline baseline = R2Baseline::EvalFold);

// R^2 against the evaluation fold's own mean (set fold_mean=false to use a
// caller-supplied baseline mean).
double r_squared(std::span<const double> y, std::span<const double> yhat);
double r_squared_with_baseline(std::span<const double> y, std::span<const double> yhat,
                               double baseline_mean);
double rmse(std::span<const double> y, std::span<const double> yhat);

} // namespace dimaudit
