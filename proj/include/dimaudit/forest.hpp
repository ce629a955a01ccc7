#pragma once

// Bagged regression trees with per-node feature subsampling. A flexible
// benchmark for recoverable information, not a structural model.

#include <cstdint>

#include "dimaudit/predict.hpp"
#include "dimaudit/table.hpp"

namespace dimaudit {

struct ForestParams {
    std::size_t trees = 200;
    std::size_t mtry = 0;      // features sampled per split; 0 = ceil(p / 3)
    std::size_t min_leaf = 5;  // minimum rows per leaf
    std::size_t max_depth = 0; // 0 = unlimited
    bool bootstrap = true;     // per-tree bootstrap sample; off = fit on all rows
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

struct TreeNode {
    // Leaf when feature == SIZE_MAX; then `value` is the mean training target.
    std::size_t feature = SIZE_MAX;
    double threshold = 0.0;
    double value = 0.0;
    std::size_t left = 0; // indices into RegressionTree::nodes
    std::size_t right = 0;
};

struct RegressionTree {
    std::vector<TreeNode> nodes; // node 0 is the root
};

struct ForestModel {
    std::vector<RegressionTree> trees;
    ForestParams params;
    std::size_t n_features = 0;
};

// Greedy SSE-minimizing binary splits; candidate thresholds are midpoints
// between consecutive sorted unique feature values at the node. A split is
// taken only if it strictly reduces the node SSE and both children hold at
// least min_leaf rows.
ForestModel forest_fit(const Matrix& x, const std::vector<double>& y, const ForestParams& params);

std::vector<double> forest_predict(const ForestModel& model, const Matrix& x);

// Same fold protocol as the linear comparisons; reported as a benchmark.
PredictionReport forest_cv(const AttributeMatrix& matrix, const FoldAssignment& folds,
                           const ForestParams& params);

} // namespace dimaudit
