#include "dimaudit/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "dimaudit/concurrency.hpp"
#include "dimaudit/rng.hpp"

namespace dimaudit {

namespace {

struct SplitChoice {
    std::size_t feature = SIZE_MAX;
    double threshold = 0.0;
    double sse_gain = 0.0; // parent SSE minus child SSE sum
};

struct TreeBuilder {
    const Matrix& x;
    const std::vector<double>& y;
    const ForestParams& params;
    std::size_t mtry;
    Rng rng;
    RegressionTree tree;

    // Scratch reused across nodes.
    std::vector<std::size_t> feature_pool;
    std::vector<std::pair<double, double>> sorted; // (feature value, target)

    TreeBuilder(const Matrix& x_in, const std::vector<double>& y_in, const ForestParams& p,
                std::uint64_t seed)
        : x(x_in), y(y_in), params(p),
          mtry(p.mtry == 0 ? (x_in.cols() + 2) / 3 : std::min(p.mtry, x_in.cols())),
          rng(seed) {
        feature_pool.resize(x.cols());
        std::iota(feature_pool.begin(), feature_pool.end(), std::size_t{0});
    }

    // Partial Fisher-Yates: the first `mtry` entries become this node's
    // candidate features.
    void sample_features() {
        for (std::size_t i = 0; i < mtry; ++i) {
            const std::size_t j = i + rng.next_index(feature_pool.size() - i);
            std::swap(feature_pool[i], feature_pool[j]);
        }
    }

    SplitChoice best_split(std::span<const std::size_t> rows) {
        const std::size_t m = rows.size();
        double sum = 0.0;
        double sum_sq = 0.0;
        for (std::size_t r : rows) {
            sum += y[r];
            sum_sq += y[r] * y[r];
        }
        const double parent_sse = sum_sq - sum * sum / static_cast<double>(m);

        SplitChoice best;
        sample_features();
        for (std::size_t f = 0; f < mtry; ++f) {
            const std::size_t feature = feature_pool[f];
            sorted.clear();
            for (std::size_t r : rows) sorted.emplace_back(x(r, feature), y[r]);
            std::sort(sorted.begin(), sorted.end());

            // Scan boundaries between distinct feature values; children SSE via
            // prefix sums.
            double left_sum = 0.0;
            double left_sq = 0.0;
            for (std::size_t i = 0; i + 1 < m; ++i) {
                left_sum += sorted[i].second;
                left_sq += sorted[i].second * sorted[i].second;
                if (sorted[i].first == sorted[i + 1].first) continue;
                const std::size_t left_n = i + 1;
                const std::size_t right_n = m - left_n;
                if (left_n < params.min_leaf || right_n < params.min_leaf) continue;
                const double right_sum = sum - left_sum;
                const double right_sq = sum_sq - left_sq;
                const double child_sse =
                    (left_sq - left_sum * left_sum / static_cast<double>(left_n)) +
                    (right_sq - right_sum * right_sum / static_cast<double>(right_n));
                const double gain = parent_sse - child_sse;
                if (gain > best.sse_gain) {
                    best.sse_gain = gain;
                    best.feature = feature;
                    best.threshold = 0.5 * (sorted[i].first + sorted[i + 1].first);
                }
            }
        }
        return best;
    }

    std::size_t build(std::vector<std::size_t>& rows, std::size_t depth) {
        const std::size_t node_index = tree.nodes.size();
        tree.nodes.emplace_back();

        double sum = 0.0;
        for (std::size_t r : rows) sum += y[r];
        tree.nodes[node_index].value = sum / static_cast<double>(rows.size());

        const bool depth_ok = params.max_depth == 0 || depth < params.max_depth;
        if (!depth_ok || rows.size() < 2 * params.min_leaf) return node_index;

        const SplitChoice split = best_split(rows);
        if (split.feature == SIZE_MAX || !(split.sse_gain > 0.0)) return node_index;

        std::vector<std::size_t> left_rows, right_rows;
        left_rows.reserve(rows.size());
        right_rows.reserve(rows.size());
        for (std::size_t r : rows) {
            if (x(r, split.feature) <= split.threshold)
                left_rows.push_back(r);
            else
                right_rows.push_back(r);
        }
        // Midpoints can round onto a boundary value; fall back to a leaf if
        // the realized partition violates the leaf minimum.
        if (left_rows.size() < params.min_leaf || right_rows.size() < params.min_leaf)
            return node_index;
        rows.clear();
        rows.shrink_to_fit();

        const std::size_t left = build(left_rows, depth + 1);
        const std::size_t right = build(right_rows, depth + 1);
        tree.nodes[node_index].feature = split.feature;
        tree.nodes[node_index].threshold = split.threshold;
        tree.nodes[node_index].left = left;
        tree.nodes[node_index].right = right;
        return node_index;
    }
};

double tree_predict(const RegressionTree& tree, std::span<const double> row) {
    std::size_t node = 0;
    while (tree.nodes[node].feature != SIZE_MAX) {
        node = row[tree.nodes[node].feature] <= tree.nodes[node].threshold
                   ? tree.nodes[node].left
                   : tree.nodes[node].right;
    }
    return tree.nodes[node].value;
}

} // namespace

ForestModel forest_fit(const Matrix& x, const std::vector<double>& y, const ForestParams& params) {
    const std::size_t n = x.rows();
    if (n != y.size()) throw std::invalid_argument("forest_fit: row count mismatch");
    if (params.min_leaf == 0) throw std::invalid_argument("forest_fit: min_leaf must be >= 1");
    if (n < 2 * params.min_leaf)
        throw std::invalid_argument("forest_fit: need n >= 2 * min_leaf rows");
    if (params.trees == 0) throw std::invalid_argument("forest_fit: need at least one tree");

    ForestModel model;
    model.params = params;
    model.n_features = x.cols();
    model.trees.resize(params.trees);

    parallel_for(params.trees, params.threads, [&](std::size_t t) {
        const std::uint64_t stream = mix_seed(params.seed, t);
        TreeBuilder builder(x, y, params, mix_seed(stream, 1));
        std::vector<std::size_t> rows(n);
        if (params.bootstrap) {
            Rng bag(stream);
            for (auto& r : rows) r = bag.next_index(n);
        } else {
            std::iota(rows.begin(), rows.end(), std::size_t{0});
        }
        builder.build(rows, 0);
        model.trees[t] = std::move(builder.tree);
    });
    return model;
}

std::vector<double> forest_predict(const ForestModel& model, const Matrix& x) {
    if (x.cols() != model.n_features)
        throw std::invalid_argument("forest_predict: column count mismatch");
    std::vector<double> out(x.rows(), 0.0);
    const double inv = 1.0 / static_cast<double>(model.trees.size());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double acc = 0.0;
        for (const auto& tree : model.trees) acc += tree_predict(tree, x.row(i));
        out[i] = acc * inv;
    }
    return out;
}

PredictionReport forest_cv(const AttributeMatrix& matrix, const FoldAssignment& folds,
                           const ForestParams& params) {
    const std::size_t n = matrix.values.rows();
    PredictionReport report;
    report.model_name = "random_forest_benchmark";
    report.predictions.assign(n, 0.0);

    for (std::size_t fold = 0; fold < folds.k; ++fold) {
        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t i = 0; i < n; ++i)
            (folds.fold_of_row[i] == fold ? test_rows : train_rows).push_back(i);

        Matrix x_train(train_rows.size(), matrix.values.cols());
        std::vector<double> y_train(train_rows.size());
        for (std::size_t r = 0; r < train_rows.size(); ++r) {
            const auto src = matrix.values.row(train_rows[r]);
            std::copy(src.begin(), src.end(), x_train.row(r).begin());
            y_train[r] = matrix.overall[train_rows[r]];
        }
        Matrix x_test(test_rows.size(), matrix.values.cols());
        std::vector<double> y_test(test_rows.size());
        for (std::size_t r = 0; r < test_rows.size(); ++r) {
            const auto src = matrix.values.row(test_rows[r]);
            std::copy(src.begin(), src.end(), x_test.row(r).begin());
            y_test[r] = matrix.overall[test_rows[r]];
        }

        ForestParams fold_params = params;
        fold_params.seed = mix_seed(params.seed, 0x70000 + fold);
        const ForestModel model = forest_fit(x_train, y_train, fold_params);
        const std::vector<double> yhat = forest_predict(model, x_test);

        report.per_fold_r2.push_back(r_squared(y_test, yhat));
        report.per_fold_rmse.push_back(rmse(y_test, yhat));
        for (std::size_t r = 0; r < test_rows.size(); ++r)
            report.predictions[test_rows[r]] = yhat[r];
    }
    report.mean_r2 = mean_of(report.per_fold_r2);
    report.mean_rmse = mean_of(report.per_fold_rmse);
    return report;
}

} // namespace dimaudit
