#include "dimaudit/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dimaudit {

PcaModel pca_fit(const AttributeMatrix& matrix) {
    PcaModel model;
    model.attribute_names = matrix.attribute_names;

    StandardizedMatrix std_matrix = standardize(matrix.values, matrix.attribute_names);
    model.scaler = std_matrix.scaler;
    model.correlation = correlation(std_matrix);
    model.eigen = symmetric_eigen(model.correlation.values);

    const std::size_t p = model.eigen.eigenvalues.size();
    const double total = std::accumulate(model.eigen.eigenvalues.begin(),
                                         model.eigen.eigenvalues.end(), 0.0);
    model.variance_shares.reserve(p);
    for (double lambda : model.eigen.eigenvalues) model.variance_shares.push_back(lambda / total);

    // Sign convention: the largest-|entry| row of each column is positive.
    model.loadings = model.eigen.eigenvectors;
    for (std::size_t k = 0; k < p; ++k) {
        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t r = 0; r < p; ++r) {
            const double mag = std::abs(model.loadings(r, k));
            if (mag > best) {
                best = mag;
                arg = r;
            }
        }
        if (model.loadings(arg, k) < 0.0)
            for (std::size_t r = 0; r < p; ++r) model.loadings(r, k) = -model.loadings(r, k);
    }
    return model;
}

ScoreMatrix pca_scores(const PcaModel& model, const AttributeMatrix& matrix) {
    if (matrix.attribute_names != model.attribute_names)
        throw std::invalid_argument("pca_scores: attribute names do not match the fitted model");

    ScoreMatrix scores;
    scores.values = matmul(apply_scaler(matrix.values, model.scaler), model.loadings);
    const std::size_t p = model.attribute_names.size();
    scores.component_labels.reserve(p);
    for (std::size_t k = 0; k < p; ++k)
        scores.component_labels.push_back("PC" + std::to_string(k + 1));
    return scores;
}

std::vector<LoadingEntry> top_loadings(const PcaModel& model, std::size_t component,
                                       std::size_t count) {
    const std::size_t p = model.attribute_names.size();
    if (component >= p) throw std::invalid_argument("top_loadings: component out of range");

    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(model.loadings(a, component)) > std::abs(model.loadings(b, component));
    });

    std::vector<LoadingEntry> out;
    out.reserve(std::min(count, p));
    for (std::size_t i = 0; i < std::min(count, p); ++i)
        out.push_back({model.attribute_names[order[i]], model.loadings(order[i], component)});
    return out;
}

} // namespace dimaudit
