#pragma once

// Correlation-matrix PCA: eigenvalues, variance shares, sign-fixed loadings,
// and projection of (possibly held-out) rows onto component scores.

#include <utility>

#include "dimaudit/table.hpp"

namespace dimaudit {

struct PcaModel {
    EigenSystem eigen;
    std::vector<double> variance_shares; // eigenvalue / eigenvalue sum
    Matrix loadings;                     // p x p, unit-norm columns, sign-fixed
    Scaler scaler;                       // training means / population sds
    std::vector<std::string> attribute_names;
    CorrelationMatrix correlation; // kept for reporting
};

struct ScoreMatrix {
    Matrix values; // n x p
    std::vector<std::string> component_labels;
};

struct LoadingEntry {
    std::string attribute;
    double loading = 0.0;
};

// standardize -> correlation -> eigen -> sign fix (the entry of largest
// magnitude in each loading column is made positive).
PcaModel pca_fit(const AttributeMatrix& matrix);

// Scores = standardize-with-stored-scaler(matrix) * loadings. Valid for the
// fitting sample and for held-out rows; attribute names must match the model.
ScoreMatrix pca_scores(const PcaModel& model, const AttributeMatrix& matrix);

// Entries of one loading column sorted by |loading| descending (ties keep
// ascending attribute index). `component` is 0-based.
std::vector<LoadingEntry> top_loadings(const PcaModel& model, std::size_t component,
                                       std::size_t count);

} // namespace dimaudit
