#pragma once

// Internal-consistency diagnostics: Cronbach's alpha on raw scores, a
// standardized variant, and the average inter-item correlation.

#include "dimaudit/table.hpp"

namespace dimaudit {

struct AlphaReport {
    double alpha = 0.0;              // raw-score variant
    double alpha_standardized = 0.0; // computed from the mean inter-item correlation
    std::size_t k = 0;               // item count
    std::vector<double> item_variances; // per-item, sample (n-1) denominator
    double total_variance = 0.0;        // variance of row sums, same denominator
    double avg_inter_item_r = 0.0;      // mean of the k(k-1)/2 upper-triangle correlations
    std::size_t n = 0;
};

// alpha = k/(k-1) * (1 - sum(item variances) / total variance), with sample
// variances throughout. Requires k >= 2 and n >= 2.
AlphaReport cronbach_alpha(const AttributeMatrix& matrix);

} // namespace dimaudit
