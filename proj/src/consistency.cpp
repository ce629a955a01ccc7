#include "dimaudit/consistency.hpp"

#include <stdexcept>

namespace dimaudit {

AlphaReport cronbach_alpha(const AttributeMatrix& matrix) {
    const std::size_t n = matrix.values.rows();
    const std::size_t k = matrix.values.cols();
    if (k < 2) throw std::invalid_argument("cronbach_alpha: need at least 2 items");
    if (n < 2) throw std::invalid_argument("cronbach_alpha: need at least 2 rows");

    AlphaReport report;
    report.k = k;
    report.n = n;

    std::vector<double> col(n);
    std::vector<double> totals(n, 0.0);
    double item_var_sum = 0.0;
    report.item_variances.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            col[i] = matrix.values(i, j);
            totals[i] += col[i];
        }
        const double v = variance_of(col, true);
        report.item_variances.push_back(v);
        item_var_sum += v;
    }
    report.total_variance = variance_of(totals, true);

    const double ratio = static_cast<double>(k) / static_cast<double>(k - 1);
    report.alpha = ratio * (1.0 - item_var_sum / report.total_variance);

    const CorrelationMatrix r = correlation(standardize(matrix.values, matrix.attribute_names));
    double r_sum = 0.0;
    for (std::size_t a = 0; a + 1 < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b) r_sum += r.values(a, b);
    const double pairs = static_cast<double>(k) * static_cast<double>(k - 1) / 2.0;
    report.avg_inter_item_r = r_sum / pairs;

    const double rbar = report.avg_inter_item_r;
    report.alpha_standardized =
        static_cast<double>(k) * rbar / (1.0 + static_cast<double>(k - 1) * rbar);

    return report;
}

} // namespace dimaudit
