#pragma once

// Bootstrap resampling of the PCA fit: sampling distribution of the PC1
// variance share and alignment of PC1 loadings with the baseline fit.

#include <cstdint>

#include "dimaudit/pca.hpp"

namespace dimaudit {

struct BootstrapReport {
    std::size_t iterations = 0;
    double pc1_share_mean = 0.0;
    double pc1_share_ci_low = 0.0;  // percentile interval, 2.5%
    double pc1_share_ci_high = 0.0; // percentile interval, 97.5%
    std::vector<double> pc1_shares; // one per iteration
    double cosine_mean = 0.0;
    std::vector<double> cosines; // sign-aligned, in [0, 1]
    std::uint64_t seed = 0;
    std::size_t degenerate_retries = 0; // resamples redrawn due to a constant column
};

// |a.b| / (|a||b|). Absolute value because eigenvector sign is arbitrary.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Each iteration resamples n rows with replacement, refits the PCA, and
// records the PC1 share plus the cosine against the baseline PC1 loading.
// Degenerate resamples (constant column) are redrawn from a retry sub-stream.
// CI bounds are nearest-rank percentiles at 2.5% / 97.5%.
BootstrapReport bootstrap_pca(const AttributeMatrix& matrix, std::size_t iterations = 1000,
                              std::uint64_t seed = 0, unsigned threads = 0);

} // namespace dimaudit
