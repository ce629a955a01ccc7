#include "dimaudit/stability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include "dimaudit/concurrency.hpp"
#include "dimaudit/parallel_analysis.hpp"
#include "dimaudit/rng.hpp"

namespace dimaudit {

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("cosine_similarity: length mismatch");
    if (a.empty()) throw std::invalid_argument("cosine_similarity: empty vectors");
    const double na = norm2(a);
    const double nb = norm2(b);
    if (na == 0.0 || nb == 0.0) throw std::invalid_argument("cosine_similarity: zero vector");
    return std::abs(dot(a, b)) / (na * nb);
}

BootstrapReport bootstrap_pca(const AttributeMatrix& matrix, std::size_t iterations,
                              std::uint64_t seed, unsigned threads) {
    if (iterations < 100)
        throw std::invalid_argument("bootstrap_pca: need at least 100 iterations");
    const std::size_t n = matrix.values.rows();
    const std::size_t p = matrix.values.cols();

    const PcaModel baseline = pca_fit(matrix);
    std::vector<double> baseline_pc1(p);
    for (std::size_t r = 0; r < p; ++r) baseline_pc1[r] = baseline.loadings(r, 0);

    BootstrapReport report;
    report.iterations = iterations;
    report.seed = seed;
    report.pc1_shares.resize(iterations);
    report.cosines.resize(iterations);

    std::atomic<std::size_t> retries{0};
    parallel_for(iterations, threads, [&](std::size_t iter) {
        const std::uint64_t stream = mix_seed(seed, iter);
        Matrix resample(n, p);
        for (std::uint64_t attempt = 0;; ++attempt) {
            Rng rng(attempt == 0 ? stream : mix_seed(stream, attempt));
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t src = rng.next_index(n);
                const auto from = matrix.values.row(src);
                std::copy(from.begin(), from.end(), resample.row(i).begin());
            }
            try {
                const EigenSystem eigen =
                    symmetric_eigen(correlation(standardize(resample)).values);
                double total = 0.0;
                for (double lambda : eigen.eigenvalues) total += lambda;
                report.pc1_shares[iter] = eigen.eigenvalues[0] / total;
                std::vector<double> pc1(p);
                for (std::size_t r = 0; r < p; ++r) pc1[r] = eigen.eigenvectors(r, 0);
                report.cosines[iter] = cosine_similarity(pc1, baseline_pc1);
                break;
            } catch (const std::invalid_argument&) {
                // constant column in the resample; redraw from the retry stream
                retries.fetch_add(1, std::memory_order_relaxed);
            }
        }
    });
    report.degenerate_retries = retries.load();

    report.pc1_share_mean = mean_of(report.pc1_shares);
    report.cosine_mean = mean_of(report.cosines);
    std::vector<double> sorted = report.pc1_shares;
    std::sort(sorted.begin(), sorted.end());
    report.pc1_share_ci_low = nearest_rank_percentile(sorted, 0.025);
    report.pc1_share_ci_high = nearest_rank_percentile(sorted, 0.975);
    return report;
}

} // namespace dimaudit
