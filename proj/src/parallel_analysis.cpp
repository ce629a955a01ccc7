#include "dimaudit/parallel_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dimaudit/concurrency.hpp"
#include "dimaudit/rng.hpp"

namespace dimaudit {

double nearest_rank_percentile(std::vector<double> sorted_ascending, double q) {
    if (sorted_ascending.empty())
        throw std::invalid_argument("nearest_rank_percentile: empty sample");
    if (!(q > 0.0) || q > 1.0)
        throw std::invalid_argument("nearest_rank_percentile: q must be in (0, 1]");
    const auto b = static_cast<double>(sorted_ascending.size());
    auto rank = static_cast<std::size_t>(std::ceil(q * b));
    if (rank == 0) rank = 1;
    return sorted_ascending[rank - 1];
}

ParallelResult parallel_analysis(const AttributeMatrix& matrix, std::size_t iterations,
                                 double percentile, std::uint64_t seed, RetentionRule rule,
                                 unsigned threads) {
    if (iterations < 100)
        throw std::invalid_argument("parallel_analysis: need at least 100 iterations");
    const std::size_t n = matrix.values.rows();
    const std::size_t p = matrix.values.cols();

    ParallelResult result;
    result.iterations = iterations;
    result.percentile = percentile;
    result.seed = seed;
    result.rule = rule;

    result.observed = symmetric_eigen(
        correlation(standardize(matrix.values, matrix.attribute_names)).values).eigenvalues;

    // Null spectra: one per iteration, stored by index so the merge order is
    // independent of scheduling.
    std::vector<std::vector<double>> spectra(iterations);
    parallel_for(iterations, threads, [&](std::size_t iter) {
        Rng rng(mix_seed(seed, iter));
        Matrix noise(n, p);
        for (double& cell : noise.data()) cell = rng.next_gaussian();
        spectra[iter] = symmetric_eigen(correlation(standardize(noise)).values).eigenvalues;
    });

    result.null_percentile.resize(p);
    std::vector<double> rank_sample(iterations);
    for (std::size_t k = 0; k < p; ++k) {
        for (std::size_t iter = 0; iter < iterations; ++iter) rank_sample[iter] = spectra[iter][k];
        std::sort(rank_sample.begin(), rank_sample.end());
        result.null_percentile[k] = nearest_rank_percentile(rank_sample, percentile);
    }

    if (rule == RetentionRule::ContiguousPrefix) {
        std::size_t m = 0;
        while (m < p && result.observed[m] > result.null_percentile[m]) ++m;
        result.retained = m;
    } else {
        std::size_t count = 0;
        for (std::size_t k = 0; k < p; ++k)
            if (result.observed[k] > result.null_percentile[k]) ++count;
        result.retained = count;
    }
    return result;
}

} // namespace dimaudit
