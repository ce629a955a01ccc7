#pragma once

// Horn's parallel analysis: compare observed eigenvalues to per-rank
// percentiles of eigenvalues from size-matched standard-Gaussian data.

#include <cstdint>

#include "dimaudit/table.hpp"

namespace dimaudit {

enum class RetentionRule {
    ContiguousPrefix, // stop at the first rank that fails the threshold
    CountExceedances  // count every rank whose eigenvalue clears its threshold
};

struct ParallelResult {
    std::vector<double> observed;
    std::vector<double> null_percentile; // per-rank empirical percentile of the null spectra
    std::size_t retained = 0;
    std::size_t iterations = 0;
    double percentile = 0.95;
    std::uint64_t seed = 0;
    RetentionRule rule = RetentionRule::ContiguousPrefix;
};

// Nearest-rank percentile of the q-quantile: element ceil(q*B) (1-based) of the
// ascending sorted sample.
double nearest_rank_percentile(std::vector<double> sorted_ascending, double q);

// Generates `iterations` n x p standard-Gaussian matrices, standardizes each,
// takes their spectra via the same eigensolver as the real data, and compares
// per-rank percentiles against the observed spectrum. Retention requires
// strictly exceeding the threshold. Deterministic given the seed; iterations
// use hash-derived sub-streams so any worker count gives identical results.
ParallelResult parallel_analysis(const AttributeMatrix& matrix, std::size_t iterations = 500,
                                 double percentile = 0.95, std::uint64_t seed = 0,
                                 RetentionRule rule = RetentionRule::ContiguousPrefix,
                                 unsigned threads = 0);

} // namespace dimaudit
