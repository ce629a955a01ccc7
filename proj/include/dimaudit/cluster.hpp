#pragma once

// Residual-space clustering: k-means on component scores beyond PC1,
// silhouette model selection, bootstrap ARI stability, and per-cluster
// profiles.

#include <cstdint>

#include "dimaudit/pca.hpp"

namespace dimaudit {

struct ClusterResult {
    std::size_t k = 0;
    std::vector<std::size_t> assignments;
    Matrix centroids; // k x d
    double inertia = 0.0;
    std::vector<double> inertia_trace; // per Lloyd iteration of the winning restart
    std::uint64_t seed = 0;
};

struct AriReport {
    std::size_t resamples = 0;
    double ari_mean = 0.0;
    double ari_sd = 0.0; // sample sd
    std::vector<double> values;
};

struct ClusterProfile {
    std::size_t cluster = 0;
    std::size_t size = 0;
    double overall_mean = 0.0;
    double overall_sd = 0.0;                    // sample sd
    std::vector<double> attribute_means_std;    // mean standardized attribute vector
};

// Score columns `from`..`to` (1-based component labels, inclusive) in raw
// score units.
ScoreMatrix residual_scores(const PcaModel& model, const AttributeMatrix& matrix,
                            std::size_t from = 2, std::size_t to = 11);

// Distance-weighted (k-means++) seeding, Lloyd iterations to an assignment
// fixpoint (300-iteration cap), empty clusters repaired by reseeding with the
// point farthest from its own centroid. Best inertia over `restarts` wins.
ClusterResult kmeans(const ScoreMatrix& scores, std::size_t k, std::size_t restarts = 10,
                     std::uint64_t seed = 0);

// Mean over points of (b - a) / max(a, b), Euclidean metric; a point in a
// singleton cluster contributes 0.
double silhouette(const ScoreMatrix& scores, const ClusterResult& result, unsigned threads = 0);

double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b);

// Per resample: rows resampled with replacement, k-means refit, the FULL
// original sample assigned to the nearest resample centroid, ARI against the
// baseline full-sample clustering.
AriReport bootstrap_ari(const ScoreMatrix& scores, std::size_t k, std::size_t resamples = 100,
                        std::uint64_t seed = 0, std::size_t restarts = 10, unsigned threads = 0);

// Size, overall-rating mean/sd, and mean standardized attribute vector per
// cluster.
std::vector<ClusterProfile> cluster_profiles(const ClusterResult& result,
                                             const AttributeMatrix& matrix);

} // namespace dimaudit
