#include "dimaudit/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dimaudit/concurrency.hpp"
#include "dimaudit/rng.hpp"

namespace dimaudit {

ScoreMatrix residual_scores(const PcaModel& model, const AttributeMatrix& matrix,
                            std::size_t from, std::size_t to) {
    const std::size_t p = model.attribute_names.size();
    if (from < 1 || from > to || to > p)
        throw std::invalid_argument("residual_scores: invalid component range");
    const ScoreMatrix all = pca_scores(model, matrix);
    ScoreMatrix out;
    const std::size_t d = to - from + 1;
    out.values = Matrix(all.values.rows(), d);
    for (std::size_t i = 0; i < all.values.rows(); ++i)
        for (std::size_t j = 0; j < d; ++j) out.values(i, j) = all.values(i, from - 1 + j);
    out.component_labels.assign(all.component_labels.begin() + (from - 1),
                                all.component_labels.begin() + to);
    return out;
}

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

struct LloydRun {
    std::vector<std::size_t> assignments;
    Matrix centroids;
    double inertia = 0.0;
    std::vector<double> trace;
};

LloydRun lloyd(const Matrix& x, std::size_t k, Rng& rng) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    constexpr int kMaxIterations = 300;

    // k-means++ seeding: first centroid uniform, the rest sampled with
    // probability proportional to squared distance to the nearest chosen one.
    Matrix centroids(k, d);
    std::vector<double> nearest_sq(n, std::numeric_limits<double>::infinity());
    {
        const std::size_t first = rng.next_index(n);
        std::copy(x.row(first).begin(), x.row(first).end(), centroids.row(0).begin());
        for (std::size_t c = 1; c < k; ++c) {
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                nearest_sq[i] = std::min(nearest_sq[i], sq_dist(x.row(i), centroids.row(c - 1)));
                total += nearest_sq[i];
            }
            std::size_t chosen = n - 1;
            if (total > 0.0) {
                const double target = rng.next_double() * total;
                double cumulative = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    cumulative += nearest_sq[i];
                    if (cumulative >= target) {
                        chosen = i;
                        break;
                    }
                }
            } else {
                chosen = rng.next_index(n); // all mass at one point
            }
            std::copy(x.row(chosen).begin(), x.row(chosen).end(), centroids.row(c).begin());
        }
    }

    LloydRun run;
    run.assignments.assign(n, 0);
    std::vector<std::size_t> counts(k, 0);

    for (int iteration = 0; iteration < kMaxIterations; ++iteration) {
        // Assignment step.
        bool changed = false;
        double inertia = 0.0;
        std::fill(counts.begin(), counts.end(), std::size_t{0});
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t arg = 0;
            for (std::size_t c = 0; c < k; ++c) {
                const double dist = sq_dist(x.row(i), centroids.row(c));
                if (dist < best) {
                    best = dist;
                    arg = c;
                }
            }
            if (run.assignments[i] != arg) {
                run.assignments[i] = arg;
                changed = true;
            }
            ++counts[arg];
            inertia += best;
        }

        // Repair empty clusters: move the globally farthest point (from its
        // own centroid) into each empty slot, then reassign.
        bool repaired = false;
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            double worst = -1.0;
            std::size_t victim = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[run.assignments[i]] <= 1) continue;
                const double dist = sq_dist(x.row(i), centroids.row(run.assignments[i]));
                if (dist > worst) {
                    worst = dist;
                    victim = i;
                }
            }
            --counts[run.assignments[victim]];
            run.assignments[victim] = c;
            ++counts[c];
            std::copy(x.row(victim).begin(), x.row(victim).end(), centroids.row(c).begin());
            repaired = true;
        }
        if (repaired) {
            // Recompute inertia against the repaired centroids for the trace.
            inertia = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                inertia += sq_dist(x.row(i), centroids.row(run.assignments[i]));
            changed = true;
        }

        run.trace.push_back(inertia);
        run.inertia = inertia;
        if (!changed && iteration > 0) break;

        // Update step.
        for (auto& cell : centroids.data()) cell = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            auto target = centroids.row(run.assignments[i]);
            const auto row = x.row(i);
            for (std::size_t j = 0; j < d; ++j) target[j] += row[j];
        }
        for (std::size_t c = 0; c < k; ++c) {
            auto row = centroids.row(c);
            for (std::size_t j = 0; j < d; ++j) row[j] /= static_cast<double>(counts[c]);
        }
    }

    // Final inertia against the final centroids.
    run.inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        run.inertia += sq_dist(x.row(i), centroids.row(run.assignments[i]));
    run.centroids = std::move(centroids);
    return run;
}

} // namespace

ClusterResult kmeans(const ScoreMatrix& scores, std::size_t k, std::size_t restarts,
                     std::uint64_t seed) {
    const std::size_t n = scores.values.rows();
    if (k < 2) throw std::invalid_argument("kmeans: need k >= 2");
    if (n <= k) throw std::invalid_argument("kmeans: need n > k");
    if (restarts == 0) throw std::invalid_argument("kmeans: need at least one restart");

    LloydRun best;
    bool have_best = false;
    for (std::size_t r = 0; r < restarts; ++r) {
        Rng rng(mix_seed(seed, r));
        LloydRun run = lloyd(scores.values, k, rng);
        if (!have_best || run.inertia < best.inertia) {
            best = std::move(run);
            have_best = true;
        }
    }

    ClusterResult result;
    result.k = k;
    result.seed = seed;
    result.assignments = std::move(best.assignments);
    result.centroids = std::move(best.centroids);
    result.inertia = best.inertia;
    result.inertia_trace = std::move(best.trace);
    return result;
}

double silhouette(const ScoreMatrix& scores, const ClusterResult& result, unsigned threads) {
    const std::size_t n = scores.values.rows();
    const std::size_t k = result.k;
    if (k < 2) throw std::invalid_argument("silhouette: need k >= 2");
    if (result.assignments.size() != n)
        throw std::invalid_argument("silhouette: assignment length mismatch");

    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t label : result.assignments) ++sizes[label];

    std::vector<double> s(n, 0.0);
    parallel_for(n, threads, [&](std::size_t i) {
        std::vector<double> dist_sum(k, 0.0);
        const auto xi = scores.values.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            dist_sum[result.assignments[j]] += std::sqrt(sq_dist(xi, scores.values.row(j)));
        }
        const std::size_t own = result.assignments[i];
        if (sizes[own] <= 1) {
            s[i] = 0.0; // singleton
            return;
        }
        const double a = dist_sum[own] / static_cast<double>(sizes[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (c == own || sizes[c] == 0) continue;
            b = std::min(b, dist_sum[c] / static_cast<double>(sizes[c]));
        }
        s[i] = (b - a) / std::max(a, b);
    });
    return mean_of(s);
}

double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b) {
    if (a.size() != b.size()) throw std::invalid_argument("adjusted_rand_index: length mismatch");
    const std::size_t n = a.size();
    if (n == 0) throw std::invalid_argument("adjusted_rand_index: empty labelings");

    const std::size_t ka = 1 + *std::max_element(a.begin(), a.end());
    const std::size_t kb = 1 + *std::max_element(b.begin(), b.end());
    Matrix contingency(ka, kb);
    std::vector<double> row_sums(ka, 0.0), col_sums(kb, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        contingency(a[i], b[i]) += 1.0;
        row_sums[a[i]] += 1.0;
        col_sums[b[i]] += 1.0;
    }

    auto choose2 = [](double m) { return m * (m - 1.0) / 2.0; };
    double index = 0.0;
    for (std::size_t i = 0; i < ka; ++i)
        for (std::size_t j = 0; j < kb; ++j) index += choose2(contingency(i, j));
    double sum_a = 0.0, sum_b = 0.0;
    for (double v : row_sums) sum_a += choose2(v);
    for (double v : col_sums) sum_b += choose2(v);
    const double expected = sum_a * sum_b / choose2(static_cast<double>(n));
    const double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected) return 1.0; // both partitions trivially agree
    return (index - expected) / (max_index - expected);
}

AriReport bootstrap_ari(const ScoreMatrix& scores, std::size_t k, std::size_t resamples,
                        std::uint64_t seed, std::size_t restarts, unsigned threads) {
    if (resamples < 10) throw std::invalid_argument("bootstrap_ari: need at least 10 resamples");
    const std::size_t n = scores.values.rows();
    const std::size_t d = scores.values.cols();

    const ClusterResult baseline = kmeans(scores, k, restarts, seed);

    AriReport report;
    report.resamples = resamples;
    report.values.resize(resamples);
    parallel_for(resamples, threads, [&](std::size_t iter) {
        // Offset keeps resample streams clear of the restart streams the
        // baseline fit consumed.
        const std::uint64_t stream = mix_seed(seed, 0x10000 + iter);
        Rng rng(stream);
        ScoreMatrix resample;
        resample.values = Matrix(n, d);
        resample.component_labels = scores.component_labels;
        for (std::size_t i = 0; i < n; ++i) {
            const auto src = scores.values.row(rng.next_index(n));
            std::copy(src.begin(), src.end(), resample.values.row(i).begin());
        }
        const ClusterResult refit = kmeans(resample, k, restarts, stream);
        // Assign the full original sample to the nearest resample centroid.
        std::vector<std::size_t> induced(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double dist = sq_dist(scores.values.row(i), refit.centroids.row(c));
                if (dist < best) {
                    best = dist;
                    induced[i] = c;
                }
            }
        }
        report.values[iter] = adjusted_rand_index(induced, baseline.assignments);
    });

    report.ari_mean = mean_of(report.values);
    report.ari_sd = report.values.size() > 1 ? std::sqrt(variance_of(report.values, true)) : 0.0;
    return report;
}

std::vector<ClusterProfile> cluster_profiles(const ClusterResult& result,
                                             const AttributeMatrix& matrix) {
    const std::size_t n = matrix.values.rows();
    if (result.assignments.size() != n)
        throw std::invalid_argument("cluster_profiles: row count mismatch");
    const std::size_t p = matrix.attribute_names.size();
    const Matrix standardized = standardize(matrix.values, matrix.attribute_names).values;

    std::vector<ClusterProfile> profiles(result.k);
    for (std::size_t c = 0; c < result.k; ++c) {
        profiles[c].cluster = c;
        profiles[c].attribute_means_std.assign(p, 0.0);
    }
    for (std::size_t i = 0; i < n; ++i) {
        ClusterProfile& prof = profiles[result.assignments[i]];
        ++prof.size;
        const auto row = standardized.row(i);
        for (std::size_t j = 0; j < p; ++j) prof.attribute_means_std[j] += row[j];
    }
    for (auto& prof : profiles)
        for (double& v : prof.attribute_means_std)
            if (prof.size > 0) v /= static_cast<double>(prof.size);

    // Overall-rating mean and sd per cluster.
    for (std::size_t c = 0; c < result.k; ++c) {
        std::vector<double> overall;
        overall.reserve(profiles[c].size);
        for (std::size_t i = 0; i < n; ++i)
            if (result.assignments[i] == c) overall.push_back(matrix.overall[i]);
        if (!overall.empty()) {
            profiles[c].overall_mean = mean_of(overall);
            profiles[c].overall_sd =
                overall.size() > 1 ? std::sqrt(variance_of(overall, true)) : 0.0;
        }
    }
    return profiles;
}

} // namespace dimaudit
