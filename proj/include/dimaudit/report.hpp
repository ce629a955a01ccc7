#pragma once

// Pipeline orchestration and report assembly: runs the audit stages in order,
// aggregates their outputs into one JSON document, and renders per-table CSVs
// plus figure-data files.

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "dimaudit/cluster.hpp"
#include "dimaudit/consistency.hpp"
#include "dimaudit/forest.hpp"
#include "dimaudit/parallel_analysis.hpp"
#include "dimaudit/predict.hpp"
#include "dimaudit/stability.hpp"
#include "dimaudit/synth.hpp"

namespace dimaudit {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

struct StageToggles {
    bool descriptives = true;
    bool consistency = true;
    bool pca = true;
    bool parallel = true;
    bool bootstrap = true;
    bool predict = true;
    bool cluster = true;
    bool forest = true;

    bool any() const {
        return descriptives || consistency || pca || parallel || bootstrap || predict ||
               cluster || forest;
    }
};

struct PipelineConfig {
    std::string input_path;
    TableSchema schema; // attribute_columns doubles as the required-attribute list
    std::uint64_t seed = 42;
    unsigned threads = 0;
    std::string out_dir = "audit_out";
    StageToggles stages;

    std::size_t parallel_iterations = 500;
    double parallel_percentile = 0.95;
    RetentionRule retention_rule = RetentionRule::ContiguousPrefix;

    std::size_t bootstrap_iterations = 1000;

    std::size_t cv_folds = 5;
    std::vector<double> lambda_grid; // empty = default_lambda_grid()
    R2Baseline r2_baseline = R2Baseline::EvalFold;

    std::size_t cluster_k = 2;
    std::size_t cluster_from = 2;
    std::size_t cluster_to = 11; // clamped to p by the pipeline
    std::size_t cluster_restarts = 10;
    std::size_t ari_resamples = 100;
    bool cluster_standardized_scores = false; // standardize residual scores first
    std::size_t silhouette_k_max = 6;

    ForestParams forest;
};

// Defaults: the reconstructed 28-attribute outfield schema of the source
// rating database.
PipelineConfig default_config();

// Flat key=value file; '#' starts a comment. Unknown keys are an error.
PipelineConfig load_config(const std::string& path);
void apply_config_line(PipelineConfig& config, const std::string& key, const std::string& value);

// Every config key with its default and a one-line description.
std::string config_reference();

struct PcaSection {
    std::vector<double> eigenvalues;
    std::vector<double> variance_shares;
    std::vector<double> cumulative_shares;
    Matrix loadings;
    std::vector<LoadingEntry> top_pc1;
    CorrelationMatrix correlation;
    std::vector<std::string> attribute_names;
};

struct ClusterSection {
    std::size_t k = 0;
    std::size_t from = 0;
    std::size_t to = 0;
    std::vector<std::size_t> sizes;
    double silhouette_value = 0.0;
    std::vector<std::pair<std::size_t, double>> silhouette_by_k;
    AriReport ari;
    std::vector<ClusterProfile> profiles; // labels ordered by ascending overall mean
    std::vector<std::string> attribute_names;
    std::uint64_t seed = 0;
    bool standardized_scores = false;
};

struct PredictionSection {
    PredictionReport pc1;
    PredictionReport ridge;
    std::vector<double> observed_targets; // row-aligned with the prediction vectors
    std::size_t folds_k = 0;
    std::uint64_t folds_seed = 0;
};

struct AuditReport {
    std::string dataset_path;
    std::size_t n = 0;
    std::size_t p = 0;
    std::uint64_t master_seed = 0;
    unsigned threads = 0;
    std::string generated_at; // ISO-8601 UTC; the one non-reproducible field

    std::optional<DescriptiveStats> descriptives;
    std::optional<AlphaReport> consistency;
    std::optional<PcaSection> pca;
    std::optional<ParallelResult> parallel;
    std::optional<BootstrapReport> bootstrap;
    std::optional<PredictionSection> prediction;
    std::optional<ClusterSection> clustering;
    std::optional<PredictionReport> forest;
};

// Stage failures carry the stage name so callers can report "stage: cause".
struct StageError : std::runtime_error {
    StageError(const std::string& stage_name, const std::string& cause)
        : std::runtime_error(stage_name + ": " + cause), stage(stage_name) {}
    std::string stage;
};

// Derives the per-stage seed from the master seed and the stage name
// (mix_seed over an FNV-1a name hash); stages re-run in isolation reproduce
// pipeline results exactly.
std::uint64_t stage_seed(std::uint64_t master_seed, const std::string& stage_name);

// Runs the enabled stages in order (descriptives, consistency, pca, parallel,
// bootstrap, predict, cluster, forest), writes report.json plus table and
// figure files into config.out_dir. On a stage failure the partial report is
// still written before StageError propagates.
AuditReport run_pipeline(const PipelineConfig& config);

// JSON document (stable key order, round-trip doubles).
std::string report_to_json(const AuditReport& report);

// Writes report.json + seven table CSVs + six figure-data CSVs (present iff
// the matching section ran). Returns the paths written.
std::vector<std::string> render_tables(const AuditReport& report, const std::string& out_dir);

} // namespace dimaudit
