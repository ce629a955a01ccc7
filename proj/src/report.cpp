#include "dimaudit/report.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "dimaudit/csv.hpp"
#include "dimaudit/rng.hpp"

namespace dimaudit {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

PipelineConfig default_config() {
    PipelineConfig config;
    config.schema.id_column = "player_api_id";
    config.schema.season_column = "";
    config.schema.rating_column = "overall_rating";
    config.schema.attribute_columns = default_outfield_attributes();
    return config;
}

namespace {

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const auto parsed = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw std::runtime_error("config: key '" + key + "' needs an unsigned integer, got '" +
                                 value + "'");
    }
}

double parse_real(const std::string& key, const std::string& value) {
    double out = 0.0;
    if (!csv::parse_double(value, out))
        throw std::runtime_error("config: key '" + key + "' needs a number, got '" + value + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "on") return true;
    if (value == "false" || value == "0" || value == "off") return false;
    throw std::runtime_error("config: key '" + key + "' needs true/false, got '" + value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream stream(value);
    while (std::getline(stream, item, ',')) {
        const auto begin = item.find_first_not_of(" \t");
        const auto end = item.find_last_not_of(" \t");
        if (begin == std::string::npos) continue;
        out.push_back(item.substr(begin, end - begin + 1));
    }
    return out;
}

void apply_stage_list(StageToggles& toggles, const std::string& value) {
    toggles = StageToggles{false, false, false, false, false, false, false, false};
    if (value == "none") return;
    if (value == "all") {
        toggles = StageToggles{};
        return;
    }
    for (const auto& name : split_list(value)) {
        if (name == "descriptives") toggles.descriptives = true;
        else if (name == "consistency") toggles.consistency = true;
        else if (name == "pca") toggles.pca = true;
        else if (name == "parallel") toggles.parallel = true;
        else if (name == "bootstrap") toggles.bootstrap = true;
        else if (name == "predict") toggles.predict = true;
        else if (name == "cluster") toggles.cluster = true;
        else if (name == "forest") toggles.forest = true;
        else throw std::runtime_error("config: unknown stage '" + name + "'");
    }
}

std::string iso8601_utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

} // namespace

void apply_config_line(PipelineConfig& config, const std::string& key, const std::string& value) {
    if (key == "input") config.input_path = value;
    else if (key == "id_column") config.schema.id_column = value;
    else if (key == "season_column") config.schema.season_column = value;
    else if (key == "rating_column") config.schema.rating_column = value;
    else if (key == "attributes") config.schema.attribute_columns = split_list(value);
    else if (key == "seed") config.seed = parse_u64(key, value);
    else if (key == "threads") config.threads = static_cast<unsigned>(parse_u64(key, value));
    else if (key == "out") config.out_dir = value;
    else if (key == "stages") apply_stage_list(config.stages, value);
    else if (key == "parallel_iterations") config.parallel_iterations = parse_u64(key, value);
    else if (key == "parallel_percentile") config.parallel_percentile = parse_real(key, value);
    else if (key == "retention_rule") {
        if (value == "prefix") config.retention_rule = RetentionRule::ContiguousPrefix;
        else if (value == "count") config.retention_rule = RetentionRule::CountExceedances;
        else throw std::runtime_error("config: retention_rule must be prefix or count");
    } else if (key == "bootstrap_iterations") config.bootstrap_iterations = parse_u64(key, value);
    else if (key == "cv_folds") config.cv_folds = parse_u64(key, value);
    else if (key == "lambda_grid") {
        config.lambda_grid.clear();
        if (value != "auto")
            for (const auto& item : split_list(value))
                config.lambda_grid.push_back(parse_real(key, item));
    } else if (key == "r2_baseline") {
        if (value == "fold") config.r2_baseline = R2Baseline::EvalFold;
        else if (value == "train") config.r2_baseline = R2Baseline::TrainMean;
        else throw std::runtime_error("config: r2_baseline must be fold or train");
    } else if (key == "cluster_k") config.cluster_k = parse_u64(key, value);
    else if (key == "cluster_from") config.cluster_from = parse_u64(key, value);
    else if (key == "cluster_to") config.cluster_to = parse_u64(key, value);
    else if (key == "cluster_restarts") config.cluster_restarts = parse_u64(key, value);
    else if (key == "ari_resamples") config.ari_resamples = parse_u64(key, value);
    else if (key == "cluster_scores") {
        if (value == "raw") config.cluster_standardized_scores = false;
        else if (value == "standardized") config.cluster_standardized_scores = true;
        else throw std::runtime_error("config: cluster_scores must be raw or standardized");
    } else if (key == "silhouette_k_max") config.silhouette_k_max = parse_u64(key, value);
    else if (key == "forest_trees") config.forest.trees = parse_u64(key, value);
    else if (key == "forest_mtry") config.forest.mtry = parse_u64(key, value);
    else if (key == "forest_min_leaf") config.forest.min_leaf = parse_u64(key, value);
    else if (key == "forest_max_depth") config.forest.max_depth = parse_u64(key, value);
    else if (key == "forest_bootstrap") config.forest.bootstrap = parse_bool(key, value);
    else throw std::runtime_error("config: unknown key '" + key + "'");
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    PipelineConfig config = default_config();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto begin = line.find_first_not_of(" \t");
        if (begin == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": expected key=value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        apply_config_line(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return config;
}

std::uint64_t stage_seed(std::uint64_t master_seed, const std::string& stage_name) {
    return mix_seed(master_seed, hash_name(stage_name.c_str()));
}

std::string config_reference() {
    return
        "config keys (key=value per line, '#' comments):\n"
        "  input=                      input CSV path (required)\n"
        "  id_column=player_api_id     player id column\n"
        "  season_column=              optional season/date column (informational)\n"
        "  rating_column=overall_rating target column\n"
        "  attributes=<28 outfield>    comma-separated attribute columns; the default\n"
        "                              list is a documented reconstruction\n"
        "  seed=42                     master seed; stage seeds derive from it\n"
        "  threads=0                   worker threads, 0 = hardware\n"
        "  out=audit_out               output directory\n"
        "  stages=all                  all | none | comma list of: descriptives,\n"
        "                              consistency, pca, parallel, bootstrap, predict,\n"
        "                              cluster, forest\n"
        "  parallel_iterations=500     null datasets for parallel analysis (>= 100)\n"
        "  parallel_percentile=0.95    per-rank nearest-rank percentile\n"
        "  retention_rule=prefix       prefix (stop at first failure) | count\n"
        "  bootstrap_iterations=1000   PCA bootstrap resamples (>= 100)\n"
        "  cv_folds=5                  outer cross-validation folds\n"
        "  lambda_grid=auto            auto (15-point log grid 1e-3..1e4) or comma list\n"
        "  r2_baseline=fold            fold (evaluation-fold mean) | train\n"
        "  cluster_k=2                 clusters for the residual-space k-means\n"
        "  cluster_from=2              first residual component (1-based)\n"
        "  cluster_to=11               last residual component (clamped to p)\n"
        "  cluster_restarts=10         k-means restarts\n"
        "  ari_resamples=100           bootstrap resamples for the ARI (>= 10)\n"
        "  cluster_scores=raw          raw | standardized residual score space\n"
        "  silhouette_k_max=6          silhouette reported for K = 2..this\n"
        "  forest_trees=200            trees in the benchmark forest\n"
        "  forest_mtry=0               features per split, 0 = ceil(p/3)\n"
        "  forest_min_leaf=5           minimum rows per leaf\n"
        "  forest_max_depth=0          0 = unlimited\n"
        "  forest_bootstrap=true       per-tree bootstrap sampling\n";
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

namespace {

ordered_json matrix_to_json(const Matrix& m) {
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (double v : m.row(i)) row.push_back(v);
        rows.push_back(std::move(row));
    }
    return rows;
}

ordered_json prediction_to_json(const PredictionReport& p) {
    ordered_json j;
    j["model_name"] = p.model_name;
    j["per_fold_r2"] = p.per_fold_r2;
    j["per_fold_rmse"] = p.per_fold_rmse;
    j["mean_r2"] = p.mean_r2;
    j["mean_rmse"] = p.mean_rmse;
    if (!p.per_fold_lambda.empty()) {
        j["lambda_chosen"] = p.lambda_chosen;
        j["per_fold_lambda"] = p.per_fold_lambda;
    }
    j["predictions"] = p.predictions;
    return j;
}

} // namespace

std::string report_to_json(const AuditReport& report) {
    ordered_json j;
    ordered_json meta;
    meta["schema_version"] = kSchemaVersion;
    meta["tool_version"] = kToolVersion;
    meta["generated_at"] = report.generated_at;
    meta["dataset"] = report.dataset_path;
    meta["n"] = report.n;
    meta["p"] = report.p;
    meta["master_seed"] = report.master_seed;
    // no worker count here: results must not depend on it
    ordered_json seeds;
    if (report.parallel) seeds["parallel"] = report.parallel->seed;
    if (report.bootstrap) seeds["bootstrap"] = report.bootstrap->seed;
    if (report.prediction) seeds["predict"] = report.prediction->folds_seed;
    if (report.clustering) seeds["cluster"] = report.clustering->seed;
    if (report.forest) seeds["forest"] = stage_seed(report.master_seed, "forest");
    meta["stage_seeds"] = std::move(seeds);
    j["metadata"] = std::move(meta);

    if (report.descriptives) {
        ordered_json section;
        section["sd_denominator"] = report.descriptives->sample_sd ? "sample" : "population";
        ordered_json vars = ordered_json::array();
        for (const auto& v : report.descriptives->variables) {
            ordered_json item;
            item["name"] = v.name;
            item["count"] = v.count;
            item["mean"] = v.mean;
            item["sd"] = v.sd;
            item["min"] = v.min;
            item["max"] = v.max;
            vars.push_back(std::move(item));
        }
        section["variables"] = std::move(vars);
        j["descriptives"] = std::move(section);
    }

    if (report.consistency) {
        const auto& a = *report.consistency;
        ordered_json section;
        section["alpha_raw"] = a.alpha;
        section["alpha_standardized"] = a.alpha_standardized;
        section["k"] = a.k;
        section["n"] = a.n;
        section["avg_inter_item_r"] = a.avg_inter_item_r;
        section["total_variance"] = a.total_variance;
        section["item_variances"] = a.item_variances;
        section["variance_denominator"] = "sample";
        j["consistency"] = std::move(section);
    }

    if (report.pca) {
        const auto& p = *report.pca;
        ordered_json section;
        section["eigenvalues"] = p.eigenvalues;
        section["variance_shares"] = p.variance_shares;
        section["cumulative_shares"] = p.cumulative_shares;
        ordered_json top = ordered_json::array();
        for (const auto& entry : p.top_pc1) {
            ordered_json item;
            item["attribute"] = entry.attribute;
            item["loading"] = entry.loading;
            top.push_back(std::move(item));
        }
        section["top_pc1_loadings"] = std::move(top);
        section["attribute_names"] = p.attribute_names;
        section["loadings"] = matrix_to_json(p.loadings);
        section["sign_convention"] = "largest-magnitude-entry-positive";
        j["pca"] = std::move(section);
    }

    if (report.parallel) {
        const auto& pa = *report.parallel;
        ordered_json section;
        section["iterations"] = pa.iterations;
        section["percentile"] = pa.percentile;
        section["seed"] = pa.seed;
        section["rule"] =
            pa.rule == RetentionRule::ContiguousPrefix ? "contiguous_prefix" : "count_exceedances";
        section["observed"] = pa.observed;
        section["null_percentile"] = pa.null_percentile;
        section["retained"] = pa.retained;
        j["parallel"] = std::move(section);
    }

    if (report.bootstrap) {
        const auto& b = *report.bootstrap;
        ordered_json section;
        section["iterations"] = b.iterations;
        section["seed"] = b.seed;
        section["pc1_share_mean"] = b.pc1_share_mean;
        section["pc1_share_ci"] = {b.pc1_share_ci_low, b.pc1_share_ci_high};
        section["cosine_mean"] = b.cosine_mean;
        section["degenerate_retries"] = b.degenerate_retries;
        section["pc1_shares"] = b.pc1_shares;
        section["cosines"] = b.cosines;
        j["bootstrap"] = std::move(section);
    }

    if (report.prediction) {
        ordered_json section;
        section["folds_k"] = report.prediction->folds_k;
        section["folds_seed"] = report.prediction->folds_seed;
        section["pc1_only"] = prediction_to_json(report.prediction->pc1);
        section["ridge"] = prediction_to_json(report.prediction->ridge);
        j["prediction"] = std::move(section);
    }

    if (report.clustering) {
        const auto& c = *report.clustering;
        ordered_json section;
        section["k"] = c.k;
        section["component_range"] = {c.from, c.to};
        section["score_space"] = c.standardized_scores ? "standardized" : "raw";
        section["seed"] = c.seed;
        section["sizes"] = c.sizes;
        section["silhouette"] = c.silhouette_value;
        ordered_json by_k = ordered_json::array();
        for (const auto& [k, s] : c.silhouette_by_k) {
            ordered_json item;
            item["k"] = k;
            item["silhouette"] = s;
            by_k.push_back(std::move(item));
        }
        section["silhouette_by_k"] = std::move(by_k);
        ordered_json ari;
        ari["resamples"] = c.ari.resamples;
        ari["mean"] = c.ari.ari_mean;
        ari["sd"] = c.ari.ari_sd;
        ari["values"] = c.ari.values;
        section["bootstrap_ari"] = std::move(ari);
        ordered_json profiles = ordered_json::array();
        for (const auto& prof : c.profiles) {
            ordered_json item;
            item["cluster"] = prof.cluster;
            item["size"] = prof.size;
            item["overall_mean"] = prof.overall_mean;
            item["overall_sd"] = prof.overall_sd;
            item["attribute_means_std"] = prof.attribute_means_std;
            profiles.push_back(std::move(item));
        }
        section["profiles"] = std::move(profiles);
        j["clustering"] = std::move(section);
    }

    if (report.forest) {
        ordered_json section = prediction_to_json(*report.forest);
        section["label"] = "benchmark";
        j["forest"] = std::move(section);
    }

    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Table and figure rendering
// ---------------------------------------------------------------------------

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

using csv::format_double;

} // namespace

std::vector<std::string> render_tables(const AuditReport& report, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    std::vector<std::string> written;
    auto track = [&](const fs::path& p) {
        written.push_back(p.string());
        return open_out(p);
    };

    if (report.descriptives) {
        auto out = track(dir / "table1_descriptives.csv");
        out << "Variable,N,Mean,StdDev,Min,Max\n";
        for (const auto& v : report.descriptives->variables)
            out << csv::quote_field(v.name) << ',' << v.count << ',' << format_double(v.mean)
                << ',' << format_double(v.sd) << ',' << format_double(v.min) << ','
                << format_double(v.max) << '\n';
    }

    if (report.consistency) {
        const auto& a = *report.consistency;
        auto out = track(dir / "table2_consistency.csv");
        out << "Metric,Value\n";
        out << "cronbach_alpha_raw," << format_double(a.alpha) << '\n';
        out << "cronbach_alpha_standardized," << format_double(a.alpha_standardized) << '\n';
        out << "average_inter_item_correlation," << format_double(a.avg_inter_item_r) << '\n';
        out << "n_players," << a.n << '\n';
    }

    if (report.pca) {
        const auto& p = *report.pca;
        {
            auto out = track(dir / "table3_pca_variance.csv");
            out << "Component,Eigenvalue,VarianceShare,CumulativeShare\n";
            for (std::size_t k = 0; k < p.eigenvalues.size(); ++k)
                out << "PC" << (k + 1) << ',' << format_double(p.eigenvalues[k]) << ','
                    << format_double(p.variance_shares[k]) << ','
                    << format_double(p.cumulative_shares[k]) << '\n';
        }
        {
            auto out = track(dir / "table4_pc1_loadings.csv");
            out << "Attribute,PC1Loading\n";
            for (const auto& entry : p.top_pc1)
                out << csv::quote_field(entry.attribute) << ',' << format_double(entry.loading)
                    << '\n';
        }
        {
            auto out = track(dir / "fig3_correlation.csv");
            out << "attribute";
            for (const auto& name : p.correlation.names) out << ',' << csv::quote_field(name);
            out << '\n';
            for (std::size_t i = 0; i < p.correlation.values.rows(); ++i) {
                out << csv::quote_field(p.correlation.names[i]);
                for (double v : p.correlation.values.row(i)) out << ',' << format_double(v);
                out << '\n';
            }
        }
    }

    if (report.parallel) {
        const auto& pa = *report.parallel;
        {
            auto out = track(dir / "table5_parallel.csv");
            out << "Component,Observed,NullPercentile,Retain\n";
            for (std::size_t k = 0; k < pa.observed.size(); ++k)
                out << "PC" << (k + 1) << ',' << format_double(pa.observed[k]) << ','
                    << format_double(pa.null_percentile[k]) << ','
                    << (k < pa.retained ? "yes" : "no") << '\n';
        }
        {
            auto out = track(dir / "fig1_scree.csv");
            out << "rank,observed,threshold\n";
            for (std::size_t k = 0; k < pa.observed.size(); ++k)
                out << (k + 1) << ',' << format_double(pa.observed[k]) << ','
                    << format_double(pa.null_percentile[k]) << '\n';
        }
    }

    if (report.bootstrap) {
        const auto& b = *report.bootstrap;
        auto out = track(dir / "fig2_pc1_share_hist.csv");
        out << "bin_low,bin_high,count\n";
        const auto [lo_it, hi_it] = std::minmax_element(b.pc1_shares.begin(), b.pc1_shares.end());
        double lo = *lo_it;
        double hi = *hi_it;
        if (hi == lo) hi = lo + 1e-9;
        constexpr std::size_t kBins = 30;
        std::vector<std::size_t> counts(kBins, 0);
        for (double v : b.pc1_shares) {
            auto bin = static_cast<std::size_t>((v - lo) / (hi - lo) * kBins);
            ++counts[std::min(bin, kBins - 1)];
        }
        for (std::size_t bin = 0; bin < kBins; ++bin) {
            const double width = (hi - lo) / kBins;
            out << format_double(lo + width * static_cast<double>(bin)) << ','
                << format_double(lo + width * static_cast<double>(bin + 1)) << ',' << counts[bin]
                << '\n';
        }
    }

    if (report.prediction || report.forest) {
        auto out = track(dir / "table6_prediction.csv");
        out << "Model,MeanR2,MeanRMSE,MinFoldR2,MaxFoldR2\n";
        auto emit = [&](const PredictionReport& p) {
            const auto [lo, hi] = std::minmax_element(p.per_fold_r2.begin(), p.per_fold_r2.end());
            out << p.model_name << ',' << format_double(p.mean_r2) << ','
                << format_double(p.mean_rmse) << ',' << format_double(*lo) << ','
                << format_double(*hi) << '\n';
        };
        if (report.prediction) {
            emit(report.prediction->pc1);
            emit(report.prediction->ridge);
        }
        if (report.forest) emit(*report.forest);
    }

    if (report.prediction) {
        auto out = track(dir / "fig4_prediction_scatter.csv");
        out << "observed,predicted\n";
        // out-of-fold ridge predictions; observation order follows the input rows
        for (std::size_t i = 0; i < report.prediction->ridge.predictions.size(); ++i)
            out << format_double(report.prediction->observed_targets[i]) << ','
                << format_double(report.prediction->ridge.predictions[i]) << '\n';
    }

    if (report.clustering) {
        const auto& c = *report.clustering;
        {
            auto out = track(dir / "table7_clusters.csv");
            out << "Cluster,N,OverallMean,OverallSd\n";
            for (const auto& prof : c.profiles)
                out << prof.cluster << ',' << prof.size << ',' << format_double(prof.overall_mean)
                    << ',' << format_double(prof.overall_sd) << '\n';
        }
        {
            auto out = track(dir / "fig5_silhouette.csv");
            out << "k,silhouette\n";
            for (const auto& [k, s] : c.silhouette_by_k)
                out << k << ',' << format_double(s) << '\n';
        }
        {
            auto out = track(dir / "fig6_cluster_profiles.csv");
            out << "cluster,attribute,mean_standardized\n";
            for (const auto& prof : c.profiles)
                for (std::size_t j = 0; j < prof.attribute_means_std.size(); ++j)
                    out << prof.cluster << ',' << csv::quote_field(c.attribute_names[j]) << ','
                        << format_double(prof.attribute_means_std[j]) << '\n';
        }
    }

    return written;
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

AuditReport run_pipeline(const PipelineConfig& config) {
    AuditReport report;
    report.dataset_path = config.input_path;
    report.master_seed = config.seed;
    report.threads = config.threads;
    report.generated_at = iso8601_utc_now();

    auto write_outputs = [&]() {
        fs::create_directories(config.out_dir);
        auto out = open_out(fs::path(config.out_dir) / "report.json");
        out << report_to_json(report);
        out.close();
        render_tables(report, config.out_dir);
    };

    if (!config.stages.any()) {
        write_outputs();
        return report;
    }

    std::optional<AttributeMatrix> matrix;
    std::optional<PcaModel> model;
    auto run_stage = [&](const char* name, auto&& body) {
        try {
            body();
        } catch (const StageError&) {
            throw;
        } catch (const std::exception& e) {
            try {
                write_outputs();
            } catch (...) {
                // keep the stage error as the primary failure
            }
            throw StageError(name, e.what());
        }
    };

    run_stage("ingest", [&] {
        const RatingTable raw = load_table(config.input_path, config.schema);
        const RatingTable aggregated = aggregate_players(raw);
        matrix = filter_complete(aggregated, config.schema.attribute_columns);
        report.n = matrix->values.rows();
        report.p = matrix->values.cols();
    });
    auto need_model = [&]() -> const PcaModel& {
        if (!model) model = pca_fit(*matrix);
        return *model;
    };

    if (config.stages.descriptives)
        run_stage("descriptives", [&] { report.descriptives = describe(*matrix); });

    if (config.stages.consistency)
        run_stage("consistency", [&] { report.consistency = cronbach_alpha(*matrix); });

    if (config.stages.pca) run_stage("pca", [&] {
        const PcaModel& fitted = need_model();
        PcaSection section;
        section.eigenvalues = fitted.eigen.eigenvalues;
        section.variance_shares = fitted.variance_shares;
        section.cumulative_shares.resize(fitted.variance_shares.size());
        std::partial_sum(fitted.variance_shares.begin(), fitted.variance_shares.end(),
                         section.cumulative_shares.begin());
        section.loadings = fitted.loadings;
        section.top_pc1 = top_loadings(fitted, 0, 10);
        section.correlation = fitted.correlation;
        section.attribute_names = fitted.attribute_names;
        report.pca = std::move(section);
    });

    if (config.stages.parallel) run_stage("parallel", [&] {
        report.parallel = parallel_analysis(*matrix, config.parallel_iterations,
                                            config.parallel_percentile,
                                            stage_seed(config.seed, "parallel"),
                                            config.retention_rule, config.threads);
    });

    if (config.stages.bootstrap) run_stage("bootstrap", [&] {
        report.bootstrap = bootstrap_pca(*matrix, config.bootstrap_iterations,
                                         stage_seed(config.seed, "bootstrap"), config.threads);
    });

    const std::uint64_t folds_seed = stage_seed(config.seed, "predict");
    if (config.stages.predict) run_stage("predict", [&] {
        const FoldAssignment folds =
            kfold_split(matrix->values.rows(), config.cv_folds, folds_seed);
        PredictionSection section;
        section.folds_k = folds.k;
        section.folds_seed = folds.seed;
        section.pc1 = cross_validate_pc1(*matrix, folds, config.r2_baseline);
        section.ridge = cross_validate_ridge(
            *matrix, folds,
            config.lambda_grid.empty() ? default_lambda_grid() : config.lambda_grid,
            config.r2_baseline);
        section.observed_targets = matrix->overall;
        report.prediction = std::move(section);
    });

    if (config.stages.cluster) run_stage("cluster", [&] {
        const PcaModel& fitted = need_model();
        const std::size_t p = matrix->values.cols();
        const std::size_t to = std::min(config.cluster_to, p);
        ScoreMatrix scores = residual_scores(fitted, *matrix, config.cluster_from, to);
        if (config.cluster_standardized_scores)
            scores.values = standardize(scores.values).values;

        const std::uint64_t seed = stage_seed(config.seed, "cluster");
        ClusterResult result = kmeans(scores, config.cluster_k, config.cluster_restarts, seed);

        // Canonical labels: ascending overall-rating mean.
        {
            std::vector<double> means(result.k, 0.0);
            std::vector<std::size_t> counts(result.k, 0);
            for (std::size_t i = 0; i < result.assignments.size(); ++i) {
                means[result.assignments[i]] += matrix->overall[i];
                ++counts[result.assignments[i]];
            }
            for (std::size_t c = 0; c < result.k; ++c)
                means[c] /= static_cast<double>(counts[c]);
            std::vector<std::size_t> order(result.k);
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return means[a] < means[b]; });
            std::vector<std::size_t> relabel(result.k);
            for (std::size_t new_label = 0; new_label < result.k; ++new_label)
                relabel[order[new_label]] = new_label;
            Matrix centroids = result.centroids;
            for (std::size_t c = 0; c < result.k; ++c) {
                const auto src = centroids.row(c);
                std::copy(src.begin(), src.end(), result.centroids.row(relabel[c]).begin());
            }
            for (auto& label : result.assignments) label = relabel[label];
        }

        ClusterSection section;
        section.k = result.k;
        section.from = config.cluster_from;
        section.to = to;
        section.seed = seed;
        section.standardized_scores = config.cluster_standardized_scores;
        section.sizes.assign(result.k, 0);
        for (std::size_t label : result.assignments) ++section.sizes[label];
        section.silhouette_value = silhouette(scores, result, config.threads);
        for (std::size_t k = 2; k <= config.silhouette_k_max; ++k) {
            if (k == result.k) {
                section.silhouette_by_k.emplace_back(k, section.silhouette_value);
                continue;
            }
            const ClusterResult alt = kmeans(scores, k, config.cluster_restarts, seed);
            section.silhouette_by_k.emplace_back(k, silhouette(scores, alt, config.threads));
        }
        section.ari = bootstrap_ari(scores, config.cluster_k, config.ari_resamples, seed,
                                    config.cluster_restarts, config.threads);
        section.profiles = cluster_profiles(result, *matrix);
        section.attribute_names = matrix->attribute_names;
        report.clustering = std::move(section);
    });

    if (config.stages.forest) run_stage("forest", [&] {
        const FoldAssignment folds =
            kfold_split(matrix->values.rows(), config.cv_folds, folds_seed);
        ForestParams params = config.forest;
        params.seed = stage_seed(config.seed, "forest");
        params.threads = config.threads;
        report.forest = forest_cv(*matrix, folds, params);
    });

    run_stage("render", [&] { write_outputs(); });
    return report;
}

} // namespace dimaudit
