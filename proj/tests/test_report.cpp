#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dimaudit/csv.hpp"
#include "dimaudit/report.hpp"

using namespace dimaudit;
namespace fs = std::filesystem;

namespace {

fs::path test_dir() {
    const fs::path dir = fs::temp_directory_path() / "dimaudit_tests" / "pipeline";
    fs::create_directories(dir);
    return dir;
}

// Small planted dataset on disk plus a config tuned for test runtimes.
PipelineConfig small_pipeline_config(const std::string& tag) {
    const fs::path input = test_dir() / (tag + "_input.csv");
    if (!fs::exists(input)) {
        const PlantedSpec spec = block_factor_spec(300, 12, 3, 0.85, 0.8, 2024);
        write_planted_csv(generate_planted(spec), input.string());
    }
    PipelineConfig config = default_config();
    config.input_path = input.string();
    config.schema.id_column = "player_id";
    config.schema.rating_column = "overall_rating";
    config.schema.attribute_columns.clear();
    for (std::size_t j = 1; j <= 12; ++j)
        config.schema.attribute_columns.push_back("a" + std::to_string(j));
    config.out_dir = (test_dir() / (tag + "_out")).string();
    config.seed = 11;
    config.parallel_iterations = 100;
    config.bootstrap_iterations = 100;
    config.ari_resamples = 10;
    config.cluster_restarts = 4;
    config.silhouette_k_max = 3;
    config.forest.trees = 20;
    return config;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string strip_timestamp(std::string json_text) {
    auto doc = nlohmann::ordered_json::parse(json_text);
    doc["metadata"].erase("generated_at");
    return doc.dump(2);
}

} // namespace

TEST_CASE("config: parsing, overrides, and unknown keys") {
    const fs::path path = test_dir() / "config.txt";
    {
        std::ofstream out(path);
        out << "# comment line\n"
            << "input=data.csv\n"
            << "seed=99\n"
            << "stages=pca,parallel\n"
            << "attributes=one,two,three\n"
            << "parallel_iterations=250\n"
            << "retention_rule=count\n"
            << "lambda_grid=0.1,1,10\n";
    }
    const PipelineConfig config = load_config(path.string());
    CHECK(config.input_path == "data.csv");
    CHECK(config.seed == 99);
    CHECK(config.stages.pca);
    CHECK(config.stages.parallel);
    CHECK_FALSE(config.stages.bootstrap);
    CHECK_FALSE(config.stages.descriptives);
    CHECK(config.schema.attribute_columns == std::vector<std::string>{"one", "two", "three"});
    CHECK(config.parallel_iterations == 250);
    CHECK(config.retention_rule == RetentionRule::CountExceedances);
    CHECK(config.lambda_grid == std::vector<double>{0.1, 1.0, 10.0});

    PipelineConfig probe = default_config();
    CHECK_THROWS_AS(apply_config_line(probe, "no_such_key", "1"), std::runtime_error);
    CHECK_THROWS_AS(apply_config_line(probe, "seed", "abc"), std::runtime_error);
    CHECK(default_config().schema.attribute_columns.size() == 28);
}

TEST_CASE("stage_seed: stable fan-out from the master seed") {
    const std::uint64_t a = stage_seed(42, "parallel");
    CHECK(a == stage_seed(42, "parallel"));
    CHECK(a != stage_seed(42, "bootstrap"));
    CHECK(a != stage_seed(43, "parallel"));
}

TEST_CASE("run_pipeline: full run emits every section, 13 data files, and report.json") {
    PipelineConfig config = small_pipeline_config("full");
    const AuditReport report = run_pipeline(config);

    CHECK(report.n == 300);
    CHECK(report.p == 12);
    CHECK(report.descriptives.has_value());
    CHECK(report.consistency.has_value());
    CHECK(report.pca.has_value());
    CHECK(report.parallel.has_value());
    CHECK(report.bootstrap.has_value());
    CHECK(report.prediction.has_value());
    CHECK(report.clustering.has_value());
    CHECK(report.forest.has_value());

    CHECK(fs::exists(fs::path(config.out_dir) / "report.json"));
    const auto files = render_tables(report, config.out_dir);
    CHECK(files.size() == 13); // 7 tables + 6 figure-data files

    // planted 3-factor data: parallel analysis should retain 3
    CHECK(report.parallel->retained == 3);
}

TEST_CASE("run_pipeline: cluster report is canonically labeled by overall mean") {
    PipelineConfig config = small_pipeline_config("full");
    config.out_dir = (test_dir() / "canon_out").string();
    const AuditReport report = run_pipeline(config);
    REQUIRE(report.clustering.has_value());
    const auto& profiles = report.clustering->profiles;
    for (std::size_t c = 0; c + 1 < profiles.size(); ++c)
        CHECK(profiles[c].overall_mean <= profiles[c + 1].overall_mean);
    std::size_t total = 0;
    for (const auto& prof : profiles) total += prof.size;
    CHECK(total == 300);
}

TEST_CASE("run_pipeline: partial stage selection emits matching sections and files") {
    PipelineConfig config = small_pipeline_config("partial");
    config.stages = StageToggles{false, false, false, false, false, false, false, false};
    config.stages.pca = true;
    config.stages.parallel = true;
    const AuditReport report = run_pipeline(config);

    CHECK(report.pca.has_value());
    CHECK(report.parallel.has_value());
    CHECK_FALSE(report.descriptives.has_value());
    CHECK_FALSE(report.clustering.has_value());
    CHECK_FALSE(report.forest.has_value());

    const auto files = render_tables(report, config.out_dir);
    CHECK(files.size() == 5); // tables 3,4,5 + scree + correlation heatmap
    for (const auto& f : files) CHECK(fs::exists(f));
    CHECK_FALSE(fs::exists(fs::path(config.out_dir) / "table7_clusters.csv"));
}

TEST_CASE("run_pipeline: toggles all off gives a metadata-only report") {
    PipelineConfig config = small_pipeline_config("meta");
    config.stages = StageToggles{false, false, false, false, false, false, false, false};
    const AuditReport report = run_pipeline(config);
    CHECK(report.n == 0);
    CHECK_FALSE(report.descriptives.has_value());
    const auto doc = nlohmann::ordered_json::parse(slurp(fs::path(config.out_dir) / "report.json"));
    CHECK(doc.contains("metadata"));
    CHECK_FALSE(doc.contains("pca"));
}

TEST_CASE("run_pipeline: stage errors carry the stage name; partial output is retained") {
    PipelineConfig config = small_pipeline_config("err");
    config.input_path = (test_dir() / "missing.csv").string();
    CHECK_THROWS_AS(run_pipeline(config), StageError);
    try {
        run_pipeline(config);
    } catch (const StageError& e) {
        CHECK(e.stage == "ingest");
    }
    // partial (metadata-only) report still written
    CHECK(fs::exists(fs::path(config.out_dir) / "report.json"));
}

TEST_CASE("render_tables: emitted PCA table parses back bit-exactly") {
    PipelineConfig config = small_pipeline_config("full");
    config.out_dir = (test_dir() / "roundtrip_out").string();
    const AuditReport report = run_pipeline(config);

    const auto records = csv::read_file((fs::path(config.out_dir) / "table3_pca_variance.csv").string());
    REQUIRE(records.size() == 13); // header + 12 components
    for (std::size_t k = 0; k < 12; ++k) {
        double eigenvalue = 0.0, share = 0.0, cumulative = 0.0;
        REQUIRE(csv::parse_double(records[k + 1][1], eigenvalue));
        REQUIRE(csv::parse_double(records[k + 1][2], share));
        REQUIRE(csv::parse_double(records[k + 1][3], cumulative));
        CHECK(eigenvalue == report.pca->eigenvalues[k]);
        CHECK(share == report.pca->variance_shares[k]);
        CHECK(cumulative == report.pca->cumulative_shares[k]);
    }
}

TEST_CASE("run_pipeline: a stage re-run in isolation reproduces the full-run numbers") {
    PipelineConfig full = small_pipeline_config("iso_full");
    const AuditReport everything = run_pipeline(full);

    PipelineConfig solo = small_pipeline_config("iso_solo");
    solo.stages = StageToggles{false, false, false, false, false, false, false, false};
    solo.stages.parallel = true;
    const AuditReport only_parallel = run_pipeline(solo);

    REQUIRE(everything.parallel.has_value());
    REQUIRE(only_parallel.parallel.has_value());
    CHECK(only_parallel.parallel->observed == everything.parallel->observed);
    CHECK(only_parallel.parallel->null_percentile == everything.parallel->null_percentile);
    CHECK(only_parallel.parallel->seed == everything.parallel->seed);
}

TEST_CASE("run_pipeline: r2_baseline=train changes R2 but not predictions") {
    PipelineConfig config = small_pipeline_config("r2b");
    config.stages = StageToggles{false, false, false, false, false, true, false, false};
    const AuditReport fold_based = run_pipeline(config);

    config.out_dir = (test_dir() / "r2b_train_out").string();
    apply_config_line(config, "r2_baseline", "train");
    const AuditReport train_based = run_pipeline(config);

    CHECK(fold_based.prediction->ridge.predictions == train_based.prediction->ridge.predictions);
    CHECK(fold_based.prediction->ridge.mean_r2 != train_based.prediction->ridge.mean_r2);
}

TEST_CASE("run_pipeline: byte-identical reports across reruns and worker counts") {
    PipelineConfig config = small_pipeline_config("det");
    config.threads = 1;
    config.out_dir = (test_dir() / "det_out_1").string();
    run_pipeline(config);
    const std::string first = strip_timestamp(slurp(fs::path(config.out_dir) / "report.json"));

    config.threads = 4;
    config.out_dir = (test_dir() / "det_out_4").string();
    run_pipeline(config);
    const std::string second = strip_timestamp(slurp(fs::path(config.out_dir) / "report.json"));

    CHECK(first == second);
}
