// dimaudit: dimensionality audit of multi-attribute rating tables.
// Runs the full diagnostic pipeline or single stages and writes a JSON report
// plus table/figure data files.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dimaudit/report.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::string input;
    std::string out_dir;
    std::string attributes;
    std::string id_column;
    std::string rating_column;
    std::string lambda_grid;
    std::string retention_rule;
    std::string cluster_scores;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, CliOptions& opts) {
    cmd->add_option("--config", opts.config_path, "flat key=value config file");
    cmd->add_option("--input", opts.input, "input CSV (header row, comma separated)");
    cmd->add_option("--out", opts.out_dir, "output directory (default audit_out)");
    cmd->add_option("--seed", opts.seed, "master seed; stage seeds derive from it")
        ->each([&opts](const std::string&) { opts.seed_set = true; });
    cmd->add_option("--threads", opts.threads, "worker threads (0 = hardware)");
    cmd->add_option("--attributes", opts.attributes,
                    "comma-separated attribute columns (default: 28 outfield attributes)");
    cmd->add_option("--id-column", opts.id_column, "player id column (default player_api_id)");
    cmd->add_option("--rating-column", opts.rating_column,
                    "target column (default overall_rating)");
}

dimaudit::PipelineConfig build_config(const CliOptions& opts, const std::string& stages) {
    dimaudit::PipelineConfig config = opts.config_path.empty()
                                          ? dimaudit::default_config()
                                          : dimaudit::load_config(opts.config_path);
    if (!opts.input.empty()) config.input_path = opts.input;
    if (!opts.out_dir.empty()) config.out_dir = opts.out_dir;
    if (opts.seed_set) config.seed = opts.seed;
    if (opts.threads != 0) config.threads = opts.threads;
    if (!opts.attributes.empty())
        dimaudit::apply_config_line(config, "attributes", opts.attributes);
    if (!opts.id_column.empty()) config.schema.id_column = opts.id_column;
    if (!opts.rating_column.empty()) config.schema.rating_column = opts.rating_column;
    if (!opts.lambda_grid.empty())
        dimaudit::apply_config_line(config, "lambda_grid", opts.lambda_grid);
    if (!opts.retention_rule.empty())
        dimaudit::apply_config_line(config, "retention_rule", opts.retention_rule);
    if (!opts.cluster_scores.empty())
        dimaudit::apply_config_line(config, "cluster_scores", opts.cluster_scores);
    if (!stages.empty()) dimaudit::apply_config_line(config, "stages", stages);
    if (config.input_path.empty())
        throw std::runtime_error("no input file (use --input or a config with input=...)");
    return config;
}

struct SynthOptions {
    std::size_t rows = 2000;
    std::size_t attrs = 28;
    std::size_t factors = 4;
    double strength = 1.0;
    double noise_sd = 1.0;
    std::uint64_t seed = 42;
    std::string out_file = "synthetic.csv";
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dimaudit: general-factor and residual-structure audit of rating tables"};
    app.require_subcommand(1);

    CliOptions opts;
    std::string selected_stages;
    bool stage_command = false;
    bool synth_command = false;

    struct StageCommand {
        const char* name;
        const char* stages;
        const char* help;
    };
    const StageCommand stage_commands[] = {
        {"run", "", "run every enabled stage (default: all)"},
        {"describe", "descriptives", "descriptive statistics only"},
        {"alpha", "consistency", "internal-consistency diagnostics only"},
        {"pca", "pca", "eigenvalues, variance shares, loadings"},
        {"parallel", "parallel", "parallel analysis component retention"},
        {"bootstrap", "bootstrap", "bootstrap stability of the first component"},
        {"predict", "predict", "cross-validated ridge vs PC1-only prediction"},
        {"cluster", "cluster", "residual-space k-means diagnostics"},
        {"forest", "forest", "random-forest prediction benchmark"},
    };

    for (const auto& sc : stage_commands) {
        CLI::App* cmd = app.add_subcommand(sc.name, sc.help);
        add_common(cmd, opts);
        const std::string name = sc.name;
        if (name == "run" || name == "parallel")
            cmd->add_option("--retention-rule", opts.retention_rule,
                            "prefix (stop at first failure) or count");
        if (name == "run" || name == "predict")
            cmd->add_option("--lambda-grid", opts.lambda_grid,
                            "comma-separated ridge penalties, or 'auto'");
        if (name == "run" || name == "cluster")
            cmd->add_option("--cluster-scores", opts.cluster_scores,
                            "raw or standardized residual scores");
        cmd->callback([&, stages = std::string(sc.stages)] {
            stage_command = true;
            selected_stages = stages;
        });
    }

    bool config_help = false;
    auto* config_cmd =
        app.add_subcommand("config-help", "print every config key with its default");
    config_cmd->callback([&] { config_help = true; });

    SynthOptions synth_opts;
    auto* synth = app.add_subcommand("synth", "generate planted-factor synthetic data as CSV");
    synth->add_option("--rows", synth_opts.rows, "rows to generate");
    synth->add_option("--attrs", synth_opts.attrs, "attribute count");
    synth->add_option("--factors", synth_opts.factors, "planted factor count");
    synth->add_option("--strength", synth_opts.strength, "loading strength per block");
    synth->add_option("--noise-sd", synth_opts.noise_sd, "attribute noise sd");
    synth->add_option("--seed", synth_opts.seed, "generator seed");
    synth->add_option("--out-file", synth_opts.out_file, "output CSV path");
    synth->callback([&] { synth_command = true; });

    try {
        app.parse(argc, argv);
        if (config_help) {
            std::cout << dimaudit::config_reference();
        } else if (synth_command) {
            const auto spec =
                dimaudit::block_factor_spec(synth_opts.rows, synth_opts.attrs, synth_opts.factors,
                                            synth_opts.strength, synth_opts.noise_sd,
                                            synth_opts.seed);
            const auto data = dimaudit::generate_planted(spec);
            dimaudit::write_planted_csv(data, synth_opts.out_file);
            std::cout << "wrote " << synth_opts.out_file << " (" << synth_opts.rows << " rows, "
                      << synth_opts.attrs << " attributes, " << synth_opts.factors
                      << " planted factors)\n";
        } else if (stage_command) {
            const dimaudit::PipelineConfig config = build_config(opts, selected_stages);
            const dimaudit::AuditReport report = dimaudit::run_pipeline(config);
            std::cout << "report written to " << config.out_dir << "/report.json (n=" << report.n
                      << ", p=" << report.p << ")\n";
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const dimaudit::StageError& e) {
        std::cerr << "error in stage " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
