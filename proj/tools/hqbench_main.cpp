#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hqb/sweep.hpp"

namespace {

// Precedence: explicit flags > config file > --quick preset > defaults.
hqb::SweepConfig resolve_config(const CLI::App& cmd, const std::string& config_path, bool quick,
                                const std::vector<int>& features, const std::vector<std::string>& kinds,
                                int reps, int runs, std::uint64_t seed, const std::string& out) {
    hqb::SweepConfig config;
    if (quick) hqb::apply_quick_preset(config);
    if (!config_path.empty()) hqb::apply_config_entries(config, hqb::parse_config_file(config_path));
    if (cmd.count("--features")) config.feature_sizes = features;
    if (cmd.count("--kind")) {
        config.kinds.clear();
        for (const std::string& k : kinds) config.kinds.push_back(hqb::kind_from_name(k));
    }
    if (cmd.count("--reps")) config.repetitions = reps;
    if (cmd.count("--runs")) config.runs_per_model = runs;
    if (cmd.count("--seed")) config.master_seed = seed;
    if (cmd.count("--out")) config.out_dir = out;
    config.validate();
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hqbench: architecture-scaling benchmark for classical and hybrid "
                 "quantum-classical networks on the spiral task"};
    app.require_subcommand(1);

    std::vector<int> features;
    std::vector<std::string> kinds;
    int reps = 5, runs = 5;
    std::uint64_t seed = 42;
    std::string out = "results";
    std::string config_path;
    bool quick = false;
    bool paper_reference = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--features", features, "Feature sizes (complexity levels)")->delimiter(',');
        cmd->add_option("--seed", seed, "Master seed");
        cmd->add_option("--out", out, "Output directory");
        cmd->add_option("--config", config_path, "Key-value config file");
    };

    CLI::App* generate = app.add_subcommand("generate", "Generate spiral datasets (CSV + provenance JSON)");
    add_common(generate);

    CLI::App* search = app.add_subcommand(
        "search", "Run the FLOPs-ordered early-stopping architecture search per kind and feature size");
    add_common(search);
    search->add_option("--kind", kinds, "Model kinds: classical, hybrid-bel, hybrid-sel")->delimiter(',');
    search->add_option("--reps", reps, "Search repetitions per (kind, feature size)");
    search->add_option("--runs", runs, "Training runs per model");
    search->add_flag("--quick", quick, "Desk-scale preset: features 10,40,80,110, 2 reps, 3 runs");

    CLI::App* report = app.add_subcommand("report", "Build comparison reports from stored search results");
    report->add_option("--out", out, "Directory holding search results");
    report->add_flag("--paper-reference", paper_reference,
                     "Include the published reference table side by side");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (generate->parsed()) {
            hqb::SweepConfig config =
                resolve_config(*generate, config_path, false, features, kinds, reps, runs, seed, out);
            const auto written = hqb::run_generate(config.feature_sizes, config.master_seed, config.out_dir);
            std::printf("wrote %zu dataset files under %s/data\n", written.size(), config.out_dir.c_str());
        } else if (search->parsed()) {
            hqb::SweepConfig config =
                resolve_config(*search, config_path, quick, features, kinds, reps, runs, seed, out);
            const hqb::SweepOutcome outcome = hqb::run_sweep(config);
            std::printf("ran %d work unit(s), skipped %d already on disk; summary: %s\n",
                        outcome.units_run, outcome.units_skipped, outcome.summary_path.c_str());
        } else if (report->parsed()) {
            const hqb::ReportPaths paths = hqb::build_report(out, paper_reference);
            std::printf("report written:\n  %s\n  %s\n  %s\n  %s\n", paths.comparison_json.c_str(),
                        paths.flops_csv.c_str(), paths.params_csv.c_str(), paths.ablation_csv.c_str());
            if (!paths.paper_reference_csv.empty())
                std::printf("  %s\n  %s\n", paths.paper_reference_csv.c_str(),
                            paths.paper_comparison_csv.c_str());
        }
    } catch (const hqb::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const hqb::IncompleteError& e) {
        std::fprintf(stderr, "incomplete inputs: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
