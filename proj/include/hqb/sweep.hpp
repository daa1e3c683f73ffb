#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hqb/search.hpp"

namespace hqb {

// Bad or contradictory configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Results required by a command are missing or partial (CLI exit code 3).
struct IncompleteError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SweepConfig {
    std::vector<int> feature_sizes{10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 110};
    std::vector<ModelKind> kinds{ModelKind::Classical, ModelKind::HybridBEL, ModelKind::HybridSEL};
    int repetitions = 5;
    int runs_per_model = 5;
    std::uint64_t master_seed = 42;
    std::string out_dir = "results";
    double threshold = 0.90;
    TrainConfig train;  // epochs 100, batch 8, lr 0.001

    void validate() const;  // throws ConfigError
};

// Desk-scale preset: feature sizes {10,40,80,110}, 2 repetitions, 3 runs.
void apply_quick_preset(SweepConfig& config);

// key = value lines; '#' starts a comment. Keys: features, kinds, reps,
// runs, seed, out, threshold, epochs, batch_size, learning_rate.
std::map<std::string, std::string> parse_config_file(const std::string& path);
void apply_config_entries(SweepConfig& config, const std::map<std::string, std::string>& entries);

// Writes spiral_f<F>.csv / .json per feature size; per-size dataset seeds
// derive from the master seed.
std::vector<std::string> run_generate(const std::vector<int>& feature_sizes, std::uint64_t master_seed,
                                      const std::string& out_dir);

// Runs every (kind, feature size, repetition) work unit, skipping units whose
// result file already exists, then rebuilds summary.csv over the sweep's
// units. Files are written atomically (temp + rename). Worker count comes
// from HQB_WORKERS, defaulting to the hardware concurrency.
struct SweepOutcome {
    int units_total = 0;
    int units_run = 0;
    int units_skipped = 0;
    std::string summary_path;
};
SweepOutcome run_sweep(const SweepConfig& config);

// Derived paths/derivations shared by the sweep and its tests.
std::string result_file_name(ModelKind kind, int feature_dim, int repetition);
std::uint64_t repetition_seed(std::uint64_t master_seed, int repetition);

// Reads the manifest and every raw result of the recorded sweep, recomputes
// the comparison metrics, and writes the report files. Throws
// IncompleteError when results are missing. Byte-identical on unchanged
// inputs.
struct ReportPaths {
    std::string comparison_json;
    std::string flops_csv;
    std::string params_csv;
    std::string ablation_csv;
    std::string paper_reference_csv;   // empty unless with_paper_reference
    std::string paper_comparison_csv;  // empty unless with_paper_reference
};
ReportPaths build_report(const std::string& out_dir, bool with_paper_reference);

}  // namespace hqb
