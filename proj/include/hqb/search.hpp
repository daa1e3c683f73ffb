#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hqb/flops.hpp"
#include "hqb/hybrid.hpp"
#include "hqb/nn.hpp"
#include "hqb/spiral.hpp"

namespace hqb {

enum class ModelKind { Classical, HybridBEL, HybridSEL };

std::string kind_name(ModelKind kind);
ModelKind kind_from_name(const std::string& name);

// One candidate architecture in a search space.
struct ArchVariant {
    ModelKind kind = ModelKind::Classical;
    std::vector<int> hidden;       // classical only
    int qubits = 0, depth = 0;     // hybrid only

    std::string descriptor() const;  // e.g. "c[10-10]", "sel[q3-d2]"
    std::uint64_t param_count(int feature_dim) const;
    CostReport cost(int feature_dim) const;
    std::unique_ptr<Model> make_model(int feature_dim) const;

    friend bool operator==(const ArchVariant&, const ArchVariant&) = default;
};

struct SearchSpace {
    ModelKind kind = ModelKind::Classical;
    std::vector<int> neuron_options{2, 4, 6, 8, 10};  // classical widths
    int max_layers = 3;
    std::vector<int> qubit_options{3, 4, 5};
    std::vector<int> depth_options{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

    static SearchSpace for_kind(ModelKind kind);
    // m*(m^n - 1)/(m - 1) for classical; |qubits| * |depths| for hybrid.
    std::uint64_t expected_size() const;
};

// Exhaustive, duplicate-free enumeration. Classical architectures are listed
// by layer count then lexicographically by option index; hybrid ones by
// qubit count then depth.
std::vector<ArchVariant> enumerate(const SearchSpace& space);

// Ascending total FLOPs at the given feature size; ties broken by parameter
// count, then by descriptor.
void sort_by_flops(std::vector<ArchVariant>& archs, int feature_dim);

struct ArchEvaluation {
    ArchVariant arch;
    double mean_train_acc = 0.0;
    double mean_val_acc = 0.0;
    CostReport cost;
    std::vector<TrainOutcome> runs;
};

struct SearchResult {
    int feature_dim = 0;
    int repetition_index = 0;
    std::uint64_t repetition_seed = 0;
    ModelKind kind = ModelKind::Classical;
    double threshold = 0.90;
    ArchVariant winner;
    bool below_threshold = false;  // true when no arch met the threshold
    double mean_train_acc = 0.0;
    double mean_val_acc = 0.0;
    CostReport cost;
    int models_trained = 0;
    std::vector<ArchEvaluation> evaluated;
};

struct SearchAggregate {
    double mean_winner_flops = 0.0;
    double mean_winner_params = 0.0;
    int repetitions = 0;
    int below_threshold_count = 0;
};

// Trains the FLOPs-sorted candidates sequentially, `runs` runs each with
// seeds derived from train_config.seed (the repetition seed) keyed by the
// architecture descriptor and the run index. Stops at the first architecture
// whose mean best train AND val accuracy reach the threshold. If none
// qualifies, returns the best achiever (by min of the two means) flagged
// below_threshold.
SearchResult run_search(const SearchSpace& space, const SpiralConfig& dataset_config,
                        const TrainConfig& train_config, double threshold = 0.90, int runs = 5,
                        int repetition_index = 0);

// Runs `repetitions` independent searches. Per repetition r:
//   repetition seed = derive_seed(master_seed, "repetition", r)
//   dataset seed    = derive_seed(repetition seed, "dataset")
// The dataset is regenerated per repetition and shared by all candidates in
// it.
std::vector<SearchResult> repeat_search(const SearchSpace& space, const SpiralConfig& dataset_config,
                                        const TrainConfig& train_config, double threshold = 0.90,
                                        int runs = 5, int repetitions = 5,
                                        std::uint64_t master_seed = 0);

SearchAggregate aggregate(const std::vector<SearchResult>& results);

std::string search_result_to_json(const SearchResult& result);
SearchResult search_result_from_json(const std::string& text);

}  // namespace hqb
