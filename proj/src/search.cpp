#include "hqb/search.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "hqb/seed.hpp"

namespace hqb {

std::string kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::Classical: return "classical";
        case ModelKind::HybridBEL: return "hybrid-bel";
        default: return "hybrid-sel";
    }
}

ModelKind kind_from_name(const std::string& name) {
    std::string lower = name;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "classical") return ModelKind::Classical;
    if (lower == "hybrid-bel") return ModelKind::HybridBEL;
    if (lower == "hybrid-sel") return ModelKind::HybridSEL;
    throw std::invalid_argument("unknown model kind: " + name);
}

std::string ArchVariant::descriptor() const {
    std::ostringstream out;
    if (kind == ModelKind::Classical) {
        out << "c[";
        for (std::size_t i = 0; i < hidden.size(); ++i) out << (i ? "-" : "") << hidden[i];
        out << ']';
    } else {
        out << (kind == ModelKind::HybridBEL ? "bel" : "sel") << "[q" << qubits << "-d" << depth << ']';
    }
    return out.str();
}

std::uint64_t ArchVariant::param_count(int feature_dim) const {
    if (kind == ModelKind::Classical)
        return ClassicalArch{feature_dim, hidden, 3}.param_count();
    return HybridArch{feature_dim,
                      {qubits, depth,
                       kind == ModelKind::HybridBEL ? qsim::LayerKind::BEL : qsim::LayerKind::SEL},
                      3}
        .param_count();
}

CostReport ArchVariant::cost(int feature_dim) const {
    if (kind == ModelKind::Classical) return cost_classical({feature_dim, hidden, 3});
    return cost_hybrid({feature_dim,
                        {qubits, depth,
                         kind == ModelKind::HybridBEL ? qsim::LayerKind::BEL : qsim::LayerKind::SEL},
                        3});
}

std::unique_ptr<Model> ArchVariant::make_model(int feature_dim) const {
    if (kind == ModelKind::Classical)
        return std::make_unique<MlpModel>(ClassicalArch{feature_dim, hidden, 3});
    return std::make_unique<HybridModel>(HybridArch{
        feature_dim,
        {qubits, depth, kind == ModelKind::HybridBEL ? qsim::LayerKind::BEL : qsim::LayerKind::SEL},
        3});
}

SearchSpace SearchSpace::for_kind(ModelKind kind) {
    SearchSpace space;
    space.kind = kind;
    return space;
}

std::uint64_t SearchSpace::expected_size() const {
    if (kind != ModelKind::Classical)
        return static_cast<std::uint64_t>(qubit_options.size()) * depth_options.size();
    const std::uint64_t m = neuron_options.size();
    if (m == 0) return 0;
    if (m == 1) return max_layers;
    std::uint64_t m_pow_n = 1;
    for (int i = 0; i < max_layers; ++i) m_pow_n *= m;
    return m * (m_pow_n - 1) / (m - 1);
}

std::vector<ArchVariant> enumerate(const SearchSpace& space) {
    std::vector<ArchVariant> archs;
    if (space.kind == ModelKind::Classical) {
        if (space.neuron_options.empty()) throw std::invalid_argument("enumerate: empty neuron options");
        if (space.max_layers < 1) throw std::invalid_argument("enumerate: max_layers must be >= 1");
        const std::size_t m = space.neuron_options.size();
        for (int layers = 1; layers <= space.max_layers; ++layers) {
            std::vector<std::size_t> idx(layers, 0);
            while (true) {
                ArchVariant arch;
                arch.kind = ModelKind::Classical;
                for (std::size_t i : idx) arch.hidden.push_back(space.neuron_options[i]);
                archs.push_back(std::move(arch));
                int pos = layers - 1;
                while (pos >= 0 && ++idx[pos] == m) idx[pos--] = 0;
                if (pos < 0) break;
            }
        }
    } else {
        if (space.qubit_options.empty() || space.depth_options.empty())
            throw std::invalid_argument("enumerate: empty hybrid options");
        for (int q : space.qubit_options)
            for (int d : space.depth_options) {
                ArchVariant arch;
                arch.kind = space.kind;
                arch.qubits = q;
                arch.depth = d;
                archs.push_back(std::move(arch));
            }
    }
    return archs;
}

void sort_by_flops(std::vector<ArchVariant>& archs, int feature_dim) {
    std::vector<std::tuple<std::uint64_t, std::uint64_t, std::string, std::size_t>> keys;
    keys.reserve(archs.size());
    for (std::size_t i = 0; i < archs.size(); ++i) {
        const CostReport c = archs[i].cost(feature_dim);
        keys.emplace_back(c.total_flops, c.param_count, archs[i].descriptor(), i);
    }
    std::sort(keys.begin(), keys.end());
    std::vector<ArchVariant> sorted;
    sorted.reserve(archs.size());
    for (const auto& k : keys) sorted.push_back(std::move(archs[std::get<3>(k)]));
    archs = std::move(sorted);
}

SearchResult run_search(const SearchSpace& space, const SpiralConfig& dataset_config,
                        const TrainConfig& train_config, double threshold, int runs,
                        int repetition_index) {
    if (runs < 1) throw std::invalid_argument("run_search: runs must be >= 1");

    const Dataset dataset = standardize(generate(dataset_config));
    const Matrix train_x = dataset.train_features();
    const Matrix val_x = dataset.val_features();
    const std::vector<int> train_y = dataset.train_labels();
    const std::vector<int> val_y = dataset.val_labels();

    std::vector<ArchVariant> archs = enumerate(space);
    sort_by_flops(archs, dataset_config.n_features);

    SearchResult result;
    result.feature_dim = dataset_config.n_features;
    result.repetition_index = repetition_index;
    result.repetition_seed = train_config.seed;
    result.kind = space.kind;
    result.threshold = threshold;

    int best_idx = -1;
    double best_score = -1.0;
    for (const ArchVariant& arch : archs) {
        ArchEvaluation eval;
        eval.arch = arch;
        eval.cost = arch.cost(dataset_config.n_features);
        double sum_train = 0.0, sum_val = 0.0;
        for (int run = 0; run < runs; ++run) {
            auto model = arch.make_model(dataset_config.n_features);
            TrainConfig run_cfg = train_config;
            run_cfg.seed = derive_seed(train_config.seed, arch.descriptor(), static_cast<std::uint64_t>(run));
            TrainOutcome outcome = train(*model, train_x, train_y, val_x, val_y, run_cfg);
            sum_train += outcome.best_train_acc;
            sum_val += outcome.best_val_acc;
            eval.runs.push_back(std::move(outcome));
        }
        eval.mean_train_acc = sum_train / runs;
        eval.mean_val_acc = sum_val / runs;
        result.evaluated.push_back(std::move(eval));
        ++result.models_trained;

        const ArchEvaluation& done = result.evaluated.back();
        const double score = std::min(done.mean_train_acc, done.mean_val_acc);
        if (score > best_score) {
            best_score = score;
            best_idx = result.models_trained - 1;
        }
        if (done.mean_train_acc >= threshold && done.mean_val_acc >= threshold) {
            result.winner = done.arch;
            result.mean_train_acc = done.mean_train_acc;
            result.mean_val_acc = done.mean_val_acc;
            result.cost = done.cost;
            return result;
        }
    }

    // no architecture met the threshold; report the best achiever
    result.below_threshold = true;
    const ArchEvaluation& best = result.evaluated[best_idx];
    result.winner = best.arch;
    result.mean_train_acc = best.mean_train_acc;
    result.mean_val_acc = best.mean_val_acc;
    result.cost = best.cost;
    return result;
}

std::vector<SearchResult> repeat_search(const SearchSpace& space, const SpiralConfig& dataset_config,
                                        const TrainConfig& train_config, double threshold, int runs,
                                        int repetitions, std::uint64_t master_seed) {
    std::vector<SearchResult> results;
    results.reserve(static_cast<std::size_t>(repetitions));
    for (int rep = 0; rep < repetitions; ++rep) {
        const std::uint64_t rep_seed = derive_seed(master_seed, "repetition", static_cast<std::uint64_t>(rep));
        SpiralConfig data_cfg = dataset_config;
        data_cfg.seed = derive_seed(rep_seed, "dataset");
        TrainConfig train_cfg = train_config;
        train_cfg.seed = rep_seed;
        results.push_back(run_search(space, data_cfg, train_cfg, threshold, runs, rep));
    }
    return results;
}

SearchAggregate aggregate(const std::vector<SearchResult>& results) {
    SearchAggregate agg;
    agg.repetitions = static_cast<int>(results.size());
    if (results.empty()) return agg;
    for (const SearchResult& r : results) {
        agg.mean_winner_flops += static_cast<double>(r.cost.total_flops);
        agg.mean_winner_params += static_cast<double>(r.cost.param_count);
        if (r.below_threshold) ++agg.below_threshold_count;
    }
    agg.mean_winner_flops /= static_cast<double>(results.size());
    agg.mean_winner_params /= static_cast<double>(results.size());
    return agg;
}

namespace {

nlohmann::json cost_to_json(const CostReport& cost) {
    return {{"forward_flops", cost.forward_flops},
            {"backward_flops", cost.backward_flops},
            {"total_flops", cost.total_flops},
            {"param_count", cost.param_count},
            {"breakdown",
             {{"classical_layers", cost.breakdown.classical_layers},
              {"encoding", cost.breakdown.encoding},
              {"quantum_layer", cost.breakdown.quantum_layer}}}};
}

CostReport cost_from_json(const nlohmann::json& j) {
    CostReport cost;
    cost.forward_flops = j.at("forward_flops").get<std::uint64_t>();
    cost.backward_flops = j.at("backward_flops").get<std::uint64_t>();
    cost.total_flops = j.at("total_flops").get<std::uint64_t>();
    cost.param_count = j.at("param_count").get<std::uint64_t>();
    cost.breakdown.classical_layers = j.at("breakdown").at("classical_layers").get<std::uint64_t>();
    cost.breakdown.encoding = j.at("breakdown").at("encoding").get<std::uint64_t>();
    cost.breakdown.quantum_layer = j.at("breakdown").at("quantum_layer").get<std::uint64_t>();
    return cost;
}

nlohmann::json arch_to_json(const ArchVariant& arch) {
    return {{"kind", kind_name(arch.kind)},
            {"hidden", arch.hidden},
            {"qubits", arch.qubits},
            {"depth", arch.depth}};
}

ArchVariant arch_from_json(const nlohmann::json& j) {
    ArchVariant arch;
    arch.kind = kind_from_name(j.at("kind").get<std::string>());
    arch.hidden = j.at("hidden").get<std::vector<int>>();
    arch.qubits = j.at("qubits").get<int>();
    arch.depth = j.at("depth").get<int>();
    return arch;
}

nlohmann::json outcome_to_json(const TrainOutcome& o) {
    return {{"best_train_acc", o.best_train_acc},
            {"best_val_acc", o.best_val_acc},
            {"diverged", o.diverged}};
}

TrainOutcome outcome_from_json(const nlohmann::json& j) {
    TrainOutcome o;
    o.best_train_acc = j.at("best_train_acc").get<double>();
    o.best_val_acc = j.at("best_val_acc").get<double>();
    o.diverged = j.at("diverged").get<bool>();
    return o;
}

}  // namespace

std::string search_result_to_json(const SearchResult& result) {
    nlohmann::json evaluated = nlohmann::json::array();
    for (const ArchEvaluation& e : result.evaluated) {
        nlohmann::json runs = nlohmann::json::array();
        for (const TrainOutcome& o : e.runs) runs.push_back(outcome_to_json(o));
        evaluated.push_back({{"arch", arch_to_json(e.arch)},
                             {"mean_train_acc", e.mean_train_acc},
                             {"mean_val_acc", e.mean_val_acc},
                             {"cost", cost_to_json(e.cost)},
                             {"runs", runs}});
    }
    nlohmann::json j{{"feature_dim", result.feature_dim},
                     {"repetition_index", result.repetition_index},
                     {"repetition_seed", result.repetition_seed},
                     {"kind", kind_name(result.kind)},
                     {"threshold", result.threshold},
                     {"winner", arch_to_json(result.winner)},
                     {"below_threshold", result.below_threshold},
                     {"mean_train_acc", result.mean_train_acc},
                     {"mean_val_acc", result.mean_val_acc},
                     {"cost", cost_to_json(result.cost)},
                     {"models_trained", result.models_trained},
                     {"evaluated", evaluated}};
    return j.dump(2);
}

SearchResult search_result_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    SearchResult result;
    result.feature_dim = j.at("feature_dim").get<int>();
    result.repetition_index = j.at("repetition_index").get<int>();
    result.repetition_seed = j.at("repetition_seed").get<std::uint64_t>();
    result.kind = kind_from_name(j.at("kind").get<std::string>());
    result.threshold = j.at("threshold").get<double>();
    result.winner = arch_from_json(j.at("winner"));
    result.below_threshold = j.at("below_threshold").get<bool>();
    result.mean_train_acc = j.at("mean_train_acc").get<double>();
    result.mean_val_acc = j.at("mean_val_acc").get<double>();
    result.cost = cost_from_json(j.at("cost"));
    result.models_trained = j.at("models_trained").get<int>();
    for (const auto& ej : j.at("evaluated")) {
        ArchEvaluation e;
        e.arch = arch_from_json(ej.at("arch"));
        e.mean_train_acc = ej.at("mean_train_acc").get<double>();
        e.mean_val_acc = ej.at("mean_val_acc").get<double>();
        e.cost = cost_from_json(ej.at("cost"));
        for (const auto& rj : ej.at("runs")) e.runs.push_back(outcome_from_json(rj));
        result.evaluated.push_back(std::move(e));
    }
    return result;
}

}  // namespace hqb
