#include "hqb/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>
#include <unistd.h>

#include <json.hpp>

#include "hqb/seed.hpp"

namespace fs = std::filesystem;

namespace hqb {

namespace {

std::string fmt(const char* format, auto... args) {
    char buf[160];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

void atomic_write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + fmt(".tmp%d", static_cast<int>(::getpid()));
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot open " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int worker_count(int units) {
    int workers = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("HQB_WORKERS")) workers = std::atoi(env);
    return std::clamp(workers, 1, std::max(1, units));
}

void run_parallel(int units, int workers, const std::function<void(int)>& fn) {
    if (workers <= 1) {
        for (int i = 0; i < units; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < units; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        values.push_back(std::stoi(item));
    }
    return values;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

nlohmann::json manifest_json(const SweepConfig& config) {
    nlohmann::json kinds = nlohmann::json::array();
    for (ModelKind k : config.kinds) kinds.push_back(kind_name(k));
    return {{"feature_sizes", config.feature_sizes},
            {"kinds", kinds},
            {"repetitions", config.repetitions},
            {"runs_per_model", config.runs_per_model},
            {"master_seed", config.master_seed},
            {"threshold", config.threshold},
            {"epochs", config.train.epochs},
            {"batch_size", config.train.batch_size},
            {"learning_rate", config.train.learning_rate}};
}

SweepConfig manifest_to_config(const nlohmann::json& j, const std::string& out_dir) {
    SweepConfig config;
    config.feature_sizes = j.at("feature_sizes").get<std::vector<int>>();
    config.kinds.clear();
    for (const auto& k : j.at("kinds")) config.kinds.push_back(kind_from_name(k.get<std::string>()));
    config.repetitions = j.at("repetitions").get<int>();
    config.runs_per_model = j.at("runs_per_model").get<int>();
    config.master_seed = j.at("master_seed").get<std::uint64_t>();
    config.threshold = j.at("threshold").get<double>();
    config.train.epochs = j.at("epochs").get<int>();
    config.train.batch_size = j.at("batch_size").get<int>();
    config.train.learning_rate = j.at("learning_rate").get<double>();
    config.out_dir = out_dir;
    return config;
}

// Reproducibility depends on these; resuming under different values would
// silently mix incompatible results.
void check_manifest_compatible(const SweepConfig& config, const nlohmann::json& existing) {
    const nlohmann::json current = manifest_json(config);
    for (const char* key : {"master_seed", "runs_per_model", "threshold", "epochs", "batch_size",
                            "learning_rate"}) {
        if (existing.at(key) != current.at(key))
            throw ConfigError(std::string("existing results in the output directory were produced with a "
                                          "different '") +
                              key + "'; use a fresh --out directory");
    }
}

struct WorkUnit {
    ModelKind kind;
    int feature_dim;
    int repetition;
};

std::vector<WorkUnit> sweep_units(const SweepConfig& config) {
    std::vector<WorkUnit> units;
    for (ModelKind kind : {ModelKind::Classical, ModelKind::HybridBEL, ModelKind::HybridSEL}) {
        if (std::find(config.kinds.begin(), config.kinds.end(), kind) == config.kinds.end()) continue;
        for (int f : config.feature_sizes)
            for (int rep = 0; rep < config.repetitions; ++rep) units.push_back({kind, f, rep});
    }
    return units;
}

std::string hidden_string(const std::vector<int>& hidden) {
    std::string out;
    for (std::size_t i = 0; i < hidden.size(); ++i) out += (i ? "-" : "") + std::to_string(hidden[i]);
    return out;
}

std::string summary_csv(const std::vector<SearchResult>& results) {
    std::string csv = "kind,F,repetition,winner,qubits,depth,hidden,flops,params,train_acc,val_acc,"
                      "models_trained\n";
    for (const SearchResult& r : results) {
        const bool classical = r.winner.kind == ModelKind::Classical;
        csv += kind_name(r.kind) + ',' + std::to_string(r.feature_dim) + ',' +
               std::to_string(r.repetition_index) + ',' + r.winner.descriptor() + ',' +
               (classical ? "" : std::to_string(r.winner.qubits)) + ',' +
               (classical ? "" : std::to_string(r.winner.depth)) + ',' +
               (classical ? hidden_string(r.winner.hidden) : "") + ',' +
               std::to_string(r.cost.total_flops) + ',' + std::to_string(r.cost.param_count) + ',' +
               fmt("%.6f", r.mean_train_acc) + ',' + fmt("%.6f", r.mean_val_acc) + ',' +
               std::to_string(r.models_trained) + '\n';
    }
    return csv;
}

}  // namespace

void SweepConfig::validate() const {
    if (feature_sizes.empty()) throw ConfigError("feature sizes must not be empty");
    for (std::size_t i = 0; i + 1 < feature_sizes.size(); ++i)
        if (feature_sizes[i] >= feature_sizes[i + 1])
            throw ConfigError("feature sizes must be strictly increasing");
    for (int f : feature_sizes)
        if (f < 2) throw ConfigError("feature sizes must be >= 2");
    if (kinds.empty()) throw ConfigError("at least one model kind is required");
    if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
    if (runs_per_model < 1) throw ConfigError("runs must be >= 1");
    if (threshold < 0.0) throw ConfigError("threshold must be >= 0");
    if (train.epochs < 0 || train.batch_size < 1 || train.learning_rate <= 0.0)
        throw ConfigError("invalid training settings");
    if (out_dir.empty()) throw ConfigError("output directory must not be empty");
}

void apply_quick_preset(SweepConfig& config) {
    config.feature_sizes = {10, 40, 80, 110};
    config.repetitions = 2;
    config.runs_per_model = 3;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::map<std::string, std::string> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const std::string text = trim(line);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError(fmt("config %s line %d: expected key = value", path.c_str(), line_no));
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(fmt("config %s line %d: empty key or value", path.c_str(), line_no));
        entries[key] = value;
    }
    return entries;
}

void apply_config_entries(SweepConfig& config, const std::map<std::string, std::string>& entries) {
    try {
        for (const auto& [key, value] : entries) {
            if (key == "features") {
                config.feature_sizes = parse_int_list(value);
            } else if (key == "kinds") {
                config.kinds.clear();
                std::stringstream ss(value);
                std::string item;
                while (std::getline(ss, item, ','))
                    if (!trim(item).empty()) config.kinds.push_back(kind_from_name(trim(item)));
            } else if (key == "reps") {
                config.repetitions = std::stoi(value);
            } else if (key == "runs") {
                config.runs_per_model = std::stoi(value);
            } else if (key == "seed") {
                config.master_seed = std::stoull(value);
            } else if (key == "out") {
                config.out_dir = value;
            } else if (key == "threshold") {
                config.threshold = std::stod(value);
            } else if (key == "epochs") {
                config.train.epochs = std::stoi(value);
            } else if (key == "batch_size") {
                config.train.batch_size = std::stoi(value);
            } else if (key == "learning_rate") {
                config.train.learning_rate = std::stod(value);
            } else {
                throw ConfigError("unknown config key: " + key);
            }
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    } catch (const std::out_of_range& e) {
        throw ConfigError(std::string("config value out of range: ") + e.what());
    }
}

std::vector<std::string> run_generate(const std::vector<int>& feature_sizes, std::uint64_t master_seed,
                                      const std::string& out_dir) {
    if (feature_sizes.empty()) throw ConfigError("feature sizes must not be empty");
    fs::create_directories(fs::path(out_dir) / "data");
    std::vector<std::string> written;
    for (int f : feature_sizes) {
        if (f < 2) throw ConfigError("feature sizes must be >= 2");
        SpiralConfig cfg;
        cfg.n_features = f;
        cfg.seed = derive_seed(master_seed, "generate-dataset", static_cast<std::uint64_t>(f));
        const Dataset ds = generate(cfg);
        const fs::path csv = fs::path(out_dir) / "data" / fmt("spiral_f%03d.csv", f);
        const fs::path sidecar = fs::path(out_dir) / "data" / fmt("spiral_f%03d.json", f);
        export_dataset(ds, csv.string(), sidecar.string());
        written.push_back(csv.string());
        written.push_back(sidecar.string());
    }
    return written;
}

std::string result_file_name(ModelKind kind, int feature_dim, int repetition) {
    return fmt("%s_f%03d_rep%d.json", kind_name(kind).c_str(), feature_dim, repetition);
}

std::uint64_t repetition_seed(std::uint64_t master_seed, int repetition) {
    return derive_seed(master_seed, "repetition", static_cast<std::uint64_t>(repetition));
}

SweepOutcome run_sweep(const SweepConfig& config) {
    config.validate();
    const fs::path out(config.out_dir);
    const fs::path raw = out / "raw";
    fs::create_directories(raw);

    const fs::path manifest_path = out / "sweep.json";
    if (fs::exists(manifest_path))
        check_manifest_compatible(config, nlohmann::json::parse(read_file(manifest_path)));
    atomic_write_file(manifest_path, manifest_json(config).dump(2) + "\n");

    const std::vector<WorkUnit> units = sweep_units(config);
    std::vector<int> pending;
    for (std::size_t i = 0; i < units.size(); ++i) {
        if (!fs::exists(raw / result_file_name(units[i].kind, units[i].feature_dim, units[i].repetition)))
            pending.push_back(static_cast<int>(i));
    }

    run_parallel(static_cast<int>(pending.size()), worker_count(static_cast<int>(pending.size())),
                 [&](int pi) {
                     const WorkUnit& unit = units[pending[pi]];
                     const std::uint64_t rep_seed = repetition_seed(config.master_seed, unit.repetition);
                     SpiralConfig data_cfg;
                     data_cfg.n_features = unit.feature_dim;
                     data_cfg.seed = derive_seed(rep_seed, "dataset");
                     TrainConfig train_cfg = config.train;
                     train_cfg.seed = rep_seed;
                     const SearchResult result =
                         run_search(SearchSpace::for_kind(unit.kind), data_cfg, train_cfg,
                                    config.threshold, config.runs_per_model, unit.repetition);
                     atomic_write_file(raw / result_file_name(unit.kind, unit.feature_dim, unit.repetition),
                                       search_result_to_json(result) + "\n");
                 });

    // summary over exactly this sweep's units, in deterministic order
    std::vector<SearchResult> results;
    results.reserve(units.size());
    for (const WorkUnit& unit : units)
        results.push_back(search_result_from_json(
            read_file(raw / result_file_name(unit.kind, unit.feature_dim, unit.repetition))));
    const fs::path summary = out / "summary.csv";
    atomic_write_file(summary, summary_csv(results));

    SweepOutcome outcome;
    outcome.units_total = static_cast<int>(units.size());
    outcome.units_run = static_cast<int>(pending.size());
    outcome.units_skipped = outcome.units_total - outcome.units_run;
    outcome.summary_path = summary.string();
    return outcome;
}

ReportPaths build_report(const std::string& out_dir, bool with_paper_reference) {
    const fs::path out(out_dir);
    const fs::path manifest_path = out / "sweep.json";
    if (!fs::exists(manifest_path))
        throw IncompleteError("no sweep manifest in " + out_dir + "; run `search` first");
    const SweepConfig config =
        manifest_to_config(nlohmann::json::parse(read_file(manifest_path)), out_dir);

    const std::vector<WorkUnit> units = sweep_units(config);
    std::vector<std::string> missing;
    std::vector<SearchResult> results;
    for (const WorkUnit& unit : units) {
        const fs::path file = out / "raw" / result_file_name(unit.kind, unit.feature_dim, unit.repetition);
        if (!fs::exists(file)) {
            missing.push_back(file.filename().string());
            continue;
        }
        results.push_back(search_result_from_json(read_file(file)));
    }
    if (!missing.empty()) {
        std::string msg = "sweep is incomplete; missing " + std::to_string(missing.size()) + " result(s):";
        for (const std::string& m : missing) msg += ' ' + m;
        throw IncompleteError(msg);
    }

    struct Cell {
        std::vector<const SearchResult*> reps;
        double mean_flops = 0.0, mean_params = 0.0, mean_train = 0.0, mean_val = 0.0;
        int below = 0;
        const SearchResult* modal = nullptr;
    };
    std::map<std::pair<int, int>, Cell> cells;  // (kind index, F) -> cell
    for (const SearchResult& r : results)
        cells[{static_cast<int>(r.kind), r.feature_dim}].reps.push_back(&r);

    for (auto& [key, cell] : cells) {
        for (const SearchResult* r : cell.reps) {
            cell.mean_flops += static_cast<double>(r->cost.total_flops);
            cell.mean_params += static_cast<double>(r->cost.param_count);
            cell.mean_train += r->mean_train_acc;
            cell.mean_val += r->mean_val_acc;
            if (r->below_threshold) ++cell.below;
        }
        const double n = static_cast<double>(cell.reps.size());
        cell.mean_flops /= n;
        cell.mean_params /= n;
        cell.mean_train /= n;
        cell.mean_val /= n;
        // modal winner: most repetitions, ties to the cheaper architecture
        std::map<std::string, int> votes;
        for (const SearchResult* r : cell.reps) ++votes[r->winner.descriptor()];
        for (const SearchResult* r : cell.reps) {
            if (!cell.modal) {
                cell.modal = r;
                continue;
            }
            const int vr = votes[r->winner.descriptor()], vm = votes[cell.modal->winner.descriptor()];
            if (vr > vm || (vr == vm && r->cost.total_flops < cell.modal->cost.total_flops)) cell.modal = r;
        }
    }

    nlohmann::json kinds_json;
    std::string flops_csv = "kind,feature_dim,mean_winner_flops\n";
    std::string params_csv = "kind,feature_dim,mean_winner_params\n";
    std::string ablation_csv = "kind,feature_dim,best_combination,total,enc_cl,cl,enc,ql\n";
    for (ModelKind kind : config.kinds) {
        nlohmann::json per_feature = nlohmann::json::array();
        for (int f : config.feature_sizes) {
            const Cell& cell = cells.at({static_cast<int>(kind), f});
            per_feature.push_back({{"feature_dim", f},
                                   {"mean_winner_flops", cell.mean_flops},
                                   {"mean_winner_params", cell.mean_params},
                                   {"mean_train_acc", cell.mean_train},
                                   {"mean_val_acc", cell.mean_val},
                                   {"repetitions", cell.reps.size()},
                                   {"below_threshold_count", cell.below},
                                   {"modal_winner", cell.modal->winner.descriptor()}});
            flops_csv += kind_name(kind) + ',' + std::to_string(f) + ',' + fmt("%.2f", cell.mean_flops) + '\n';
            params_csv +=
                kind_name(kind) + ',' + std::to_string(f) + ',' + fmt("%.2f", cell.mean_params) + '\n';
            if (kind != ModelKind::Classical) {
                const CostReport& c = cell.modal->cost;
                const std::uint64_t enc_cl = c.breakdown.encoding + c.breakdown.classical_layers;
                ablation_csv += kind_name(kind) + ',' + std::to_string(f) + ',' +
                                fmt("(%d;%d)", cell.modal->winner.qubits, cell.modal->winner.depth) + ',' +
                                std::to_string(c.total_flops) + ',' + std::to_string(enc_cl) + ',' +
                                std::to_string(c.breakdown.classical_layers) + ',' +
                                std::to_string(c.breakdown.encoding) + ',' +
                                std::to_string(c.breakdown.quantum_layer) + '\n';
            }
        }
        const Cell& lo = cells.at({static_cast<int>(kind), config.feature_sizes.front()});
        const Cell& hi = cells.at({static_cast<int>(kind), config.feature_sizes.back()});
        kinds_json[kind_name(kind)] = {
            {"per_feature", per_feature},
            {"percent_increase_flops", percent_increase(lo.mean_flops, hi.mean_flops)},
            {"percent_increase_params", percent_increase(lo.mean_params, hi.mean_params)}};
    }

    nlohmann::json report{{"kinds", kinds_json},
                          {"feature_sizes", config.feature_sizes},
                          {"repetitions", config.repetitions},
                          {"runs_per_model", config.runs_per_model},
                          {"master_seed", config.master_seed},
                          {"threshold", config.threshold}};

    const fs::path report_dir = out / "report";
    fs::create_directories(report_dir);
    ReportPaths paths;
    paths.comparison_json = (report_dir / "comparison.json").string();
    paths.flops_csv = (report_dir / "flops_vs_features.csv").string();
    paths.params_csv = (report_dir / "params_vs_features.csv").string();
    paths.ablation_csv = (report_dir / "ablation.csv").string();
    atomic_write_file(paths.comparison_json, report.dump(2) + "\n");
    atomic_write_file(paths.flops_csv, flops_csv);
    atomic_write_file(paths.params_csv, params_csv);
    atomic_write_file(paths.ablation_csv, ablation_csv);

    if (with_paper_reference) {
        paths.paper_reference_csv = (report_dir / "paper_reference.csv").string();
        export_paper_reference_csv(paths.paper_reference_csv);

        // published rows side by side with the matching sweep cells
        std::string cmp =
            "model,feature_size,paper_bc,paper_total,paper_enc,paper_ql,ours_bc,ours_total,ours_enc,"
            "ours_ql\n";
        for (const PaperReferenceRow& row : load_paper_reference()) {
            const ModelKind kind = row.model == "BEL" ? ModelKind::HybridBEL : ModelKind::HybridSEL;
            cmp += row.model + ',' + std::to_string(row.feature_size) + ',' +
                   fmt("(%d;%d)", row.best_qubits, row.best_depth) + ',' + std::to_string(row.total) + ',' +
                   std::to_string(row.enc) + ',' + std::to_string(row.ql) + ',';
            const auto it = cells.find({static_cast<int>(kind), row.feature_size});
            if (it == cells.end()) {
                cmp += ",,,\n";
            } else {
                const SearchResult* modal = it->second.modal;
                cmp += fmt("(%d;%d)", modal->winner.qubits, modal->winner.depth) + ',' +
                       std::to_string(modal->cost.total_flops) + ',' +
                       std::to_string(modal->cost.breakdown.encoding) + ',' +
                       std::to_string(modal->cost.breakdown.quantum_layer) + '\n';
            }
        }
        paths.paper_comparison_csv = (report_dir / "paper_comparison.csv").string();
        atomic_write_file(paths.paper_comparison_csv, cmp);
    }
    return paths;
}

}  // namespace hqb
