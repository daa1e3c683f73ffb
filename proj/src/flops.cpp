#include "hqb/flops.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace hqb {

namespace {

struct DenseCost {
    std::uint64_t fwd = 0, bwd = 0, params = 0;
};

DenseCost dense_cost(std::uint64_t in, std::uint64_t out) {
    return {2 * in * out + 2 * out, 4 * in * out + out, in * out + out};
}

std::uint64_t gate_cost(int qubits) { return 28ULL << (qubits - 1); }

}  // namespace

std::string CostReport::to_json() const {
    nlohmann::json j{
        {"forward_flops", forward_flops},
        {"backward_flops", backward_flops},
        {"total_flops", total_flops},
        {"param_count", param_count},
        {"breakdown",
         {{"classical_layers", breakdown.classical_layers},
          {"encoding", breakdown.encoding},
          {"quantum_layer", breakdown.quantum_layer}}},
    };
    return j.dump(2);
}

CostReport cost_classical(const ClassicalArch& arch) {
    CostReport report;
    const auto dims = arch.layer_dims();
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        const DenseCost c = dense_cost(dims[i], dims[i + 1]);
        report.forward_flops += c.fwd;
        report.backward_flops += c.bwd;
        report.param_count += c.params;
    }
    report.total_flops = report.forward_flops + report.backward_flops;
    report.breakdown.classical_layers = report.total_flops;
    return report;
}

CostReport cost_hybrid(const HybridArch& arch) {
    const int q = arch.layer.qubits;
    if (q < 1 || q > 12) throw std::invalid_argument("cost_hybrid: qubits out of [1,12]");

    const DenseCost pre = dense_cost(arch.input_dim, q);
    const DenseCost post = dense_cost(q, arch.output_dim);

    const std::uint64_t g = gate_cost(q);
    const std::uint64_t rot_per_qubit = arch.layer.kind == qsim::LayerKind::SEL ? 3 : 1;
    const std::uint64_t enc_fwd = static_cast<std::uint64_t>(q) * g;
    const std::uint64_t layer_fwd =
        rot_per_qubit * static_cast<std::uint64_t>(q) * arch.layer.depth * g;
    const std::uint64_t readout_fwd = static_cast<std::uint64_t>(q) * 2 * (1ULL << q);
    const std::uint64_t quantum_fwd = enc_fwd + layer_fwd + readout_fwd;

    // two shifted evaluations per quantum parameter and per encoder input
    const std::uint64_t shift_evals =
        2ULL * (static_cast<std::uint64_t>(arch.layer.param_count()) + q);

    CostReport report;
    report.forward_flops = pre.fwd + post.fwd + quantum_fwd;
    report.backward_flops = pre.bwd + post.bwd + shift_evals * quantum_fwd;
    report.total_flops = report.forward_flops + report.backward_flops;
    report.param_count = arch.param_count();
    report.breakdown.classical_layers = pre.fwd + pre.bwd + post.fwd + post.bwd;
    report.breakdown.encoding = enc_fwd * (1 + shift_evals);
    report.breakdown.quantum_layer = (layer_fwd + readout_fwd) * (1 + shift_evals);
    return report;
}

double percent_increase(double v_low, double v_high) {
    if (v_high <= 0.0) throw std::invalid_argument("percent_increase: v_high must be positive");
    return 100.0 * (v_high - v_low) / v_high;
}

std::vector<PaperReferenceRow> load_paper_reference() {
    return {
        {"BEL", 10, 3, 2, 977, 749, 283, 466, 228},
        {"BEL", 40, 3, 2, 1517, 1289, 823, 466, 228},
        {"BEL", 80, 3, 4, 2537, 2009, 1543, 466, 528},
        {"BEL", 110, 4, 4, 4797, 3901, 2769, 1132, 896},
        {"SEL", 10, 3, 2, 1589, 749, 283, 466, 840},
        {"SEL", 40, 3, 2, 2129, 1289, 823, 466, 840},
        {"SEL", 80, 3, 2, 2849, 2009, 1543, 466, 840},
        {"SEL", 110, 3, 2, 3389, 2549, 2083, 466, 840},
    };
}

void export_paper_reference_csv(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_paper_reference_csv: cannot open " + path);
    out << "model,feature_size,best_qubits,best_depth,total,enc_cl,cl,enc,ql\n";
    for (const auto& row : load_paper_reference()) {
        out << row.model << ',' << row.feature_size << ',' << row.best_qubits << ',' << row.best_depth
            << ',' << row.total << ',' << row.enc_cl << ',' << row.cl << ',' << row.enc << ',' << row.ql
            << '\n';
    }
}

}  // namespace hqb
