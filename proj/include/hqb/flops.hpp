#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hqb/hybrid.hpp"
#include "hqb/nn.hpp"

namespace hqb {

// Per-sample analytic cost of one training step (forward + backward).
struct CostReport {
    std::uint64_t forward_flops = 0;
    std::uint64_t backward_flops = 0;
    std::uint64_t total_flops = 0;
    std::uint64_t param_count = 0;
    struct Breakdown {
        std::uint64_t classical_layers = 0;
        std::uint64_t encoding = 0;
        std::uint64_t quantum_layer = 0;
    } breakdown;

    std::string to_json() const;
};

// Dense layer in -> out:
//   forward  = 2*in*out + out (affine) + out (activation)
//   backward = 4*in*out + out
//   params   = in*out + out
CostReport cost_classical(const ClassicalArch& arch);

// Classical head/tail per cost_classical. Quantum costs per statevector
// simulation:
//   single-qubit gate  G(q) = 28 * 2^(q-1)   (one 2x2 update per amplitude pair)
//   CNOT               0                     (amplitude permutation)
//   encoding forward   q * G(q)
//   layer forward      rot_per_qubit * q * d * G(q)   (1 for BEL, 3 for SEL)
//   readout            q * 2 * 2^q
// Backward uses the parameter-shift rule: every quantum parameter and every
// encoder input costs two full re-evaluations (encoding + layer + readout),
// so quantum backward = 2 * (P_q + q) * quantum_forward. The breakdown
// attributes those re-evaluations to encoding and quantum_layer in
// proportion to their forward share; none of it depends on the feature size.
CostReport cost_hybrid(const HybridArch& arch);

// 100 * (v_high - v_low) / v_high; rejects v_high <= 0.
double percent_increase(double v_low, double v_high);

// Published reference measurements kept for comparison reports. These come
// from a different (profiler-based) cost model, so only their internal
// arithmetic and trends are comparable with ours, never absolute values.
struct PaperReferenceRow {
    std::string model;  // "BEL" or "SEL"
    int feature_size;
    int best_qubits;
    int best_depth;
    std::uint64_t total;
    std::uint64_t enc_cl;
    std::uint64_t cl;
    std::uint64_t enc;
    std::uint64_t ql;
};

std::vector<PaperReferenceRow> load_paper_reference();
void export_paper_reference_csv(const std::string& path);

}  // namespace hqb
