#pragma once

#include <cstdint>
#include <string>

#include "hqb/nn.hpp"
#include "hqb/qsim.hpp"

namespace hqb {

// Dense(F -> q, linear) -> angle encode -> quantum layer -> <Z> per qubit ->
// Dense(q -> 3, softmax). The classical head/tail widths are fixed by the
// qubit count and the class count. Encoder angles are unbounded; the
// rotation gates wrap them, which is what lets the model sharpen decision
// boundaries by growing the input weights.
struct HybridArch {
    int input_dim = 0;
    qsim::QuantumLayerSpec layer;
    int output_dim = 3;

    std::uint64_t param_count() const;
};

// Parameter layout (flat, in this order):
//   pre W  [input_dim x qubits] row-major, pre b [qubits],
//   theta  [layer param_count],
//   post W [qubits x output_dim] row-major, post b [output_dim].
// Initialization: dense weights Glorot-uniform, biases zero, theta uniform
// in [0, 2*pi). Gradients: dense parts by backprop, theta and the encoder
// inputs by the parameter-shift rule. Batch gradients accumulate per sample
// in batch order.
class HybridModel : public Model {
public:
    explicit HybridModel(HybridArch arch);

    int input_dim() const override { return arch_.input_dim; }
    int output_dim() const override { return arch_.output_dim; }
    std::vector<double>& params() override { return params_; }
    const std::vector<double>& params() const override { return params_; }
    void init_params(std::mt19937_64& rng) override;
    Matrix forward(const Matrix& batch) const override;
    double loss_and_grads(const Matrix& batch, const std::vector<int>& labels,
                          std::vector<double>& grads) const override;

    const HybridArch& arch() const { return arch_; }

private:
    HybridArch arch_;
    std::vector<double> params_;

    // offsets into params_
    std::size_t pre_w_ = 0, pre_b_ = 0, theta_ = 0, post_w_ = 0, post_b_ = 0;

    Matrix encoder_inputs(const Matrix& batch) const;     // pre-layer outputs [B x q]
    Matrix readout(const Matrix& pre_act) const;          // <Z> values [B x q]
};

void save_model_json(const HybridModel& model, const std::string& path);
HybridModel load_model_json(const std::string& path);

}  // namespace hqb
