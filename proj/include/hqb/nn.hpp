#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hqb/matrix.hpp"
#include "hqb/spiral.hpp"

namespace hqb {

// Fully-connected architecture: input -> hidden (ReLU each) -> output softmax.
struct ClassicalArch {
    int input_dim = 0;
    std::vector<int> hidden;
    int output_dim = 3;

    // Dense layer dims in order, e.g. {10, 8, 3} for one hidden layer of 8.
    std::vector<int> layer_dims() const;
    std::uint64_t param_count() const;
};

enum class Activation { ReLU, SoftmaxWithLoss, Identity };

struct TrainConfig {
    int epochs = 100;
    int batch_size = 8;
    double learning_rate = 0.001;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    std::uint64_t seed = 0;
};

struct TrainOutcome {
    double best_train_acc = 0.0;
    double best_val_acc = 0.0;
    std::vector<double> train_acc_trace;  // index 0 is the untrained model
    std::vector<double> val_acc_trace;
    std::vector<double> loss_trace;  // train-split cross-entropy at epoch end
    bool diverged = false;
};

// A differentiable classifier with a flat parameter vector; the train loop
// and the Adam optimizer only touch this surface.
class Model {
public:
    virtual ~Model() = default;
    virtual int input_dim() const = 0;
    virtual int output_dim() const = 0;
    virtual std::vector<double>& params() = 0;
    virtual const std::vector<double>& params() const = 0;
    virtual void init_params(std::mt19937_64& rng) = 0;
    // Per-sample class probabilities; each row sums to 1.
    virtual Matrix forward(const Matrix& batch) const = 0;
    // Mean cross-entropy over the batch; writes d(loss)/d(param) to grads.
    virtual double loss_and_grads(const Matrix& batch, const std::vector<int>& labels,
                                  std::vector<double>& grads) const = 0;
};

// Plain MLP built from ClassicalArch. Parameter layout: [W0|b0|W1|b1|...],
// each W row-major [in x out]; weights Glorot-uniform, biases zero.
class MlpModel : public Model {
public:
    explicit MlpModel(ClassicalArch arch);

    int input_dim() const override { return arch_.input_dim; }
    int output_dim() const override { return arch_.output_dim; }
    std::vector<double>& params() override { return params_; }
    const std::vector<double>& params() const override { return params_; }
    void init_params(std::mt19937_64& rng) override;
    Matrix forward(const Matrix& batch) const override;
    double loss_and_grads(const Matrix& batch, const std::vector<int>& labels,
                          std::vector<double>& grads) const override;

    const ClassicalArch& arch() const { return arch_; }

private:
    ClassicalArch arch_;
    std::vector<int> dims_;
    std::vector<double> params_;
};

struct AdamOptimizer {
    double lr, beta1, beta2, eps;
    std::vector<double> m, v;
    long step_count = 0;

    AdamOptimizer(std::size_t n, const TrainConfig& cfg)
        : lr(cfg.learning_rate), beta1(cfg.adam_beta1), beta2(cfg.adam_beta2), eps(cfg.adam_eps),
          m(n, 0.0), v(n, 0.0) {}
    void step(std::vector<double>& params, const std::vector<double>& grads);
};

double accuracy(const Model& model, const Matrix& features, const std::vector<int>& labels);
double mean_cross_entropy(const Model& model, const Matrix& features, const std::vector<int>& labels);

// Mini-batch Adam for cfg.epochs epochs with seeded shuffling; the last
// incomplete batch is kept. Records full-split train/val accuracy after each
// epoch (and once before training). A non-finite loss aborts the run: the
// outcome is flagged diverged and both best accuracies are reported as 0.
TrainOutcome train(Model& model, const Matrix& train_x, const std::vector<int>& train_y,
                   const Matrix& val_x, const std::vector<int>& val_y, const TrainConfig& cfg);

// Convenience overload on a split dataset.
TrainOutcome train(Model& model, const Dataset& dataset, const TrainConfig& cfg);

// CSV: epoch,train_acc,val_acc,loss
void write_trace_csv(const TrainOutcome& outcome, const std::string& path);

}  // namespace hqb
