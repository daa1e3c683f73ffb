#include "hqb/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace hqb {

namespace {

void softmax_rows(Matrix& m) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = m.row(r);
        double mx = row[0];
        for (double v : row) mx = std::max(mx, v);
        double sum = 0.0;
        for (double& v : row) {
            v = std::exp(v - mx);
            sum += v;
        }
        for (double& v : row) v /= sum;
    }
}

}  // namespace

std::vector<int> ClassicalArch::layer_dims() const {
    std::vector<int> dims;
    dims.push_back(input_dim);
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(output_dim);
    return dims;
}

std::uint64_t ClassicalArch::param_count() const {
    std::uint64_t total = 0;
    const auto dims = layer_dims();
    for (std::size_t i = 0; i + 1 < dims.size(); ++i)
        total += static_cast<std::uint64_t>(dims[i]) * dims[i + 1] + dims[i + 1];
    return total;
}

MlpModel::MlpModel(ClassicalArch arch) : arch_(std::move(arch)), dims_(arch_.layer_dims()) {
    if (arch_.input_dim <= 0 || arch_.output_dim <= 0)
        throw std::invalid_argument("MlpModel: dims must be positive");
    for (int h : arch_.hidden)
        if (h <= 0) throw std::invalid_argument("MlpModel: hidden widths must be positive");
    params_.assign(arch_.param_count(), 0.0);
}

void MlpModel::init_params(std::mt19937_64& rng) {
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
        const int in = dims_[l], out = dims_[l + 1];
        const double limit = std::sqrt(6.0 / (in + out));
        std::uniform_real_distribution<double> glorot(-limit, limit);
        for (int i = 0; i < in * out; ++i) params_[offset + i] = glorot(rng);
        offset += static_cast<std::size_t>(in) * out;
        for (int i = 0; i < out; ++i) params_[offset + i] = 0.0;
        offset += out;
    }
}

Matrix MlpModel::forward(const Matrix& batch) const {
    if (static_cast<int>(batch.cols()) != arch_.input_dim)
        throw std::invalid_argument("forward: batch width does not match input_dim");
    Matrix act = batch;
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
        const std::size_t in = dims_[l], out = dims_[l + 1];
        const double* w = params_.data() + offset;
        const double* b = params_.data() + offset + in * out;
        offset += in * out + out;
        Matrix next(act.rows(), out);
        for (std::size_t r = 0; r < act.rows(); ++r) {
            const double* arow = act.data() + r * in;
            double* nrow = next.data() + r * out;
            for (std::size_t j = 0; j < out; ++j) nrow[j] = b[j];
            for (std::size_t k = 0; k < in; ++k) {
                const double a = arow[k];
                const double* wrow = w + k * out;
                for (std::size_t j = 0; j < out; ++j) nrow[j] += a * wrow[j];
            }
        }
        const bool last = (l + 2 == dims_.size());
        if (!last) {
            for (std::size_t r = 0; r < next.rows(); ++r)
                for (double& v : next.row(r)) v = v > 0.0 ? v : 0.0;
        }
        act = std::move(next);
    }
    softmax_rows(act);
    return act;
}

double MlpModel::loss_and_grads(const Matrix& batch, const std::vector<int>& labels,
                                std::vector<double>& grads) const {
    if (static_cast<int>(batch.cols()) != arch_.input_dim)
        throw std::invalid_argument("loss_and_grads: batch width does not match input_dim");
    if (labels.size() != batch.rows())
        throw std::invalid_argument("loss_and_grads: label count does not match batch");
    for (int y : labels)
        if (y < 0 || y >= arch_.output_dim) throw std::invalid_argument("loss_and_grads: label out of range");

    const std::size_t batch_n = batch.rows();
    const std::size_t n_layers = dims_.size() - 1;

    // forward, keeping post-activation values per layer
    std::vector<Matrix> acts;
    acts.reserve(n_layers + 1);
    acts.push_back(batch);
    std::size_t offset = 0;
    std::vector<std::size_t> offsets(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        offsets[l] = offset;
        const std::size_t in = dims_[l], out = dims_[l + 1];
        const double* w = params_.data() + offset;
        const double* b = params_.data() + offset + in * out;
        offset += in * out + out;
        Matrix next(batch_n, out);
        const Matrix& prev = acts.back();
        for (std::size_t r = 0; r < batch_n; ++r) {
            const double* arow = prev.data() + r * in;
            double* nrow = next.data() + r * out;
            for (std::size_t j = 0; j < out; ++j) nrow[j] = b[j];
            for (std::size_t k = 0; k < in; ++k) {
                const double a = arow[k];
                const double* wrow = w + k * out;
                for (std::size_t j = 0; j < out; ++j) nrow[j] += a * wrow[j];
            }
        }
        if (l + 1 < n_layers) {
            for (std::size_t r = 0; r < batch_n; ++r)
                for (double& v : next.row(r)) v = v > 0.0 ? v : 0.0;
        }
        acts.push_back(std::move(next));
    }
    softmax_rows(acts.back());

    double loss = 0.0;
    for (std::size_t r = 0; r < batch_n; ++r)
        loss -= std::log(std::max(acts.back()(r, labels[r]), 1e-300));
    loss /= static_cast<double>(batch_n);

    grads.assign(params_.size(), 0.0);

    // softmax + cross-entropy: delta = (p - onehot)/B
    Matrix delta = acts.back();
    for (std::size_t r = 0; r < batch_n; ++r) {
        double* drow = delta.data() + r * delta.cols();
        drow[labels[r]] -= 1.0;
        for (std::size_t j = 0; j < delta.cols(); ++j) drow[j] /= static_cast<double>(batch_n);
    }

    for (std::size_t l = n_layers; l-- > 0;) {
        const std::size_t in = dims_[l], out = dims_[l + 1];
        const Matrix& below = acts[l];
        double* gw = grads.data() + offsets[l];
        double* gb = gw + in * out;
        for (std::size_t r = 0; r < batch_n; ++r) {
            const double* arow = below.data() + r * in;
            const double* drow = delta.data() + r * out;
            for (std::size_t k = 0; k < in; ++k) {
                const double a = arow[k];
                if (a == 0.0) continue;
                double* gwrow = gw + k * out;
                for (std::size_t j = 0; j < out; ++j) gwrow[j] += a * drow[j];
            }
            for (std::size_t j = 0; j < out; ++j) gb[j] += drow[j];
        }
        if (l == 0) break;
        // propagate through the affine map, then the ReLU of layer l-1
        const double* w = params_.data() + offsets[l];
        Matrix next_delta(batch_n, in);
        for (std::size_t r = 0; r < batch_n; ++r) {
            const double* drow = delta.data() + r * out;
            const double* arow = below.data() + r * in;
            double* ndrow = next_delta.data() + r * in;
            for (std::size_t k = 0; k < in; ++k) {
                if (arow[k] <= 0.0) {  // ReLU off (post-activation is 0)
                    ndrow[k] = 0.0;
                    continue;
                }
                const double* wrow = w + k * out;
                double s = 0.0;
                for (std::size_t j = 0; j < out; ++j) s += wrow[j] * drow[j];
                ndrow[k] = s;
            }
        }
        delta = std::move(next_delta);
    }
    return loss;
}

void AdamOptimizer::step(std::vector<double>& params, const std::vector<double>& grads) {
    ++step_count;
    const double bc1 = 1.0 - std::pow(beta1, step_count);
    const double bc2 = 1.0 - std::pow(beta2, step_count);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        m[i] = beta1 * m[i] + (1.0 - beta1) * g;
        v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
        params[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
    }
}

double accuracy(const Model& model, const Matrix& features, const std::vector<int>& labels) {
    const Matrix probs = model.forward(features);
    std::size_t correct = 0;
    for (std::size_t r = 0; r < probs.rows(); ++r) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < probs.cols(); ++c)
            if (probs(r, c) > probs(r, best)) best = c;
        if (static_cast<int>(best) == labels[r]) ++correct;
    }
    return probs.rows() == 0 ? 0.0 : static_cast<double>(correct) / probs.rows();
}

double mean_cross_entropy(const Model& model, const Matrix& features, const std::vector<int>& labels) {
    const Matrix probs = model.forward(features);
    double loss = 0.0;
    for (std::size_t r = 0; r < probs.rows(); ++r)
        loss -= std::log(std::max(probs(r, labels[r]), 1e-300));
    return probs.rows() == 0 ? 0.0 : loss / probs.rows();
}

TrainOutcome train(Model& model, const Matrix& train_x, const std::vector<int>& train_y,
                   const Matrix& val_x, const std::vector<int>& val_y, const TrainConfig& cfg) {
    if (cfg.epochs < 0 || cfg.batch_size <= 0 || cfg.learning_rate <= 0.0)
        throw std::invalid_argument("train: invalid TrainConfig");
    if (static_cast<int>(train_x.cols()) != model.input_dim())
        throw std::invalid_argument("train: feature width does not match model input_dim");

    std::mt19937_64 rng(cfg.seed);
    model.init_params(rng);
    AdamOptimizer adam(model.params().size(), cfg);

    TrainOutcome outcome;
    auto record = [&](double epoch_loss) {
        outcome.train_acc_trace.push_back(accuracy(model, train_x, train_y));
        outcome.val_acc_trace.push_back(accuracy(model, val_x, val_y));
        outcome.loss_trace.push_back(epoch_loss);
    };
    record(mean_cross_entropy(model, train_x, train_y));

    std::vector<int> order(train_x.rows());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> grads;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            std::span<const int> rows(order.data() + start, stop - start);
            Matrix bx = train_x.take_rows(rows);
            std::vector<int> by(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i) by[i] = train_y[rows[i]];
            const double loss = model.loss_and_grads(bx, by, grads);
            if (!std::isfinite(loss)) {
                outcome.diverged = true;
                outcome.best_train_acc = 0.0;
                outcome.best_val_acc = 0.0;
                return outcome;
            }
            adam.step(model.params(), grads);
        }
        record(mean_cross_entropy(model, train_x, train_y));
    }

    outcome.best_train_acc = *std::max_element(outcome.train_acc_trace.begin(), outcome.train_acc_trace.end());
    outcome.best_val_acc = *std::max_element(outcome.val_acc_trace.begin(), outcome.val_acc_trace.end());
    return outcome;
}

TrainOutcome train(Model& model, const Dataset& dataset, const TrainConfig& cfg) {
    return train(model, dataset.train_features(), dataset.train_labels(), dataset.val_features(),
                 dataset.val_labels(), cfg);
}

void write_trace_csv(const TrainOutcome& outcome, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_trace_csv: cannot open " + path);
    out << "epoch,train_acc,val_acc,loss\n";
    char buf[96];
    for (std::size_t e = 0; e < outcome.train_acc_trace.size(); ++e) {
        std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%.6f\n", e, outcome.train_acc_trace[e],
                      outcome.val_acc_trace[e], outcome.loss_trace[e]);
        out << buf;
    }
}

}  // namespace hqb
