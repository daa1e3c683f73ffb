#include "hqb/hybrid.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

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

std::uint64_t HybridArch::param_count() const {
    const std::uint64_t f = input_dim, q = layer.qubits, out = output_dim;
    return (f * q + q) + static_cast<std::uint64_t>(layer.param_count()) + (q * out + out);
}

HybridModel::HybridModel(HybridArch arch) : arch_(arch) {
    if (arch_.input_dim <= 0 || arch_.output_dim <= 0)
        throw std::invalid_argument("HybridModel: dims must be positive");
    const std::size_t f = arch_.input_dim, q = arch_.layer.qubits, out = arch_.output_dim;
    pre_w_ = 0;
    pre_b_ = pre_w_ + f * q;
    theta_ = pre_b_ + q;
    post_w_ = theta_ + static_cast<std::size_t>(arch_.layer.param_count());
    post_b_ = post_w_ + q * out;
    params_.assign(post_b_ + out, 0.0);
}

void HybridModel::init_params(std::mt19937_64& rng) {
    const std::size_t f = arch_.input_dim, q = arch_.layer.qubits, out = arch_.output_dim;
    {
        const double limit = std::sqrt(6.0 / static_cast<double>(f + q));
        std::uniform_real_distribution<double> glorot(-limit, limit);
        for (std::size_t i = 0; i < f * q; ++i) params_[pre_w_ + i] = glorot(rng);
        for (std::size_t i = 0; i < q; ++i) params_[pre_b_ + i] = 0.0;
    }
    {
        std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
        for (int i = 0; i < arch_.layer.param_count(); ++i) params_[theta_ + i] = angle(rng);
    }
    {
        const double limit = std::sqrt(6.0 / static_cast<double>(q + out));
        std::uniform_real_distribution<double> glorot(-limit, limit);
        for (std::size_t i = 0; i < q * out; ++i) params_[post_w_ + i] = glorot(rng);
        for (std::size_t i = 0; i < out; ++i) params_[post_b_ + i] = 0.0;
    }
}

Matrix HybridModel::encoder_inputs(const Matrix& batch) const {
    const std::size_t f = arch_.input_dim, q = arch_.layer.qubits;
    const double* w = params_.data() + pre_w_;
    const double* b = params_.data() + pre_b_;
    Matrix act(batch.rows(), q);
    for (std::size_t r = 0; r < batch.rows(); ++r) {
        const double* xrow = batch.data() + r * f;
        double* arow = act.data() + r * q;
        for (std::size_t j = 0; j < q; ++j) arow[j] = b[j];
        for (std::size_t k = 0; k < f; ++k) {
            const double xv = xrow[k];
            const double* wrow = w + k * q;
            for (std::size_t j = 0; j < q; ++j) arow[j] += xv * wrow[j];
        }
    }
    return act;
}

Matrix HybridModel::readout(const Matrix& pre_act) const {
    const std::size_t q = arch_.layer.qubits;
    qsim::QuantumParams qp{{params_.begin() + theta_, params_.begin() + post_w_}};
    Matrix evs(pre_act.rows(), q);
    for (std::size_t r = 0; r < pre_act.rows(); ++r) {
        const auto vals = qsim::layer_expectations(arch_.layer, qp, pre_act.row(r));
        for (std::size_t j = 0; j < q; ++j) evs(r, j) = vals[j];
    }
    return evs;
}

Matrix HybridModel::forward(const Matrix& batch) const {
    if (static_cast<int>(batch.cols()) != arch_.input_dim)
        throw std::invalid_argument("forward: batch width does not match input_dim");
    const std::size_t q = arch_.layer.qubits, out = arch_.output_dim;
    const Matrix evs = readout(encoder_inputs(batch));
    const double* w = params_.data() + post_w_;
    const double* b = params_.data() + post_b_;
    Matrix logits(batch.rows(), out);
    for (std::size_t r = 0; r < batch.rows(); ++r) {
        const double* erow = evs.data() + r * q;
        double* lrow = logits.data() + r * out;
        for (std::size_t j = 0; j < out; ++j) lrow[j] = b[j];
        for (std::size_t k = 0; k < q; ++k)
            for (std::size_t j = 0; j < out; ++j) lrow[j] += erow[k] * w[k * out + j];
    }
    softmax_rows(logits);
    return logits;
}

double HybridModel::loss_and_grads(const Matrix& batch, const std::vector<int>& labels,
                                   std::vector<double>& grads) const {
    if (static_cast<int>(batch.cols()) != arch_.input_dim)
        throw std::invalid_argument("loss_and_grads: batch width does not match input_dim");
    if (labels.size() != batch.rows())
        throw std::invalid_argument("loss_and_grads: label count does not match batch");
    for (int y : labels)
        if (y < 0 || y >= arch_.output_dim) throw std::invalid_argument("loss_and_grads: label out of range");

    const std::size_t batch_n = batch.rows();
    const std::size_t f = arch_.input_dim, q = arch_.layer.qubits, out = arch_.output_dim;
    const int p_quantum = arch_.layer.param_count();
    qsim::QuantumParams qp{{params_.begin() + theta_, params_.begin() + post_w_}};

    const Matrix act = encoder_inputs(batch);
    const Matrix evs = readout(act);

    const double* wpost = params_.data() + post_w_;
    const double* bpost = params_.data() + post_b_;
    Matrix probs(batch_n, out);
    for (std::size_t r = 0; r < batch_n; ++r) {
        const double* erow = evs.data() + r * q;
        double* lrow = probs.data() + r * out;
        for (std::size_t j = 0; j < out; ++j) lrow[j] = bpost[j];
        for (std::size_t k = 0; k < q; ++k)
            for (std::size_t j = 0; j < out; ++j) lrow[j] += erow[k] * wpost[k * out + j];
    }
    softmax_rows(probs);

    double loss = 0.0;
    for (std::size_t r = 0; r < batch_n; ++r)
        loss -= std::log(std::max(probs(r, labels[r]), 1e-300));
    loss /= static_cast<double>(batch_n);

    grads.assign(params_.size(), 0.0);
    double* g_pre_w = grads.data() + pre_w_;
    double* g_pre_b = grads.data() + pre_b_;
    double* g_theta = grads.data() + theta_;
    double* g_post_w = grads.data() + post_w_;
    double* g_post_b = grads.data() + post_b_;

    std::vector<double> d_ev(q), d_act(q);
    for (std::size_t r = 0; r < batch_n; ++r) {
        // softmax + cross-entropy delta for this sample
        std::vector<double> d_logit(probs.row(r).begin(), probs.row(r).end());
        d_logit[labels[r]] -= 1.0;
        for (double& v : d_logit) v /= static_cast<double>(batch_n);

        const double* erow = evs.data() + r * q;
        for (std::size_t k = 0; k < q; ++k) {
            for (std::size_t j = 0; j < out; ++j) g_post_w[k * out + j] += erow[k] * d_logit[j];
        }
        for (std::size_t j = 0; j < out; ++j) g_post_b[j] += d_logit[j];

        for (std::size_t k = 0; k < q; ++k) {
            double s = 0.0;
            for (std::size_t j = 0; j < out; ++j) s += wpost[k * out + j] * d_logit[j];
            d_ev[k] = s;
        }

        // chain through the quantum layer via parameter shift
        const auto sg = qsim::parameter_shift_grads(arch_.layer, qp, act.row(r));
        for (int kp = 0; kp < p_quantum; ++kp) {
            double s = 0.0;
            for (std::size_t i = 0; i < q; ++i) s += d_ev[i] * sg.d_theta(i, kp);
            g_theta[kp] += s;
        }
        for (std::size_t j = 0; j < q; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < q; ++i) s += d_ev[i] * sg.d_input(i, j);
            d_act[j] = s;
        }

        // through the (linear) input map
        const double* xrow = batch.data() + r * f;
        for (std::size_t j = 0; j < q; ++j) {
            const double dz = d_act[j];
            g_pre_b[j] += dz;
            for (std::size_t k = 0; k < f; ++k) g_pre_w[k * q + j] += xrow[k] * dz;
        }
    }
    return loss;
}

void save_model_json(const HybridModel& model, const std::string& path) {
    const HybridArch& arch = model.arch();
    nlohmann::json j{
        {"arch",
         {{"input_dim", arch.input_dim},
          {"qubits", arch.layer.qubits},
          {"depth", arch.layer.depth},
          {"kind", arch.layer.kind == qsim::LayerKind::BEL ? "BEL" : "SEL"},
          {"output_dim", arch.output_dim}}},
        {"params", model.params()},
    };
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_model_json: cannot open " + path);
    out << j.dump(2) << '\n';
}

HybridModel load_model_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_model_json: cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    HybridArch arch;
    arch.input_dim = j.at("arch").at("input_dim").get<int>();
    arch.layer.qubits = j.at("arch").at("qubits").get<int>();
    arch.layer.depth = j.at("arch").at("depth").get<int>();
    const std::string kind = j.at("arch").at("kind").get<std::string>();
    if (kind != "BEL" && kind != "SEL") throw std::runtime_error("load_model_json: unknown layer kind");
    arch.layer.kind = kind == "BEL" ? qsim::LayerKind::BEL : qsim::LayerKind::SEL;
    arch.output_dim = j.at("arch").at("output_dim").get<int>();

    HybridModel model(arch);
    auto params = j.at("params").get<std::vector<double>>();
    if (params.size() != model.params().size())
        throw std::runtime_error("load_model_json: parameter count does not match arch");
    model.params() = std::move(params);
    return model;
}

}  // namespace hqb
