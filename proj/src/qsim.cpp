#include "hqb/qsim.hpp"

#include <cmath>
#include <stdexcept>

namespace hqb::qsim {

namespace {

constexpr int kMaxQubits = 12;

inline void apply_gate_unchecked(Complex* amps, std::size_t dim, const Gate2& g, int target) {
    const std::size_t mask = std::size_t{1} << target;
    for (std::size_t base = 0; base < dim; base += 2 * mask) {
        for (std::size_t low = 0; low < mask; ++low) {
            const std::size_t i0 = base + low;
            const std::size_t i1 = i0 + mask;
            const Complex a0 = amps[i0];
            const Complex a1 = amps[i1];
            amps[i0] = g[0] * a0 + g[1] * a1;
            amps[i1] = g[2] * a0 + g[3] * a1;
        }
    }
}

// rotation fast paths for the training loop; same math as the generic path

inline void apply_rx_unchecked(Complex* amps, std::size_t dim, double theta, int target) {
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    const std::size_t mask = std::size_t{1} << target;
    for (std::size_t base = 0; base < dim; base += 2 * mask) {
        for (std::size_t low = 0; low < mask; ++low) {
            const std::size_t i0 = base + low;
            const std::size_t i1 = i0 + mask;
            const Complex a0 = amps[i0];
            const Complex a1 = amps[i1];
            // [[c, -is], [-is, c]]
            amps[i0] = Complex(c * a0.real() + s * a1.imag(), c * a0.imag() - s * a1.real());
            amps[i1] = Complex(s * a0.imag() + c * a1.real(), -s * a0.real() + c * a1.imag());
        }
    }
}

inline void apply_ry_unchecked(Complex* amps, std::size_t dim, double theta, int target) {
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    const std::size_t mask = std::size_t{1} << target;
    for (std::size_t base = 0; base < dim; base += 2 * mask) {
        for (std::size_t low = 0; low < mask; ++low) {
            const std::size_t i0 = base + low;
            const std::size_t i1 = i0 + mask;
            const Complex a0 = amps[i0];
            const Complex a1 = amps[i1];
            amps[i0] = c * a0 - s * a1;
            amps[i1] = s * a0 + c * a1;
        }
    }
}

inline void apply_rz_unchecked(Complex* amps, std::size_t dim, double theta, int target) {
    const Complex phase0 = std::exp(Complex(0, -theta / 2.0));
    const Complex phase1 = std::conj(phase0);
    const std::size_t mask = std::size_t{1} << target;
    for (std::size_t i = 0; i < dim; ++i) amps[i] *= (i & mask) ? phase1 : phase0;
}

inline void apply_cnot_unchecked(Complex* amps, std::size_t dim, int control, int target) {
    const std::size_t cmask = std::size_t{1} << control;
    const std::size_t tmask = std::size_t{1} << target;
    for (std::size_t i = 0; i < dim; ++i) {
        if ((i & cmask) && !(i & tmask)) std::swap(amps[i], amps[i | tmask]);
    }
}

inline void encode_into(Complex* amps, std::size_t dim, std::span<const double> x) {
    amps[0] = Complex(1.0, 0.0);
    for (std::size_t i = 1; i < dim; ++i) amps[i] = Complex(0.0, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i)
        apply_rx_unchecked(amps, dim, x[i], static_cast<int>(i));
}

// one repetition of the template, layer index l
void run_single_layer(const QuantumLayerSpec& spec, const double* theta, int l, Complex* amps,
                      std::size_t dim) {
    const int q = spec.qubits;
    if (spec.kind == LayerKind::BEL) {
        for (int i = 0; i < q; ++i) apply_rx_unchecked(amps, dim, theta[l * q + i], i);
        for (int i = 0; i < q && q > 1; ++i) apply_cnot_unchecked(amps, dim, i, (i + 1) % q);
    } else {
        for (int i = 0; i < q; ++i) {
            const double* rot = theta + (static_cast<std::size_t>(l) * q + i) * 3;
            apply_rz_unchecked(amps, dim, rot[2], i);
            apply_ry_unchecked(amps, dim, rot[1], i);
            apply_rz_unchecked(amps, dim, rot[0], i);
        }
        if (q > 1) {
            const int r = (l % (q - 1)) + 1;
            for (int i = 0; i < q; ++i) apply_cnot_unchecked(amps, dim, i, (i + r) % q);
        }
    }
}

void run_layer_unchecked(const QuantumLayerSpec& spec, const double* theta, Complex* amps,
                         std::size_t dim) {
    for (int l = 0; l < spec.depth; ++l) run_single_layer(spec, theta, l, amps, dim);
}

inline double expval_z_raw(const Complex* amps, std::size_t dim, int qubit) {
    const std::size_t mask = std::size_t{1} << qubit;
    double e = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        const double p = std::norm(amps[i]);
        e += (i & mask) ? -p : p;
    }
    return e;
}

void check_spec(const QuantumLayerSpec& spec, const QuantumParams& params) {
    if (spec.qubits < 1 || spec.qubits > kMaxQubits)
        throw std::invalid_argument("QuantumLayerSpec: qubits out of [1,12]");
    if (spec.depth < 0) throw std::invalid_argument("QuantumLayerSpec: negative depth");
    if (static_cast<int>(params.theta.size()) != spec.param_count())
        throw std::invalid_argument("QuantumParams: theta size does not match spec");
}

}  // namespace

Gate2 rx(double theta) {
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    return {Complex(c, 0), Complex(0, -s), Complex(0, -s), Complex(c, 0)};
}

Gate2 ry(double theta) {
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    return {Complex(c, 0), Complex(-s, 0), Complex(s, 0), Complex(c, 0)};
}

Gate2 rz(double theta) {
    return {std::exp(Complex(0, -theta / 2.0)), Complex(0, 0), Complex(0, 0),
            std::exp(Complex(0, theta / 2.0))};
}

Gate2 pauli_x() { return {Complex(0, 0), Complex(1, 0), Complex(1, 0), Complex(0, 0)}; }

bool is_unitary(const Gate2& g, double tol) {
    // columns orthonormal
    const double c0 = std::norm(g[0]) + std::norm(g[2]);
    const double c1 = std::norm(g[1]) + std::norm(g[3]);
    const Complex dot = std::conj(g[0]) * g[1] + std::conj(g[2]) * g[3];
    return std::abs(c0 - 1.0) < tol && std::abs(c1 - 1.0) < tol && std::abs(dot) < tol;
}

StateVector::StateVector(int q) : qubits(q) {
    if (q < 1 || q > kMaxQubits) throw std::invalid_argument("StateVector: qubits out of [1,12]");
    amps.assign(std::size_t{1} << q, Complex(0.0, 0.0));
    amps[0] = Complex(1.0, 0.0);
}

void apply_single_qubit_gate(StateVector& state, const Gate2& gate, int target) {
    if (target < 0 || target >= state.qubits)
        throw std::invalid_argument("apply_single_qubit_gate: target out of range");
    if (!is_unitary(gate, 1e-12))
        throw std::invalid_argument("apply_single_qubit_gate: gate is not unitary");
    apply_gate_unchecked(state.amps.data(), state.dim(), gate, target);
}

void apply_cnot(StateVector& state, int control, int target) {
    if (control == target) throw std::invalid_argument("apply_cnot: control equals target");
    if (control < 0 || control >= state.qubits || target < 0 || target >= state.qubits)
        throw std::invalid_argument("apply_cnot: qubit out of range");
    apply_cnot_unchecked(state.amps.data(), state.dim(), control, target);
}

double expval_z(const StateVector& state, int qubit) {
    if (qubit < 0 || qubit >= state.qubits) throw std::invalid_argument("expval_z: qubit out of range");
    return expval_z_raw(state.amps.data(), state.dim(), qubit);
}

double norm_sq(const StateVector& state) {
    double s = 0.0;
    for (const Complex& a : state.amps) s += std::norm(a);
    return s;
}

int QuantumLayerSpec::param_count() const {
    const int per_layer = kind == LayerKind::BEL ? qubits : 3 * qubits;
    return per_layer * depth;
}

StateVector angle_encode(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("angle_encode: empty input");
    StateVector state(static_cast<int>(x.size()));
    encode_into(state.amps.data(), state.dim(), x);
    return state;
}

void run_layer(const QuantumLayerSpec& spec, const QuantumParams& params, StateVector& state) {
    check_spec(spec, params);
    if (state.qubits != spec.qubits)
        throw std::invalid_argument("run_layer: state width does not match spec");
    run_layer_unchecked(spec, params.theta.data(), state.amps.data(), state.dim());
}

std::vector<double> layer_expectations(const QuantumLayerSpec& spec, const QuantumParams& params,
                                       std::span<const double> x) {
    check_spec(spec, params);
    if (static_cast<int>(x.size()) != spec.qubits)
        throw std::invalid_argument("layer_expectations: input width does not match spec");
    StateVector state(spec.qubits);
    encode_into(state.amps.data(), state.dim(), x);
    run_layer_unchecked(spec, params.theta.data(), state.amps.data(), state.dim());
    std::vector<double> out(static_cast<std::size_t>(spec.qubits));
    for (int i = 0; i < spec.qubits; ++i) out[i] = expval_z_raw(state.amps.data(), state.dim(), i);
    return out;
}

ShiftGradients parameter_shift_grads(const QuantumLayerSpec& spec, const QuantumParams& params,
                                     std::span<const double> x) {
    check_spec(spec, params);
    if (static_cast<int>(x.size()) != spec.qubits)
        throw std::invalid_argument("parameter_shift_grads: input width does not match spec");

    const int q = spec.qubits;
    const int p = spec.param_count();
    const std::size_t dim = std::size_t{1} << q;
    constexpr double kShift = 1.5707963267948966;  // pi/2

    ShiftGradients grads{Matrix(static_cast<std::size_t>(q), static_cast<std::size_t>(p)),
                         Matrix(static_cast<std::size_t>(q), static_cast<std::size_t>(q))};

    std::vector<Complex> work(dim);
    std::vector<double> theta = params.theta;
    std::vector<double> shifted_x(x.begin(), x.end());
    std::vector<double> plus(static_cast<std::size_t>(q)), minus(static_cast<std::size_t>(q));

    // states entering each layer are shared by every shift inside that layer:
    // prefix[l] is the state after encoding and layers 0..l-1
    std::vector<std::vector<Complex>> prefix(static_cast<std::size_t>(spec.depth) + 1,
                                             std::vector<Complex>(dim));
    encode_into(prefix[0].data(), dim, x);
    for (int l = 0; l < spec.depth; ++l) {
        prefix[l + 1] = prefix[l];
        run_single_layer(spec, params.theta.data(), l, prefix[l + 1].data(), dim);
    }

    const int params_per_layer = spec.depth > 0 ? p / spec.depth : 0;
    auto eval_theta_from_layer = [&](int layer, std::vector<double>& out_vals) {
        std::copy(prefix[layer].begin(), prefix[layer].end(), work.begin());
        for (int l = layer; l < spec.depth; ++l) run_single_layer(spec, theta.data(), l, work.data(), dim);
        for (int i = 0; i < q; ++i) out_vals[i] = expval_z_raw(work.data(), dim, i);
    };
    for (int k = 0; k < p; ++k) {
        const int layer = k / params_per_layer;
        const double original = theta[k];
        theta[k] = original + kShift;
        eval_theta_from_layer(layer, plus);
        theta[k] = original - kShift;
        eval_theta_from_layer(layer, minus);
        theta[k] = original;
        for (int i = 0; i < q; ++i) grads.d_theta(i, k) = 0.5 * (plus[i] - minus[i]);
    }

    // input shifts re-run the encoding
    auto eval_input = [&](std::vector<double>& out_vals) {
        encode_into(work.data(), dim, shifted_x);
        run_layer_unchecked(spec, params.theta.data(), work.data(), dim);
        for (int i = 0; i < q; ++i) out_vals[i] = expval_z_raw(work.data(), dim, i);
    };
    for (int j = 0; j < q; ++j) {
        const double original = shifted_x[j];
        shifted_x[j] = original + kShift;
        eval_input(plus);
        shifted_x[j] = original - kShift;
        eval_input(minus);
        shifted_x[j] = original;
        for (int i = 0; i < q; ++i) grads.d_input(i, j) = 0.5 * (plus[i] - minus[i]);
    }
    return grads;
}

}  // namespace hqb::qsim
