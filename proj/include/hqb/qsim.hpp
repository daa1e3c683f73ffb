#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "hqb/matrix.hpp"

namespace hqb::qsim {

using Complex = std::complex<double>;

// 2x2 unitary, row-major: {g00, g01, g10, g11}.
using Gate2 = std::array<Complex, 4>;

Gate2 rx(double theta);
Gate2 ry(double theta);
Gate2 rz(double theta);
Gate2 pauli_x();
bool is_unitary(const Gate2& g, double tol = 1e-12);

// Full state of a q-qubit register. Bit convention: qubit 0 is the least
// significant bit of the basis-state index, so X on qubit 0 maps |0...0> to
// |0...01>. Qubit counts above 12 are rejected (simulation cap).
struct StateVector {
    int qubits = 0;
    std::vector<Complex> amps;

    StateVector() = default;
    explicit StateVector(int q);  // initialized to |0...0>

    std::size_t dim() const { return amps.size(); }
};

// Applies the 2x2 unitary to the target qubit. The gate is validated
// (unitary within 1e-12) before use.
void apply_single_qubit_gate(StateVector& state, const Gate2& gate, int target);

// control != target required; amplitude pairs with control bit 1 are swapped.
void apply_cnot(StateVector& state, int control, int target);

// <Z> on one qubit: sum of |amp|^2 * (+1 for bit 0, -1 for bit 1).
double expval_z(const StateVector& state, int qubit);

double norm_sq(const StateVector& state);

enum class LayerKind { BEL, SEL };

// Parameterized entangling-layer template, repeated `depth` times:
//   BEL: RX(theta[l,i]) on each qubit, then ring CNOTs i -> (i+1) mod q.
//   SEL: Rot(alpha,beta,gamma) = RZ(alpha)*RY(beta)*RZ(gamma) on each qubit
//        (RZ(gamma) acts first), then ring CNOTs i -> (i+r) mod q with
//        offset r(l) = (l mod (q-1)) + 1.
// A single-qubit register has no entanglers.
struct QuantumLayerSpec {
    int qubits = 3;
    int depth = 1;
    LayerKind kind = LayerKind::BEL;

    // q*d for BEL, 3*q*d for SEL.
    int param_count() const;
};

// Angles in radians. Layout: BEL theta[l*q + i]; SEL theta[(l*q + i)*3 + a]
// with a = 0,1,2 for (alpha, beta, gamma).
struct QuantumParams {
    std::vector<double> theta;
};

// state = tensor product of RX(x_i)|0> over qubits.
StateVector angle_encode(std::span<const double> x);

// Applies the template to an already-encoded state.
void run_layer(const QuantumLayerSpec& spec, const QuantumParams& params, StateVector& state);

// encode + layer + <Z> on every qubit.
std::vector<double> layer_expectations(const QuantumLayerSpec& spec, const QuantumParams& params,
                                       std::span<const double> x);

// Parameter-shift gradients of every <Z_i> readout:
//   d<Z_i>/d(angle) = [f(angle + pi/2) - f(angle - pi/2)] / 2,
// for the layer parameters (d_theta, q x P) and the encoding inputs
// (d_input, q x q).
struct ShiftGradients {
    Matrix d_theta;
    Matrix d_input;
};

ShiftGradients parameter_shift_grads(const QuantumLayerSpec& spec, const QuantumParams& params,
                                     std::span<const double> x);

}  // namespace hqb::qsim
