#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace qgan {

// Statevector simulation of parameterized circuits.
//
// Index convention, used everywhere in this project: qubit 0 is the most
// significant bit of a basis-state index. For an n-qubit register, qubit q
// owns bit position (n - 1 - q) of the index.

using cplx = std::complex<double>;

struct Statevector {
  int n_qubits = 0;
  std::vector<cplx> amplitudes;  // length 2^n_qubits
};

enum class GateKind { RX, RY, RZ, CX };

// One gate in a circuit. Rotations take their angle from exactly one of:
// a trainable parameter slot, an encoder (input) slot, or a fixed angle.
struct GateOp {
  GateKind kind = GateKind::RX;
  int target = 0;
  int control = -1;  // CX only
  int param_slot = -1;
  int encoder_slot = -1;
  std::optional<double> fixed_angle;

  static GateOp rotation(GateKind kind, int target, int param_slot, int encoder_slot,
                         std::optional<double> fixed_angle);
  static GateOp rx_slot(int target, int slot) { return rotation(GateKind::RX, target, slot, -1, {}); }
  static GateOp ry_slot(int target, int slot) { return rotation(GateKind::RY, target, slot, -1, {}); }
  static GateOp rz_slot(int target, int slot) { return rotation(GateKind::RZ, target, slot, -1, {}); }
  static GateOp rx_input(int target, int slot) { return rotation(GateKind::RX, target, -1, slot, {}); }
  static GateOp ry_input(int target, int slot) { return rotation(GateKind::RY, target, -1, slot, {}); }
  static GateOp rz_input(int target, int slot) { return rotation(GateKind::RZ, target, -1, slot, {}); }
  static GateOp rx_fixed(int target, double angle) { return rotation(GateKind::RX, target, -1, -1, angle); }
  static GateOp ry_fixed(int target, double angle) { return rotation(GateKind::RY, target, -1, -1, angle); }
  static GateOp rz_fixed(int target, double angle) { return rotation(GateKind::RZ, target, -1, -1, angle); }
  static GateOp cx(int control, int target);
};

struct CircuitSpec {
  int n_qubits = 0;
  int encoder_slots = 0;
  int param_count = 0;
  std::vector<GateOp> gates;

  // Throws std::invalid_argument on bad slot/qubit indices.
  void validate() const;
};

// |0...0> on n qubits, 1 <= n <= 12.
Statevector zero_state(int n_qubits);

// Applies one gate. For rotations the resolved angle must be present either
// as `angle` or as the gate's fixed angle; CX must not be given an angle.
Statevector apply_gate(Statevector state, const GateOp& gate, std::optional<double> angle = {});
void apply_gate_inplace(Statevector& state, const GateOp& gate, std::optional<double> angle = {});

// Runs the circuit from |0...0>, resolving slot angles from params/inputs.
Statevector run(const CircuitSpec& circuit, std::span<const double> params,
                std::span<const double> inputs);

std::vector<double> probabilities(const Statevector& state);

// <Z_q> for each qubit: sum_k probs[k] * (+1 if bit q of k is 0 else -1).
std::vector<double> pauli_z_expectations(const Statevector& state);

// Exact parameter-shift gradient of cotangent . probabilities(run(...)) with
// respect to the trainable parameters. Cotangent is dLoss/dprobabilities.
std::vector<double> param_shift_gradient(const CircuitSpec& circuit, std::span<const double> params,
                                         std::span<const double> inputs,
                                         std::span<const double> cotangent);

// Same rule applied to the encoder angles; gradient w.r.t. `inputs`.
std::vector<double> encoder_shift_gradient(const CircuitSpec& circuit, std::span<const double> params,
                                           std::span<const double> inputs,
                                           std::span<const double> cotangent);

}  // namespace qgan
