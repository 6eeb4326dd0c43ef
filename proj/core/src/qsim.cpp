#include "qgan/qsim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qgan {

namespace {

constexpr double kHalfPi = 1.5707963267948966192313216916398;

int bit_position(int n_qubits, int qubit) { return n_qubits - 1 - qubit; }

void check_qubit(int n_qubits, int q, const char* what) {
  if (q < 0 || q >= n_qubits)
    throw std::invalid_argument(std::string(what) + " index out of range: " + std::to_string(q));
}

double resolve_angle(const GateOp& gate, std::optional<double> angle) {
  if (angle.has_value()) return *angle;
  if (gate.fixed_angle.has_value()) return *gate.fixed_angle;
  throw std::invalid_argument("rotation gate has no angle");
}

// Applies the 2x2 unitary [[u00,u01],[u10,u11]] to the given qubit.
void apply_1q(Statevector& s, int qubit, cplx u00, cplx u01, cplx u10, cplx u11) {
  const std::size_t stride = std::size_t{1} << bit_position(s.n_qubits, qubit);
  const std::size_t dim = s.amplitudes.size();
  cplx* a = s.amplitudes.data();
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t k = base; k < base + stride; ++k) {
      const cplx a0 = a[k];
      const cplx a1 = a[k + stride];
      a[k] = u00 * a0 + u01 * a1;
      a[k + stride] = u10 * a0 + u11 * a1;
    }
  }
}

void apply_cx(Statevector& s, int control, int target) {
  const std::size_t cbit = std::size_t{1} << bit_position(s.n_qubits, control);
  const std::size_t tbit = std::size_t{1} << bit_position(s.n_qubits, target);
  const std::size_t dim = s.amplitudes.size();
  cplx* a = s.amplitudes.data();
  for (std::size_t k = 0; k < dim; ++k) {
    if ((k & cbit) && !(k & tbit)) std::swap(a[k], a[k | tbit]);
  }
}

void apply_resolved(Statevector& s, const GateOp& gate, double theta) {
  const double c = std::cos(theta / 2.0);
  const double v = std::sin(theta / 2.0);
  switch (gate.kind) {
    case GateKind::RX:
      apply_1q(s, gate.target, {c, 0}, {0, -v}, {0, -v}, {c, 0});
      break;
    case GateKind::RY:
      apply_1q(s, gate.target, {c, 0}, {-v, 0}, {v, 0}, {c, 0});
      break;
    case GateKind::RZ:
      apply_1q(s, gate.target, {c, -v}, {0, 0}, {0, 0}, {c, v});
      break;
    case GateKind::CX:
      apply_cx(s, gate.control, gate.target);
      break;
  }
}

// Runs the circuit with one gate occurrence's angle offset by `delta`.
Statevector run_shifted(const CircuitSpec& circuit, std::span<const double> params,
                        std::span<const double> inputs, std::size_t shifted_gate, double delta) {
  Statevector s = zero_state(circuit.n_qubits);
  for (std::size_t g = 0; g < circuit.gates.size(); ++g) {
    const GateOp& gate = circuit.gates[g];
    if (gate.kind == GateKind::CX) {
      apply_resolved(s, gate, 0.0);
      continue;
    }
    double theta;
    if (gate.param_slot >= 0)
      theta = params[static_cast<std::size_t>(gate.param_slot)];
    else if (gate.encoder_slot >= 0)
      theta = inputs[static_cast<std::size_t>(gate.encoder_slot)];
    else
      theta = *gate.fixed_angle;
    if (g == shifted_gate) theta += delta;
    apply_resolved(s, gate, theta);
  }
  return s;
}

// cotangent . (probs(+pi/2) - probs(-pi/2)) / 2 for one gate occurrence.
double occurrence_shift(const CircuitSpec& circuit, std::span<const double> params,
                        std::span<const double> inputs, std::span<const double> cotangent,
                        std::size_t gate_index) {
  const Statevector plus = run_shifted(circuit, params, inputs, gate_index, kHalfPi);
  const Statevector minus = run_shifted(circuit, params, inputs, gate_index, -kHalfPi);
  double acc = 0.0;
  for (std::size_t k = 0; k < plus.amplitudes.size(); ++k)
    acc += cotangent[k] * (std::norm(plus.amplitudes[k]) - std::norm(minus.amplitudes[k]));
  return acc / 2.0;
}

void check_lengths(const CircuitSpec& circuit, std::span<const double> params,
                   std::span<const double> inputs) {
  if (params.size() != static_cast<std::size_t>(circuit.param_count))
    throw std::invalid_argument("run: params length != param_count");
  if (inputs.size() != static_cast<std::size_t>(circuit.encoder_slots))
    throw std::invalid_argument("run: inputs length != encoder_slots");
}

}  // namespace

GateOp GateOp::rotation(GateKind kind, int target, int param_slot, int encoder_slot,
                        std::optional<double> fixed_angle) {
  GateOp g;
  g.kind = kind;
  g.target = target;
  g.param_slot = param_slot;
  g.encoder_slot = encoder_slot;
  g.fixed_angle = fixed_angle;
  const int sources = (param_slot >= 0) + (encoder_slot >= 0) + fixed_angle.has_value();
  if (kind == GateKind::CX || sources != 1)
    throw std::invalid_argument("rotation gate needs exactly one angle source");
  return g;
}

GateOp GateOp::cx(int control, int target) {
  if (control == target) throw std::invalid_argument("CX control == target");
  GateOp g;
  g.kind = GateKind::CX;
  g.control = control;
  g.target = target;
  return g;
}

void CircuitSpec::validate() const {
  for (const GateOp& gate : gates) {
    check_qubit(n_qubits, gate.target, "target");
    if (gate.kind == GateKind::CX) {
      check_qubit(n_qubits, gate.control, "control");
      if (gate.control == gate.target) throw std::invalid_argument("CX control == target");
      continue;
    }
    if (gate.param_slot >= param_count)
      throw std::invalid_argument("param_slot out of range");
    if (gate.encoder_slot >= encoder_slots)
      throw std::invalid_argument("encoder_slot out of range");
  }
}

Statevector zero_state(int n_qubits) {
  if (n_qubits < 1 || n_qubits > 12)
    throw std::invalid_argument("zero_state: n_qubits must be in [1, 12]");
  Statevector s;
  s.n_qubits = n_qubits;
  s.amplitudes.assign(std::size_t{1} << n_qubits, cplx{0.0, 0.0});
  s.amplitudes[0] = cplx{1.0, 0.0};
  return s;
}

void apply_gate_inplace(Statevector& state, const GateOp& gate, std::optional<double> angle) {
  check_qubit(state.n_qubits, gate.target, "target");
  if (gate.kind == GateKind::CX) {
    if (angle.has_value()) throw std::invalid_argument("CX takes no angle");
    check_qubit(state.n_qubits, gate.control, "control");
    if (gate.control == gate.target) throw std::invalid_argument("CX control == target");
    apply_resolved(state, gate, 0.0);
    return;
  }
  apply_resolved(state, gate, resolve_angle(gate, angle));
}

Statevector apply_gate(Statevector state, const GateOp& gate, std::optional<double> angle) {
  apply_gate_inplace(state, gate, angle);
  return state;
}

Statevector run(const CircuitSpec& circuit, std::span<const double> params,
                std::span<const double> inputs) {
  check_lengths(circuit, params, inputs);
  Statevector s = zero_state(circuit.n_qubits);
  for (const GateOp& gate : circuit.gates) {
    if (gate.kind == GateKind::CX) {
      apply_resolved(s, gate, 0.0);
    } else if (gate.param_slot >= 0) {
      apply_resolved(s, gate, params[static_cast<std::size_t>(gate.param_slot)]);
    } else if (gate.encoder_slot >= 0) {
      apply_resolved(s, gate, inputs[static_cast<std::size_t>(gate.encoder_slot)]);
    } else {
      apply_resolved(s, gate, *gate.fixed_angle);
    }
  }
  return s;
}

std::vector<double> probabilities(const Statevector& state) {
  std::vector<double> p(state.amplitudes.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::norm(state.amplitudes[k]);
  return p;
}

std::vector<double> pauli_z_expectations(const Statevector& state) {
  const std::vector<double> p = probabilities(state);
  std::vector<double> z(static_cast<std::size_t>(state.n_qubits), 0.0);
  for (int q = 0; q < state.n_qubits; ++q) {
    const std::size_t bit = std::size_t{1} << bit_position(state.n_qubits, q);
    double acc = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) acc += (k & bit) ? -p[k] : p[k];
    z[static_cast<std::size_t>(q)] = acc;
  }
  return z;
}

std::vector<double> param_shift_gradient(const CircuitSpec& circuit, std::span<const double> params,
                                         std::span<const double> inputs,
                                         std::span<const double> cotangent) {
  check_lengths(circuit, params, inputs);
  std::vector<double> grad(static_cast<std::size_t>(circuit.param_count), 0.0);
  for (std::size_t g = 0; g < circuit.gates.size(); ++g) {
    const int slot = circuit.gates[g].param_slot;
    if (slot < 0) continue;
    grad[static_cast<std::size_t>(slot)] += occurrence_shift(circuit, params, inputs, cotangent, g);
  }
  return grad;
}

std::vector<double> encoder_shift_gradient(const CircuitSpec& circuit, std::span<const double> params,
                                           std::span<const double> inputs,
                                           std::span<const double> cotangent) {
  check_lengths(circuit, params, inputs);
  std::vector<double> grad(static_cast<std::size_t>(circuit.encoder_slots), 0.0);
  for (std::size_t g = 0; g < circuit.gates.size(); ++g) {
    const int slot = circuit.gates[g].encoder_slot;
    if (slot < 0) continue;
    grad[static_cast<std::size_t>(slot)] += occurrence_shift(circuit, params, inputs, cotangent, g);
  }
  return grad;
}

}  // namespace qgan
