#include "qgan/ansatz.hpp"

#include <stdexcept>

namespace qgan {

namespace {
constexpr int kPatchganOneQubitGatesPerQnn = 30;
constexpr int kPatchganTwoQubitGatesPerQnn = 24;
}  // namespace

CircuitSpec build_hw_efficient(const AnsatzSpec& spec) {
  if (spec.n_qubits < 1 || spec.reps < 1)
    throw std::invalid_argument("build_hw_efficient: need n_qubits >= 1 and reps >= 1");

  const int n = spec.n_qubits;
  CircuitSpec c;
  c.n_qubits = n;
  c.encoder_slots = n;
  c.param_count = 3 * n * spec.reps;

  for (int q = 0; q < n; ++q) c.gates.push_back(GateOp::ry_input(q, q));

  int slot = 0;
  for (int rep = 0; rep < spec.reps; ++rep) {
    for (int q = 0; q < n; ++q) c.gates.push_back(GateOp::rx_slot(q, slot++));
    for (int q = 0; q < n; ++q) c.gates.push_back(GateOp::ry_slot(q, slot++));
    for (int q = 0; q < n; ++q) c.gates.push_back(GateOp::rz_slot(q, slot++));
    if (n >= 2)
      for (int q = 0; q < n; ++q) c.gates.push_back(GateOp::cx(q, (q + 1) % n));
  }

  c.validate();
  return c;
}

ResourceConfig ResourceConfig::defaults(Architecture arch) {
  switch (arch) {
    case Architecture::LstmQgan:
      // 2 layers x 4 gate circuits = 8 QNNs of 7 qubits, VQC repeated twice.
      return {7, 2, 8};
    case Architecture::PatchGan:
      return {5, 0, 56};
  }
  throw std::invalid_argument("unknown architecture");
}

ResourceReport count_resources(Architecture arch) {
  return count_resources(arch, ResourceConfig::defaults(arch));
}

ResourceReport count_resources(Architecture arch, const ResourceConfig& config) {
  if (config.qubits_per_qnn < 1 || config.qnn_count < 1)
    throw std::invalid_argument("count_resources: invalid config");

  ResourceReport r;
  r.qubits_per_qnn = config.qubits_per_qnn;
  r.qnn_count = config.qnn_count;
  r.total_qubits = config.qubits_per_qnn * config.qnn_count;

  switch (arch) {
    case Architecture::LstmQgan: {
      const CircuitSpec c = build_hw_efficient({config.qubits_per_qnn, config.reps});
      int one_q = 0;
      int two_q = 0;
      for (const GateOp& g : c.gates) {
        if (g.kind == GateKind::CX)
          ++two_q;
        else if (g.param_slot >= 0)
          ++one_q;
      }
      r.total_1qg = one_q * config.qnn_count;
      r.total_2qg = two_q * config.qnn_count;
      return r;
    }
    case Architecture::PatchGan:
      r.total_1qg = kPatchganOneQubitGatesPerQnn * config.qnn_count;
      r.total_2qg = kPatchganTwoQubitGatesPerQnn * config.qnn_count;
      return r;
  }
  throw std::invalid_argument("unknown architecture");
}

}  // namespace qgan
