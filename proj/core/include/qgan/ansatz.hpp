#pragma once

#include "qgan/qsim.hpp"

namespace qgan {

enum class Entangler { Ring };

struct AnsatzSpec {
  int n_qubits = 0;
  int reps = 1;
  Entangler entangler = Entangler::Ring;
};

// Hardware-efficient circuit: an RY encoder layer (one input angle per qubit)
// followed by `reps` blocks of [RX, RY, RZ rotation layers + CX ring].
// Trainable slots: 3 * n_qubits * reps. Encoder slots: n_qubits.
// A ring on a single qubit is empty, so n_qubits = 1 yields no CX gates.
CircuitSpec build_hw_efficient(const AnsatzSpec& spec);

enum class Architecture { LstmQgan, PatchGan };

struct ResourceConfig {
  int qubits_per_qnn = 0;
  int reps = 0;       // ignored for PatchGan
  int qnn_count = 0;

  static ResourceConfig defaults(Architecture arch);
};

struct ResourceReport {
  int qubits_per_qnn = 0;
  int qnn_count = 0;
  int total_qubits = 0;
  int total_1qg = 0;  // trainable one-qubit rotations; encoder RYs are counted as encoding, not here
  int total_2qg = 0;
};

// LstmQgan totals are derived by counting gates in the constructed circuit.
// PatchGan per-QNN gate constants come from the published design (30 one-qubit
// and 24 two-qubit gates per sub-generator); that circuit is not re-derived here.
ResourceReport count_resources(Architecture arch);
ResourceReport count_resources(Architecture arch, const ResourceConfig& config);

}  // namespace qgan
