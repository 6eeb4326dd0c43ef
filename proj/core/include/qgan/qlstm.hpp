#pragma once

#include <array>
#include <utility>
#include <vector>

#include "qgan/ansatz.hpp"
#include "qgan/linalg.hpp"
#include "qgan/qsim.hpp"
#include "qgan/rng.hpp"

namespace qgan {

// QLSTM: classical LSTM gating where the four gate transformations (forget,
// input, update, output) are variational quantum circuits. A trainable linear
// projection maps concat(h, x) to the n encoder angles, bounded to (-pi, pi)
// via pi * tanh. In Probabilities mode the measured distribution (scaled by
// 2^n so entries average 1) is the gate pre-activation; in PauliZ mode the n
// <Z_q> values are used instead, which keeps small test configs cheap.

enum class HiddenMode { Probabilities, PauliZ };

struct QlstmConfig {
  int n_qubits = 0;
  int reps = 1;
  HiddenMode hidden_mode = HiddenMode::Probabilities;
  int input_dim = 0;
  int layers = 1;

  int hidden_dim() const {
    return hidden_mode == HiddenMode::Probabilities ? (1 << n_qubits) : n_qubits;
  }
};

// Gate order is fixed: forget, input, update, output.
enum GateIndex { kForget = 0, kInput = 1, kUpdate = 2, kOutput = 3 };

struct QlstmCellParams {
  Mat proj_weights;                            // n_qubits x (hidden_dim + layer input_dim)
  std::vector<double> proj_bias;               // n_qubits
  std::array<std::vector<double>, 4> vqc;      // each 3 * n_qubits * reps
};

struct QlstmState {
  std::vector<double> h;
  std::vector<double> c;
};

struct QlstmModel {
  QlstmConfig config;
  CircuitSpec circuit;                   // shared hardware-efficient ansatz
  std::vector<QlstmCellParams> layers;   // layer 0 consumes input_dim, deeper layers hidden_dim

  int layer_input_dim(int layer) const {
    return layer == 0 ? config.input_dim : config.hidden_dim();
  }

  // Projection weights/biases uniform in +-1/sqrt(fan_in), circuit angles
  // uniform in [0, pi). Draw order is fixed so initialization is seedable.
  static QlstmModel init(const QlstmConfig& config, Rng& rng);
};

QlstmState zero_qlstm_state(const QlstmConfig& config);

struct CellCache {
  std::vector<double> x;
  std::vector<double> h_prev, c_prev;
  std::vector<double> v;                       // concat(h_prev, x)
  std::vector<double> pre;                     // proj_weights v + proj_bias
  std::vector<double> angles;                  // pi * tanh(pre)
  std::array<std::vector<double>, 4> measured; // post-scale circuit outputs per gate
  std::vector<double> f, i, u, o;
  std::vector<double> c_new, tanh_c_new, h_new;
};

std::pair<QlstmState, CellCache> cell_forward(const QlstmModel& model, int layer,
                                              std::span<const double> x_t,
                                              const QlstmState& state);

struct CellGrads {
  Mat d_proj_weights;
  std::vector<double> d_proj_bias;
  std::array<std::vector<double>, 4> d_vqc;

  static CellGrads zeros(const QlstmModel& model, int layer);
  void add_scaled(const CellGrads& other, double scale);
};

struct CellBackward {
  CellGrads grads;
  std::vector<double> dx;
  QlstmState dstate;  // gradients w.r.t. the incoming (h, c)
};

// Exact reverse-mode gradient of the cell. Upstream carries (dh', dc') for the
// step's outputs. Quantum segments use the parameter-shift rule, for both the
// circuit parameters and the encoder angles.
CellBackward cell_backward(const QlstmModel& model, int layer, const CellCache& cache,
                           const QlstmState& upstream);

struct StackCache {
  // cells[t][layer]
  std::vector<std::vector<CellCache>> cells;
};

// Unrolls the stacked layers over x_seq; states start at zero. Returns the
// top layer's h for every step.
std::pair<std::vector<std::vector<double>>, StackCache> stack_forward(
    const QlstmModel& model, const std::vector<std::vector<double>>& x_seq);

struct StackGrads {
  std::vector<CellGrads> layers;
  std::vector<std::vector<double>> dx_seq;

  static StackGrads zeros(const QlstmModel& model, int steps);
  void add_scaled(const StackGrads& other, double scale);
};

// Backpropagation through time. dh_top[t] is the upstream gradient on the top
// layer's h at step t (may be empty => zero).
StackGrads stack_backward(const QlstmModel& model, const StackCache& cache,
                          const std::vector<std::vector<double>>& dh_top);

}  // namespace qgan
