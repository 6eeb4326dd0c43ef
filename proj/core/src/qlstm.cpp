#include "qgan/qlstm.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qgan {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_finite(std::span<const double> v, const char* what) {
  for (const double x : v)
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + ": non-finite value");
}

// Measured vector for one gate circuit, already scaled per hidden mode.
std::vector<double> measure(const QlstmModel& model, std::span<const double> vqc_params,
                            std::span<const double> angles) {
  const Statevector s = run(model.circuit, vqc_params, angles);
  if (model.config.hidden_mode == HiddenMode::PauliZ) return pauli_z_expectations(s);
  std::vector<double> m = probabilities(s);
  const double scale = static_cast<double>(std::size_t{1} << model.config.n_qubits);
  for (double& x : m) x *= scale;
  return m;
}

// Converts dLoss/dmeasured into dLoss/dprobabilities for the shift rule.
std::vector<double> probability_cotangent(const QlstmModel& model, std::span<const double> dm) {
  const int n = model.config.n_qubits;
  const std::size_t dim = std::size_t{1} << n;
  std::vector<double> cot(dim, 0.0);
  if (model.config.hidden_mode == HiddenMode::Probabilities) {
    const double scale = static_cast<double>(dim);
    for (std::size_t k = 0; k < dim; ++k) cot[k] = dm[k] * scale;
    return cot;
  }
  for (std::size_t k = 0; k < dim; ++k) {
    double acc = 0.0;
    for (int q = 0; q < n; ++q) {
      const std::size_t bit = std::size_t{1} << (n - 1 - q);
      acc += (k & bit) ? -dm[static_cast<std::size_t>(q)] : dm[static_cast<std::size_t>(q)];
    }
    cot[k] = acc;
  }
  return cot;
}

}  // namespace

QlstmModel QlstmModel::init(const QlstmConfig& config, Rng& rng) {
  if (config.n_qubits < 1 || config.reps < 1 || config.input_dim < 1 || config.layers < 1)
    throw std::invalid_argument("QlstmModel::init: invalid config");

  QlstmModel m;
  m.config = config;
  m.circuit = build_hw_efficient({config.n_qubits, config.reps});

  const int param_len = 3 * config.n_qubits * config.reps;
  for (int layer = 0; layer < config.layers; ++layer) {
    const int in_dim = layer == 0 ? config.input_dim : config.hidden_dim();
    const int fan_in = config.hidden_dim() + in_dim;
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));

    QlstmCellParams p;
    p.proj_weights = Mat(static_cast<std::size_t>(config.n_qubits), static_cast<std::size_t>(fan_in));
    for (double& w : p.proj_weights.a) w = rng.uniform(-bound, bound);
    p.proj_bias.resize(static_cast<std::size_t>(config.n_qubits));
    for (double& b : p.proj_bias) b = rng.uniform(-bound, bound);
    for (auto& vqc : p.vqc) {
      vqc.resize(static_cast<std::size_t>(param_len));
      for (double& a : vqc) a = rng.uniform(0.0, kPi);
    }
    m.layers.push_back(std::move(p));
  }
  return m;
}

QlstmState zero_qlstm_state(const QlstmConfig& config) {
  const std::size_t d = static_cast<std::size_t>(config.hidden_dim());
  return {std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
}

std::pair<QlstmState, CellCache> cell_forward(const QlstmModel& model, int layer,
                                              std::span<const double> x_t,
                                              const QlstmState& state) {
  const QlstmCellParams& p = model.layers.at(static_cast<std::size_t>(layer));
  const std::size_t hidden = static_cast<std::size_t>(model.config.hidden_dim());
  const std::size_t in_dim = static_cast<std::size_t>(model.layer_input_dim(layer));
  if (x_t.size() != in_dim || state.h.size() != hidden || state.c.size() != hidden)
    throw std::invalid_argument("cell_forward: dimension mismatch");
  check_finite(x_t, "cell_forward input");

  CellCache cache;
  cache.x.assign(x_t.begin(), x_t.end());
  cache.h_prev = state.h;
  cache.c_prev = state.c;

  cache.v = state.h;
  cache.v.insert(cache.v.end(), x_t.begin(), x_t.end());

  cache.pre = p.proj_bias;
  matvec_acc(p.proj_weights, cache.v, cache.pre);

  cache.angles.resize(cache.pre.size());
  for (std::size_t q = 0; q < cache.pre.size(); ++q) cache.angles[q] = kPi * std::tanh(cache.pre[q]);

  for (int g = 0; g < 4; ++g)
    cache.measured[static_cast<std::size_t>(g)] = measure(model, p.vqc[static_cast<std::size_t>(g)], cache.angles);

  cache.f.resize(hidden);
  cache.i.resize(hidden);
  cache.u.resize(hidden);
  cache.o.resize(hidden);
  cache.c_new.resize(hidden);
  cache.tanh_c_new.resize(hidden);
  cache.h_new.resize(hidden);
  for (std::size_t k = 0; k < hidden; ++k) {
    cache.f[k] = sigmoid(cache.measured[kForget][k]);
    cache.i[k] = sigmoid(cache.measured[kInput][k]);
    cache.u[k] = std::tanh(cache.measured[kUpdate][k]);
    cache.o[k] = sigmoid(cache.measured[kOutput][k]);
    cache.c_new[k] = cache.f[k] * state.c[k] + cache.i[k] * cache.u[k];
    cache.tanh_c_new[k] = std::tanh(cache.c_new[k]);
    cache.h_new[k] = cache.o[k] * cache.tanh_c_new[k];
  }

  QlstmState next{cache.h_new, cache.c_new};
  return {std::move(next), std::move(cache)};
}

CellGrads CellGrads::zeros(const QlstmModel& model, int layer) {
  CellGrads g;
  const std::size_t n = static_cast<std::size_t>(model.config.n_qubits);
  const std::size_t fan_in =
      static_cast<std::size_t>(model.config.hidden_dim() + model.layer_input_dim(layer));
  g.d_proj_weights = Mat(n, fan_in);
  g.d_proj_bias.assign(n, 0.0);
  const std::size_t plen = static_cast<std::size_t>(3 * model.config.n_qubits * model.config.reps);
  for (auto& v : g.d_vqc) v.assign(plen, 0.0);
  return g;
}

void CellGrads::add_scaled(const CellGrads& other, double scale) {
  for (std::size_t k = 0; k < d_proj_weights.a.size(); ++k)
    d_proj_weights.a[k] += scale * other.d_proj_weights.a[k];
  for (std::size_t k = 0; k < d_proj_bias.size(); ++k) d_proj_bias[k] += scale * other.d_proj_bias[k];
  for (int g = 0; g < 4; ++g)
    for (std::size_t k = 0; k < d_vqc[static_cast<std::size_t>(g)].size(); ++k)
      d_vqc[static_cast<std::size_t>(g)][k] += scale * other.d_vqc[static_cast<std::size_t>(g)][k];
}

CellBackward cell_backward(const QlstmModel& model, int layer, const CellCache& cache,
                           const QlstmState& upstream) {
  const QlstmCellParams& p = model.layers.at(static_cast<std::size_t>(layer));
  const std::size_t hidden = static_cast<std::size_t>(model.config.hidden_dim());
  if (upstream.h.size() != hidden || upstream.c.size() != hidden ||
      cache.h_new.size() != hidden)
    throw std::invalid_argument("cell_backward: cache/upstream mismatch");

  CellBackward out;
  out.grads = CellGrads::zeros(model, layer);

  // h' = o * tanh(c'), c' = f*c + i*u
  std::vector<double> dc(hidden);
  std::vector<double> dm[4];
  for (auto& v : dm) v.assign(hidden, 0.0);
  for (std::size_t k = 0; k < hidden; ++k) {
    const double dh = upstream.h[k];
    const double t = cache.tanh_c_new[k];
    dc[k] = upstream.c[k] + dh * cache.o[k] * (1.0 - t * t);
    dm[kOutput][k] = dh * t * cache.o[k] * (1.0 - cache.o[k]);
    dm[kForget][k] = dc[k] * cache.c_prev[k] * cache.f[k] * (1.0 - cache.f[k]);
    dm[kInput][k] = dc[k] * cache.u[k] * cache.i[k] * (1.0 - cache.i[k]);
    dm[kUpdate][k] = dc[k] * cache.i[k] * (1.0 - cache.u[k] * cache.u[k]);
  }

  // Quantum segments: parameter-shift for circuit params and encoder angles.
  std::vector<double> d_angles(cache.angles.size(), 0.0);
  for (int g = 0; g < 4; ++g) {
    const std::vector<double> cot = probability_cotangent(model, dm[g]);
    const std::vector<double> dtheta =
        param_shift_gradient(model.circuit, p.vqc[static_cast<std::size_t>(g)], cache.angles, cot);
    for (std::size_t k = 0; k < dtheta.size(); ++k)
      out.grads.d_vqc[static_cast<std::size_t>(g)][k] += dtheta[k];
    const std::vector<double> da =
        encoder_shift_gradient(model.circuit, p.vqc[static_cast<std::size_t>(g)], cache.angles, cot);
    for (std::size_t k = 0; k < da.size(); ++k) d_angles[k] += da[k];
  }

  // angles = pi * tanh(pre), pre = W v + b
  std::vector<double> d_pre(cache.pre.size());
  for (std::size_t q = 0; q < cache.pre.size(); ++q) {
    const double t = std::tanh(cache.pre[q]);
    d_pre[q] = d_angles[q] * kPi * (1.0 - t * t);
  }
  outer_acc(out.grads.d_proj_weights, d_pre, cache.v);
  for (std::size_t q = 0; q < d_pre.size(); ++q) out.grads.d_proj_bias[q] += d_pre[q];

  std::vector<double> dv(cache.v.size(), 0.0);
  matvec_t_acc(p.proj_weights, d_pre, dv);

  out.dstate.h.assign(dv.begin(), dv.begin() + static_cast<std::ptrdiff_t>(hidden));
  out.dx.assign(dv.begin() + static_cast<std::ptrdiff_t>(hidden), dv.end());
  out.dstate.c.resize(hidden);
  for (std::size_t k = 0; k < hidden; ++k) out.dstate.c[k] = dc[k] * cache.f[k];

  return out;
}

std::pair<std::vector<std::vector<double>>, StackCache> stack_forward(
    const QlstmModel& model, const std::vector<std::vector<double>>& x_seq) {
  const int layers = model.config.layers;
  std::vector<QlstmState> states(static_cast<std::size_t>(layers), zero_qlstm_state(model.config));

  std::vector<std::vector<double>> outputs;
  StackCache cache;
  outputs.reserve(x_seq.size());
  cache.cells.reserve(x_seq.size());

  for (const std::vector<double>& x_t : x_seq) {
    std::vector<CellCache> step_caches;
    step_caches.reserve(static_cast<std::size_t>(layers));
    std::vector<double> input = x_t;
    for (int l = 0; l < layers; ++l) {
      auto [next, cc] = cell_forward(model, l, input, states[static_cast<std::size_t>(l)]);
      input = next.h;
      states[static_cast<std::size_t>(l)] = std::move(next);
      step_caches.push_back(std::move(cc));
    }
    outputs.push_back(std::move(input));
    cache.cells.push_back(std::move(step_caches));
  }
  return {std::move(outputs), std::move(cache)};
}

StackGrads StackGrads::zeros(const QlstmModel& model, int steps) {
  StackGrads g;
  for (int l = 0; l < model.config.layers; ++l) g.layers.push_back(CellGrads::zeros(model, l));
  g.dx_seq.assign(static_cast<std::size_t>(steps),
                  std::vector<double>(static_cast<std::size_t>(model.config.input_dim), 0.0));
  return g;
}

void StackGrads::add_scaled(const StackGrads& other, double scale) {
  for (std::size_t l = 0; l < layers.size(); ++l) layers[l].add_scaled(other.layers[l], scale);
  for (std::size_t t = 0; t < dx_seq.size(); ++t)
    for (std::size_t k = 0; k < dx_seq[t].size(); ++k) dx_seq[t][k] += scale * other.dx_seq[t][k];
}

StackGrads stack_backward(const QlstmModel& model, const StackCache& cache,
                          const std::vector<std::vector<double>>& dh_top) {
  const int layers = model.config.layers;
  const int steps = static_cast<int>(cache.cells.size());
  const std::size_t hidden = static_cast<std::size_t>(model.config.hidden_dim());

  StackGrads grads = StackGrads::zeros(model, steps);
  std::vector<QlstmState> carry(static_cast<std::size_t>(layers), zero_qlstm_state(model.config));

  for (int t = steps - 1; t >= 0; --t) {
    std::vector<double> dh_from_above;  // dx of the layer above, empty for the top
    for (int l = layers - 1; l >= 0; --l) {
      QlstmState upstream = carry[static_cast<std::size_t>(l)];
      if (l == layers - 1 && t < static_cast<int>(dh_top.size()) &&
          !dh_top[static_cast<std::size_t>(t)].empty()) {
        for (std::size_t k = 0; k < hidden; ++k)
          upstream.h[k] += dh_top[static_cast<std::size_t>(t)][k];
      }
      if (l < layers - 1)
        for (std::size_t k = 0; k < hidden; ++k) upstream.h[k] += dh_from_above[k];

      CellBackward back = cell_backward(
          model, l, cache.cells[static_cast<std::size_t>(t)][static_cast<std::size_t>(l)], upstream);
      grads.layers[static_cast<std::size_t>(l)].add_scaled(back.grads, 1.0);
      carry[static_cast<std::size_t>(l)] = std::move(back.dstate);
      dh_from_above = std::move(back.dx);
    }
    grads.dx_seq[static_cast<std::size_t>(t)] = std::move(dh_from_above);
  }
  return grads;
}

}  // namespace qgan
