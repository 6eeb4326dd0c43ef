#pragma once

// Independent verification machinery for the tests. Everything here computes
// by a different route than the library: dense unitary matrices instead of
// stride kernels, finite differences instead of parameter shifts, and
// Denman-Beavers iteration instead of eigensolves.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "qgan/linalg.hpp"
#include "qgan/qsim.hpp"

namespace oracle {

using cplx = std::complex<double>;
using CMat = std::vector<std::vector<cplx>>;

inline CMat cidentity(std::size_t n) {
  CMat m(n, std::vector<cplx>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
  return m;
}

inline CMat kron(const CMat& a, const CMat& b) {
  const std::size_t ar = a.size(), ac = a[0].size(), br = b.size(), bc = b[0].size();
  CMat m(ar * br, std::vector<cplx>(ac * bc, 0.0));
  for (std::size_t i = 0; i < ar; ++i)
    for (std::size_t j = 0; j < ac; ++j)
      for (std::size_t k = 0; k < br; ++k)
        for (std::size_t l = 0; l < bc; ++l) m[i * br + k][j * bc + l] = a[i][j] * b[k][l];
  return m;
}

inline CMat rotation_matrix(qgan::GateKind kind, double theta) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  switch (kind) {
    case qgan::GateKind::RX:
      return {{cplx(c, 0), cplx(0, -s)}, {cplx(0, -s), cplx(c, 0)}};
    case qgan::GateKind::RY:
      return {{cplx(c, 0), cplx(-s, 0)}, {cplx(s, 0), cplx(c, 0)}};
    case qgan::GateKind::RZ:
      return {{cplx(c, -s), cplx(0, 0)}, {cplx(0, 0), cplx(c, s)}};
    default:
      throw std::invalid_argument("not a rotation");
  }
}

// Full 2^n x 2^n unitary for one gate under the project convention that
// qubit 0 is the most significant index bit (so it is the leftmost factor).
inline CMat gate_unitary(int n_qubits, const qgan::GateOp& gate, double theta) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  if (gate.kind == qgan::GateKind::CX) {
    CMat m(dim, std::vector<cplx>(dim, 0.0));
    const std::size_t cbit = std::size_t{1} << (n_qubits - 1 - gate.control);
    const std::size_t tbit = std::size_t{1} << (n_qubits - 1 - gate.target);
    for (std::size_t k = 0; k < dim; ++k) {
      const std::size_t j = (k & cbit) ? (k ^ tbit) : k;
      m[j][k] = 1.0;
    }
    return m;
  }
  CMat u = cidentity(1);
  for (int q = 0; q < n_qubits; ++q)
    u = kron(u, q == gate.target ? rotation_matrix(gate.kind, theta) : cidentity(2));
  return u;
}

// Dense-matrix simulation of a full circuit; the brute-force reference for run().
inline std::vector<cplx> dense_run(const qgan::CircuitSpec& circuit,
                                   const std::vector<double>& params,
                                   const std::vector<double>& inputs) {
  const std::size_t dim = std::size_t{1} << circuit.n_qubits;
  std::vector<cplx> state(dim, 0.0);
  state[0] = 1.0;
  for (const qgan::GateOp& gate : circuit.gates) {
    double theta = 0.0;
    if (gate.kind != qgan::GateKind::CX) {
      if (gate.param_slot >= 0)
        theta = params[static_cast<std::size_t>(gate.param_slot)];
      else if (gate.encoder_slot >= 0)
        theta = inputs[static_cast<std::size_t>(gate.encoder_slot)];
      else
        theta = *gate.fixed_angle;
    }
    const CMat u = gate_unitary(circuit.n_qubits, gate, theta);
    std::vector<cplx> next(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) next[i] += u[i][j] * state[j];
    state = std::move(next);
  }
  return state;
}

// Central finite differences of a scalar function of a parameter vector.
inline std::vector<double> finite_difference(const std::function<double(const std::vector<double>&)>& f,
                                             std::vector<double> x, double h) {
  std::vector<double> grad(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double orig = x[k];
    x[k] = orig + h;
    const double fp = f(x);
    x[k] = orig - h;
    const double fm = f(x);
    x[k] = orig;
    grad[k] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

// Mixed absolute/relative comparison: |a - b| <= tol * max(1, |b|).
inline bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

inline double max_rel_error(const std::vector<double>& got, const std::vector<double>& want) {
  double worst = 0.0;
  for (std::size_t k = 0; k < got.size(); ++k)
    worst = std::max(worst, std::abs(got[k] - want[k]) / std::max(1.0, std::abs(want[k])));
  return worst;
}

// --- Real dense helpers for the Frechet oracle -----------------------------

inline qgan::Mat mat_identity(std::size_t n) {
  qgan::Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

// Gauss-Jordan inverse; fine for the small matrices the oracle handles.
inline qgan::Mat invert(qgan::Mat a) {
  const std::size_t n = a.rows;
  qgan::Mat inv = mat_identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    if (std::abs(a(pivot, col)) < 1e-300) throw std::runtime_error("singular matrix");
    for (std::size_t c = 0; c < n; ++c) {
      std::swap(a(col, c), a(pivot, c));
      std::swap(inv(col, c), inv(pivot, c));
    }
    const double d = a(col, col);
    for (std::size_t c = 0; c < n; ++c) {
      a(col, c) /= d;
      inv(col, c) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a(r, col);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c) {
        a(r, c) -= f * a(col, c);
        inv(r, c) -= f * inv(col, c);
      }
    }
  }
  return inv;
}

// Denman-Beavers iteration for the principal square root of a matrix with no
// eigenvalues on the negative real axis (products of SPD covariances qualify).
inline qgan::Mat denman_beavers_sqrt(const qgan::Mat& a, int iters = 60) {
  qgan::Mat y = a;
  qgan::Mat z = mat_identity(a.rows);
  for (int it = 0; it < iters; ++it) {
    const qgan::Mat y_inv = invert(y);
    const qgan::Mat z_inv = invert(z);
    qgan::Mat y_next(y.rows, y.cols);
    qgan::Mat z_next(z.rows, z.cols);
    for (std::size_t k = 0; k < y.a.size(); ++k) {
      y_next.a[k] = 0.5 * (y.a[k] + z_inv.a[k]);
      z_next.a[k] = 0.5 * (z.a[k] + y_inv.a[k]);
    }
    y = std::move(y_next);
    z = std::move(z_next);
  }
  return y;
}

}  // namespace oracle
