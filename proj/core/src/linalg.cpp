#include "qgan/linalg.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qgan {

Mat matmul(const Mat& x, const Mat& y) {
  if (x.cols != y.rows) throw std::invalid_argument("matmul: shape mismatch");
  Mat out(x.rows, y.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t k = 0; k < x.cols; ++k) {
      const double xik = x(i, k);
      if (xik == 0.0) continue;
      const double* yr = y.a.data() + k * y.cols;
      double* or_ = out.a.data() + i * out.cols;
      for (std::size_t j = 0; j < y.cols; ++j) or_[j] += xik * yr[j];
    }
  }
  return out;
}

Mat transpose(const Mat& x) {
  Mat out(x.cols, x.rows);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j) out(j, i) = x(i, j);
  return out;
}

void matvec_acc(const Mat& m, std::span<const double> v, std::span<double> y) {
  if (v.size() != m.cols || y.size() != m.rows) throw std::invalid_argument("matvec: shape mismatch");
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double* r = m.a.data() + i * m.cols;
    double acc = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) acc += r[j] * v[j];
    y[i] += acc;
  }
}

void matvec_t_acc(const Mat& m, std::span<const double> v, std::span<double> y) {
  if (v.size() != m.rows || y.size() != m.cols) throw std::invalid_argument("matvec_t: shape mismatch");
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double* r = m.a.data() + i * m.cols;
    const double vi = v[i];
    for (std::size_t j = 0; j < m.cols; ++j) y[j] += r[j] * vi;
  }
}

void outer_acc(Mat& m, std::span<const double> u, std::span<const double> v) {
  if (u.size() != m.rows || v.size() != m.cols) throw std::invalid_argument("outer: shape mismatch");
  for (std::size_t i = 0; i < m.rows; ++i) {
    double* r = m.a.data() + i * m.cols;
    const double ui = u[i];
    for (std::size_t j = 0; j < m.cols; ++j) r[j] += ui * v[j];
  }
}

double dot(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

namespace {

double pythag(double a, double b) {
  const double aa = std::abs(a);
  const double ab = std::abs(b);
  if (aa > ab) {
    const double r = ab / aa;
    return aa * std::sqrt(1.0 + r * r);
  }
  if (ab == 0.0) return 0.0;
  const double r = aa / ab;
  return ab * std::sqrt(1.0 + r * r);
}

// Householder reduction of a symmetric matrix to tridiagonal form, with the
// orthogonal transform accumulated in place (tred2 lineage).
void tridiagonalize(Mat& a, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = a.rows;
  d.assign(n, 0.0);
  e.assign(n, 0.0);

  for (std::size_t i = n - 1; i >= 1; --i) {
    const std::size_t l = i - 1;
    double h = 0.0;
    if (l > 0) {
      double scale = 0.0;
      for (std::size_t k = 0; k <= l; ++k) scale += std::abs(a(i, k));
      if (scale == 0.0) {
        e[i] = a(i, l);
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          a(i, k) /= scale;
          h += a(i, k) * a(i, k);
        }
        double f = a(i, l);
        double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        a(i, l) = f - g;
        f = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          a(j, i) = a(i, j) / h;
          g = 0.0;
          for (std::size_t k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
          for (std::size_t k = j + 1; k <= l; ++k) g += a(k, j) * a(i, k);
          e[j] = g / h;
          f += e[j] * a(i, j);
        }
        const double hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = a(i, j);
          e[j] = g = e[j] - hh * f;
          for (std::size_t k = 0; k <= j; ++k) a(j, k) -= f * e[k] + g * a(i, k);
        }
      }
    } else {
      e[i] = a(i, l);
    }
    d[i] = h;
  }

  d[0] = 0.0;
  e[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] != 0.0) {
      for (std::size_t j = 0; j < i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k < i; ++k) g += a(i, k) * a(k, j);
        for (std::size_t k = 0; k < i; ++k) a(k, j) -= g * a(k, i);
      }
    }
    d[i] = a(i, i);
    a(i, i) = 1.0;
    for (std::size_t j = 0; j < i; ++j) a(j, i) = a(i, j) = 0.0;
  }
}

// Implicit-shift QL iteration on the tridiagonal (d, e), rotating the
// eigenvector columns of z along (tqli lineage).
void ql_implicit(std::vector<double>& d, std::vector<double>& e, Mat& z) {
  const std::size_t n = d.size();
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (iter++ == 50) throw std::runtime_error("eigh: QL iteration did not converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = pythag(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        for (std::size_t i = m; i-- > l;) {
          double f = s * e[i];
          const double b = c * e[i];
          r = pythag(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (std::size_t k = 0; k < n; ++k) {
            f = z(k, i + 1);
            z(k, i + 1) = s * z(k, i) + c * f;
            z(k, i) = c * z(k, i) - s * f;
          }
        }
        if (r == 0.0 && e[m] == 0.0 && m > l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace

void eigh(const Mat& sym, std::vector<double>& values, Mat& vectors) {
  const std::size_t n = sym.rows;
  if (sym.cols != n) throw std::invalid_argument("eigh: matrix not square");
  if (n == 0) {
    values.clear();
    vectors = Mat();
    return;
  }
  if (n == 1) {
    values = {sym(0, 0)};
    vectors = Mat(1, 1, 1.0);
    return;
  }

  vectors = sym;
  std::vector<double> d, e;
  tridiagonalize(vectors, d, e);
  ql_implicit(d, e, vectors);

  values.resize(n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return d[l] > d[r]; });

  Mat sorted(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    values[j] = d[order[j]];
    for (std::size_t i = 0; i < n; ++i) sorted(i, j) = vectors(i, order[j]);
  }
  vectors = std::move(sorted);
}

}  // namespace qgan
