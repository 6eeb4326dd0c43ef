#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qgan {

// Dense row-major matrix of doubles. Small and boring on purpose; everything
// in this project fits comfortably in memory at desk scale.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  std::span<double> row(std::size_t i) { return {a.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const { return {a.data() + i * cols, cols}; }

  std::size_t size() const { return a.size(); }
};

Mat matmul(const Mat& x, const Mat& y);
Mat transpose(const Mat& x);

// y += M v  (y has M.rows entries, v has M.cols)
void matvec_acc(const Mat& m, std::span<const double> v, std::span<double> y);
// y += M^T v
void matvec_t_acc(const Mat& m, std::span<const double> v, std::span<double> y);
// M += outer(u, v)
void outer_acc(Mat& m, std::span<const double> u, std::span<const double> v);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);

// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
// Eigenvalues are returned in descending order; eigenvectors are the columns
// of `vectors` in matching order (orthonormal).
void eigh(const Mat& sym, std::vector<double>& values, Mat& vectors);

}  // namespace qgan
