#include "qgan/pca.hpp"

#include <cmath>
#include <stdexcept>

namespace qgan {

namespace {

Mat standardize(const PcaModel& model, const Mat& x) {
  if (static_cast<int>(x.cols) != model.feature_dim())
    throw std::invalid_argument("pca: feature dimension mismatch");
  Mat out(x.rows, x.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j)
      out(i, j) = (x(i, j) - model.mean[j]) / model.scale[j];
  return out;
}

}  // namespace

PcaModel pca_fit(const Mat& samples, int k) {
  const std::size_t n = samples.rows;
  const std::size_t d = samples.cols;
  if (n < 2) throw std::invalid_argument("pca_fit: need at least 2 samples");
  if (k < 1 || static_cast<std::size_t>(k) > d)
    throw std::invalid_argument("pca_fit: k out of range");

  PcaModel model;
  model.mean.assign(d, 0.0);
  model.scale.assign(d, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) model.mean[j] += samples(i, j);
  for (double& m : model.mean) m /= static_cast<double>(n);
  for (std::size_t j = 0; j < d; ++j) {
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = samples(i, j) - model.mean[j];
      var += c * c;
    }
    var /= static_cast<double>(n);
    // Constant features keep scale 1. The tolerance absorbs the rounding
    // noise a mathematically constant column picks up through the mean.
    const double tol = 1e-12 * std::max(1.0, std::abs(model.mean[j]));
    if (std::sqrt(var) > tol) model.scale[j] = std::sqrt(var);
  }

  Mat x(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) x(i, j) = (samples(i, j) - model.mean[j]) / model.scale[j];

  Mat cov(d, d);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = x.a.data() + i * d;
    for (std::size_t p = 0; p < d; ++p) {
      const double rp = row[p];
      if (rp == 0.0) continue;
      double* cr = cov.a.data() + p * d;
      for (std::size_t q = p; q < d; ++q) cr[q] += rp * row[q];
    }
  }
  const double inv = 1.0 / static_cast<double>(n - 1);
  for (std::size_t p = 0; p < d; ++p)
    for (std::size_t q = p; q < d; ++q) {
      cov(p, q) *= inv;
      cov(q, p) = cov(p, q);
    }

  std::vector<double> values;
  Mat vectors;
  eigh(cov, values, vectors);

  model.components = Mat(d, static_cast<std::size_t>(k));
  model.eigenvalues.assign(values.begin(), values.begin() + k);
  for (std::size_t j = 0; j < static_cast<std::size_t>(k); ++j)
    for (std::size_t i = 0; i < d; ++i) model.components(i, j) = vectors(i, j);

  const Mat z = matmul(x, model.components);
  model.score_mean.assign(static_cast<std::size_t>(k), 0.0);
  model.score_std.assign(static_cast<std::size_t>(k), 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < static_cast<std::size_t>(k); ++j) model.score_mean[j] += z(i, j);
  for (double& m : model.score_mean) m /= static_cast<double>(n);
  for (std::size_t j = 0; j < static_cast<std::size_t>(k); ++j) {
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = z(i, j) - model.score_mean[j];
      var += c * c;
    }
    model.score_std[j] = std::sqrt(var / static_cast<double>(n - 1));
  }
  return model;
}

Mat pca_transform(const PcaModel& model, const Mat& samples) {
  if (!model.fitted()) throw std::invalid_argument("pca_transform: model not fitted");
  return matmul(standardize(model, samples), model.components);
}

Mat pca_inverse(const PcaModel& model, const Mat& scores) {
  if (!model.fitted()) throw std::invalid_argument("pca_inverse: model not fitted");
  if (static_cast<int>(scores.cols) != model.k())
    throw std::invalid_argument("pca_inverse: score dimension mismatch");

  const std::size_t d = static_cast<std::size_t>(model.feature_dim());
  Mat out(scores.rows, d);
  for (std::size_t i = 0; i < scores.rows; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t c = 0; c < scores.cols; ++c) acc += scores(i, c) * model.components(j, c);
      out(i, j) = acc * model.scale[j] + model.mean[j];
    }
  }
  return out;
}

Mat pca_random_inverse(const PcaModel& model, int n_images, Rng& rng) {
  if (!model.fitted()) throw std::invalid_argument("pca_random_inverse: model not fitted");
  Mat scores(static_cast<std::size_t>(n_images), static_cast<std::size_t>(model.k()));
  for (std::size_t i = 0; i < scores.rows; ++i)
    for (std::size_t j = 0; j < scores.cols; ++j)
      scores(i, j) = model.score_mean[j] + model.score_std[j] * rng.normal();

  Mat images = pca_inverse(model, scores);
  for (double& v : images.a) v = std::min(1.0, std::max(0.0, v));
  return images;
}

}  // namespace qgan
