#include "qgan/frechet.hpp"

#include <cmath>
#include <stdexcept>

namespace qgan {

namespace {

void fit_gaussian(const Mat& x, std::vector<double>& mean, Mat& cov) {
  const std::size_t n = x.rows;
  const std::size_t d = x.cols;
  mean.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) mean[j] += x(i, j);
  for (double& m : mean) m /= static_cast<double>(n);

  cov = Mat(d, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < d; ++p) {
      const double cp = x(i, p) - mean[p];
      if (cp == 0.0) continue;
      double* row = cov.a.data() + p * d;
      for (std::size_t q = p; q < d; ++q) row[q] += cp * (x(i, q) - mean[q]);
    }
  }
  const double inv = 1.0 / static_cast<double>(n - 1);
  for (std::size_t p = 0; p < d; ++p)
    for (std::size_t q = p; q < d; ++q) {
      cov(p, q) *= inv;
      cov(q, p) = cov(p, q);
    }
}

Mat sqrtm_psd(const Mat& sym) {
  std::vector<double> values;
  Mat vectors;
  eigh(sym, values, vectors);
  const std::size_t d = sym.rows;
  Mat out(d, d);
  for (std::size_t c = 0; c < d; ++c) {
    const double s = std::sqrt(std::max(values[c], 0.0));
    if (s == 0.0) continue;
    for (std::size_t i = 0; i < d; ++i) {
      const double vis = vectors(i, c) * s;
      if (vis == 0.0) continue;
      for (std::size_t j = 0; j < d; ++j) out(i, j) += vis * vectors(j, c);
    }
  }
  return out;
}

}  // namespace

Mat apply_features(const FeatureMap& map, const Mat& images) {
  switch (map.kind) {
    case FeatureKind::RawPixels:
      return images;
    case FeatureKind::PcaK:
      if (!map.pca || !map.pca->fitted())
        throw std::invalid_argument("apply_features: PcaK needs a fitted model");
      return pca_transform(*map.pca, images);
  }
  throw std::invalid_argument("apply_features: unknown feature kind");
}

FrechetScore frechet_distance(const Mat& real_features, const Mat& gen_features) {
  if (real_features.cols != gen_features.cols)
    throw std::invalid_argument("frechet_distance: feature dimension mismatch");
  if (real_features.rows < 2 || gen_features.rows < 2)
    throw std::invalid_argument("frechet_distance: need at least 2 samples per side");

  std::vector<double> mu_r, mu_g;
  Mat cov_r, cov_g;
  fit_gaussian(real_features, mu_r, cov_r);
  fit_gaussian(gen_features, mu_g, cov_g);

  const std::size_t d = real_features.cols;
  double mean_term = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double diff = mu_r[j] - mu_g[j];
    mean_term += diff * diff;
  }

  double trace_sum = 0.0;
  for (std::size_t j = 0; j < d; ++j) trace_sum += cov_r(j, j) + cov_g(j, j);

  // tr sqrt(S_r S_g) = tr sqrt(sqrt(S_r) S_g sqrt(S_r)), the latter symmetric.
  const Mat root_r = sqrtm_psd(cov_r);
  Mat m = matmul(matmul(root_r, cov_g), root_r);
  for (std::size_t p = 0; p < d; ++p)
    for (std::size_t q = p + 1; q < d; ++q) {
      const double sym = 0.5 * (m(p, q) + m(q, p));
      m(p, q) = sym;
      m(q, p) = sym;
    }
  std::vector<double> values;
  Mat vectors;
  eigh(m, values, vectors);
  double trace_root = 0.0;
  for (const double v : values) trace_root += std::sqrt(std::max(v, 0.0));

  FrechetScore score;
  score.n_real = static_cast<int>(real_features.rows);
  score.n_gen = static_cast<int>(gen_features.rows);
  score.value = std::max(0.0, mean_term + trace_sum - 2.0 * trace_root);
  return score;
}

}  // namespace qgan
