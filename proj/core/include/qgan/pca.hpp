#pragma once

#include <vector>

#include "qgan/linalg.hpp"
#include "qgan/rng.hpp"

namespace qgan {

// PCA with per-feature standardization (zero mean, unit variance; features
// with zero variance keep scale 1). Covariance uses the unbiased (n-1)
// estimator, so per-component score variances match the eigenvalues.
struct PcaModel {
  std::vector<double> mean;         // feature_dim
  std::vector<double> scale;        // feature_dim (population std, 1 where degenerate)
  Mat components;                   // feature_dim x k, orthonormal columns
  std::vector<double> eigenvalues;  // k, descending
  std::vector<double> score_mean;   // per-component training score stats
  std::vector<double> score_std;

  int feature_dim() const { return static_cast<int>(components.rows); }
  int k() const { return static_cast<int>(components.cols); }
  bool fitted() const { return components.rows > 0; }
};

PcaModel pca_fit(const Mat& samples, int k);

// Z = standardized(X) V_k
Mat pca_transform(const PcaModel& model, const Mat& samples);

// X* = unstandardize(Z V_k^T): back to raw pixel units.
Mat pca_inverse(const PcaModel& model, const Mat& scores);

// Reconstruction from scores sampled out of the fitted per-component score
// Gaussian, clamped to [0,1]. One image per row.
Mat pca_random_inverse(const PcaModel& model, int n_images, Rng& rng);

}  // namespace qgan
