#pragma once

#include <optional>

#include "qgan/linalg.hpp"
#include "qgan/pca.hpp"

namespace qgan {

// Frechet distance between Gaussians fit to feature embeddings of two image
// sets. The usual Inception backbone is replaced by a declared feature map:
// raw pixels by default, or scores under a fitted PCA model.
enum class FeatureKind { RawPixels, PcaK };

struct FeatureMap {
  FeatureKind kind = FeatureKind::RawPixels;
  std::optional<PcaModel> pca;  // required for PcaK
};

Mat apply_features(const FeatureMap& map, const Mat& images);

struct FrechetScore {
  double value = 0.0;
  int n_real = 0;
  int n_gen = 0;
};

// ||mu_r - mu_g||^2 + tr(S_r + S_g - 2 (S_r S_g)^{1/2}), covariances with the
// unbiased (n-1) estimator, matrix square roots via symmetric eigensolves with
// negative eigenvalues clamped at zero. Small negative totals clamp to 0.
FrechetScore frechet_distance(const Mat& real_features, const Mat& gen_features);

}  // namespace qgan
