#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qgan/linalg.hpp"

namespace qgan {

struct ImageDataset {
  Mat images;               // n x (rows*cols), pixels in [0,1]
  std::vector<int> labels;  // n entries in 0..9
  int rows = 0;
  int cols = 0;

  std::size_t size() const { return images.rows; }
  int dim() const { return rows * cols; }
};

// IDX (big-endian) reader/writer; magic 2051 for images, 2049 for labels.
ImageDataset load_idx(const std::string& images_path, const std::string& labels_path);
void write_idx(const ImageDataset& data, const std::string& images_path,
               const std::string& labels_path);

// Whole-row horizontal strips: strip t covers rows [t*rows/T, (t+1)*rows/T).
struct PatchLayout {
  int strips = 0;
  int patch_dim = 0;
  int rows = 0;
  int cols = 0;

  static PatchLayout whole_rows(int rows, int cols, int strips);
};

struct PatchSet {
  int strips = 0;
  int patch_dim = 0;
  std::vector<double> a;  // n * strips * patch_dim

  std::size_t size() const {
    return a.size() / (static_cast<std::size_t>(strips) * static_cast<std::size_t>(patch_dim));
  }
  std::span<const double> patch(std::size_t image, int strip) const {
    const std::size_t off =
        (image * static_cast<std::size_t>(strips) + static_cast<std::size_t>(strip)) *
        static_cast<std::size_t>(patch_dim);
    return {a.data() + off, static_cast<std::size_t>(patch_dim)};
  }
};

PatchSet extract_patches(const ImageDataset& data, const PatchLayout& layout);
std::vector<double> reassemble(const PatchSet& patches, std::size_t image);

// Equal flat splits of the row-major pixels, for patch sizes that are not
// whole rows (the per-patch baseline's 14-pixel patches, for instance).
PatchSet flat_patches(const ImageDataset& data, int strips);

// Block-mean pooling; dims must divide evenly.
ImageDataset downscale(const ImageDataset& data, int factor);
ImageDataset crop_center(const ImageDataset& data, int new_rows, int new_cols);

// Deterministic MNIST-shaped surrogate: 28x28 grayscale digits rendered from a
// 5x7 glyph set with position/intensity jitter and smoothing. Useful when the
// real IDX files are not on disk; the full pipeline runs on either.
ImageDataset synthesize_digits(std::size_t n, std::uint64_t seed);

// Desk-scale profile: crop the 28x28 images to the 24x24 center and pool by 3,
// giving 8x8 images (T=4 strips of 16 pixels with 3 qubits).
ImageDataset toy_profile(const ImageDataset& data);

}  // namespace qgan
