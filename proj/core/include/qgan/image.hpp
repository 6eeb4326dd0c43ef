#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qgan {

// Binary 8-bit PGM ("P5"). Pixels in [0,1] are written row-major with
// round-half-up to 0..255; out-of-range values are clamped with a warning on
// stderr.
void write_pgm(const std::string& path, std::span<const double> pixels, int rows, int cols);

struct PgmImage {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> bytes;  // row-major

  std::vector<double> to_unit() const;  // bytes / 255.0
};

PgmImage read_pgm(const std::string& path);

// Lays out images (all rows x cols, values [0,1]) on a grid with 1-pixel
// separators, returning the grid pixel buffer and its dimensions.
struct ImageGrid {
  int rows = 0;
  int cols = 0;
  std::vector<double> pixels;
};

ImageGrid assemble_grid(const std::vector<std::vector<double>>& images, int image_rows,
                        int image_cols, int grid_cols);

}  // namespace qgan
