#include "qgan/image.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace qgan {

void write_pgm(const std::string& path, std::span<const double> pixels, int rows, int cols) {
  if (pixels.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
    throw std::invalid_argument("write_pgm: pixel count != rows*cols");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "P5\n" << cols << " " << rows << "\n255\n";

  bool warned = false;
  std::vector<std::uint8_t> buf(pixels.size());
  for (std::size_t k = 0; k < pixels.size(); ++k) {
    double v = pixels[k];
    if (v < 0.0 || v > 1.0) {
      if (!warned) {
        std::cerr << "write_pgm: clamping out-of-range pixel value(s) in " << path << "\n";
        warned = true;
      }
      v = std::min(1.0, std::max(0.0, v));
    }
    buf[k] = static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5));
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

int next_pgm_int(std::istream& in) {
  // Skips whitespace and '#' comments, as the format allows in the header.
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = in.get();
  }
  if (c == EOF) throw std::runtime_error("truncated PGM header");
  int value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    c = in.get();
  }
  return value;
}

}  // namespace

PgmImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (m0 != 'P' || m1 != '5') throw std::runtime_error("not a binary PGM: " + path);

  PgmImage img;
  img.cols = next_pgm_int(in);
  img.rows = next_pgm_int(in);
  const int maxval = next_pgm_int(in);
  if (maxval != 255) throw std::runtime_error("unsupported PGM maxval in " + path);

  img.bytes.resize(static_cast<std::size_t>(img.rows) * static_cast<std::size_t>(img.cols));
  in.read(reinterpret_cast<char*>(img.bytes.data()), static_cast<std::streamsize>(img.bytes.size()));
  if (!in) throw std::runtime_error("truncated PGM raster in " + path);
  return img;
}

std::vector<double> PgmImage::to_unit() const {
  std::vector<double> out(bytes.size());
  for (std::size_t k = 0; k < bytes.size(); ++k) out[k] = bytes[k] / 255.0;
  return out;
}

ImageGrid assemble_grid(const std::vector<std::vector<double>>& images, int image_rows,
                        int image_cols, int grid_cols) {
  if (images.empty() || grid_cols < 1) throw std::invalid_argument("assemble_grid: empty input");
  const int n = static_cast<int>(images.size());
  const int grid_rows = (n + grid_cols - 1) / grid_cols;

  ImageGrid grid;
  grid.rows = grid_rows * image_rows + (grid_rows - 1);
  grid.cols = grid_cols * image_cols + (grid_cols - 1);
  grid.pixels.assign(static_cast<std::size_t>(grid.rows) * static_cast<std::size_t>(grid.cols), 0.0);

  for (int i = 0; i < n; ++i) {
    const int gr = i / grid_cols;
    const int gc = i % grid_cols;
    const int r0 = gr * (image_rows + 1);
    const int c0 = gc * (image_cols + 1);
    for (int r = 0; r < image_rows; ++r)
      for (int c = 0; c < image_cols; ++c)
        grid.pixels[static_cast<std::size_t>((r0 + r) * grid.cols + (c0 + c))] =
            images[static_cast<std::size_t>(i)][static_cast<std::size_t>(r * image_cols + c)];
  }
  return grid;
}

}  // namespace qgan
