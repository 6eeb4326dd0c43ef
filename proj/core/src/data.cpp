#include "qgan/data.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "qgan/rng.hpp"

namespace qgan {

namespace {

std::uint32_t read_be32(std::istream& in, const char* what) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw std::runtime_error(std::string("truncated file: ") + what);
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) | (std::uint32_t(b[2]) << 8) |
         std::uint32_t(b[3]);
}

void write_be32(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

constexpr std::uint32_t kImagesMagic = 2051;
constexpr std::uint32_t kLabelsMagic = 2049;

}  // namespace

ImageDataset load_idx(const std::string& images_path, const std::string& labels_path) {
  std::ifstream img(images_path, std::ios::binary);
  if (!img) throw std::runtime_error("cannot open " + images_path);
  if (read_be32(img, "images magic") != kImagesMagic)
    throw std::runtime_error("bad magic in " + images_path);
  const std::uint32_t n = read_be32(img, "image count");
  const std::uint32_t rows = read_be32(img, "rows");
  const std::uint32_t cols = read_be32(img, "cols");

  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab) throw std::runtime_error("cannot open " + labels_path);
  if (read_be32(lab, "labels magic") != kLabelsMagic)
    throw std::runtime_error("bad magic in " + labels_path);
  const std::uint32_t n_labels = read_be32(lab, "label count");
  if (n_labels != n) throw std::runtime_error("image/label count mismatch");

  ImageDataset data;
  data.rows = static_cast<int>(rows);
  data.cols = static_cast<int>(cols);
  data.images = Mat(n, static_cast<std::size_t>(rows) * cols);
  data.labels.resize(n);

  std::vector<unsigned char> buf(static_cast<std::size_t>(rows) * cols);
  for (std::uint32_t i = 0; i < n; ++i) {
    img.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!img) throw std::runtime_error("truncated file: image data");
    double* row = data.images.a.data() + static_cast<std::size_t>(i) * buf.size();
    for (std::size_t k = 0; k < buf.size(); ++k) row[k] = buf[k] / 255.0;
  }
  std::vector<unsigned char> lbuf(n);
  lab.read(reinterpret_cast<char*>(lbuf.data()), static_cast<std::streamsize>(n));
  if (!lab) throw std::runtime_error("truncated file: label data");
  for (std::uint32_t i = 0; i < n; ++i) data.labels[i] = lbuf[i];
  return data;
}

void write_idx(const ImageDataset& data, const std::string& images_path,
               const std::string& labels_path) {
  std::ofstream img(images_path, std::ios::binary);
  if (!img) throw std::runtime_error("cannot write " + images_path);
  write_be32(img, kImagesMagic);
  write_be32(img, static_cast<std::uint32_t>(data.size()));
  write_be32(img, static_cast<std::uint32_t>(data.rows));
  write_be32(img, static_cast<std::uint32_t>(data.cols));
  std::vector<unsigned char> buf(static_cast<std::size_t>(data.dim()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double* row = data.images.a.data() + i * buf.size();
    for (std::size_t k = 0; k < buf.size(); ++k) {
      const double v = std::min(1.0, std::max(0.0, row[k]));
      buf[k] = static_cast<unsigned char>(v * 255.0 + 0.5);
    }
    img.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  }

  std::ofstream lab(labels_path, std::ios::binary);
  if (!lab) throw std::runtime_error("cannot write " + labels_path);
  write_be32(lab, kLabelsMagic);
  write_be32(lab, static_cast<std::uint32_t>(data.size()));
  for (const int l : data.labels) {
    const unsigned char b = static_cast<unsigned char>(l);
    lab.write(reinterpret_cast<const char*>(&b), 1);
  }
}

PatchLayout PatchLayout::whole_rows(int rows, int cols, int strips) {
  if (strips < 1 || rows % strips != 0)
    throw std::invalid_argument("PatchLayout: strips must divide image rows");
  return {strips, (rows / strips) * cols, rows, cols};
}

PatchSet extract_patches(const ImageDataset& data, const PatchLayout& layout) {
  if (layout.rows != data.rows || layout.cols != data.cols ||
      layout.strips * layout.patch_dim != data.dim())
    throw std::invalid_argument("extract_patches: layout inconsistent with dataset");

  PatchSet out;
  out.strips = layout.strips;
  out.patch_dim = layout.patch_dim;
  out.a.resize(data.size() * static_cast<std::size_t>(data.dim()));
  // Strips are contiguous row ranges, so per image this is a straight copy.
  std::memcpy(out.a.data(), data.images.a.data(), out.a.size() * sizeof(double));
  return out;
}

PatchSet flat_patches(const ImageDataset& data, int strips) {
  if (strips < 1 || data.dim() % strips != 0)
    throw std::invalid_argument("flat_patches: strips must divide the pixel count");
  PatchSet out;
  out.strips = strips;
  out.patch_dim = data.dim() / strips;
  out.a = data.images.a;
  return out;
}

std::vector<double> reassemble(const PatchSet& patches, std::size_t image) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(patches.strips) * static_cast<std::size_t>(patches.patch_dim));
  for (int t = 0; t < patches.strips; ++t) {
    auto p = patches.patch(image, t);
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

ImageDataset downscale(const ImageDataset& data, int factor) {
  if (factor < 1 || data.rows % factor != 0 || data.cols % factor != 0)
    throw std::invalid_argument("downscale: factor must divide both dimensions");

  ImageDataset out;
  out.rows = data.rows / factor;
  out.cols = data.cols / factor;
  out.labels = data.labels;
  out.images = Mat(data.size(), static_cast<std::size_t>(out.rows) * out.cols);
  const double inv = 1.0 / (factor * factor);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double* src = data.images.a.data() + i * static_cast<std::size_t>(data.dim());
    double* dst = out.images.a.data() + i * static_cast<std::size_t>(out.dim());
    for (int r = 0; r < out.rows; ++r) {
      for (int c = 0; c < out.cols; ++c) {
        double acc = 0.0;
        for (int dr = 0; dr < factor; ++dr)
          for (int dc = 0; dc < factor; ++dc)
            acc += src[(r * factor + dr) * data.cols + (c * factor + dc)];
        dst[r * out.cols + c] = acc * inv;
      }
    }
  }
  return out;
}

ImageDataset crop_center(const ImageDataset& data, int new_rows, int new_cols) {
  if (new_rows > data.rows || new_cols > data.cols)
    throw std::invalid_argument("crop_center: crop larger than image");
  const int r0 = (data.rows - new_rows) / 2;
  const int c0 = (data.cols - new_cols) / 2;

  ImageDataset out;
  out.rows = new_rows;
  out.cols = new_cols;
  out.labels = data.labels;
  out.images = Mat(data.size(), static_cast<std::size_t>(new_rows) * new_cols);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double* src = data.images.a.data() + i * static_cast<std::size_t>(data.dim());
    double* dst = out.images.a.data() + i * static_cast<std::size_t>(out.dim());
    for (int r = 0; r < new_rows; ++r)
      for (int c = 0; c < new_cols; ++c) dst[r * new_cols + c] = src[(r + r0) * data.cols + (c + c0)];
  }
  return out;
}

namespace {

// 5x7 glyphs, row-major, '1' = stroke.
const std::array<std::array<const char*, 7>, 10> kGlyphs = {{
    {"01110", "10001", "10011", "10101", "11001", "10001", "01110"},
    {"00100", "01100", "00100", "00100", "00100", "00100", "01110"},
    {"01110", "10001", "00001", "00010", "00100", "01000", "11111"},
    {"11111", "00010", "00100", "00010", "00001", "10001", "01110"},
    {"00010", "00110", "01010", "10010", "11111", "00010", "00010"},
    {"11111", "10000", "11110", "00001", "00001", "10001", "01110"},
    {"00110", "01000", "10000", "11110", "10001", "10001", "01110"},
    {"11111", "00001", "00010", "00100", "01000", "01000", "01000"},
    {"01110", "10001", "10001", "01110", "10001", "10001", "01110"},
    {"01110", "10001", "10001", "01111", "00001", "00010", "01100"},
}};

void box_blur_28(std::vector<double>& px) {
  std::vector<double> out(px.size(), 0.0);
  for (int r = 0; r < 28; ++r) {
    for (int c = 0; c < 28; ++c) {
      double acc = 0.0;
      int cnt = 0;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int rr = r + dr;
          const int cc = c + dc;
          if (rr < 0 || rr >= 28 || cc < 0 || cc >= 28) continue;
          acc += px[static_cast<std::size_t>(rr * 28 + cc)];
          ++cnt;
        }
      }
      out[static_cast<std::size_t>(r * 28 + c)] = acc / cnt;
    }
  }
  px = std::move(out);
}

}  // namespace

ImageDataset synthesize_digits(std::size_t n, std::uint64_t seed) {
  Rng rng = Rng::stream(seed, "synthetic digits");

  ImageDataset data;
  data.rows = 28;
  data.cols = 28;
  data.images = Mat(n, 28 * 28);
  data.labels.resize(n);

  constexpr int kScale = 3;  // glyph covers 15x21 pixels
  for (std::size_t i = 0; i < n; ++i) {
    const int digit = static_cast<int>(rng.below(10));
    const int row_off = 2 + static_cast<int>(rng.below(4));
    const int col_off = 4 + static_cast<int>(rng.below(6));
    const double intensity = rng.uniform(0.75, 1.0);

    std::vector<double> px(28 * 28, 0.0);
    for (int gr = 0; gr < 7; ++gr) {
      for (int gc = 0; gc < 5; ++gc) {
        if (kGlyphs[static_cast<std::size_t>(digit)][static_cast<std::size_t>(gr)][gc] != '1')
          continue;
        for (int dr = 0; dr < kScale; ++dr)
          for (int dc = 0; dc < kScale; ++dc)
            px[static_cast<std::size_t>((row_off + gr * kScale + dr) * 28 +
                                        (col_off + gc * kScale + dc))] = intensity;
      }
    }
    box_blur_28(px);

    double* dst = data.images.a.data() + i * (28 * 28);
    for (std::size_t k = 0; k < px.size(); ++k) dst[k] = std::min(1.0, std::max(0.0, px[k]));
    data.labels[i] = digit;
  }
  return data;
}

ImageDataset toy_profile(const ImageDataset& data) {
  return downscale(crop_center(data, 24, 24), 3);
}

}  // namespace qgan
