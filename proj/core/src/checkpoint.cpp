#include "qgan/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace qgan {

namespace {

constexpr char kMagic[4] = {'Q', 'L', 'G', '1'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void put_array(std::ostream& out, const std::vector<double>& v) {
  put_u64(out, v.size());
  for (const double x : v) put_f64(out, x);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw std::runtime_error("corrupt checkpoint: truncated");
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
         (std::uint32_t(b[3]) << 24);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw std::runtime_error("corrupt checkpoint: truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

// ADAM moment arrays may legitimately be empty (no step taken yet).
std::vector<double> get_array(std::istream& in, std::size_t expected, bool allow_empty = false) {
  const std::uint64_t len = get_u64(in);
  if (len != expected && !(allow_empty && len == 0))
    throw std::runtime_error("corrupt checkpoint: array length mismatch");
  std::vector<double> v(len);
  for (double& x : v) x = get_f64(in);
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);

  out.write(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(ckpt.model.arch));
  put_u32(out, static_cast<std::uint32_t>(ckpt.config.loss_kind));
  put_u32(out, static_cast<std::uint32_t>(ckpt.model.image_rows));
  put_u32(out, static_cast<std::uint32_t>(ckpt.model.image_cols));

  const QlstmConfig& qc = ckpt.model.lstm.qlstm.config;
  put_u32(out, static_cast<std::uint32_t>(qc.n_qubits));
  put_u32(out, static_cast<std::uint32_t>(qc.reps));
  put_u32(out, static_cast<std::uint32_t>(qc.layers));
  put_u32(out, static_cast<std::uint32_t>(qc.hidden_mode));
  put_u32(out, static_cast<std::uint32_t>(qc.input_dim));
  put_u32(out, static_cast<std::uint32_t>(ckpt.model.lstm.steps));
  put_u32(out, static_cast<std::uint32_t>(ckpt.model.lstm.patch_dim));

  put_u32(out, static_cast<std::uint32_t>(ckpt.model.patchgan.circuit.n_qubits));
  put_u32(out, static_cast<std::uint32_t>(ckpt.model.patchgan.circuit.param_count));
  put_u32(out, static_cast<std::uint32_t>(ckpt.model.patchgan.subgens.size()));
  put_u32(out, static_cast<std::uint32_t>(ckpt.model.patchgan.patch_pixels));

  put_u64(out, static_cast<std::uint64_t>(ckpt.trainer.epoch));
  put_f64(out, ckpt.config.learning_rate);
  put_f64(out, ckpt.config.lambda_gp);
  put_u32(out, static_cast<std::uint32_t>(ckpt.config.batch_size));
  put_u32(out, static_cast<std::uint32_t>(ckpt.config.critic_steps));
  put_u32(out, static_cast<std::uint32_t>(ckpt.config.epochs));
  put_u64(out, ckpt.config.seed);

  const std::vector<double> gen_flat = ckpt.model.arch == ArchKind::LstmQgan
                                           ? flatten(ckpt.model.lstm)
                                           : flatten(ckpt.model.patchgan);
  put_array(out, gen_flat);
  put_array(out, flatten(ckpt.model.disc));
  put_array(out, ckpt.trainer.gen_adam.m);
  put_array(out, ckpt.trainer.gen_adam.v);
  put_u64(out, static_cast<std::uint64_t>(ckpt.trainer.gen_adam.t));
  put_array(out, ckpt.trainer.disc_adam.m);
  put_array(out, ckpt.trainer.disc_adam.v);
  put_u64(out, static_cast<std::uint64_t>(ckpt.trainer.disc_adam.t));
  if (!out) throw std::runtime_error("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);

  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("corrupt checkpoint: bad magic");
  if (get_u32(in) != kVersion) throw std::runtime_error("corrupt checkpoint: unsupported version");

  Checkpoint ckpt;
  ckpt.model.arch = static_cast<ArchKind>(get_u32(in));
  ckpt.config.loss_kind = static_cast<LossKind>(get_u32(in));
  ckpt.model.image_rows = static_cast<int>(get_u32(in));
  ckpt.model.image_cols = static_cast<int>(get_u32(in));

  QlstmConfig qc;
  qc.n_qubits = static_cast<int>(get_u32(in));
  qc.reps = static_cast<int>(get_u32(in));
  qc.layers = static_cast<int>(get_u32(in));
  qc.hidden_mode = static_cast<HiddenMode>(get_u32(in));
  qc.input_dim = static_cast<int>(get_u32(in));
  const int steps = static_cast<int>(get_u32(in));
  const int patch_dim = static_cast<int>(get_u32(in));

  const int pg_qubits = static_cast<int>(get_u32(in));
  const int pg_param_count = static_cast<int>(get_u32(in));
  const int pg_subgens = static_cast<int>(get_u32(in));
  const int pg_patch_pixels = static_cast<int>(get_u32(in));

  const long epoch = static_cast<long>(get_u64(in));
  ckpt.config.learning_rate = get_f64(in);
  ckpt.config.lambda_gp = get_f64(in);
  ckpt.config.batch_size = static_cast<int>(get_u32(in));
  ckpt.config.critic_steps = static_cast<int>(get_u32(in));
  ckpt.config.epochs = static_cast<int>(get_u32(in));
  ckpt.config.seed = get_u64(in);

  // Rebuild parameter shapes, then overwrite values from the arrays.
  Rng scratch(0);
  std::size_t gen_len = 0;
  if (ckpt.model.arch == ArchKind::LstmQgan) {
    ckpt.model.lstm = GeneratorParams::init(qc, steps, patch_dim, scratch);
    gen_len = flatten(ckpt.model.lstm).size();
  } else {
    const int pg_reps = pg_param_count / (3 * pg_qubits);
    ckpt.model.patchgan =
        PatchganParams::init(pg_qubits, pg_reps, pg_subgens, pg_patch_pixels, scratch);
    gen_len = flatten(ckpt.model.patchgan).size();
  }
  const int disc_patch_dim =
      ckpt.model.arch == ArchKind::LstmQgan ? patch_dim : pg_patch_pixels;
  ckpt.model.disc = DiscriminatorParams::init(disc_patch_dim, scratch);
  const std::size_t disc_len = flatten(ckpt.model.disc).size();

  const std::vector<double> gen_flat = get_array(in, gen_len);
  if (ckpt.model.arch == ArchKind::LstmQgan)
    unflatten(gen_flat, ckpt.model.lstm);
  else
    unflatten(gen_flat, ckpt.model.patchgan);
  unflatten(get_array(in, disc_len), ckpt.model.disc);

  ckpt.trainer = TrainerState::make(ckpt.config.seed);
  ckpt.trainer.epoch = epoch;
  ckpt.trainer.gen_adam.m = get_array(in, gen_len, true);
  ckpt.trainer.gen_adam.v = get_array(in, gen_len, true);
  ckpt.trainer.gen_adam.t = static_cast<long>(get_u64(in));
  ckpt.trainer.disc_adam.m = get_array(in, disc_len, true);
  ckpt.trainer.disc_adam.v = get_array(in, disc_len, true);
  ckpt.trainer.disc_adam.t = static_cast<long>(get_u64(in));
  return ckpt;
}

}  // namespace qgan
