#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qgan/data.hpp"
#include "qgan/gan.hpp"

namespace qgan {

enum class LossKind { BCE, WassersteinGP };
enum class ArchKind { LstmQgan, PatchganBaseline };

struct TrainConfig {
  double learning_rate = 2e-4;
  int batch_size = 128;
  int epochs = 1;
  LossKind loss_kind = LossKind::WassersteinGP;
  double lambda_gp = 10.0;
  int critic_steps = 5;  // 1 is the usual choice for BCE
  std::uint64_t seed = 0;
  bool record_wall = true;  // false writes 0 so run logs are byte-comparable

  void validate() const;
};

// One trainable GAN: either the QLSTM generator or the per-patch baseline,
// plus the shared classical discriminator.
struct GanModel {
  ArchKind arch = ArchKind::LstmQgan;
  GeneratorParams lstm;
  PatchganParams patchgan;
  DiscriminatorParams disc;
  int image_rows = 0;
  int image_cols = 0;

  int steps() const {
    return arch == ArchKind::LstmQgan ? lstm.steps : static_cast<int>(patchgan.subgens.size());
  }
  int patch_dim() const {
    return arch == ArchKind::LstmQgan ? lstm.patch_dim : patchgan.patch_pixels;
  }
  int z_dim() const {
    return arch == ArchKind::LstmQgan ? lstm.qlstm.config.input_dim : patchgan.circuit.n_qubits;
  }
  int image_dim() const { return steps() * patch_dim(); }

  std::vector<double> generate_image(const LatentNoise& noise) const;
  std::vector<std::vector<double>> generate_patches(const LatentNoise& noise) const;
};

struct TrainerState {
  AdamState gen_adam;
  AdamState disc_adam;
  long epoch = 0;

  Rng noise;
  Rng shuffle;
  Rng epsilon;

  static TrainerState make(std::uint64_t seed);
};

struct EpochMetrics {
  long epoch = 0;
  double gen_loss = 0.0;
  double disc_loss = 0.0;
  double penalty = 0.0;
  double wall_seconds = 0.0;
};

// One pass over the data: per batch, `critic_steps` discriminator updates and
// one generator update. Generator gradients are computed per patch against the
// discriminator and averaged over the T patches of each image, in fixed order,
// before the ADAM step.
EpochMetrics train_epoch(GanModel& model, const PatchSet& data, const TrainConfig& config,
                         TrainerState& state);

// The exact gradient train_epoch applies for one generator update on the given
// noise batch (before batch averaging it is (1/T) * sum_t grad_t per image).
// Exposed so tests can compare against explicit per-patch accumulation.
GeneratorGrads lstm_generator_batch_gradient(const GanModel& model,
                                             const std::vector<LatentNoise>& noise_batch,
                                             LossKind loss_kind);

std::string metrics_csv_header();
std::string metrics_csv_row(const EpochMetrics& m);

}  // namespace qgan
