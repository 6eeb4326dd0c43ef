#include "qgan/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace qgan {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double safe_log(double x) { return std::log(std::max(x, 1e-12)); }

// dLoss/dscore on a fake patch for the generator objective.
double gen_dscore(LossKind kind, double score) {
  return kind == LossKind::WassersteinGP ? -1.0 : -(1.0 - sigmoid(score));
}

double gen_loss_term(LossKind kind, double score) {
  return kind == LossKind::WassersteinGP ? -score : -safe_log(sigmoid(score));
}

}  // namespace

void TrainConfig::validate() const {
  if (learning_rate < 0.0 || batch_size < 1 || epochs < 0 || lambda_gp < 0.0 || critic_steps < 1)
    throw std::invalid_argument("TrainConfig: invalid value");
}

TrainerState TrainerState::make(std::uint64_t seed) {
  return TrainerState{{}, {}, 0, Rng::stream(seed, "noise"), Rng::stream(seed, "data shuffle"),
                      Rng::stream(seed, "epsilon")};
}

std::vector<double> GanModel::generate_image(const LatentNoise& noise) const {
  return arch == ArchKind::LstmQgan ? generate(lstm, noise)
                                    : generate_patchgan_baseline(patchgan, noise);
}

std::vector<std::vector<double>> GanModel::generate_patches(const LatentNoise& noise) const {
  const std::vector<double> image = generate_image(noise);
  std::vector<std::vector<double>> patches;
  const std::size_t pd = static_cast<std::size_t>(patch_dim());
  patches.reserve(static_cast<std::size_t>(steps()));
  for (int t = 0; t < steps(); ++t)
    patches.emplace_back(image.begin() + static_cast<std::ptrdiff_t>(t * pd),
                         image.begin() + static_cast<std::ptrdiff_t>((t + 1) * pd));
  return patches;
}

GeneratorGrads lstm_generator_batch_gradient(const GanModel& model,
                                             const std::vector<LatentNoise>& noise_batch,
                                             LossKind loss_kind) {
  if (model.arch != ArchKind::LstmQgan)
    throw std::invalid_argument("lstm_generator_batch_gradient: wrong architecture");
  const int t_steps = model.steps();
  const double inv_t = 1.0 / static_cast<double>(t_steps);

  GeneratorGrads batch = GeneratorGrads::zeros(model.lstm);
  for (const LatentNoise& noise : noise_batch) {
    const GeneratorCache cache = generate_with_cache(model.lstm, noise);
    GeneratorGrads image_grads = GeneratorGrads::zeros(model.lstm);
    for (int t = 0; t < t_steps; ++t) {
      DiscCache dcache;
      const double score = discriminate(model.disc, cache.patches[static_cast<std::size_t>(t)], &dcache);
      const double dscore = gen_dscore(loss_kind, score);
      std::vector<double> d_patch = disc_input_gradient(model.disc, dcache);
      for (double& v : d_patch) v *= dscore;
      image_grads.add_scaled(generator_patch_backward(model.lstm, cache, t, d_patch), 1.0);
    }
    image_grads.scale(inv_t);
    batch.add_scaled(image_grads, 1.0);
  }
  batch.scale(1.0 / static_cast<double>(noise_batch.size()));
  return batch;
}

namespace {

// Per-patch gradient averaging for the baseline: each patch only touches its
// own sub-generator, so the per-image mean divides every sub-circuit's
// gradient by T.
std::vector<double> patchgan_batch_gradient(const GanModel& model,
                                            const std::vector<LatentNoise>& noise_batch,
                                            LossKind loss_kind) {
  const int t_steps = model.steps();
  const double inv_t = 1.0 / static_cast<double>(t_steps);
  const std::size_t plen = static_cast<std::size_t>(model.patchgan.circuit.param_count);

  std::vector<double> batch(plen * model.patchgan.subgens.size(), 0.0);
  for (const LatentNoise& noise : noise_batch) {
    const std::vector<std::vector<double>> patches = model.generate_patches(noise);
    for (int t = 0; t < t_steps; ++t) {
      DiscCache dcache;
      const double score = discriminate(model.disc, patches[static_cast<std::size_t>(t)], &dcache);
      const double dscore = gen_dscore(loss_kind, score);
      std::vector<double> d_patch = disc_input_gradient(model.disc, dcache);
      for (double& v : d_patch) v *= dscore;
      const std::vector<double> d_params =
          patchgan_patch_backward(model.patchgan, t, noise.z.row(static_cast<std::size_t>(t)), d_patch);
      double* dst = batch.data() + static_cast<std::size_t>(t) * plen;
      for (std::size_t k = 0; k < plen; ++k) dst[k] += inv_t * d_params[k];
    }
  }
  const double inv_b = 1.0 / static_cast<double>(noise_batch.size());
  for (double& v : batch) v *= inv_b;
  return batch;
}

}  // namespace

EpochMetrics train_epoch(GanModel& model, const PatchSet& data, const TrainConfig& config,
                         TrainerState& state) {
  config.validate();
  if (data.size() == 0) throw std::invalid_argument("train_epoch: empty dataset");
  if (data.strips != model.steps() || data.patch_dim != model.patch_dim())
    throw std::invalid_argument("train_epoch: dataset layout does not match the model");

  const auto wall_start = std::chrono::steady_clock::now();
  const int t_steps = model.steps();
  const AdamConfig adam{config.learning_rate, 0.9, 0.999, 1e-8};

  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  state.shuffle.shuffle(order);

  double sum_disc_loss = 0.0;
  double sum_penalty = 0.0;
  long critic_updates = 0;
  double sum_gen_loss = 0.0;
  long gen_updates = 0;

  for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
    const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
    const std::size_t batch = stop - start;
    const double inv_n = 1.0 / static_cast<double>(batch * static_cast<std::size_t>(t_steps));

    for (int critic = 0; critic < config.critic_steps; ++critic) {
      DiscGrads grads = DiscGrads::zeros(model.disc);
      double mean_real = 0.0;
      double mean_fake = 0.0;
      double mean_bce = 0.0;
      double mean_gp = 0.0;

      for (std::size_t b = start; b < stop; ++b) {
        const LatentNoise noise = sample_noise(t_steps, model.z_dim(), state.noise);
        const std::vector<std::vector<double>> fake = model.generate_patches(noise);
        for (int t = 0; t < t_steps; ++t) {
          const auto real = data.patch(order[b], t);

          DiscCache real_cache, fake_cache;
          const double s_real = discriminate(model.disc, real, &real_cache);
          const double s_fake = discriminate(model.disc, fake[static_cast<std::size_t>(t)], &fake_cache);

          if (config.loss_kind == LossKind::WassersteinGP) {
            mean_real += s_real * inv_n;
            mean_fake += s_fake * inv_n;
            disc_backward(model.disc, fake_cache, inv_n, grads);
            disc_backward(model.disc, real_cache, -inv_n, grads);

            const double eps = state.epsilon.uniform();
            std::vector<double> xhat(real.size());
            for (std::size_t j = 0; j < xhat.size(); ++j)
              xhat[j] = eps * real[j] + (1.0 - eps) * fake[static_cast<std::size_t>(t)][j];
            DiscCache hat_cache;
            discriminate(model.disc, xhat, &hat_cache);
            const double nrm = norm2(disc_input_gradient(model.disc, hat_cache));
            mean_gp += (nrm - 1.0) * (nrm - 1.0) * inv_n;
            gradient_penalty_backward(model.disc, hat_cache, config.lambda_gp * inv_n, grads);
          } else {
            mean_bce += (-safe_log(sigmoid(s_real)) - safe_log(1.0 - sigmoid(s_fake))) * inv_n;
            disc_backward(model.disc, real_cache, -(1.0 - sigmoid(s_real)) * inv_n, grads);
            disc_backward(model.disc, fake_cache, sigmoid(s_fake) * inv_n, grads);
          }
        }
      }

      const double disc_loss = config.loss_kind == LossKind::WassersteinGP
                                   ? mean_fake - mean_real + config.lambda_gp * mean_gp
                                   : mean_bce;
      sum_disc_loss += disc_loss;
      sum_penalty += mean_gp;
      ++critic_updates;

      std::vector<double> flat = flatten(model.disc);
      adam_step(flat, flatten(grads), state.disc_adam, adam);
      unflatten(flat, model.disc);
    }

    // Generator update on fresh noise.
    std::vector<LatentNoise> noise_batch;
    noise_batch.reserve(batch);
    for (std::size_t b = 0; b < batch; ++b)
      noise_batch.push_back(sample_noise(t_steps, model.z_dim(), state.noise));

    double gen_loss = 0.0;
    for (const LatentNoise& noise : noise_batch) {
      const std::vector<std::vector<double>> fake = model.generate_patches(noise);
      for (int t = 0; t < t_steps; ++t)
        gen_loss += gen_loss_term(config.loss_kind,
                                  discriminate(model.disc, fake[static_cast<std::size_t>(t)])) *
                    inv_n;
    }
    sum_gen_loss += gen_loss;
    ++gen_updates;

    if (model.arch == ArchKind::LstmQgan) {
      const GeneratorGrads grads = lstm_generator_batch_gradient(model, noise_batch, config.loss_kind);
      std::vector<double> flat = flatten(model.lstm);
      adam_step(flat, flatten(grads), state.gen_adam, adam);
      unflatten(flat, model.lstm);
    } else {
      const std::vector<double> grads = patchgan_batch_gradient(model, noise_batch, config.loss_kind);
      std::vector<double> flat = flatten(model.patchgan);
      adam_step(flat, grads, state.gen_adam, adam);
      unflatten(flat, model.patchgan);
    }
  }

  state.epoch += 1;
  EpochMetrics m;
  m.epoch = state.epoch;
  m.gen_loss = gen_updates ? sum_gen_loss / static_cast<double>(gen_updates) : 0.0;
  m.disc_loss = critic_updates ? sum_disc_loss / static_cast<double>(critic_updates) : 0.0;
  m.penalty = critic_updates ? sum_penalty / static_cast<double>(critic_updates) : 0.0;
  if (config.record_wall) {
    const auto wall_end = std::chrono::steady_clock::now();
    m.wall_seconds = std::chrono::duration<double>(wall_end - wall_start).count();
  }
  return m;
}

std::string metrics_csv_header() { return "epoch,gl,dl,penalty,wall_seconds"; }

std::string metrics_csv_row(const EpochMetrics& m) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%ld,%.9g,%.9g,%.9g,%.3f", m.epoch, m.gen_loss, m.disc_loss,
                m.penalty, m.wall_seconds);
  return buf;
}

}  // namespace qgan
