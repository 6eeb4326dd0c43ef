#pragma once

#include <span>
#include <utility>
#include <vector>

#include "qgan/linalg.hpp"
#include "qgan/qlstm.hpp"
#include "qgan/rng.hpp"

namespace qgan {

// Patched generator: the QLSTM stack consumes one noise row per time step and
// a sigmoid output projection turns each hidden vector into one image strip.

struct GeneratorParams {
  QlstmModel qlstm;
  Mat out_weights;               // patch_dim x hidden_dim
  std::vector<double> out_bias;  // patch_dim
  int steps = 0;
  int patch_dim = 0;

  int image_dim() const { return steps * patch_dim; }
  static GeneratorParams init(const QlstmConfig& config, int steps, int patch_dim, Rng& rng);
};

struct LatentNoise {
  Mat z;  // steps (or sub-generators) x z_dim, standard normal entries
};

LatentNoise sample_noise(int steps, int z_dim, Rng& rng);

// Full image in [0,1]: patches laid out as consecutive row strips.
std::vector<double> generate(const GeneratorParams& gen, const LatentNoise& noise);

struct GeneratorCache {
  StackCache stack;
  std::vector<std::vector<double>> hidden;  // per step
  std::vector<std::vector<double>> logits;  // out_weights h + out_bias
  std::vector<std::vector<double>> patches; // sigmoid(logits)
};

GeneratorCache generate_with_cache(const GeneratorParams& gen, const LatentNoise& noise);

struct GeneratorGrads {
  StackGrads qlstm;
  Mat d_out_weights;
  std::vector<double> d_out_bias;

  static GeneratorGrads zeros(const GeneratorParams& gen);
  void add_scaled(const GeneratorGrads& other, double scale);
  void scale(double s);
};

// Gradient of a single patch's loss w.r.t. all generator parameters.
// d_patch is dLoss/dpatch for step t; other steps receive no injection.
GeneratorGrads generator_patch_backward(const GeneratorParams& gen, const GeneratorCache& cache,
                                        int t, std::span<const double> d_patch);

// PatchGAN-style baseline: one sub-generator circuit per patch. Each encodes
// its own noise row, runs the hardware-efficient ansatz, keeps the first
// patch_pixels probabilities and rescales them by the patch maximum.
struct PatchganParams {
  CircuitSpec circuit;
  std::vector<std::vector<double>> subgens;  // per-sub-generator circuit params
  int patch_pixels = 0;

  int image_dim() const { return static_cast<int>(subgens.size()) * patch_pixels; }
  static PatchganParams init(int n_qubits, int reps, int n_subgens, int patch_pixels, Rng& rng);
};

std::vector<double> generate_patchgan_baseline(const PatchganParams& gen, const LatentNoise& noise);

// Gradient of one baseline patch w.r.t. its sub-generator's circuit params.
std::vector<double> patchgan_patch_backward(const PatchganParams& gen, int subgen,
                                            std::span<const double> z_row,
                                            std::span<const double> d_patch);

// Classical discriminator on patches: patch_dim -> 64 -> 16 -> 1 with
// leaky-rectifier hidden activations (slope 0.2). Raw score out; BCE applies
// the sigmoid in the loss.
struct DiscriminatorParams {
  Mat w1;
  std::vector<double> b1;
  Mat w2;
  std::vector<double> b2;
  std::vector<double> w3;
  double b3 = 0.0;

  int patch_dim() const { return static_cast<int>(w1.cols); }
  static DiscriminatorParams init(int patch_dim, Rng& rng);
};

struct DiscCache {
  std::vector<double> x, z1, a1, z2, a2;
  double score = 0.0;
};

double discriminate(const DiscriminatorParams& disc, std::span<const double> patch,
                    DiscCache* cache = nullptr);

struct DiscGrads {
  Mat d_w1;
  std::vector<double> d_b1;
  Mat d_w2;
  std::vector<double> d_b2;
  std::vector<double> d_w3;
  double d_b3 = 0.0;

  static DiscGrads zeros(const DiscriminatorParams& disc);
  void scale(double s);
};

// Accumulates parameter gradients for dscore at the cached point; optionally
// also returns the gradient w.r.t. the input patch.
void disc_backward(const DiscriminatorParams& disc, const DiscCache& cache, double dscore,
                   DiscGrads& acc, std::vector<double>* dx = nullptr);

// grad_x D(x) at the cached point.
std::vector<double> disc_input_gradient(const DiscriminatorParams& disc, const DiscCache& cache);

// Adds weight * d/dtheta (||grad_x D(x)||_2 - 1)^2 to acc. Exact for the
// piecewise-linear hidden activations (masks treated as locally constant).
void gradient_penalty_backward(const DiscriminatorParams& disc, const DiscCache& cache,
                               double weight, DiscGrads& acc);

// BCE losses at raw scores; logs clamped at 1e-12.
// disc = -mean(log sig(real)) - mean(log(1 - sig(fake))); gen = -mean(log sig(fake)).
std::pair<double, double> bce_losses(std::span<const double> real_scores,
                                     std::span<const double> fake_scores);

struct WganGpResult {
  double disc_loss = 0.0;
  double gen_loss = 0.0;
  double penalty = 0.0;
};

// Wasserstein losses with gradient penalty on per-pair interpolates
// x_hat = eps*x + (1-eps)*x_tilde. Critic minimizes
// mean(D(fake)) - mean(D(real)) + lambda * penalty.
WganGpResult wgan_gp_losses(const DiscriminatorParams& disc,
                            const std::vector<std::vector<double>>& real_patches,
                            const std::vector<std::vector<double>>& fake_patches, double lambda,
                            std::span<const double> eps_samples);

// Standard bias-corrected ADAM on a flat parameter vector.
struct AdamState {
  std::vector<double> m, v;
  long t = 0;
};

struct AdamConfig {
  double lr = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const AdamConfig& config);

// Canonical flat order of the trainable tensors; this is also the checkpoint
// array order. Generator: per layer [proj_weights, proj_bias, vqc f,i,u,o],
// then out_weights, out_bias. Discriminator: w1, b1, w2, b2, w3, b3.
std::vector<double> flatten(const GeneratorParams& gen);
std::vector<double> flatten(const GeneratorGrads& grads);
void unflatten(std::span<const double> flat, GeneratorParams& gen);
std::vector<double> flatten(const DiscriminatorParams& disc);
std::vector<double> flatten(const DiscGrads& grads);
void unflatten(std::span<const double> flat, DiscriminatorParams& disc);
std::vector<double> flatten(const PatchganParams& gen);
void unflatten(std::span<const double> flat, PatchganParams& gen);

}  // namespace qgan
