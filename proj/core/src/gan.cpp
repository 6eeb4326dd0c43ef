#include "qgan/gan.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qgan {

namespace {

constexpr double kLeakySlope = 0.2;
constexpr double kLogClamp = 1e-12;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double lrelu(double x) { return x > 0.0 ? x : kLeakySlope * x; }
double lrelu_slope(double x) { return x > 0.0 ? 1.0 : kLeakySlope; }

}  // namespace

GeneratorParams GeneratorParams::init(const QlstmConfig& config, int steps, int patch_dim,
                                      Rng& rng) {
  if (steps < 1 || patch_dim < 1) throw std::invalid_argument("GeneratorParams::init: bad shape");
  GeneratorParams g;
  g.qlstm = QlstmModel::init(config, rng);
  g.steps = steps;
  g.patch_dim = patch_dim;
  const std::size_t hidden = static_cast<std::size_t>(config.hidden_dim());
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
  g.out_weights = Mat(static_cast<std::size_t>(patch_dim), hidden);
  for (double& w : g.out_weights.a) w = rng.uniform(-bound, bound);
  g.out_bias.resize(static_cast<std::size_t>(patch_dim));
  for (double& b : g.out_bias) b = rng.uniform(-bound, bound);
  return g;
}

LatentNoise sample_noise(int steps, int z_dim, Rng& rng) {
  LatentNoise n;
  n.z = Mat(static_cast<std::size_t>(steps), static_cast<std::size_t>(z_dim));
  for (double& v : n.z.a) v = rng.normal();
  return n;
}

GeneratorCache generate_with_cache(const GeneratorParams& gen, const LatentNoise& noise) {
  if (static_cast<int>(noise.z.rows) != gen.steps ||
      static_cast<int>(noise.z.cols) != gen.qlstm.config.input_dim)
    throw std::invalid_argument("generate: noise shape mismatch");

  std::vector<std::vector<double>> x_seq;
  x_seq.reserve(noise.z.rows);
  for (std::size_t t = 0; t < noise.z.rows; ++t) {
    auto r = noise.z.row(t);
    x_seq.emplace_back(r.begin(), r.end());
  }

  GeneratorCache cache;
  auto [hidden, stack_cache] = stack_forward(gen.qlstm, x_seq);
  cache.hidden = std::move(hidden);
  cache.stack = std::move(stack_cache);

  for (const std::vector<double>& h : cache.hidden) {
    std::vector<double> logits = gen.out_bias;
    matvec_acc(gen.out_weights, h, logits);
    std::vector<double> patch(logits.size());
    for (std::size_t k = 0; k < logits.size(); ++k) patch[k] = sigmoid(logits[k]);
    cache.logits.push_back(std::move(logits));
    cache.patches.push_back(std::move(patch));
  }
  return cache;
}

std::vector<double> generate(const GeneratorParams& gen, const LatentNoise& noise) {
  const GeneratorCache cache = generate_with_cache(gen, noise);
  std::vector<double> image;
  image.reserve(static_cast<std::size_t>(gen.image_dim()));
  for (const std::vector<double>& patch : cache.patches)
    image.insert(image.end(), patch.begin(), patch.end());
  return image;
}

GeneratorGrads GeneratorGrads::zeros(const GeneratorParams& gen) {
  GeneratorGrads g;
  g.qlstm = StackGrads::zeros(gen.qlstm, gen.steps);
  g.d_out_weights = Mat(gen.out_weights.rows, gen.out_weights.cols);
  g.d_out_bias.assign(gen.out_bias.size(), 0.0);
  return g;
}

void GeneratorGrads::add_scaled(const GeneratorGrads& other, double s) {
  qlstm.add_scaled(other.qlstm, s);
  for (std::size_t k = 0; k < d_out_weights.a.size(); ++k)
    d_out_weights.a[k] += s * other.d_out_weights.a[k];
  for (std::size_t k = 0; k < d_out_bias.size(); ++k) d_out_bias[k] += s * other.d_out_bias[k];
}

void GeneratorGrads::scale(double s) {
  for (double& v : d_out_weights.a) v *= s;
  for (double& v : d_out_bias) v *= s;
  for (CellGrads& layer : qlstm.layers) {
    for (double& v : layer.d_proj_weights.a) v *= s;
    for (double& v : layer.d_proj_bias) v *= s;
    for (auto& vqc : layer.d_vqc)
      for (double& v : vqc) v *= s;
  }
  for (auto& dx : qlstm.dx_seq)
    for (double& v : dx) v *= s;
}

GeneratorGrads generator_patch_backward(const GeneratorParams& gen, const GeneratorCache& cache,
                                        int t, std::span<const double> d_patch) {
  if (t < 0 || t >= gen.steps || d_patch.size() != static_cast<std::size_t>(gen.patch_dim))
    throw std::invalid_argument("generator_patch_backward: bad step/patch");

  GeneratorGrads grads = GeneratorGrads::zeros(gen);

  const std::vector<double>& patch = cache.patches[static_cast<std::size_t>(t)];
  std::vector<double> d_logits(patch.size());
  for (std::size_t k = 0; k < patch.size(); ++k)
    d_logits[k] = d_patch[k] * patch[k] * (1.0 - patch[k]);

  outer_acc(grads.d_out_weights, d_logits, cache.hidden[static_cast<std::size_t>(t)]);
  for (std::size_t k = 0; k < d_logits.size(); ++k) grads.d_out_bias[k] += d_logits[k];

  std::vector<double> dh(static_cast<std::size_t>(gen.qlstm.config.hidden_dim()), 0.0);
  matvec_t_acc(gen.out_weights, d_logits, dh);

  std::vector<std::vector<double>> dh_top(static_cast<std::size_t>(gen.steps));
  dh_top[static_cast<std::size_t>(t)] = std::move(dh);
  grads.qlstm = stack_backward(gen.qlstm, cache.stack, dh_top);
  return grads;
}

PatchganParams PatchganParams::init(int n_qubits, int reps, int n_subgens, int patch_pixels,
                                    Rng& rng) {
  if (patch_pixels < 1 || patch_pixels > (1 << n_qubits))
    throw std::invalid_argument("patchgan: patch_pixels must fit in 2^n probabilities");
  if (n_subgens < 1) throw std::invalid_argument("patchgan: need at least one sub-generator");
  PatchganParams p;
  p.circuit = build_hw_efficient({n_qubits, reps});
  p.patch_pixels = patch_pixels;
  const std::size_t plen = static_cast<std::size_t>(p.circuit.param_count);
  constexpr double pi = 3.1415926535897932384626433832795;
  for (int s = 0; s < n_subgens; ++s) {
    std::vector<double> params(plen);
    for (double& a : params) a = rng.uniform(0.0, pi);
    p.subgens.push_back(std::move(params));
  }
  return p;
}

std::vector<double> generate_patchgan_baseline(const PatchganParams& gen,
                                               const LatentNoise& noise) {
  if (noise.z.rows != gen.subgens.size() ||
      static_cast<int>(noise.z.cols) != gen.circuit.n_qubits)
    throw std::invalid_argument("patchgan generate: noise shape mismatch");

  std::vector<double> image;
  image.reserve(static_cast<std::size_t>(gen.image_dim()));
  for (std::size_t s = 0; s < gen.subgens.size(); ++s) {
    const std::vector<double> probs =
        probabilities(run(gen.circuit, gen.subgens[s], noise.z.row(s)));
    double maxp = 0.0;
    for (int k = 0; k < gen.patch_pixels; ++k) maxp = std::max(maxp, probs[static_cast<std::size_t>(k)]);
    if (maxp <= 0.0) maxp = 1.0;  // all truncated probabilities zero: emit a black patch
    for (int k = 0; k < gen.patch_pixels; ++k)
      image.push_back(probs[static_cast<std::size_t>(k)] / maxp);
  }
  return image;
}

std::vector<double> patchgan_patch_backward(const PatchganParams& gen, int subgen,
                                            std::span<const double> z_row,
                                            std::span<const double> d_patch) {
  const std::vector<double>& params = gen.subgens.at(static_cast<std::size_t>(subgen));
  const std::vector<double> probs = probabilities(run(gen.circuit, params, z_row));

  int argmax = 0;
  for (int k = 1; k < gen.patch_pixels; ++k)
    if (probs[static_cast<std::size_t>(k)] > probs[static_cast<std::size_t>(argmax)]) argmax = k;
  const double maxp = probs[static_cast<std::size_t>(argmax)];
  if (maxp <= 0.0)
    return std::vector<double>(static_cast<std::size_t>(gen.circuit.param_count), 0.0);

  // patch_j = p_j / p_max with the argmax index frozen by the forward pass.
  double weighted = 0.0;
  for (int j = 0; j < gen.patch_pixels; ++j)
    weighted += d_patch[static_cast<std::size_t>(j)] * probs[static_cast<std::size_t>(j)];

  std::vector<double> cot(probs.size(), 0.0);
  for (int k = 0; k < gen.patch_pixels; ++k)
    cot[static_cast<std::size_t>(k)] = d_patch[static_cast<std::size_t>(k)] / maxp;
  cot[static_cast<std::size_t>(argmax)] -= weighted / (maxp * maxp);

  return param_shift_gradient(gen.circuit, params, z_row, cot);
}

DiscriminatorParams DiscriminatorParams::init(int patch_dim, Rng& rng) {
  if (patch_dim < 1) throw std::invalid_argument("DiscriminatorParams::init: bad patch_dim");
  DiscriminatorParams d;
  auto uniform_fill = [&rng](Mat& m, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (double& w : m.a) w = rng.uniform(-bound, bound);
  };
  d.w1 = Mat(64, static_cast<std::size_t>(patch_dim));
  uniform_fill(d.w1, static_cast<std::size_t>(patch_dim));
  d.b1.resize(64);
  const double bound1 = 1.0 / std::sqrt(static_cast<double>(patch_dim));
  for (double& b : d.b1) b = rng.uniform(-bound1, bound1);
  d.w2 = Mat(16, 64);
  uniform_fill(d.w2, 64);
  d.b2.resize(16);
  const double bound2 = 1.0 / 8.0;
  for (double& b : d.b2) b = rng.uniform(-bound2, bound2);
  d.w3.resize(16);
  const double bound3 = 0.25;
  for (double& w : d.w3) w = rng.uniform(-bound3, bound3);
  d.b3 = rng.uniform(-bound3, bound3);
  return d;
}

double discriminate(const DiscriminatorParams& disc, std::span<const double> patch,
                    DiscCache* cache) {
  if (patch.size() != disc.w1.cols) throw std::invalid_argument("discriminate: patch size mismatch");

  std::vector<double> z1 = disc.b1;
  matvec_acc(disc.w1, patch, z1);
  std::vector<double> a1(z1.size());
  for (std::size_t k = 0; k < z1.size(); ++k) a1[k] = lrelu(z1[k]);

  std::vector<double> z2 = disc.b2;
  matvec_acc(disc.w2, a1, z2);
  std::vector<double> a2(z2.size());
  for (std::size_t k = 0; k < z2.size(); ++k) a2[k] = lrelu(z2[k]);

  const double score = dot(disc.w3, a2) + disc.b3;
  if (cache) {
    cache->x.assign(patch.begin(), patch.end());
    cache->z1 = std::move(z1);
    cache->a1 = std::move(a1);
    cache->z2 = std::move(z2);
    cache->a2 = std::move(a2);
    cache->score = score;
  }
  return score;
}

DiscGrads DiscGrads::zeros(const DiscriminatorParams& disc) {
  DiscGrads g;
  g.d_w1 = Mat(disc.w1.rows, disc.w1.cols);
  g.d_b1.assign(disc.b1.size(), 0.0);
  g.d_w2 = Mat(disc.w2.rows, disc.w2.cols);
  g.d_b2.assign(disc.b2.size(), 0.0);
  g.d_w3.assign(disc.w3.size(), 0.0);
  g.d_b3 = 0.0;
  return g;
}

void DiscGrads::scale(double s) {
  for (double& v : d_w1.a) v *= s;
  for (double& v : d_b1) v *= s;
  for (double& v : d_w2.a) v *= s;
  for (double& v : d_b2) v *= s;
  for (double& v : d_w3) v *= s;
  d_b3 *= s;
}

void disc_backward(const DiscriminatorParams& disc, const DiscCache& cache, double dscore,
                   DiscGrads& acc, std::vector<double>* dx) {
  std::vector<double> da2(cache.a2.size());
  for (std::size_t k = 0; k < da2.size(); ++k) da2[k] = dscore * disc.w3[k];
  for (std::size_t k = 0; k < da2.size(); ++k) acc.d_w3[k] += dscore * cache.a2[k];
  acc.d_b3 += dscore;

  std::vector<double> dz2(da2.size());
  for (std::size_t k = 0; k < dz2.size(); ++k) dz2[k] = da2[k] * lrelu_slope(cache.z2[k]);
  outer_acc(acc.d_w2, dz2, cache.a1);
  for (std::size_t k = 0; k < dz2.size(); ++k) acc.d_b2[k] += dz2[k];

  std::vector<double> da1(cache.a1.size(), 0.0);
  matvec_t_acc(disc.w2, dz2, da1);
  std::vector<double> dz1(da1.size());
  for (std::size_t k = 0; k < dz1.size(); ++k) dz1[k] = da1[k] * lrelu_slope(cache.z1[k]);
  outer_acc(acc.d_w1, dz1, cache.x);
  for (std::size_t k = 0; k < dz1.size(); ++k) acc.d_b1[k] += dz1[k];

  if (dx) {
    dx->assign(cache.x.size(), 0.0);
    matvec_t_acc(disc.w1, dz1, *dx);
  }
}

std::vector<double> disc_input_gradient(const DiscriminatorParams& disc, const DiscCache& cache) {
  std::vector<double> r2(disc.w3.size());
  for (std::size_t k = 0; k < r2.size(); ++k) r2[k] = lrelu_slope(cache.z2[k]) * disc.w3[k];
  std::vector<double> r1(disc.w1.rows, 0.0);
  matvec_t_acc(disc.w2, r2, r1);
  for (std::size_t k = 0; k < r1.size(); ++k) r1[k] *= lrelu_slope(cache.z1[k]);
  std::vector<double> g(disc.w1.cols, 0.0);
  matvec_t_acc(disc.w1, r1, g);
  return g;
}

void gradient_penalty_backward(const DiscriminatorParams& disc, const DiscCache& cache,
                               double weight, DiscGrads& acc) {
  // g = W1^T (m1 . (W2^T (m2 . w3))); P = (||g|| - 1)^2. The activation masks
  // are locally constant, so dP/dbias vanishes and the weight gradients are
  // closed-form products.
  std::vector<double> m1(cache.z1.size()), m2(cache.z2.size());
  for (std::size_t k = 0; k < m1.size(); ++k) m1[k] = lrelu_slope(cache.z1[k]);
  for (std::size_t k = 0; k < m2.size(); ++k) m2[k] = lrelu_slope(cache.z2[k]);

  std::vector<double> r2(disc.w3.size());
  for (std::size_t k = 0; k < r2.size(); ++k) r2[k] = m2[k] * disc.w3[k];
  std::vector<double> r1(disc.w1.rows, 0.0);
  matvec_t_acc(disc.w2, r2, r1);
  for (std::size_t k = 0; k < r1.size(); ++k) r1[k] *= m1[k];
  std::vector<double> g(disc.w1.cols, 0.0);
  matvec_t_acc(disc.w1, r1, g);

  const double nrm = norm2(g);
  if (nrm <= 1e-300) return;  // subgradient 0 at the origin
  const double coef = weight * 2.0 * (nrm - 1.0) / nrm;
  std::vector<double> u(g.size());
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = coef * g[k];

  // dP/dW1 = r1 u^T
  outer_acc(acc.d_w1, r1, u);

  std::vector<double> p(disc.w1.rows, 0.0);
  matvec_acc(disc.w1, u, p);
  for (std::size_t k = 0; k < p.size(); ++k) p[k] *= m1[k];

  // dP/dW2 = r2 (m1 . p)^T
  outer_acc(acc.d_w2, r2, p);

  // dP/dw3 = m2 . (W2 (m1 . p))
  std::vector<double> w2p(disc.w2.rows, 0.0);
  matvec_acc(disc.w2, p, w2p);
  for (std::size_t k = 0; k < w2p.size(); ++k) acc.d_w3[k] += m2[k] * w2p[k];
}

std::pair<double, double> bce_losses(std::span<const double> real_scores,
                                     std::span<const double> fake_scores) {
  if (real_scores.empty() || fake_scores.empty())
    throw std::invalid_argument("bce_losses: empty batch");
  auto safe_log = [](double x) { return std::log(std::max(x, kLogClamp)); };

  double disc = 0.0;
  for (const double s : real_scores) disc -= safe_log(sigmoid(s));
  double disc_fake = 0.0;
  double gen = 0.0;
  for (const double s : fake_scores) {
    disc_fake -= safe_log(1.0 - sigmoid(s));
    gen -= safe_log(sigmoid(s));
  }
  return {disc / static_cast<double>(real_scores.size()) +
              disc_fake / static_cast<double>(fake_scores.size()),
          gen / static_cast<double>(fake_scores.size())};
}

WganGpResult wgan_gp_losses(const DiscriminatorParams& disc,
                            const std::vector<std::vector<double>>& real_patches,
                            const std::vector<std::vector<double>>& fake_patches, double lambda,
                            std::span<const double> eps_samples) {
  const std::size_t n = real_patches.size();
  if (n == 0 || fake_patches.size() != n || eps_samples.size() != n)
    throw std::invalid_argument("wgan_gp_losses: batch size mismatch");

  WganGpResult r;
  double mean_real = 0.0;
  double mean_fake = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mean_real += discriminate(disc, real_patches[k]);
    mean_fake += discriminate(disc, fake_patches[k]);

    const double eps = eps_samples[k];
    std::vector<double> xhat(real_patches[k].size());
    for (std::size_t j = 0; j < xhat.size(); ++j)
      xhat[j] = eps * real_patches[k][j] + (1.0 - eps) * fake_patches[k][j];
    DiscCache cache;
    discriminate(disc, xhat, &cache);
    const double nrm = norm2(disc_input_gradient(disc, cache));
    r.penalty += (nrm - 1.0) * (nrm - 1.0);
  }
  mean_real /= static_cast<double>(n);
  mean_fake /= static_cast<double>(n);
  r.penalty /= static_cast<double>(n);
  r.disc_loss = mean_fake - mean_real + lambda * r.penalty;
  r.gen_loss = -mean_fake;
  return r;
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const AdamConfig& config) {
  if (params.size() != grads.size()) throw std::invalid_argument("adam_step: shape mismatch");
  if (state.m.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  if (state.m.size() != params.size()) throw std::invalid_argument("adam_step: stale state");

  state.t += 1;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.t));
  for (std::size_t k = 0; k < params.size(); ++k) {
    state.m[k] = config.beta1 * state.m[k] + (1.0 - config.beta1) * grads[k];
    state.v[k] = config.beta2 * state.v[k] + (1.0 - config.beta2) * grads[k] * grads[k];
    const double mhat = state.m[k] / bc1;
    const double vhat = state.v[k] / bc2;
    params[k] -= config.lr * mhat / (std::sqrt(vhat) + config.eps);
  }
}

namespace {

void append(std::vector<double>& out, std::span<const double> v) {
  out.insert(out.end(), v.begin(), v.end());
}

std::size_t take(std::span<const double> flat, std::size_t at, std::span<double> into) {
  if (at + into.size() > flat.size()) throw std::invalid_argument("unflatten: flat vector too short");
  std::copy(flat.begin() + static_cast<std::ptrdiff_t>(at),
            flat.begin() + static_cast<std::ptrdiff_t>(at + into.size()), into.begin());
  return at + into.size();
}

}  // namespace

std::vector<double> flatten(const GeneratorParams& gen) {
  std::vector<double> flat;
  for (const QlstmCellParams& layer : gen.qlstm.layers) {
    append(flat, layer.proj_weights.a);
    append(flat, layer.proj_bias);
    for (const auto& vqc : layer.vqc) append(flat, vqc);
  }
  append(flat, gen.out_weights.a);
  append(flat, gen.out_bias);
  return flat;
}

std::vector<double> flatten(const GeneratorGrads& grads) {
  std::vector<double> flat;
  for (const CellGrads& layer : grads.qlstm.layers) {
    append(flat, layer.d_proj_weights.a);
    append(flat, layer.d_proj_bias);
    for (const auto& vqc : layer.d_vqc) append(flat, vqc);
  }
  append(flat, grads.d_out_weights.a);
  append(flat, grads.d_out_bias);
  return flat;
}

void unflatten(std::span<const double> flat, GeneratorParams& gen) {
  std::size_t at = 0;
  for (QlstmCellParams& layer : gen.qlstm.layers) {
    at = take(flat, at, layer.proj_weights.a);
    at = take(flat, at, layer.proj_bias);
    for (auto& vqc : layer.vqc) at = take(flat, at, vqc);
  }
  at = take(flat, at, gen.out_weights.a);
  at = take(flat, at, gen.out_bias);
  if (at != flat.size()) throw std::invalid_argument("unflatten: trailing data");
}

std::vector<double> flatten(const DiscriminatorParams& disc) {
  std::vector<double> flat;
  append(flat, disc.w1.a);
  append(flat, disc.b1);
  append(flat, disc.w2.a);
  append(flat, disc.b2);
  append(flat, disc.w3);
  flat.push_back(disc.b3);
  return flat;
}

std::vector<double> flatten(const DiscGrads& grads) {
  std::vector<double> flat;
  append(flat, grads.d_w1.a);
  append(flat, grads.d_b1);
  append(flat, grads.d_w2.a);
  append(flat, grads.d_b2);
  append(flat, grads.d_w3);
  flat.push_back(grads.d_b3);
  return flat;
}

void unflatten(std::span<const double> flat, DiscriminatorParams& disc) {
  std::size_t at = 0;
  at = take(flat, at, disc.w1.a);
  at = take(flat, at, disc.b1);
  at = take(flat, at, disc.w2.a);
  at = take(flat, at, disc.b2);
  at = take(flat, at, disc.w3);
  double b3 = 0.0;
  at = take(flat, at, {&b3, 1});
  disc.b3 = b3;
  if (at != flat.size()) throw std::invalid_argument("unflatten: trailing data");
}

std::vector<double> flatten(const PatchganParams& gen) {
  std::vector<double> flat;
  for (const auto& sub : gen.subgens) append(flat, sub);
  return flat;
}

void unflatten(std::span<const double> flat, PatchganParams& gen) {
  std::size_t at = 0;
  for (auto& sub : gen.subgens) at = take(flat, at, sub);
  if (at != flat.size()) throw std::invalid_argument("unflatten: trailing data");
}

}  // namespace qgan
