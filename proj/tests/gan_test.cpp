#include "qgan/gan.hpp"

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "qgan/train.hpp"

using namespace qgan;

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Straight-line recomputation of the discriminator forward pass.
double oracle_disc(const DiscriminatorParams& d, const std::vector<double>& x) {
  auto lrelu = [](double v) { return v > 0.0 ? v : 0.2 * v; };
  std::vector<double> a1(d.w1.rows);
  for (std::size_t i = 0; i < d.w1.rows; ++i) {
    double z = d.b1[i];
    for (std::size_t j = 0; j < d.w1.cols; ++j) z += d.w1(i, j) * x[j];
    a1[i] = lrelu(z);
  }
  std::vector<double> a2(d.w2.rows);
  for (std::size_t i = 0; i < d.w2.rows; ++i) {
    double z = d.b2[i];
    for (std::size_t j = 0; j < d.w2.cols; ++j) z += d.w2(i, j) * a1[j];
    a2[i] = lrelu(z);
  }
  double s = d.b3;
  for (std::size_t i = 0; i < d.w3.size(); ++i) s += d.w3[i] * a2[i];
  return s;
}

DiscriminatorParams zero_disc(int patch_dim) {
  Rng rng(1);
  DiscriminatorParams d = DiscriminatorParams::init(patch_dim, rng);
  for (double& v : d.w1.a) v = 0.0;
  for (double& v : d.b1) v = 0.0;
  for (double& v : d.w2.a) v = 0.0;
  for (double& v : d.b2) v = 0.0;
  for (double& v : d.w3) v = 0.0;
  d.b3 = 0.0;
  return d;
}

GeneratorParams small_generator(std::uint64_t seed, HiddenMode mode = HiddenMode::Probabilities,
                                int steps = 2, int patch_dim = 4) {
  const QlstmConfig config{2, 1, mode, 2, 2};
  Rng rng(seed);
  return GeneratorParams::init(config, steps, patch_dim, rng);
}

}  // namespace

TEST_CASE("discriminate") {
  SUBCASE("zero weights give score 0") {
    const DiscriminatorParams d = zero_disc(6);
    const std::vector<double> patch(6, 0.7);
    CHECK(discriminate(d, patch) == 0.0);
    CHECK(sigmoid(discriminate(d, patch)) == doctest::Approx(0.5));
  }
  SUBCASE("matches independent recomputation") {
    Rng rng(44);
    const DiscriminatorParams d = DiscriminatorParams::init(9, rng);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> patch(9);
      for (double& v : patch) v = rng.uniform(0.0, 1.0);
      CHECK(discriminate(d, patch) == doctest::Approx(oracle_disc(d, patch)).epsilon(1e-14));
    }
  }
  SUBCASE("zero hidden weights leave only the bias path") {
    Rng rng(45);
    DiscriminatorParams d = DiscriminatorParams::init(5, rng);
    for (double& v : d.w1.a) v = 0.0;  // input cannot reach the score
    const std::vector<double> a(5, 0.1), b(5, 0.9);
    CHECK(discriminate(d, a) == discriminate(d, b));
  }
  SUBCASE("shape mismatch") {
    const DiscriminatorParams d = zero_disc(4);
    CHECK_THROWS_AS(discriminate(d, std::vector<double>(5, 0.0)), std::invalid_argument);
  }
}

TEST_CASE("disc_backward matches finite differences") {
  Rng rng(71);
  const DiscriminatorParams d = DiscriminatorParams::init(7, rng);
  std::vector<double> patch(7);
  for (double& v : patch) v = rng.uniform(0.0, 1.0);

  DiscCache cache;
  discriminate(d, patch, &cache);
  DiscGrads grads = DiscGrads::zeros(d);
  std::vector<double> dx;
  disc_backward(d, cache, 1.0, grads, &dx);

  DiscriminatorParams probe = d;
  std::vector<double> flat = flatten(probe);
  const std::vector<double> fd = oracle::finite_difference(
      [&](const std::vector<double>& theta) {
        unflatten(theta, probe);
        return discriminate(probe, patch);
      },
      flat, 1e-6);
  CHECK(oracle::max_rel_error(flatten(grads), fd) <= 1e-7);

  for (std::size_t j = 0; j < patch.size(); ++j) {
    std::vector<double> px = patch;
    px[j] += 1e-6;
    const double fp = discriminate(d, px);
    px[j] -= 2e-6;
    const double fm = discriminate(d, px);
    CHECK(oracle::close_rel(dx[j], (fp - fm) / 2e-6, 1e-7));
  }
}

TEST_CASE("bce_losses") {
  SUBCASE("all scores zero") {
    const std::vector<double> scores(4, 0.0);
    auto [disc, gen] = bce_losses(scores, scores);
    CHECK(std::abs(disc - 2.0 * std::log(2.0)) <= 1e-12);
    CHECK(std::abs(gen - std::log(2.0)) <= 1e-12);
  }
  SUBCASE("perfect discriminator limit") {
    const std::vector<double> real(3, 200.0), fake(3, -200.0);
    auto [disc, gen] = bce_losses(real, fake);
    CHECK(disc == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(gen > 10.0);  // clamped log keeps it finite
    CHECK(std::isfinite(gen));
  }
  SUBCASE("random scores match the direct formula") {
    Rng rng(5150);
    std::vector<double> real(8), fake(8);
    for (double& v : real) v = rng.normal();
    for (double& v : fake) v = rng.normal();
    auto [disc, gen] = bce_losses(real, fake);
    double dwant = 0.0, gwant = 0.0;
    for (const double s : real) dwant -= std::log(sigmoid(s));
    for (const double s : fake) dwant -= std::log(1.0 - sigmoid(s));
    for (const double s : fake) gwant -= std::log(sigmoid(s));
    CHECK(disc == doctest::Approx(dwant / 8.0 + 0.0).epsilon(1e-12));
    CHECK(gen == doctest::Approx(gwant / 8.0).epsilon(1e-12));
  }
  SUBCASE("empty batch") {
    CHECK_THROWS_AS(bce_losses({}, std::vector<double>{0.0}), std::invalid_argument);
  }
}

TEST_CASE("wgan_gp_losses") {
  SUBCASE("constant discriminator gives disc_loss = lambda exactly") {
    DiscriminatorParams d = zero_disc(4);
    d.b3 = 0.37;
    std::vector<std::vector<double>> real(3, std::vector<double>{0.1, 0.2, 0.3, 0.4});
    std::vector<std::vector<double>> fake(3, std::vector<double>{0.9, 0.8, 0.7, 0.6});
    const std::vector<double> eps{0.2, 0.5, 0.9};
    const WganGpResult r = wgan_gp_losses(d, real, fake, 10.0, eps);
    CHECK(std::abs(r.disc_loss - 10.0) <= 1e-10);
    CHECK(r.penalty == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.gen_loss == doctest::Approx(-0.37).epsilon(1e-12));
  }
  SUBCASE("locally linear region: penalty is (||g|| - 1)^2 with constant g") {
    Rng rng(303);
    DiscriminatorParams d = DiscriminatorParams::init(4, rng);
    for (double& b : d.b1) b = 10.0;  // keep every activation on the linear branch
    for (double& b : d.b2) b = 10.0;

    std::vector<std::vector<double>> real(2, std::vector<double>(4));
    std::vector<std::vector<double>> fake(2, std::vector<double>(4));
    for (auto& p : real)
      for (double& v : p) v = rng.uniform(0.0, 1.0);
    for (auto& p : fake)
      for (double& v : p) v = rng.uniform(0.0, 1.0);

    DiscCache cache;
    discriminate(d, real[0], &cache);
    const double g = norm2(disc_input_gradient(d, cache));
    const std::vector<double> eps{0.3, 0.8};
    const WganGpResult with_gp = wgan_gp_losses(d, real, fake, 10.0, eps);
    CHECK(with_gp.penalty == doctest::Approx((g - 1.0) * (g - 1.0)).epsilon(1e-10));

    const WganGpResult no_gp = wgan_gp_losses(d, real, fake, 0.0, eps);
    CHECK(no_gp.disc_loss == doctest::Approx(with_gp.disc_loss - 10.0 * with_gp.penalty).epsilon(1e-10));
  }
  SUBCASE("batch size mismatch") {
    const DiscriminatorParams d = zero_disc(2);
    CHECK_THROWS_AS(wgan_gp_losses(d, {{0.0, 0.0}}, {}, 1.0, std::vector<double>{0.5}),
                    std::invalid_argument);
  }
}

TEST_CASE("gradient penalty backward matches finite differences on the penalized loss") {
  Rng rng(911);
  const DiscriminatorParams d = DiscriminatorParams::init(8, rng);
  const double lambda = 10.0;

  const int pairs = 3;
  std::vector<std::vector<double>> real(pairs, std::vector<double>(8));
  std::vector<std::vector<double>> fake(pairs, std::vector<double>(8));
  std::vector<double> eps(pairs);
  for (auto& p : real)
    for (double& v : p) v = rng.uniform(0.0, 1.0);
  for (auto& p : fake)
    for (double& v : p) v = rng.uniform(0.0, 1.0);
  for (double& e : eps) e = rng.uniform(0.0, 1.0);

  // Implementation-side gradient of the full critic loss.
  DiscGrads grads = DiscGrads::zeros(d);
  const double inv_n = 1.0 / pairs;
  for (int k = 0; k < pairs; ++k) {
    DiscCache rc, fc, hc;
    discriminate(d, real[static_cast<std::size_t>(k)], &rc);
    discriminate(d, fake[static_cast<std::size_t>(k)], &fc);
    disc_backward(d, fc, inv_n, grads);
    disc_backward(d, rc, -inv_n, grads);
    std::vector<double> xhat(8);
    for (std::size_t j = 0; j < 8; ++j)
      xhat[j] = eps[static_cast<std::size_t>(k)] * real[static_cast<std::size_t>(k)][j] +
                (1.0 - eps[static_cast<std::size_t>(k)]) * fake[static_cast<std::size_t>(k)][j];
    discriminate(d, xhat, &hc);
    gradient_penalty_backward(d, hc, lambda * inv_n, grads);
  }

  DiscriminatorParams probe = d;
  const std::vector<double> fd = oracle::finite_difference(
      [&](const std::vector<double>& theta) {
        unflatten(theta, probe);
        return wgan_gp_losses(probe, real, fake, lambda, eps).disc_loss;
      },
      flatten(d), 1e-4);
  CHECK(oracle::max_rel_error(flatten(grads), fd) <= 1e-4);
}

TEST_CASE("adam_step") {
  const AdamConfig cfg{0.1, 0.9, 0.999, 1e-8};
  SUBCASE("zero gradient leaves parameters unchanged and decays moments") {
    std::vector<double> params{1.0, -2.0};
    AdamState state;
    adam_step(params, std::vector<double>{0.5, -0.25}, state, cfg);
    const std::vector<double> after_first = params;
    const double m0 = state.m[0];
    adam_step(params, std::vector<double>{0.0, 0.0}, state, cfg);
    CHECK(state.m[0] == doctest::Approx(0.9 * m0).epsilon(1e-15));
    CHECK(params[0] != after_first[0]);  // momentum still moving
    AdamState fresh;
    std::vector<double> p2{3.0};
    adam_step(p2, std::vector<double>{0.0}, fresh, cfg);
    CHECK(p2[0] == 3.0);
  }
  SUBCASE("first step matches the scalar hand computation") {
    std::vector<double> params{0.0};
    AdamState state;
    const double g = 0.3;
    adam_step(params, std::vector<double>{g}, state, cfg);
    // mhat = g, vhat = g^2 => step = -lr * g / (|g| + eps)
    CHECK(params[0] == doctest::Approx(-cfg.lr * g / (std::abs(g) + cfg.eps)).epsilon(1e-12));
  }
  SUBCASE("two steps match an independently coded reference") {
    std::vector<double> params{0.5, -1.5};
    const std::vector<double> g1{0.2, -0.4};
    const std::vector<double> g2{-0.1, 0.3};
    AdamState state;
    adam_step(params, g1, state, cfg);
    adam_step(params, g2, state, cfg);

    // Reference: textbook recursion, written straight-line.
    std::vector<double> ref{0.5, -1.5};
    std::vector<double> m(2, 0.0), v(2, 0.0);
    for (int t = 1; t <= 2; ++t) {
      const std::vector<double>& g = (t == 1) ? g1 : g2;
      for (int k = 0; k < 2; ++k) {
        m[static_cast<std::size_t>(k)] = 0.9 * m[static_cast<std::size_t>(k)] + 0.1 * g[static_cast<std::size_t>(k)];
        v[static_cast<std::size_t>(k)] =
            0.999 * v[static_cast<std::size_t>(k)] + 0.001 * g[static_cast<std::size_t>(k)] * g[static_cast<std::size_t>(k)];
        const double mhat = m[static_cast<std::size_t>(k)] / (1.0 - std::pow(0.9, t));
        const double vhat = v[static_cast<std::size_t>(k)] / (1.0 - std::pow(0.999, t));
        ref[static_cast<std::size_t>(k)] -= 0.1 * mhat / (std::sqrt(vhat) + 1e-8);
      }
    }
    CHECK(params[0] == doctest::Approx(ref[0]).epsilon(1e-14));
    CHECK(params[1] == doctest::Approx(ref[1]).epsilon(1e-14));
  }
  SUBCASE("shape mismatch") {
    std::vector<double> params{1.0};
    AdamState state;
    CHECK_THROWS_AS(adam_step(params, std::vector<double>{1.0, 2.0}, state, cfg),
                    std::invalid_argument);
  }
}

TEST_CASE("generate") {
  SUBCASE("all-zero generator paints sigma(0) = 0.5 everywhere") {
    GeneratorParams gen = small_generator(10);
    for (double& v : gen.out_weights.a) v = 0.0;
    for (double& v : gen.out_bias) v = 0.0;
    Rng noise_rng(3);
    const LatentNoise z = sample_noise(gen.steps, 2, noise_rng);
    for (const double px : generate(gen, z)) CHECK(px == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("image is the concatenation of the step patches") {
    const GeneratorParams gen = small_generator(11);
    Rng noise_rng(4);
    const LatentNoise z = sample_noise(gen.steps, 2, noise_rng);
    const GeneratorCache cache = generate_with_cache(gen, z);
    const std::vector<double> image = generate(gen, z);
    std::size_t at = 0;
    for (const auto& patch : cache.patches)
      for (const double v : patch) CHECK(image.at(at++) == v);
    CHECK(at == image.size());
  }
  SUBCASE("fixed seed reproduces the image bit for bit") {
    const GeneratorParams gen = small_generator(12);
    Rng a(99), b(99);
    const std::vector<double> img1 = generate(gen, sample_noise(gen.steps, 2, a));
    const std::vector<double> img2 = generate(gen, sample_noise(gen.steps, 2, b));
    CHECK(img1 == img2);
  }
  SUBCASE("noise shape mismatch") {
    const GeneratorParams gen = small_generator(13);
    Rng rng(5);
    const LatentNoise bad = sample_noise(gen.steps + 1, 2, rng);
    CHECK_THROWS_AS(generate(gen, bad), std::invalid_argument);
  }
}

TEST_CASE("end-to-end generator gradient matches finite differences (n=2, T=2, patch_dim=4)") {
  GeneratorParams gen = small_generator(21);
  Rng rng(22);
  const LatentNoise z = sample_noise(gen.steps, 2, rng);

  std::vector<std::vector<double>> w(static_cast<std::size_t>(gen.steps),
                                     std::vector<double>(static_cast<std::size_t>(gen.patch_dim)));
  for (auto& row : w)
    for (double& v : row) v = rng.uniform(-1.0, 1.0);

  auto loss = [&](const GeneratorParams& g) {
    const GeneratorCache cache = generate_with_cache(g, z);
    double acc = 0.0;
    for (int t = 0; t < g.steps; ++t)
      for (int j = 0; j < g.patch_dim; ++j)
        acc += w[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)] *
               cache.patches[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)];
    return acc;
  };

  const GeneratorCache cache = generate_with_cache(gen, z);
  GeneratorGrads grads = GeneratorGrads::zeros(gen);
  for (int t = 0; t < gen.steps; ++t)
    grads.add_scaled(generator_patch_backward(gen, cache, t, w[static_cast<std::size_t>(t)]), 1.0);

  GeneratorParams probe = gen;
  const std::vector<double> fd = oracle::finite_difference(
      [&](const std::vector<double>& theta) {
        unflatten(theta, probe);
        return loss(probe);
      },
      flatten(gen), 1e-5);
  CHECK(oracle::max_rel_error(flatten(grads), fd) <= 1e-4);
}

TEST_CASE("applied generator gradient equals the per-patch mean exactly") {
  GeneratorParams gen = small_generator(31, HiddenMode::Probabilities, 4, 3);
  Rng rng(32);
  GanModel model;
  model.arch = ArchKind::LstmQgan;
  model.lstm = gen;
  model.disc = DiscriminatorParams::init(gen.patch_dim, rng);

  const LatentNoise z = sample_noise(gen.steps, 2, rng);
  const GeneratorGrads applied = lstm_generator_batch_gradient(model, {z}, LossKind::WassersteinGP);

  // Explicit per-patch accumulation, written out separately.
  const GeneratorCache cache = generate_with_cache(model.lstm, z);
  GeneratorGrads expected = GeneratorGrads::zeros(model.lstm);
  for (int t = 0; t < gen.steps; ++t) {
    DiscCache dc;
    discriminate(model.disc, cache.patches[static_cast<std::size_t>(t)], &dc);
    std::vector<double> d_patch = disc_input_gradient(model.disc, dc);
    for (double& v : d_patch) v *= -1.0;  // Wasserstein generator objective
    expected.add_scaled(generator_patch_backward(model.lstm, cache, t, d_patch), 1.0);
  }
  expected.scale(1.0 / gen.steps);

  CHECK(flatten(applied) == flatten(expected));  // bit-exact, fixed summation order
}

TEST_CASE("patchgan baseline") {
  SUBCASE("full-scale shape: 5 qubits, 14-pixel patches, 56 sub-generators") {
    Rng rng(41);
    const PatchganParams p = PatchganParams::init(5, 2, 56, 14, rng);
    CHECK(p.image_dim() == 784);
    const LatentNoise z = sample_noise(56, 5, rng);
    const std::vector<double> image = generate_patchgan_baseline(p, z);
    CHECK(image.size() == 784);
    for (const double v : image) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
  SUBCASE("scaling-study shape: 8 qubits, 196-pixel slices, 4 sub-generators") {
    Rng rng(42);
    const PatchganParams p = PatchganParams::init(8, 2, 4, 196, rng);
    CHECK(p.image_dim() == 784);
  }
  SUBCASE("max normalization on a 2-pixel toy") {
    Rng rng(43);
    const PatchganParams p = PatchganParams::init(1, 1, 1, 2, rng);
    const LatentNoise z = sample_noise(1, 1, rng);
    const std::vector<double> probs = probabilities(run(p.circuit, p.subgens[0], z.z.row(0)));
    const double maxp = std::max(probs[0], probs[1]);
    const std::vector<double> image = generate_patchgan_baseline(p, z);
    CHECK(image[0] == doctest::Approx(probs[0] / maxp).epsilon(1e-15));
    CHECK(image[1] == doctest::Approx(probs[1] / maxp).epsilon(1e-15));
  }
  SUBCASE("patch must fit the probability vector") {
    Rng rng(44);
    CHECK_THROWS_AS(PatchganParams::init(2, 1, 4, 5, rng), std::invalid_argument);
  }
  SUBCASE("patch gradient matches finite differences") {
    Rng rng(45);
    PatchganParams p = PatchganParams::init(2, 1, 1, 3, rng);
    const LatentNoise z = sample_noise(1, 2, rng);
    std::vector<double> d_patch{0.7, -0.3, 0.4};

    const std::vector<double> got = patchgan_patch_backward(p, 0, z.z.row(0), d_patch);
    PatchganParams probe = p;
    const std::vector<double> fd = oracle::finite_difference(
        [&](const std::vector<double>& theta) {
          unflatten(theta, probe);
          const std::vector<double> image = generate_patchgan_baseline(probe, z);
          double acc = 0.0;
          for (std::size_t j = 0; j < d_patch.size(); ++j) acc += d_patch[j] * image[j];
          return acc;
        },
        flatten(p), 1e-5);
    CHECK(oracle::max_rel_error(got, fd) <= 1e-5);
  }
}
