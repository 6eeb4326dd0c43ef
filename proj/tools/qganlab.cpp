// qganlab: train and evaluate patched quantum GANs on a statevector
// simulator. Subcommands: train, generate, fid, pca-study, resources,
// synth-data. Every command is deterministic under a fixed --seed.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qgan/ansatz.hpp"
#include "qgan/checkpoint.hpp"
#include "qgan/data.hpp"
#include "qgan/frechet.hpp"
#include "qgan/image.hpp"
#include "qgan/pca.hpp"
#include "qgan/train.hpp"

namespace fs = std::filesystem;
using namespace qgan;

namespace {

constexpr const char* kImagesName = "train-images-idx3-ubyte";
constexpr const char* kLabelsName = "train-labels-idx1-ubyte";

std::string format_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Shared option bundles

struct DataOptions {
  std::string data_dir;
  int synth_n = 0;

  void attach(CLI::App* cmd) {
    auto* dir = cmd->add_option("--data", data_dir,
                                "Directory holding " + std::string(kImagesName) + " / " +
                                    std::string(kLabelsName));
    auto* synth = cmd->add_option("--synth", synth_n,
                                  "Use N synthetic digit images instead of files on disk");
    dir->excludes(synth);
  }

  ImageDataset load(std::uint64_t seed) const {
    if (synth_n > 0) return synthesize_digits(static_cast<std::size_t>(synth_n), seed);
    if (data_dir.empty())
      throw std::runtime_error("no dataset: pass --data DIR or --synth N");
    return load_idx((fs::path(data_dir) / kImagesName).string(),
                    (fs::path(data_dir) / kLabelsName).string());
  }
};

// Sub-samples n rows deterministically; returns all rows when n >= available.
Mat sample_rows(const Mat& images, std::vector<int>* labels, int n, Rng& rng) {
  if (n <= 0 || static_cast<std::size_t>(n) >= images.rows) return images;
  std::vector<std::size_t> idx(images.rows);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  rng.shuffle(idx);
  Mat out(static_cast<std::size_t>(n), images.cols);
  std::vector<int> new_labels;
  for (int i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < images.cols; ++j)
      out(static_cast<std::size_t>(i), j) = images(idx[static_cast<std::size_t>(i)], j);
    if (labels && !labels->empty())
      new_labels.push_back((*labels)[idx[static_cast<std::size_t>(i)]]);
  }
  if (labels) *labels = std::move(new_labels);
  return out;
}

struct ImageSource {
  Mat images;
  std::vector<int> labels;  // empty when unknown
};

// Accepts: a directory with IDX files, a directory of .pgm files, a
// checkpoint file, or "synth:N". Identical specs resolve to identical images:
// both sides of a comparison draw from equally-seeded streams.
ImageSource resolve_source(const std::string& spec, int want_n, std::uint64_t seed,
                           const char* stream_name, bool toy = false) {
  ImageSource src;
  Rng rng = Rng::stream(seed, stream_name);

  if (spec.rfind("synth:", 0) == 0) {
    const int n = std::stoi(spec.substr(6));
    ImageDataset data = synthesize_digits(static_cast<std::size_t>(n), seed);
    if (toy) data = toy_profile(data);
    src.labels = data.labels;
    src.images = sample_rows(data.images, &src.labels, want_n, rng);
    return src;
  }

  if (fs::is_directory(spec)) {
    if (fs::exists(fs::path(spec) / kImagesName)) {
      ImageDataset data =
          load_idx((fs::path(spec) / kImagesName).string(), (fs::path(spec) / kLabelsName).string());
      if (toy) data = toy_profile(data);
      src.labels = data.labels;
      src.images = sample_rows(data.images, &src.labels, want_n, rng);
      return src;
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(spec))
      if (entry.path().extension() == ".pgm") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::runtime_error("no IDX or .pgm files in " + spec);
    const PgmImage first = read_pgm(files[0].string());
    src.images = Mat(files.size(), static_cast<std::size_t>(first.rows * first.cols));
    for (std::size_t i = 0; i < files.size(); ++i) {
      const PgmImage img = read_pgm(files[i].string());
      if (img.rows != first.rows || img.cols != first.cols)
        throw std::runtime_error("mixed image sizes in " + spec);
      const std::vector<double> unit = img.to_unit();
      std::copy(unit.begin(), unit.end(),
                src.images.a.begin() + static_cast<std::ptrdiff_t>(i * unit.size()));
    }
    src.images = sample_rows(src.images, nullptr, want_n, rng);
    return src;
  }

  // Otherwise: a checkpoint to sample from.
  const Checkpoint ckpt = load_checkpoint(spec);
  const int n = want_n > 0 ? want_n : 256;
  src.images = Mat(static_cast<std::size_t>(n), static_cast<std::size_t>(ckpt.model.image_dim()));
  for (int i = 0; i < n; ++i) {
    const LatentNoise z = sample_noise(ckpt.model.steps(), ckpt.model.z_dim(), rng);
    const std::vector<double> img = ckpt.model.generate_image(z);
    std::copy(img.begin(), img.end(),
              src.images.a.begin() + static_cast<std::ptrdiff_t>(i) * ckpt.model.image_dim());
  }
  return src;
}

void write_sample_grid(const std::string& path, const GanModel& model, int count,
                       std::uint64_t seed) {
  Rng rng = Rng::stream(seed, "samples");
  std::vector<std::vector<double>> images;
  for (int i = 0; i < count; ++i)
    images.push_back(model.generate_image(sample_noise(model.steps(), model.z_dim(), rng)));
  const int grid_cols = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(count))));
  const ImageGrid grid = assemble_grid(images, model.image_rows, model.image_cols, grid_cols);
  write_pgm(path, grid.pixels, grid.rows, grid.cols);
}

// ---------------------------------------------------------------------------
// train

struct TrainCli {
  DataOptions data;
  std::string arch = "lstm-qgan";
  std::string loss = "wasserstein-gp";
  std::string hidden = "probabilities";
  std::string out_dir = "run";
  std::string resume;
  int qubits = 3;
  int reps = 2;
  int layers = 2;
  int steps = 4;
  int patch_pixels = 0;  // patchgan only; 0 = auto
  int epochs = 10;
  int batch = 128;
  int critic_steps = -1;  // -1 = pick by loss
  int save_interval = 10;
  int grid_images = 16;
  double lr = 2e-4;
  double lambda_gp = 10.0;
  std::uint64_t seed = 0;
  bool toy = false;
  bool timing = true;
};

int largest_divisor_at_most(int value, int cap) {
  for (int d = std::min(cap, value); d >= 1; --d)
    if (value % d == 0) return d;
  return 1;
}

void echo_config(const fs::path& path, const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ofstream out(path);
  for (const auto& [k, v] : kv) out << k << "=" << v << "\n";
}

int cmd_train(const TrainCli& cli) {
  ImageDataset dataset = cli.data.load(cli.seed);
  if (cli.toy) dataset = toy_profile(dataset);
  const int image_dim = dataset.dim();

  fs::create_directories(cli.out_dir);

  TrainConfig config;
  config.learning_rate = cli.lr;
  config.batch_size = cli.batch;
  config.epochs = cli.epochs;
  config.loss_kind = cli.loss == "bce" ? LossKind::BCE : LossKind::WassersteinGP;
  config.lambda_gp = cli.lambda_gp;
  config.critic_steps =
      cli.critic_steps > 0 ? cli.critic_steps : (config.loss_kind == LossKind::BCE ? 1 : 5);
  config.seed = cli.seed;
  config.record_wall = cli.timing;

  GanModel model;
  TrainerState state = TrainerState::make(cli.seed);

  if (!cli.resume.empty()) {
    Checkpoint ckpt = load_checkpoint(cli.resume);
    model = std::move(ckpt.model);
    state = std::move(ckpt.trainer);
    std::cout << "resumed from " << cli.resume << " at epoch " << state.epoch << "\n";
  } else {
    Rng init_rng = Rng::stream(cli.seed, "init");
    model.image_rows = dataset.rows;
    model.image_cols = dataset.cols;
    if (cli.arch == "patchgan-baseline") {
      model.arch = ArchKind::PatchganBaseline;
      const int pixels = cli.patch_pixels > 0
                             ? cli.patch_pixels
                             : largest_divisor_at_most(image_dim, 1 << cli.qubits);
      if (image_dim % pixels != 0)
        throw std::runtime_error("--patch-pixels must divide the image size");
      model.patchgan =
          PatchganParams::init(cli.qubits, cli.reps, image_dim / pixels, pixels, init_rng);
      model.disc = DiscriminatorParams::init(pixels, init_rng);
    } else {
      model.arch = ArchKind::LstmQgan;
      if (dataset.rows % cli.steps != 0)
        throw std::runtime_error("--steps must divide the image rows");
      const int patch_dim = (dataset.rows / cli.steps) * dataset.cols;
      QlstmConfig qc;
      qc.n_qubits = cli.qubits;
      qc.reps = cli.reps;
      qc.layers = cli.layers;
      qc.hidden_mode = cli.hidden == "pauliz" ? HiddenMode::PauliZ : HiddenMode::Probabilities;
      qc.input_dim = cli.qubits;  // one noise angle per qubit and step
      model.lstm = GeneratorParams::init(qc, cli.steps, patch_dim, init_rng);
      model.disc = DiscriminatorParams::init(patch_dim, init_rng);
    }
  }

  const PatchSet patches =
      model.arch == ArchKind::LstmQgan
          ? extract_patches(dataset,
                            PatchLayout::whole_rows(dataset.rows, dataset.cols, model.steps()))
          : flat_patches(dataset, model.steps());

  echo_config(fs::path(cli.out_dir) / "run_config.txt",
              {{"arch", cli.arch},
               {"loss", cli.loss},
               {"hidden_mode", cli.hidden},
               {"qubits", std::to_string(cli.qubits)},
               {"reps", std::to_string(cli.reps)},
               {"layers", std::to_string(cli.layers)},
               {"steps", std::to_string(model.steps())},
               {"patch_dim", std::to_string(model.patch_dim())},
               {"image_rows", std::to_string(model.image_rows)},
               {"image_cols", std::to_string(model.image_cols)},
               {"epochs", std::to_string(cli.epochs)},
               {"batch", std::to_string(config.batch_size)},
               {"lr", format_g(config.learning_rate)},
               {"lambda", format_g(config.lambda_gp)},
               {"critic_steps", std::to_string(config.critic_steps)},
               {"seed", std::to_string(cli.seed)},
               {"toy", cli.toy ? "1" : "0"},
               {"dataset_images", std::to_string(dataset.size())}});

  const fs::path metrics_path = fs::path(cli.out_dir) / "metrics.csv";
  const bool fresh_log = !fs::exists(metrics_path) || cli.resume.empty();
  std::ofstream metrics(metrics_path, fresh_log ? std::ios::trunc : std::ios::app);
  if (fresh_log) metrics << metrics_csv_header() << "\n";

  const fs::path ckpt_path = fs::path(cli.out_dir) / "checkpoint.qlg";
  while (state.epoch < cli.epochs) {
    const EpochMetrics m = train_epoch(model, patches, config, state);
    metrics << metrics_csv_row(m) << "\n";
    metrics.flush();
    std::cout << "epoch " << m.epoch << " gl=" << format_g(m.gen_loss)
              << " dl=" << format_g(m.disc_loss) << " gp=" << format_g(m.penalty) << "\n";

    if (state.epoch % cli.save_interval == 0 || state.epoch >= cli.epochs) {
      save_checkpoint(ckpt_path.string(), {model, config, state});
      char name[64];
      std::snprintf(name, sizeof(name), "samples_epoch%04ld.pgm", state.epoch);
      write_sample_grid((fs::path(cli.out_dir) / name).string(), model, cli.grid_images, cli.seed);
    }
  }
  if (!fs::exists(ckpt_path)) save_checkpoint(ckpt_path.string(), {model, config, state});
  std::cout << "checkpoint: " << ckpt_path.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// generate

int cmd_generate(const std::string& ckpt_path, const std::string& out_dir, int n,
                 std::uint64_t seed) {
  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  fs::create_directories(out_dir);
  Rng rng = Rng::stream(seed, "noise");
  for (int i = 0; i < n; ++i) {
    const LatentNoise z = sample_noise(ckpt.model.steps(), ckpt.model.z_dim(), rng);
    const std::vector<double> img = ckpt.model.generate_image(z);
    char name[32];
    std::snprintf(name, sizeof(name), "img_%05d.pgm", i);
    write_pgm((fs::path(out_dir) / name).string(), img, ckpt.model.image_rows,
              ckpt.model.image_cols);
  }
  std::cout << "wrote " << n << " image(s) to " << out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// fid

struct FidCli {
  std::string real_spec;
  std::string gen_spec;
  std::string feature = "raw";
  std::string csv_path;
  int n = 500;
  std::uint64_t seed = 0;
  bool per_class = false;
  bool toy = false;
};

int cmd_fid(const FidCli& cli) {
  const ImageSource real = resolve_source(cli.real_spec, cli.n, cli.seed, "fid sample", cli.toy);
  const ImageSource gen = resolve_source(cli.gen_spec, cli.n, cli.seed, "fid sample", cli.toy);

  FeatureMap features;
  if (cli.feature.rfind("pca", 0) == 0) {
    int k = 32;
    const auto colon = cli.feature.find(':');
    if (colon != std::string::npos) k = std::stoi(cli.feature.substr(colon + 1));
    features.kind = FeatureKind::PcaK;
    features.pca = pca_fit(real.images, k);
  }

  const Mat real_feats = apply_features(features, real.images);
  const Mat gen_feats = apply_features(features, gen.images);

  std::ofstream csv;
  if (!cli.csv_path.empty()) {
    const bool add_header = !fs::exists(cli.csv_path);
    csv.open(cli.csv_path, std::ios::app);
    if (add_header) csv << "class,feature,n_real,n_gen,score\n";
  }

  auto emit = [&](const std::string& cls, const FrechetScore& s) {
    std::cout << (cls == "all" ? "fid" : "fid[" + cls + "]") << " = " << format_g(s.value)
              << "  (n_real=" << s.n_real << ", n_gen=" << s.n_gen << ")\n";
    if (csv.is_open())
      csv << cls << "," << cli.feature << "," << s.n_real << "," << s.n_gen << ","
          << format_g(s.value) << "\n";
  };

  if (!cli.per_class) {
    emit("all", frechet_distance(real_feats, gen_feats));
    return 0;
  }

  if (real.labels.empty())
    throw std::runtime_error("--per-class needs a labeled real side (IDX dataset or synth:N)");
  double mean = 0.0;
  int classes = 0;
  for (int c = 0; c <= 9; ++c) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < real.labels.size(); ++i)
      if (real.labels[i] == c) rows.push_back(i);
    if (rows.size() < 2) continue;
    Mat cls(rows.size(), real_feats.cols);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < real_feats.cols; ++j) cls(i, j) = real_feats(rows[i], j);
    const FrechetScore s = frechet_distance(cls, gen_feats);
    emit(std::to_string(c), s);
    mean += s.value;
    ++classes;
  }
  if (classes == 0) throw std::runtime_error("no class has at least 2 samples");
  FrechetScore mean_score;
  mean_score.value = mean / classes;
  mean_score.n_real = static_cast<int>(real.images.rows);
  mean_score.n_gen = static_cast<int>(gen.images.rows);
  emit("mean", mean_score);
  return 0;
}

// ---------------------------------------------------------------------------
// pca-study

struct PcaStudyCli {
  DataOptions data;
  std::string out_dir = "pca_study";
  int k = 2;
  int n_images = 16;
  std::uint64_t seed = 0;
};

// Mean over generated images of the best pixel correlation against any real
// image; the study contrasts PCA reconstructions with uniform noise.
double mean_nn_correlation(const Mat& gen, const Mat& real) {
  auto corr = [](std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    double ma = 0.0, mb = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      ma += a[k];
      mb += b[k];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double num = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      num += (a[k] - ma) * (b[k] - mb);
      va += (a[k] - ma) * (a[k] - ma);
      vb += (b[k] - mb) * (b[k] - mb);
    }
    const double denom = std::sqrt(va * vb);
    return denom > 0.0 ? num / denom : 0.0;
  };
  double acc = 0.0;
  for (std::size_t i = 0; i < gen.rows; ++i) {
    double best = -1.0;
    for (std::size_t j = 0; j < real.rows; ++j)
      best = std::max(best, corr(gen.row(i), real.row(j)));
    acc += best;
  }
  return acc / static_cast<double>(gen.rows);
}

int cmd_pca_study(const PcaStudyCli& cli) {
  const ImageDataset dataset = cli.data.load(cli.seed);
  fs::create_directories(cli.out_dir);

  const PcaModel model = pca_fit(dataset.images, cli.k);
  Rng rng = Rng::stream(cli.seed, "noise");
  const Mat generated = pca_random_inverse(model, cli.n_images, rng);

  for (int i = 0; i < cli.n_images; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "pca_%03d.pgm", i);
    write_pgm((fs::path(cli.out_dir) / name).string(), generated.row(static_cast<std::size_t>(i)),
              dataset.rows, dataset.cols);
  }

  Mat noise(static_cast<std::size_t>(cli.n_images), static_cast<std::size_t>(dataset.dim()));
  for (double& v : noise.a) v = rng.uniform(0.0, 1.0);

  const double pca_corr = mean_nn_correlation(generated, dataset.images);
  const double noise_corr = mean_nn_correlation(noise, dataset.images);
  std::cout << "inverse-PCA images: mean nearest-neighbor correlation " << format_g(pca_corr)
            << "\n";
  std::cout << "uniform-noise images: mean nearest-neighbor correlation " << format_g(noise_corr)
            << "\n";
  std::cout << "explained variance (top " << cli.k << "): ";
  for (int c = 0; c < cli.k; ++c)
    std::cout << format_g(model.eigenvalues[static_cast<std::size_t>(c)])
              << (c + 1 < cli.k ? ", " : "\n");
  std::cout << "images written to " << cli.out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// resources

int cmd_resources(const std::string& arch, const std::string& csv_path) {
  const Architecture a = arch == "patchgan" ? Architecture::PatchGan : Architecture::LstmQgan;
  const ResourceReport r = count_resources(a);

  std::printf("%-28s %10s\n", "architecture", arch.c_str());
  std::printf("%-28s %10d\n", "qubits per QNN", r.qubits_per_qnn);
  std::printf("%-28s %10d\n", "number of QNNs", r.qnn_count);
  std::printf("%-28s %10d\n", "total qubits", r.total_qubits);
  std::printf("%-28s %10d\n", "total 1-qubit gates", r.total_1qg);
  std::printf("%-28s %10d\n", "total 2-qubit gates", r.total_2qg);

  std::printf("csv: arch,qubits_per_qnn,qnn_count,total_qubits,total_1qg,total_2qg\n");
  std::printf("csv: %s,%d,%d,%d,%d,%d\n", arch.c_str(), r.qubits_per_qnn, r.qnn_count,
              r.total_qubits, r.total_1qg, r.total_2qg);

  if (!csv_path.empty()) {
    const bool add_header = !fs::exists(csv_path);
    std::ofstream csv(csv_path, std::ios::app);
    if (add_header) csv << "arch,qubits_per_qnn,qnn_count,total_qubits,total_1qg,total_2qg\n";
    csv << arch << "," << r.qubits_per_qnn << "," << r.qnn_count << "," << r.total_qubits << ","
        << r.total_1qg << "," << r.total_2qg << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// synth-data

int cmd_synth_data(const std::string& out_dir, int n, std::uint64_t seed) {
  fs::create_directories(out_dir);
  const ImageDataset data = synthesize_digits(static_cast<std::size_t>(n), seed);
  write_idx(data, (fs::path(out_dir) / kImagesName).string(),
            (fs::path(out_dir) / kLabelsName).string());
  std::cout << "wrote " << n << " images to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"patched quantum GAN workbench"};
  app.require_subcommand(1);

  TrainCli train_cli;
  CLI::App* train = app.add_subcommand("train", "Train a generator/discriminator pair");
  train->set_config("--config", "", "Flat key=value config file ('#' comments); flags win");
  train_cli.data.attach(train);
  train->add_option("--arch", train_cli.arch, "lstm-qgan | patchgan-baseline")
      ->check(CLI::IsMember({"lstm-qgan", "patchgan-baseline"}));
  train->add_option("--loss", train_cli.loss, "wasserstein-gp | bce")
      ->check(CLI::IsMember({"wasserstein-gp", "bce"}));
  train->add_option("--hidden-mode", train_cli.hidden, "probabilities | pauliz")
      ->check(CLI::IsMember({"probabilities", "pauliz"}));
  train->add_option("--qubits", train_cli.qubits, "Qubits per QNN")->check(CLI::Range(1, 12));
  train->add_option("--reps", train_cli.reps, "VQC repetitions");
  train->add_option("--layers", train_cli.layers, "QLSTM layers");
  train->add_option("--steps", train_cli.steps, "Time steps / image strips (lstm-qgan)");
  train->add_option("--patch-pixels", train_cli.patch_pixels,
                    "Pixels per sub-generator patch (patchgan; 0 = auto)");
  train->add_option("--epochs", train_cli.epochs, "Total epochs (resume continues toward this)");
  train->add_option("--batch", train_cli.batch, "Batch size");
  train->add_option("--critic-steps", train_cli.critic_steps,
                    "Discriminator updates per generator update (-1: 5 for wgp, 1 for bce)");
  train->add_option("--lr", train_cli.lr, "ADAM learning rate");
  train->add_option("--lambda", train_cli.lambda_gp, "Gradient penalty weight");
  train->add_option("--seed", train_cli.seed, "Root seed for every random stream");
  train->add_option("--out", train_cli.out_dir, "Output directory");
  train->add_option("--resume", train_cli.resume, "Checkpoint to continue from");
  train->add_option("--save-interval", train_cli.save_interval, "Epochs between checkpoints");
  train->add_option("--grid", train_cli.grid_images, "Images per sample grid");
  train->add_flag("--toy", train_cli.toy, "Desk-scale profile: center-crop 24x24, pool to 8x8");
  train->add_flag("--timing,!--no-timing", train_cli.timing,
                  "Record wall seconds in metrics.csv (disable for byte-identical logs)");

  std::string gen_ckpt, gen_out = "generated";
  int gen_n = 16;
  std::uint64_t gen_seed = 0;
  CLI::App* generate = app.add_subcommand("generate", "Sample images from a checkpoint");
  generate->set_config("--config", "", "Flat key=value config file ('#' comments); flags win");
  generate->add_option("--checkpoint", gen_ckpt, "Checkpoint file")->required();
  generate->add_option("--out", gen_out, "Output directory");
  generate->add_option("--n", gen_n, "Number of images");
  generate->add_option("--seed", gen_seed, "Noise seed");

  FidCli fid_cli;
  CLI::App* fid = app.add_subcommand("fid", "Frechet distance between two image sets");
  fid->set_config("--config", "", "Flat key=value config file ('#' comments); flags win");
  fid->add_option("--real", fid_cli.real_spec, "IDX dir, .pgm dir, checkpoint, or synth:N")
      ->required();
  fid->add_option("--gen", fid_cli.gen_spec, "IDX dir, .pgm dir, checkpoint, or synth:N")
      ->required();
  fid->add_option("--feature", fid_cli.feature, "raw | pca:K (fitted on the real side)");
  fid->add_option("--n", fid_cli.n, "Samples per side");
  fid->add_option("--seed", fid_cli.seed, "Sampling seed");
  fid->add_option("--csv", fid_cli.csv_path, "Append rows to this CSV");
  fid->add_flag("--per-class", fid_cli.per_class, "Score each digit class, then the mean");
  fid->add_flag("--toy", fid_cli.toy, "Apply the 8x8 desk-scale profile to dataset sources");

  PcaStudyCli pca_cli;
  CLI::App* pca_study = app.add_subcommand(
      "pca-study", "Reconstruct images from random low-dimensional PCA scores");
  pca_study->set_config("--config", "", "Flat key=value config file ('#' comments); flags win");
  pca_cli.data.attach(pca_study);
  pca_study->add_option("--k", pca_cli.k, "Number of principal components");
  pca_study->add_option("--n-images", pca_cli.n_images, "Images to generate");
  pca_study->add_option("--seed", pca_cli.seed, "Score sampling seed");
  pca_study->add_option("--out", pca_cli.out_dir, "Output directory");

  std::string res_arch;
  std::string res_csv;
  CLI::App* resources = app.add_subcommand("resources", "Quantum resource accounting");
  resources->set_config("--config", "", "Flat key=value config file ('#' comments); flags win");
  resources->add_option("arch", res_arch, "lstm-qgan | patchgan")
      ->required()
      ->check(CLI::IsMember({"lstm-qgan", "patchgan"}));
  resources->add_option("--csv", res_csv, "Append the report to this CSV");

  std::string synth_out = "data";
  int synth_n = 5000;
  std::uint64_t synth_seed = 0;
  CLI::App* synth = app.add_subcommand("synth-data", "Write a synthetic digit dataset as IDX");
  synth->set_config("--config", "", "Flat key=value config file ('#' comments); flags win");
  synth->add_option("--out", synth_out, "Output directory");
  synth->add_option("--n", synth_n, "Number of images");
  synth->add_option("--seed", synth_seed, "Generation seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*train) return cmd_train(train_cli);
    if (*generate) return cmd_generate(gen_ckpt, gen_out, gen_n, gen_seed);
    if (*fid) return cmd_fid(fid_cli);
    if (*pca_study) return cmd_pca_study(pca_cli);
    if (*resources) return cmd_resources(res_arch, res_csv);
    if (*synth) return cmd_synth_data(synth_out, synth_n, synth_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
