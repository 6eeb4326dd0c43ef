// Contract tests for the command-line surface: exit codes (0 success,
// 2 usage error, 1 runtime error), artifact bookkeeping, and output shapes.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "doctest.h"

#ifndef QGANLAB_BIN
#define QGANLAB_BIN "qganlab"
#endif

namespace {

namespace fs = std::filesystem;

struct CliResult {
  int exit_code = -1;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  CliResult r;
  const std::string cmd = std::string(QGANLAB_BIN) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[512];
  while (fgets(buf, sizeof(buf), pipe)) r.output += buf;
  r.exit_code = WEXITSTATUS(pclose(pipe));
  return r;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("qgan_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string sub(const std::string& name) const { return (path / name).string(); }
};

int count_lines_with(const std::string& text, const std::string& needle) {
  int count = 0;
  std::size_t at = 0;
  while ((at = text.find(needle, at)) != std::string::npos) {
    ++count;
    at += needle.size();
  }
  return count;
}

}  // namespace

TEST_CASE("exit codes form a stable contract") {
  CHECK(run_cli("resources lstm-qgan").exit_code == 0);
  CHECK(run_cli("--help").exit_code == 0);
  // Usage errors: unknown loss name, unknown subcommand, missing required flag.
  CHECK(run_cli("train --loss nonsense --synth 8 --toy --epochs 0").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
  CHECK(run_cli("generate").exit_code == 2);
  // Runtime errors: missing dataset, corrupt checkpoint.
  CHECK(run_cli("train --data /no/such/dir --epochs 1").exit_code == 1);
}

TEST_CASE("resources prints the design-cost tables") {
  const CliResult lstm = run_cli("resources lstm-qgan");
  CHECK(lstm.output.find("lstm-qgan,7,8,56,336,112") != std::string::npos);
  const CliResult patch = run_cli("resources patchgan");
  CHECK(patch.output.find("patchgan,5,56,280,1680,1344") != std::string::npos);
}

TEST_CASE("generate handles n=0 and corrupt checkpoints") {
  TempDir tmp;
  SUBCASE("corrupt checkpoint is a runtime error") {
    const std::string bad = tmp.sub("bad.qlg");
    std::FILE* f = std::fopen(bad.c_str(), "wb");
    std::fputs("garbage", f);
    std::fclose(f);
    const CliResult r = run_cli("generate --checkpoint " + bad + " --out " + tmp.sub("x"));
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("corrupt checkpoint") != std::string::npos);
  }
  SUBCASE("n=0 writes nothing and succeeds") {
    const std::string run_dir = tmp.sub("run");
    const CliResult train = run_cli("train --synth 24 --toy --epochs 1 --batch 8 --seed 3 --out " +
                                    run_dir + " --no-timing");
    REQUIRE(train.exit_code == 0);
    const std::string empty_dir = tmp.sub("none");
    const CliResult r =
        run_cli("generate --checkpoint " + run_dir + "/checkpoint.qlg --n 0 --out " + empty_dir);
    CHECK(r.exit_code == 0);
    int files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(empty_dir)) ++files;
    CHECK(files == 0);
  }
}

TEST_CASE("fid per-class prints ten class rows plus the mean") {
  const CliResult r = run_cli("fid --real synth:400 --gen synth:400 --per-class --n 400 --seed 2");
  CHECK(r.exit_code == 0);
  CHECK(count_lines_with(r.output, "fid[") == 11);  // classes 0..9 + mean
  CHECK(r.output.find("fid[mean]") != std::string::npos);
}

TEST_CASE("config file values are overridden by flags") {
  TempDir tmp;
  const std::string cfg = tmp.sub("run.cfg");
  std::FILE* f = std::fopen(cfg.c_str(), "wb");
  std::fputs("# desk-scale run\nepochs=1\nbatch=8\nseed=5\n", f);
  std::fclose(f);

  const std::string out1 = tmp.sub("out1");
  const CliResult r1 = run_cli("train --synth 16 --toy --config " + cfg + " --out " + out1 +
                               " --no-timing");
  CHECK(r1.exit_code == 0);
  CHECK(fs::exists(out1 + "/checkpoint.qlg"));

  // epochs from the flag (0) beats the file's 1: no training epochs run.
  const std::string out2 = tmp.sub("out2");
  const CliResult r2 = run_cli("train --synth 16 --toy --config " + cfg + " --epochs 0 --out " +
                               out2 + " --no-timing");
  CHECK(r2.exit_code == 0);
  std::FILE* metrics = std::fopen((out2 + "/metrics.csv").c_str(), "rb");
  REQUIRE(metrics != nullptr);
  char line[256];
  int rows = 0;
  while (std::fgets(line, sizeof(line), metrics)) ++rows;
  std::fclose(metrics);
  CHECK(rows == 1);  // header only
}

TEST_CASE("train writes the promised artifacts") {
  TempDir tmp;
  const std::string out = tmp.sub("artifacts");
  const CliResult r = run_cli("train --synth 24 --toy --epochs 2 --batch 8 --seed 7 --out " + out +
                              " --no-timing");
  REQUIRE(r.exit_code == 0);
  CHECK(fs::exists(out + "/checkpoint.qlg"));
  CHECK(fs::exists(out + "/run_config.txt"));
  CHECK(fs::exists(out + "/samples_epoch0002.pgm"));

  std::FILE* metrics = std::fopen((out + "/metrics.csv").c_str(), "rb");
  REQUIRE(metrics != nullptr);
  char line[256];
  int rows = 0;
  std::string header;
  while (std::fgets(line, sizeof(line), metrics)) {
    if (rows == 0) header = line;
    ++rows;
  }
  std::fclose(metrics);
  CHECK(rows == 3);  // header + 2 epochs
  CHECK(header == "epoch,gl,dl,penalty,wall_seconds\n");
}
