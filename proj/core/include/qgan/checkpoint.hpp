#pragma once

#include <string>

#include "qgan/train.hpp"

namespace qgan {

// Versioned binary checkpoint: magic "QLG1", a fixed little-endian config
// block, then 64-bit float arrays in the canonical flatten() field order
// (generator, discriminator, then ADAM moments for both).
struct Checkpoint {
  GanModel model;
  TrainConfig config;
  TrainerState trainer;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace qgan
