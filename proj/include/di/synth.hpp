#pragma once

#include <cstdint>
#include <utility>
#include <variant>

#include "di/dataset.hpp"

namespace di {

// Seeded benchmark generator. Each gesture has a deterministic template
// (sum of 3 sinusoidal ridges over the rows x cols plane); each domain
// imprints a smooth per-channel gain vector, an additive "ghost" ridge
// field drawn from the same family as the gesture templates, and a
// temporal warp factor; Gaussian noise is keyed per
// (seed, gesture, domain, rep) so generation order never matters.
struct GeneratorConfig {
  int n_gestures = 10;       // M
  int n_domains = 10;        // N
  int reps = 20;             // samples per (gesture, domain) cell
  int64_t rows = 90;         // link-subcarrier channels
  int64_t cols = 128;        // time steps
  double noise_sigma = 0.05;
  double gain_strength = 0.25;   // peak deviation of the per-channel gain profile
  double offset_strength = 2.2;  // amplitude scale of the additive ghost field
  double warp_strength = 0.05;   // temporal warp: factor = 1 + U(-1,1)*strength
  uint64_t seed = 42;

  void validate() const;
};

Dataset generate_dataset(const GeneratorConfig& config);

// Stratified random split per (gesture, domain) cell.
struct MixedSplit {
  double train_frac = 0.8;
  uint64_t seed = 0;
};

// All samples of one domain form the test side.
struct LodoSplit {
  int held_domain = 0;
};

using SplitProtocol = std::variant<MixedSplit, LodoSplit>;

std::pair<Dataset, Dataset> split_dataset(const Dataset& dataset, const SplitProtocol& protocol);

}  // namespace di
