#include "di/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "di/rng.hpp"

namespace di {

void GeneratorConfig::validate() const {
  if (n_gestures < 1 || n_domains < 1 || reps < 1)
    throw ConfigError("generator: gestures, domains and reps must all be >= 1");
  if (n_gestures > 65535 || n_domains > 65535)
    throw ConfigError("generator: label space exceeds u16 range");
  if (rows < 2 || cols < 2) throw ConfigError("generator: sample shape must be at least 2x2");
  if (noise_sigma < 0) throw ConfigError("generator: noise sigma must be >= 0");
  if (gain_strength < 0 || offset_strength < 0 || warp_strength < 0)
    throw ConfigError("generator: effect strengths must be >= 0");
}

namespace {

struct Ridge {
  double amp, row_center, row_width, freq, phase;
};

struct Band {
  double center, width;
};

// Every gesture template occupies the same three channel bands (think
// body-link subcarrier groups); class identity is carried by the motion
// frequency inside each band, not by where the band sits.
std::vector<Band> ridge_bands(const GeneratorConfig& cfg) {
  std::vector<Band> bands(3);
  for (size_t j = 0; j < bands.size(); ++j) {
    CounterRng rng(cfg.seed, "band", {static_cast<uint64_t>(j)});
    bands[j].center = (0.25 * static_cast<double>(j + 1) + rng.next_uniform(-0.05, 0.05)) *
                      static_cast<double>(cfg.rows - 1);
    bands[j].width = rng.next_uniform(0.06, 0.12) * static_cast<double>(cfg.rows);
  }
  return bands;
}

// Frequencies are stratified: per band, each gesture takes a distinct slot
// of the 1.5..6 cycle range (seeded permutation plus jitter), so any two
// gestures stay separated in every band.
std::vector<Ridge> gesture_ridges(const GeneratorConfig& cfg, int gesture) {
  const auto bands = ridge_bands(cfg);
  const auto n = static_cast<uint64_t>(cfg.n_gestures);
  std::vector<Ridge> ridges(bands.size());
  for (size_t j = 0; j < bands.size(); ++j) {
    std::vector<int64_t> slots(static_cast<size_t>(n));
    std::iota(slots.begin(), slots.end(), 0);
    CounterRng slot_rng(cfg.seed, "freq-slots", {static_cast<uint64_t>(j)});
    shuffle_indices(slots, slot_rng);

    CounterRng rng(cfg.seed, "template", {static_cast<uint64_t>(gesture), static_cast<uint64_t>(j)});
    Ridge& r = ridges[j];
    r.amp = rng.next_uniform(0.6, 1.0);
    r.row_center = bands[j].center;
    r.row_width = bands[j].width;
    const double slot = static_cast<double>(slots[static_cast<size_t>(gesture)]);
    r.freq = 1.5 + 4.5 * (slot + rng.next_uniform(0.1, 0.6)) / static_cast<double>(n);
    r.phase = rng.next_uniform(0.0, 2.0 * std::numbers::pi);
  }
  return ridges;
}

double template_value(const std::vector<Ridge>& ridges, double row, double tau) {
  double v = 0.0;
  for (const Ridge& r : ridges) {
    const double dz = (row - r.row_center) / r.row_width;
    v += r.amp * std::exp(-0.5 * dz * dz) * std::sin(2.0 * std::numbers::pi * r.freq * tau + r.phase);
  }
  return v;
}

// Static multipath landscape shared by every sample: a smooth low-frequency
// surface whose swing dominates the raw dynamic range. Because min-max
// normalization is anchored by this common background, gesture and domain
// components land at consistent post-normalization amplitudes regardless
// of which domain produced the sample.
struct BackgroundWave {
  double amp, row_freq, col_freq, row_phase, col_phase;
};

std::vector<BackgroundWave> background_waves(const GeneratorConfig& cfg) {
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<BackgroundWave> waves(2);
  for (size_t k = 0; k < waves.size(); ++k) {
    CounterRng rng(cfg.seed, "background", {static_cast<uint64_t>(k)});
    waves[k].amp = k == 0 ? 1.6 : 1.2;
    waves[k].row_freq = rng.next_uniform(0.7, 1.6);
    waves[k].col_freq = rng.next_uniform(0.7, 1.6);
    waves[k].row_phase = rng.next_uniform(0.0, two_pi);
    waves[k].col_phase = rng.next_uniform(0.0, two_pi);
  }
  return waves;
}

double background_value(const std::vector<BackgroundWave>& waves, double u, double tau) {
  const double two_pi = 2.0 * std::numbers::pi;
  double v = 0.0;
  for (const BackgroundWave& w : waves)
    v += w.amp * std::cos(two_pi * w.row_freq * u + w.row_phase) *
         std::cos(two_pi * w.col_freq * tau + w.col_phase);
  return v;
}

// Per-domain nuisances. The additive offset is a "ghost" ridge set drawn
// from the same family as the gesture templates: to a recognizer that has
// never seen the domain it is indistinguishable from gesture evidence,
// which is what makes the domain gap hurt. The gain vector is a smooth
// low-frequency row profile.
struct DomainEffect {
  std::vector<double> gain;  // per channel, multiplicative
  std::vector<Ridge> ghost;  // additive ridge field, constant per domain
  double warp;
};

DomainEffect domain_effect(const GeneratorConfig& cfg, int domain) {
  DomainEffect e;
  e.gain.resize(static_cast<size_t>(cfg.rows));
  const double two_pi = 2.0 * std::numbers::pi;

  CounterRng gain_rng(cfg.seed, "gain", {static_cast<uint64_t>(domain)});
  const double cycles = 1.0 + static_cast<double>(gain_rng.next_below(2));
  const double theta1 = gain_rng.next_uniform(0.0, two_pi);
  const double theta2 = gain_rng.next_uniform(0.0, two_pi);
  for (int64_t r = 0; r < cfg.rows; ++r) {
    const double u = static_cast<double>(r) / static_cast<double>(cfg.rows);
    e.gain[static_cast<size_t>(r)] =
        1.0 + cfg.gain_strength * (0.6 * std::cos(two_pi * cycles * u + theta1) +
                                   0.4 * std::cos(two_pi * (cycles + 1.0) * u + theta2));
  }

  // In-band ghosts: each gesture band carries two fixed carrier
  // frequencies shared by every domain; a domain is identified only by the
  // phases and by how its (constant) band energy splits between the two
  // carriers. The whole in-band family is a low-dimensional linear space,
  // so a domain classifier fitted on any subset of domains can express --
  // and a gradient step can cancel -- the field of a domain it never saw,
  // while nothing about a single held-out phase mixture is learnable as
  // "ignore this" by a recognizer that is never told about domains.
  const auto bands = ridge_bands(cfg);
  e.ghost.resize(2 * bands.size() + 4);
  for (size_t j = 0; j < bands.size(); ++j) {
    double carrier[2];
    for (int k = 0; k < 2; ++k) {
      CounterRng rng(cfg.seed, "ghost-freq", {static_cast<uint64_t>(j), static_cast<uint64_t>(k)});
      carrier[k] = k == 0 ? rng.next_uniform(1.8, 3.2) : rng.next_uniform(3.8, 5.6);
    }
    CounterRng rng(cfg.seed, "offset", {static_cast<uint64_t>(domain), static_cast<uint64_t>(j)});
    const double beta = rng.next_uniform(0.0, two_pi);
    for (int k = 0; k < 2; ++k) {
      Ridge& r = e.ghost[2 * j + static_cast<size_t>(k)];
      r.amp = cfg.offset_strength * 0.55 * (k == 0 ? std::cos(beta) : std::sin(beta));
      r.row_center = bands[j].center;
      r.row_width = bands[j].width;
      r.freq = carrier[k];
      r.phase = rng.next_uniform(0.0, two_pi);
    }
  }
  // Off-band components at random positions: extra domain evidence that
  // never collides with gesture bands.
  for (size_t j = 0; j < 4; ++j) {
    CounterRng rng(cfg.seed, "offset",
                   {static_cast<uint64_t>(domain), static_cast<uint64_t>(bands.size() + j)});
    Ridge& r = e.ghost[2 * bands.size() + j];
    r.amp = cfg.offset_strength * 0.3;
    r.row_center = rng.next_uniform(0.05, 0.95) * static_cast<double>(cfg.rows - 1);
    r.row_width = rng.next_uniform(0.05, 0.15) * static_cast<double>(cfg.rows);
    r.freq = rng.next_uniform(1.5, 6.0);
    r.phase = rng.next_uniform(0.0, two_pi);
  }

  CounterRng warp_rng(cfg.seed, "warp", {static_cast<uint64_t>(domain)});
  e.warp = 1.0 + cfg.warp_strength * warp_rng.next_uniform(-1.0, 1.0);
  return e;
}

}  // namespace

Dataset generate_dataset(const GeneratorConfig& cfg) {
  cfg.validate();
  Dataset ds;
  ds.rows = cfg.rows;
  ds.cols = cfg.cols;
  ds.n_gestures = cfg.n_gestures;
  ds.n_domains = cfg.n_domains;
  ds.seed = cfg.seed;
  ds.provenance = "synth-csi ridge generator v1";
  const int64_t total =
      static_cast<int64_t>(cfg.n_gestures) * cfg.n_domains * cfg.reps * cfg.rows * cfg.cols;
  ds.samples.reserve(static_cast<size_t>(total));

  const auto waves = background_waves(cfg);
  std::vector<float> buf(static_cast<size_t>(cfg.rows * cfg.cols));
  for (int g = 0; g < cfg.n_gestures; ++g) {
    const auto ridges = gesture_ridges(cfg, g);
    for (int d = 0; d < cfg.n_domains; ++d) {
      const auto effect = domain_effect(cfg, d);
      for (int rep = 0; rep < cfg.reps; ++rep) {
        CounterRng noise(cfg.seed, "noise",
                         {static_cast<uint64_t>(g), static_cast<uint64_t>(d),
                          static_cast<uint64_t>(rep)});
        size_t i = 0;
        for (int64_t r = 0; r < cfg.rows; ++r) {
          const double gain = effect.gain[static_cast<size_t>(r)];
          const double u = static_cast<double>(r) / static_cast<double>(cfg.rows - 1);
          for (int64_t t = 0; t < cfg.cols; ++t, ++i) {
            const double tau = static_cast<double>(t) / static_cast<double>(cfg.cols - 1);
            double v = background_value(waves, u, tau) +
                       gain * template_value(ridges, static_cast<double>(r), tau * effect.warp) +
                       template_value(effect.ghost, static_cast<double>(r), tau);
            if (cfg.noise_sigma > 0) v += cfg.noise_sigma * noise.next_normal();
            buf[i] = static_cast<float>(v);
          }
        }
        minmax_normalize(buf);
        ds.append(buf, static_cast<uint16_t>(d), static_cast<uint16_t>(g));
      }
    }
  }
  return ds;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, const SplitProtocol& protocol) {
  ds.validate();
  std::vector<char> in_test(static_cast<size_t>(ds.count()), 0);

  if (const auto* lodo = std::get_if<LodoSplit>(&protocol)) {
    if (lodo->held_domain < 0 || lodo->held_domain >= ds.n_domains)
      throw ConfigError("split: held domain " + std::to_string(lodo->held_domain) +
                        " out of range [0," + std::to_string(ds.n_domains) + ")");
    for (int64_t i = 0; i < ds.count(); ++i)
      in_test[static_cast<size_t>(i)] = (ds.domains[static_cast<size_t>(i)] == lodo->held_domain);
  } else {
    const auto& mixed = std::get<MixedSplit>(protocol);
    if (!(mixed.train_frac > 0.0 && mixed.train_frac < 1.0))
      throw ConfigError("split: train fraction must lie in (0,1)");
    // indices per (gesture, domain) cell, seeded shuffle, head goes to train
    for (int g = 0; g < ds.n_gestures; ++g) {
      for (int d = 0; d < ds.n_domains; ++d) {
        std::vector<int64_t> cell;
        for (int64_t i = 0; i < ds.count(); ++i)
          if (ds.gestures[static_cast<size_t>(i)] == g && ds.domains[static_cast<size_t>(i)] == d)
            cell.push_back(i);
        if (cell.empty()) continue;
        CounterRng rng(mixed.seed, "split", {static_cast<uint64_t>(g), static_cast<uint64_t>(d)});
        shuffle_indices(cell, rng);
        const auto n_train = static_cast<size_t>(
            std::llround(mixed.train_frac * static_cast<double>(cell.size())));
        for (size_t j = n_train; j < cell.size(); ++j)
          in_test[static_cast<size_t>(cell[j])] = 1;
      }
    }
  }

  Dataset train = ds.like();
  Dataset test = ds.like();
  for (int64_t i = 0; i < ds.count(); ++i) {
    Dataset& side = in_test[static_cast<size_t>(i)] ? test : train;
    side.append(ds.sample(i), ds.domains[static_cast<size_t>(i)], ds.gestures[static_cast<size_t>(i)]);
  }
  if (train.count() == 0 || test.count() == 0)
    throw ConfigError("split: a side is empty (train " + std::to_string(train.count()) +
                      ", test " + std::to_string(test.count()) + ")");
  return {std::move(train), std::move(test)};
}

}  // namespace di
