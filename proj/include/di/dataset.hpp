#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "di/errors.hpp"

namespace di {

// Scale a sample to [0,1] by its global min/max. A degenerate sample
// (max == min) maps to all zeros.
inline void minmax_normalize(std::span<float> values) {
  if (values.empty()) return;
  float lo = values[0], hi = values[0];
  for (float v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi == lo) {
    for (float& v : values) v = 0.0f;
    return;
  }
  const float scale = 1.0f / (hi - lo);
  for (float& v : values) v = (v - lo) * scale;
}

// A labeled collection of amplitude samples with a shared (rows x cols)
// shape. Samples are stored flat, row-major, in dataset order; labels are
// parallel arrays. `domains[i] < n_domains`, `gestures[i] < n_gestures`.
struct Dataset {
  int64_t rows = 0;
  int64_t cols = 0;
  int n_gestures = 0;
  int n_domains = 0;
  uint64_t seed = 0;
  std::string provenance;

  std::vector<float> samples;      // count * rows * cols
  std::vector<uint16_t> domains;   // count
  std::vector<uint16_t> gestures;  // count

  int64_t count() const { return static_cast<int64_t>(domains.size()); }
  int64_t sample_size() const { return rows * cols; }

  std::span<const float> sample(int64_t i) const {
    return std::span<const float>(samples.data() + i * sample_size(),
                                  static_cast<size_t>(sample_size()));
  }
  std::span<float> sample(int64_t i) {
    return std::span<float>(samples.data() + i * sample_size(),
                            static_cast<size_t>(sample_size()));
  }

  void validate() const {
    if (rows < 1 || cols < 1) throw ShapeError("dataset: sample shape must be positive");
    if (n_gestures < 1 || n_domains < 1) throw ShapeError("dataset: M and N must be >= 1");
    if (gestures.size() != domains.size()) throw ShapeError("dataset: label arrays disagree");
    if (static_cast<int64_t>(samples.size()) != count() * sample_size())
      throw ShapeError("dataset: sample payload size mismatch");
    for (uint16_t d : domains)
      if (d >= n_domains) throw ShapeError("dataset: domain label out of range");
    for (uint16_t g : gestures)
      if (g >= n_gestures) throw ShapeError("dataset: gesture label out of range");
  }

  // Empty shell sharing this dataset's metadata.
  Dataset like() const {
    Dataset d;
    d.rows = rows;
    d.cols = cols;
    d.n_gestures = n_gestures;
    d.n_domains = n_domains;
    d.seed = seed;
    d.provenance = provenance;
    return d;
  }

  void append(std::span<const float> sample_values, uint16_t domain, uint16_t gesture) {
    samples.insert(samples.end(), sample_values.begin(), sample_values.end());
    domains.push_back(domain);
    gestures.push_back(gesture);
  }
};

}  // namespace di
