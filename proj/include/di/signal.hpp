#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "di/dataset.hpp"

namespace di {

// One time-step of channel measurements across the link-subcarrier grid.
struct CsiFrame {
  int64_t timestamp = 0;
  std::vector<std::complex<float>> values;  // L links x S subcarriers, flattened
};

struct KalmanParams {
  double process_variance = 1e-5;    // q
  double measurement_variance = 1e-2;  // r
  double initial_variance = 1.0;     // p0

  void validate() const {
    if (!(process_variance > 0) || !(measurement_variance > 0) || !(initial_variance > 0))
      throw ConfigError("kalman: q, r and p0 must all be positive");
  }
};

// Elementwise |z| for one frame.
std::vector<float> amplitude(const CsiFrame& frame);

// Scalar random-walk Kalman filter. The first output equals the first
// measurement (the prior is seeded from it).
std::vector<float> kalman_denoise(const std::vector<float>& series, const KalmanParams& params);

// Full acquisition pipeline: amplitude -> per-channel Kalman denoising ->
// linear resampling to `target_cols` time steps -> per-sample min-max
// normalization. Returns a rows x cols matrix, rows = channel count.
// Requires at least 2 frames.
std::vector<float> frame_stream_to_sample(const std::vector<CsiFrame>& frames,
                                          const KalmanParams& params, int64_t target_cols);

// Newline-delimited JSON records {"t": int, "re": [...], "im": [...]},
// constant array lengths. Returns frames sorted by timestamp. Malformed
// lines and inconsistent lengths raise ConfigError naming the line.
std::vector<CsiFrame> import_ndjson(const std::string& path);

}  // namespace di
