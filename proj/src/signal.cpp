#include "di/signal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

namespace di {

std::vector<float> amplitude(const CsiFrame& frame) {
  std::vector<float> out(frame.values.size());
  for (size_t i = 0; i < frame.values.size(); ++i) {
    const auto& z = frame.values[i];
    out[i] = std::sqrt(z.real() * z.real() + z.imag() * z.imag());
  }
  return out;
}

std::vector<float> kalman_denoise(const std::vector<float>& series, const KalmanParams& params) {
  params.validate();
  if (series.empty()) throw ConfigError("kalman_denoise: series is empty");
  std::vector<float> out(series.size());
  double estimate = series[0];
  double variance = params.initial_variance;
  out[0] = series[0];
  for (size_t i = 1; i < series.size(); ++i) {
    variance += params.process_variance;  // random-walk predict
    const double gain = variance / (variance + params.measurement_variance);
    estimate += gain * (static_cast<double>(series[i]) - estimate);
    variance *= (1.0 - gain);
    out[i] = static_cast<float>(estimate);
  }
  return out;
}

std::vector<float> frame_stream_to_sample(const std::vector<CsiFrame>& frames,
                                          const KalmanParams& params, int64_t target_cols) {
  if (frames.size() < 2) throw ConfigError("frame_stream_to_sample: need at least 2 frames");
  if (target_cols < 2) throw ConfigError("frame_stream_to_sample: target column count must be >= 2");
  const int64_t channels = static_cast<int64_t>(frames[0].values.size());
  if (channels == 0) throw ConfigError("frame_stream_to_sample: frames carry no values");
  for (const auto& f : frames)
    if (static_cast<int64_t>(f.values.size()) != channels)
      throw ShapeError("frame_stream_to_sample: inconsistent frame widths");

  const int64_t n_frames = static_cast<int64_t>(frames.size());
  std::vector<std::vector<float>> amps(static_cast<size_t>(n_frames));
  for (int64_t t = 0; t < n_frames; ++t) amps[static_cast<size_t>(t)] = amplitude(frames[t]);

  std::vector<float> sample(static_cast<size_t>(channels * target_cols));
  std::vector<float> series(static_cast<size_t>(n_frames));
  for (int64_t c = 0; c < channels; ++c) {
    for (int64_t t = 0; t < n_frames; ++t) series[static_cast<size_t>(t)] = amps[static_cast<size_t>(t)][static_cast<size_t>(c)];
    const std::vector<float> denoised = kalman_denoise(series, params);
    // linear resampling onto target_cols points spanning the stream
    for (int64_t j = 0; j < target_cols; ++j) {
      const double pos = static_cast<double>(j) * static_cast<double>(n_frames - 1) /
                         static_cast<double>(target_cols - 1);
      const int64_t lo = static_cast<int64_t>(pos);
      const int64_t hi = std::min(lo + 1, n_frames - 1);
      const double frac = pos - static_cast<double>(lo);
      const double v = (1.0 - frac) * denoised[static_cast<size_t>(lo)] +
                       frac * denoised[static_cast<size_t>(hi)];
      sample[static_cast<size_t>(c * target_cols + j)] = static_cast<float>(v);
    }
  }
  minmax_normalize(sample);
  return sample;
}

std::vector<CsiFrame> import_ndjson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("import_ndjson: cannot open " + path);
  std::vector<CsiFrame> frames;
  std::string line;
  int64_t line_no = 0;
  int64_t expected = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("import_ndjson: line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!rec.contains("t") || !rec.contains("re") || !rec.contains("im") ||
        !rec["re"].is_array() || !rec["im"].is_array())
      throw ConfigError("import_ndjson: line " + std::to_string(line_no) +
                        ": expected fields t, re[], im[]");
    const auto& re = rec["re"];
    const auto& im = rec["im"];
    if (re.size() != im.size())
      throw ConfigError("import_ndjson: line " + std::to_string(line_no) +
                        ": re/im length mismatch (" + std::to_string(re.size()) + " vs " +
                        std::to_string(im.size()) + ")");
    if (expected < 0) expected = static_cast<int64_t>(re.size());
    if (static_cast<int64_t>(re.size()) != expected)
      throw ConfigError("import_ndjson: line " + std::to_string(line_no) +
                        ": inconsistent array length (" + std::to_string(re.size()) +
                        ", expected " + std::to_string(expected) + ")");
    CsiFrame frame;
    frame.timestamp = rec["t"].get<int64_t>();
    frame.values.resize(re.size());
    for (size_t i = 0; i < re.size(); ++i) {
      const float r = re[i].get<float>();
      const float m = im[i].get<float>();
      if (!std::isfinite(r) || !std::isfinite(m))
        throw ConfigError("import_ndjson: line " + std::to_string(line_no) +
                          ": non-finite component");
      frame.values[i] = {r, m};
    }
    frames.push_back(std::move(frame));
  }
  std::stable_sort(frames.begin(), frames.end(),
                   [](const CsiFrame& a, const CsiFrame& b) { return a.timestamp < b.timestamp; });
  return frames;
}

}  // namespace di
