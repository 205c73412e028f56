#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "di/rng.hpp"
#include "di/signal.hpp"

using di::CounterRng;
using di::CsiFrame;
using di::KalmanParams;

namespace {

CsiFrame frame_of(int64_t t, std::vector<std::complex<float>> vals) {
  CsiFrame f;
  f.timestamp = t;
  f.values = std::move(vals);
  return f;
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& contents)
      : path("/tmp/di_signal_" + name) {
    std::ofstream out(path, std::ios::binary);
    out << contents;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

double variance(const std::vector<float>& xs, double center) {
  double acc = 0.0;
  for (float x : xs) acc += (x - center) * (x - center);
  return acc / static_cast<double>(xs.size());
}

}  // namespace

TEST_CASE("amplitude is the elementwise modulus") {
  auto amp = di::amplitude(frame_of(0, {{3, 4}, {0, 0}, {1, 0}, {0, -2}}));
  REQUIRE(amp.size() == 4);
  CHECK(amp[0] == doctest::Approx(5));
  CHECK(amp[1] == doctest::Approx(0));
  CHECK(amp[2] == doctest::Approx(1));
  CHECK(amp[3] == doctest::Approx(2));
}

TEST_CASE("amplitude is non-negative and conjugation-invariant") {
  CounterRng rng(21, "amp");
  std::vector<std::complex<float>> vals, conj;
  for (int i = 0; i < 64; ++i) {
    float re = static_cast<float>(rng.next_uniform(-5, 5));
    float im = static_cast<float>(rng.next_uniform(-5, 5));
    vals.emplace_back(re, im);
    conj.emplace_back(re, -im);
  }
  auto a = di::amplitude(frame_of(0, vals));
  auto b = di::amplitude(frame_of(0, conj));
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] >= 0.0f);
    CHECK(a[i] == b[i]);
  }
}

TEST_CASE("kalman converges on a constant series") {
  KalmanParams params;
  std::vector<float> series(100, 5.0f);
  auto out = di::kalman_denoise(series, params);
  REQUIRE(out.size() == series.size());
  CHECK(out.front() == 5.0f);  // prior seeded from first measurement
  CHECK(std::abs(out.back() - 5.0) < 1e-3);
}

TEST_CASE("kalman error decays monotonically toward a constant") {
  // perturbed start, then constant: the estimate walks back to 5
  KalmanParams params;
  std::vector<float> series(100, 5.0f);
  series[0] = 0.0f;
  auto out = di::kalman_denoise(series, params);
  for (size_t i = 1; i < out.size(); ++i)
    CHECK(std::abs(out[i] - 5.0f) <= std::abs(out[i - 1] - 5.0f) + 1e-7f);
  CHECK(std::abs(out.back() - 5.0f) < 0.01f);
}

TEST_CASE("kalman single-sample and empty series") {
  KalmanParams params;
  auto one = di::kalman_denoise({7.0f}, params);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == 7.0f);
  CHECK_THROWS_AS(di::kalman_denoise({}, params), di::ConfigError);
}

TEST_CASE("kalman parameters must be positive") {
  KalmanParams params;
  params.process_variance = 0.0;
  CHECK_THROWS_AS(params.validate(), di::ConfigError);
  params.process_variance = 1e-5;
  params.measurement_variance = -1.0;
  CHECK_THROWS_AS(params.validate(), di::ConfigError);
  params.measurement_variance = 1e-2;
  params.initial_variance = 0.0;
  CHECK_THROWS_AS(params.validate(), di::ConfigError);
}

TEST_CASE("kalman removes at least half the noise variance") {
  KalmanParams params;
  CounterRng rng(42, "kalman-noise");
  std::vector<float> noisy(10000);
  for (auto& v : noisy) v = static_cast<float>(5.0 + rng.next_normal());
  auto filtered = di::kalman_denoise(noisy, params);
  const double in_var = variance(noisy, 5.0);
  const double out_var = variance(filtered, 5.0);
  CHECK(in_var > 0.8);  // sanity: the input really is sigma ~ 1
  CHECK(out_var <= 0.5 * in_var);
}

TEST_CASE("frame stream with constant channels normalizes to [0,1]") {
  // 3 channels with constant values 1, 2, 3; min-max over the sample
  // maps them to 0, 0.5, 1 and each row stays constant.
  std::vector<CsiFrame> frames;
  for (int t = 0; t < 16; ++t)
    frames.push_back(frame_of(t, {{1, 0}, {2, 0}, {3, 0}}));
  KalmanParams params;
  auto sample = di::frame_stream_to_sample(frames, params, 8);
  REQUIRE(sample.size() == 3 * 8);
  float lo = sample[0], hi = sample[0];
  for (float v : sample) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo == 0.0f);
  CHECK(hi == 1.0f);
  for (int64_t r = 0; r < 3; ++r)
    for (int64_t c = 1; c < 8; ++c)
      CHECK(sample[static_cast<size_t>(r * 8 + c)] ==
            sample[static_cast<size_t>(r * 8)]);
  CHECK(sample[0] == doctest::Approx(0.0f));
  CHECK(sample[2 * 8] == doctest::Approx(1.0f));
}

TEST_CASE("frame stream resamples 2T frames to T columns") {
  std::vector<CsiFrame> frames;
  CounterRng rng(31, "resample");
  for (int t = 0; t < 64; ++t) {
    std::vector<std::complex<float>> vals;
    for (int ch = 0; ch < 2; ++ch)
      vals.emplace_back(static_cast<float>(rng.next_uniform(0.5, 2.0)), 0.0f);
    frames.push_back(frame_of(t, std::move(vals)));
  }
  auto sample = di::frame_stream_to_sample(frames, KalmanParams{}, 32);
  CHECK(sample.size() == 2 * 32);
}

TEST_CASE("frame stream rejects fewer than two frames") {
  std::vector<CsiFrame> one = {frame_of(0, {{1, 0}})};
  CHECK_THROWS_AS(di::frame_stream_to_sample(one, KalmanParams{}, 8), di::ConfigError);
  CHECK_THROWS_AS(di::frame_stream_to_sample({}, KalmanParams{}, 8), di::ConfigError);
}

TEST_CASE("frame stream output is deterministic") {
  auto build = [] {
    CounterRng rng(55, "det-stream");
    std::vector<CsiFrame> frames;
    for (int t = 0; t < 40; ++t) {
      std::vector<std::complex<float>> vals;
      for (int ch = 0; ch < 6; ++ch)
        vals.emplace_back(static_cast<float>(rng.next_uniform(0, 3)),
                          static_cast<float>(rng.next_uniform(-1, 1)));
      frames.push_back(frame_of(t, std::move(vals)));
    }
    return di::frame_stream_to_sample(frames, KalmanParams{}, 16);
  };
  auto a = build();
  auto b = build();
  REQUIRE(a.size() == b.size());
  CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0);
}

TEST_CASE("normalization is idempotent on normalized samples") {
  // A sample already min-max normalized (min 0, max 1, constant channels)
  // passes through the pipeline unchanged when denoising is effectively off.
  KalmanParams gentle;
  gentle.process_variance = 1e6;  // filter trusts each measurement fully
  std::vector<CsiFrame> frames;
  for (int t = 0; t < 8; ++t)
    frames.push_back(frame_of(t, {{0, 0}, {0.25f, 0}, {1, 0}}));
  auto once = di::frame_stream_to_sample(frames, gentle, 8);
  std::vector<CsiFrame> again;
  for (int t = 0; t < 8; ++t) {
    std::vector<std::complex<float>> vals;
    for (int r = 0; r < 3; ++r) vals.emplace_back(once[static_cast<size_t>(r * 8 + t)], 0.0f);
    again.push_back(frame_of(t, std::move(vals)));
  }
  auto twice = di::frame_stream_to_sample(again, gentle, 8);
  for (size_t i = 0; i < once.size(); ++i) CHECK(twice[i] == doctest::Approx(once[i]).epsilon(1e-5));
}

TEST_CASE("degenerate stream maps to all zeros instead of dividing by zero") {
  std::vector<CsiFrame> frames;
  for (int t = 0; t < 8; ++t) frames.push_back(frame_of(t, {{2, 0}, {2, 0}}));
  auto sample = di::frame_stream_to_sample(frames, KalmanParams{}, 8);
  for (float v : sample) CHECK(v == 0.0f);
}

TEST_CASE("ndjson import parses and sorts by timestamp") {
  TempFile file("ok.ndjson",
                "{\"t\": 2, \"re\": [1, 2], \"im\": [0, 0]}\n"
                "{\"t\": 0, \"re\": [3, 4], \"im\": [1, 1]}\n"
                "{\"t\": 1, \"re\": [5, 6], \"im\": [2, 2]}\n");
  auto frames = di::import_ndjson(file.path);
  REQUIRE(frames.size() == 3);
  CHECK(frames[0].timestamp == 0);
  CHECK(frames[1].timestamp == 1);
  CHECK(frames[2].timestamp == 2);
  CHECK(frames[0].values[0] == std::complex<float>(3, 1));
  CHECK(frames[2].values[1] == std::complex<float>(2, 0));
}

TEST_CASE("ndjson import errors name the offending line") {
  TempFile bad("bad.ndjson",
               "{\"t\": 0, \"re\": [1], \"im\": [0]}\n"
               "not json at all\n");
  try {
    di::import_ndjson(bad.path);
    FAIL("expected ConfigError");
  } catch (const di::ConfigError& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }

  TempFile mismatch("mismatch.ndjson",
                    "{\"t\": 0, \"re\": [1, 2], \"im\": [0]}\n");
  try {
    di::import_ndjson(mismatch.path);
    FAIL("expected ConfigError");
  } catch (const di::ConfigError& e) {
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }

  TempFile uneven("uneven.ndjson",
                  "{\"t\": 0, \"re\": [1, 2], \"im\": [0, 0]}\n"
                  "{\"t\": 1, \"re\": [1], \"im\": [0]}\n");
  CHECK_THROWS_AS(di::import_ndjson(uneven.path), di::ConfigError);
}

TEST_CASE("ndjson import of an empty file yields no frames") {
  TempFile empty("empty.ndjson", "");
  auto frames = di::import_ndjson(empty.path);
  CHECK(frames.empty());
  CHECK_THROWS_AS(di::import_ndjson("/tmp/di_signal_definitely_missing.ndjson"),
                  di::ConfigError);
}
