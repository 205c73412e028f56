#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <vector>

namespace di {

// SplitMix64 finalizer. All randomness in the project flows through this
// mix so that streams are reproducible from (seed, stream key, counter)
// alone and independent of call order.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// FNV-1a over a string, used to derive stream keys from short tags.
inline uint64_t hash_tag(const char* tag) {
  uint64_t h = 0xCBF29CE484222325ULL;
  for (const char* p = tag; *p; ++p) {
    h ^= static_cast<uint64_t>(static_cast<unsigned char>(*p));
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Counter-based generator: key = splitmix-fold of (seed, tag, ids...),
// output i = splitmix64(key + i). Streams with distinct keys are
// independent, and any value can be regenerated without replaying the
// sequence.
class CounterRng {
public:
  CounterRng(uint64_t seed, const char* tag, std::initializer_list<uint64_t> ids = {}) {
    key_ = splitmix64(seed ^ hash_tag(tag));
    for (uint64_t id : ids) key_ = splitmix64(key_ ^ (id + 0x9E3779B97F4A7C15ULL));
  }

  uint64_t next_u64() { return splitmix64(key_ + counter_++); }

  // Uniform in [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // Unbiased-enough index draw via 128-bit multiply (fixed algorithm, no
  // rejection loop, so the consumed stream length is input-independent).
  uint64_t next_below(uint64_t n) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Standard normal via Box-Muller; the second deviate is cached.
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    double u2 = next_unit();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

private:
  uint64_t key_ = 0;
  uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Fisher-Yates with a fixed draw order.
inline void shuffle_indices(std::vector<int64_t>& idx, CounterRng& rng) {
  for (int64_t i = static_cast<int64_t>(idx.size()) - 1; i > 0; --i) {
    uint64_t j = rng.next_below(static_cast<uint64_t>(i + 1));
    std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
  }
}

}  // namespace di
