#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace chaosdesign {

/// Seeded 64-bit Mersenne Twister stream. Every sampler takes one by
/// reference; parallel work gets its own stream through split_seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return unit_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit_(engine_); }
  double normal() { return gauss_(engine_); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
  }
  std::uint64_t bits() { return engine_(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> gauss_{0.0, 1.0};
};

/// Domain-separated stream seed: splitmix64(master XOR splitmix64(fnv1a(label))).
/// Stable across platforms and releases; test vectors pin it.
std::uint64_t split_seed(std::uint64_t master, std::string_view label);

std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace chaosdesign
