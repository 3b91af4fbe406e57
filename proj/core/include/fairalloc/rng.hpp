#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>

namespace fairalloc {

/// Seeded random stream with explicit transforms. std::mt19937_64 output is
/// pinned by the standard and none of the derived draws go through
/// implementation-defined <random> distributions, so a (seed, draw index)
/// pair yields the same value on every platform.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller (two uniforms per draw).
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Index in [0, n). Modulo bias is < n / 2^64, irrelevant at catalog sizes.
  std::size_t uniform_index(std::size_t n) {
    return static_cast<std::size_t>(gen_() % static_cast<std::uint64_t>(n));
  }

  /// One categorical draw by inverse-CDF walk over prob (assumed to sum to 1).
  std::size_t categorical(std::span<const double> prob) {
    const double u = uniform();
    double cum = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < prob.size(); ++i) {
      if (prob[i] > 0.0) last_positive = i;
      cum += prob[i];
      if (u < cum) return i;
    }
    return last_positive;  // guard against rounding in the final bin
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace fairalloc
