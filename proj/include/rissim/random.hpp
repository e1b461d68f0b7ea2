#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace rissim {

/// Mixes a 64-bit value (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t value) noexcept;

/// Deterministic seed for a named sub-stream, e.g. derive_seed(run_seed, {episode, hour, stream}).
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) noexcept;

/// Seeded pseudo-random stream. Identical seeds yield identical draw sequences.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
  }

  /// Circularly-symmetric complex Gaussian CN(0, 1): each component has variance 1/2.
  std::complex<double> complex_normal() {
    const double re = normal_(engine_);
    const double im = normal_(engine_);
    return {re * kHalfSqrt, im * kHalfSqrt};
  }

 private:
  static constexpr double kHalfSqrt = 0.70710678118654752440;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace rissim
