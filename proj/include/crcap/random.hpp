#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace crcap {

/// xoshiro256** seeded through splitmix64. Models UniformRandomBitGenerator.
///
/// Streams are addressed by (seed, index): every Monte Carlo drop owns the
/// stream for its index, so results do not depend on how drops are split
/// across workers.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed, std::uint64_t index = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard Gaussian via the Marsaglia polar method. Explicit transforms
  /// (rather than std:: distributions) keep streams identical across
  /// standard library implementations.
  double normal();
  /// Unit-mean exponential.
  double exponential();

 private:
  std::array<std::uint64_t, 4> state_{};
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace crcap
