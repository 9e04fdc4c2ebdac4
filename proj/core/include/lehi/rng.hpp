#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lehi/numcore.hpp"

namespace lehi {

/// SplitMix64 generator (Steele, Lea & Flood 2014).
///
/// The state is a 64-bit counter advanced by the golden-ratio increment
/// 0x9E3779B97F4A7C15; each output is the counter passed through the
/// finalizer with multipliers 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB.
/// Everything derived from it (uniforms, normals, shuffles) is implemented
/// here rather than through <random> distributions, whose output differs
/// between standard libraries. The stream for a seed is therefore identical
/// on every platform.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) noexcept : seed_(seed), state_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() noexcept;
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Unbiased integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept;
  /// Standard normal via the Box-Muller transform; the second variate of
  /// each pair is cached for the next call.
  double normal() noexcept;

  /// Independent generator for a numbered sub-stream. Depends only on
  /// (seed, stream), never on how far this generator has advanced.
  SeededRng fork(std::uint64_t stream) const noexcept;

  /// Fisher-Yates permutation of 0..n-1.
  std::vector<std::size_t> permutation(std::size_t n);

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// rows x cols matrix of N(0, stddev^2) draws. Throws std::invalid_argument if stddev <= 0.
DenseMatrix rng_normal(SeededRng& rng, std::size_t rows, std::size_t cols, double stddev);

/// The SplitMix64 output finalizer, exposed for hashing seeds together.
std::uint64_t mix64(std::uint64_t z) noexcept;

}  // namespace lehi
