#include "lehi/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lehi {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t SeededRng::next_u64() noexcept {
  state_ += kGolden;
  return mix64(state_);
}

double SeededRng::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t SeededRng::below(std::uint64_t bound) noexcept {
  // Rejection on the top of the range removes modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % bound;
}

double SeededRng::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(theta);
  has_spare_ = true;
  return radius * std::cos(theta);
}

SeededRng SeededRng::fork(std::uint64_t stream) const noexcept {
  return SeededRng(mix64(seed_ ^ mix64(stream + kGolden)));
}

std::vector<std::size_t> SeededRng::permutation(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(below(i));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

DenseMatrix rng_normal(SeededRng& rng, std::size_t rows, std::size_t cols, double stddev) {
  if (!(stddev > 0.0)) throw std::invalid_argument("rng_normal: stddev must be positive");
  DenseMatrix m(rows, cols);
  for (double& x : m.data()) x = stddev * rng.normal();
  return m;
}

}  // namespace lehi
