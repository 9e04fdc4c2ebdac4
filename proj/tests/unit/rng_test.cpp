#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lehi/rng.hpp"

using namespace lehi;

TEST_CASE("SplitMix64 golden stream") {
  SeededRng a(0);
  CHECK(a.next_u64() == 0xe220a8397b1dcdafULL);
  CHECK(a.next_u64() == 0x6e789e6aa1b965f4ULL);
  CHECK(a.next_u64() == 0x06c45d188009454fULL);
  CHECK(a.next_u64() == 0xf88bb8a8724c81ecULL);
  SeededRng b(42);
  CHECK(b.next_u64() == 0xbdd732262feb6e95ULL);
  CHECK(b.next_u64() == 0x28efe333b266f103ULL);
}

TEST_CASE("same seed gives bit-identical normal matrices") {
  SeededRng a(0), b(0);
  CHECK(rng_normal(a, 17, 5, 1.0) == rng_normal(b, 17, 5, 1.0));
}

TEST_CASE("rng_normal moments") {
  SeededRng rng(3);
  const auto m = rng_normal(rng, 1000, 1000, 1.0);
  double mean = 0.0;
  for (double x : m.data()) mean += x;
  mean /= static_cast<double>(m.size());
  CHECK(std::fabs(mean) < 0.01);

  SeededRng rng2(4);
  const auto h = rng_normal(rng2, 1000, 1000, 0.5);
  double mu = 0.0, var = 0.0;
  for (double x : h.data()) mu += x;
  mu /= static_cast<double>(h.size());
  for (double x : h.data()) var += (x - mu) * (x - mu);
  var /= static_cast<double>(h.size() - 1);
  CHECK(var >= 0.245);
  CHECK(var <= 0.255);
}

TEST_CASE("rng_normal rejects non-positive stddev") {
  SeededRng rng(0);
  CHECK_THROWS_AS(rng_normal(rng, 2, 2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(rng_normal(rng, 2, 2, -1.0), std::invalid_argument);
}

TEST_CASE("uniform range and below bound") {
  SeededRng rng(11);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(rng.below(7) < 7u);
  }
}

TEST_CASE("fork depends only on seed and stream") {
  SeededRng a(5), b(5);
  for (int i = 0; i < 10; ++i) a.next_u64();
  auto fa = a.fork(3), fb = b.fork(3);
  CHECK(fa.next_u64() == fb.next_u64());
  CHECK(b.fork(3).next_u64() != b.fork(4).next_u64());
}

TEST_CASE("permutation is a permutation") {
  SeededRng rng(12);
  auto p = rng.permutation(1000);
  std::sort(p.begin(), p.end());
  std::vector<std::size_t> id(1000);
  std::iota(id.begin(), id.end(), 0);
  CHECK(p == id);
}
