#include <benchmark/benchmark.h>

#include "lehi/numcore.hpp"
#include "lehi/rng.hpp"

namespace {

lehi::DenseMatrix filled(std::size_t r, std::size_t c, std::uint64_t seed) {
  lehi::SeededRng rng(seed);
  return lehi::rng_normal(rng, r, c, 1.0);
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = filled(n, n, 1), b = filled(n, n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(lehi::matmul(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * n * n * n));
}
BENCHMARK(BM_Matmul)->RangeMultiplier(2)->Range(16, 256);

void BM_MatmulTN(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = filled(n, 128, 1), b = filled(n, 128, 2);
  for (auto _ : state) benchmark::DoNotOptimize(lehi::matmul_tn(a, b));
}
BENCHMARK(BM_MatmulTN)->Arg(9)->Arg(100);

void BM_MatmulNT(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = filled(n, 128, 1), b = filled(9, 128, 2);
  for (auto _ : state) benchmark::DoNotOptimize(lehi::matmul_nt(a, b));
}
BENCHMARK(BM_MatmulNT)->Arg(100);

}  // namespace
