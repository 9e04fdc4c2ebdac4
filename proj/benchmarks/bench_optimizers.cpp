#include <benchmark/benchmark.h>

#include <vector>

#include "lehi/optimizers.hpp"
#include "lehi/rng.hpp"

namespace {

template <lehi::OptimizerKind Kind>
void BM_Step(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  lehi::SeededRng rng(4);
  std::vector<lehi::DenseMatrix> w{lehi::rng_normal(rng, n, 1, 1.0)};
  const std::vector<lehi::DenseMatrix> g{lehi::rng_normal(rng, n, 1, 1.0)};
  const std::vector<lehi::DenseMatrix> ga{lehi::rng_normal(rng, n, 1, 1.0)};
  auto st = lehi::OptimizerState::zeros_like(Kind, std::span<const lehi::DenseMatrix>(w));
  lehi::HyperParams hp = lehi::HyperParams::defaults_for(Kind);
  hp.alpha = 1e-6;
  std::vector<lehi::DenseMatrix*> ptrs{&w[0]};
  for (auto _ : state) {
    if constexpr (Kind == lehi::OptimizerKind::adam) lehi::adam_step(st, hp, ptrs, g);
    else if constexpr (Kind == lehi::OptimizerKind::adamw) lehi::adamw_step(st, hp, ptrs, g);
    else if constexpr (Kind == lehi::OptimizerKind::lehi) lehi::lehi_step(st, hp, ptrs, g, ga);
    else lehi::lehibrid_step(st, hp, ptrs, g, ga);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Step<lehi::OptimizerKind::adam>)->Arg(1101)->Arg(1 << 16);
BENCHMARK(BM_Step<lehi::OptimizerKind::adamw>)->Arg(1101)->Arg(1 << 16);
BENCHMARK(BM_Step<lehi::OptimizerKind::lehi>)->Arg(1101)->Arg(1 << 16);
BENCHMARK(BM_Step<lehi::OptimizerKind::lehibrid>)->Arg(1101)->Arg(1 << 16);

}  // namespace
