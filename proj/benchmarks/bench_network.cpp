#include <benchmark/benchmark.h>

#include "lehi/losses.hpp"
#include "lehi/network.hpp"

namespace {

struct Setup {
  lehi::MlpModel model;
  lehi::DenseMatrix x, y;
};

// The 9-100-1 regression network on one minibatch.
Setup make(std::size_t batch) {
  lehi::SeededRng rng(3);
  Setup s{lehi::MlpModel::initialize({9, 100, 1}, rng), lehi::rng_normal(rng, 9, batch, 1.0),
          lehi::rng_normal(rng, 1, batch, 1.0)};
  return s;
}

void BM_Forward(benchmark::State& state) {
  const auto s = make(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(lehi::forward(s.model, s.x));
}
BENCHMARK(BM_Forward)->Arg(128)->Arg(1024);

void BM_Backward(benchmark::State& state) {
  const auto s = make(static_cast<std::size_t>(state.range(0)));
  const lehi::LossPair pair{lehi::LossKind::mse, 1.0};
  const auto cache = lehi::forward(s.model, s.x);
  const auto seed = lehi::primary_seed(pair, cache.outputs, s.y);
  for (auto _ : state) benchmark::DoNotOptimize(lehi::backward_seeded(s.model, cache, seed));
}
BENCHMARK(BM_Backward)->Arg(128);

// One forward plus two backward passes, the per-step cost of LEHI.
void BM_DualBackward(benchmark::State& state) {
  const auto s = make(static_cast<std::size_t>(state.range(0)));
  const lehi::LossPair pair{lehi::LossKind::mse, 1.0};
  for (auto _ : state) {
    const auto cache = lehi::forward(s.model, s.x);
    benchmark::DoNotOptimize(lehi::dual_backward(s.model, cache, lehi::primary_seed(pair, cache.outputs, s.y),
                                                 lehi::aux_seed(pair, cache.outputs, s.y)));
  }
}
BENCHMARK(BM_DualBackward)->Arg(128);

void BM_SingleBackwardStep(benchmark::State& state) {
  const auto s = make(static_cast<std::size_t>(state.range(0)));
  const lehi::LossPair pair{lehi::LossKind::mse, 1.0};
  for (auto _ : state) {
    const auto cache = lehi::forward(s.model, s.x);
    benchmark::DoNotOptimize(lehi::backward_seeded(s.model, cache, lehi::primary_seed(pair, cache.outputs, s.y)));
  }
}
BENCHMARK(BM_SingleBackwardStep)->Arg(128);

}  // namespace
