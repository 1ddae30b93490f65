#include <benchmark/benchmark.h>

#include "levelset/calculus.hpp"
#include "levelset/functions.hpp"
#include "levelset/loss.hpp"
#include "levelset/revnet.hpp"

namespace levelset {
namespace {

// Args: dimension, number of blocks.
RevNetParams params_for(const benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  return init_params(RevNetConfig::with_dim(d, n, 0.25, 1), 0.1);
}

void BM_Forward(benchmark::State& state) {
  const RevNetParams p = params_for(state);
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(p.config.dim, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(forward(p, x));
}
BENCHMARK(BM_Forward)->Args({2, 10})->Args({20, 30});

void BM_JacobianAnalytic(benchmark::State& state) {
  const RevNetParams p = params_for(state);
  const Eigen::VectorXd z = Eigen::VectorXd::Constant(p.config.dim, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(jacobian_inverse_analytic(p, z));
}
BENCHMARK(BM_JacobianAnalytic)->Args({2, 10})->Args({20, 30});

void BM_JacobianFd(benchmark::State& state) {
  const RevNetParams p = params_for(state);
  const Eigen::VectorXd z = Eigen::VectorXd::Constant(p.config.dim, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(jacobian_inverse_fd(p, z));
}
BENCHMARK(BM_JacobianFd)->Args({2, 10})->Args({20, 30});

void BM_LossGradient(benchmark::State& state) {
  const RevNetParams p = params_for(state);
  const int d = p.config.dim;
  const FunctionId id = d == 2 ? FunctionId::kF1 : FunctionId::kF4;
  const Dataset data = sample_dataset(make_function(id), 100, 1, SampleLayout::kUniformRandom);
  const AnisotropyWeights w = AnisotropyWeights::from_active(d, {0});
  for (auto _ : state) benchmark::DoNotOptimize(loss_gradient(p, data, w));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(data.size()));
}
BENCHMARK(BM_LossGradient)->Args({2, 10})->Args({20, 30})->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace levelset

BENCHMARK_MAIN();
