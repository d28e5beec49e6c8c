#include <benchmark/benchmark.h>

#include "fsad/fbm.hpp"
#include "fsad/gram.hpp"
#include "fsad/kernel.hpp"
#include "fsad/silt.hpp"

using namespace fsad;

static void BM_KernelEval(benchmark::State& state) {
  double t = 3.0, acc = 0.0;
  for (auto _ : state) {
    for (int i = 0; i < 1000; ++i) acc += eval_h(t, 0.001 * i, 1.0);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_KernelEval);

static void BM_WeightTable(benchmark::State& state) {
  ModelParams p;
  const auto grid = TimeGrid::uniform(1.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(WeightTable::build(grid, p, QuadratureSpec{}));
}
BENCHMARK(BM_WeightTable)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_CovarianceTable(benchmark::State& state) {
  ModelParams p;
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> times(n + 1);
  for (std::size_t k = 0; k <= n; ++k) times[k] = static_cast<double>(k) / static_cast<double>(n);
  for (auto _ : state) benchmark::DoNotOptimize(CovarianceTable(times, p, static_cast<int>(2 * n), 4).cov()(n, n));
}
BENCHMARK(BM_CovarianceTable)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_FbmSample(benchmark::State& state) {
  const auto method = state.range(1) == 0 ? FbmMethod::circulant : FbmMethod::cholesky;
  const FbmGenerator g(TimeGrid::uniform(1.0, static_cast<std::size_t>(state.range(0))), HurstIndex(0.7), method);
  std::vector<double> out(static_cast<std::size_t>(state.range(0)) + 1);
  std::uint64_t i = 0;
  for (auto _ : state) {
    g.sample(1, i++, 0, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_FbmSample)->Args({512, 0})->Args({4096, 0})->Args({512, 1});

static void BM_SiltMoments(benchmark::State& state) {
  ModelParams p;
  p.d = 2;
  const SiltGrid grid(p, static_cast<std::size_t>(state.range(0)), QuadratureSpec{});
  const double eps[] = {0.1};
  for (auto _ : state) benchmark::DoNotOptimize(grid.moments(eps));
}
BENCHMARK(BM_SiltMoments)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
