#include <benchmark/benchmark.h>

#include "lpsub/energy.hpp"
#include "lpsub/optimize.hpp"
#include "lpsub/sampling.hpp"

using namespace lpsub;

namespace {

PointCloud cloud(Index N) {
  Rng rng(1);
  MixtureModel model{{0.2, 0.5, 0.3}, {random_subspace(3, 1, rng), random_subspace(3, 1, rng)}, 0.0};
  return sample_mixture(model, N, rng);
}

void BM_EnergyGradient(benchmark::State& state) {
  const PointCloud c = cloud(state.range(0));
  Rng rng(2);
  const Subspace L = random_subspace(3, 1, rng);
  for (auto _ : state) benchmark::DoNotOptimize(energy_gradient(c.points, L, {1.0, 1e-3}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EnergyGradient)->Arg(2000)->Arg(20000);

void BM_PrincipalDecomposition(benchmark::State& state) {
  Rng rng(3);
  const Index D = state.range(0);
  const Subspace F = random_subspace(D, D / 2, rng), G = random_subspace(D, D / 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(principal_decomposition(F, G));
}
BENCHMARK(BM_PrincipalDecomposition)->Arg(4)->Arg(16)->Arg(64);

void BM_GeodesicDescent(benchmark::State& state) {
  const PointCloud c = cloud(2000);
  Rng rng(4);
  const Subspace init = random_subspace(3, 1, rng);
  FitOptions opts;
  opts.p = static_cast<double>(state.range(0)) / 2.0;
  for (auto _ : state) benchmark::DoNotOptimize(geodesic_descent(c.points, init, opts));
}
BENCHMARK(BM_GeodesicDescent)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_BestSingleSubspace(benchmark::State& state) {
  const PointCloud c = cloud(2000);
  FitOptions opts;
  opts.seed = 5;
  for (auto _ : state) benchmark::DoNotOptimize(best_single_subspace(c.points, 1, opts));
}
BENCHMARK(BM_BestSingleSubspace)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
