#include <benchmark/benchmark.h>

#include <algorithm>
#include <vector>

#include "divisim/diagnostics.hpp"
#include "divisim/distributions.hpp"
#include "divisim/fitting.hpp"
#include "divisim/presets.hpp"
#include "divisim/riskfactor.hpp"

using namespace divisim;

namespace {

std::vector<double> paretoSample(std::size_t n) {
  Rng rng(7);
  return sample(presets::paretoTarget(), rng, n);
}

void BM_LogLaplaceClosedForm(benchmark::State& state) {
  const auto ggc = presets::fixture("pareto-ggc20");
  double t = 0.5;
  for (auto _ : state) benchmark::DoNotOptimize(logLaplace(ggc, t));
}
BENCHMARK(BM_LogLaplaceClosedForm);

// Pareto has no closed form; this is the quadrature path.
void BM_LogLaplaceQuadrature(benchmark::State& state) {
  const auto p = presets::paretoTarget();
  for (auto _ : state) benchmark::DoNotOptimize(logLaplace(p, 0.5));
}
BENCHMARK(BM_LogLaplaceQuadrature);

void BM_SampleGamma(benchmark::State& state) {
  const auto g = Distribution::gamma(0.3, 2.0);
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sample(g, rng, static_cast<std::size_t>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleGamma)->Arg(1 << 16);

void BM_SampleGgc20(benchmark::State& state) {
  const auto g = presets::fixture("pareto-ggc20");
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sample(g, rng, static_cast<std::size_t>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleGgc20)->Arg(1 << 16);

void BM_EmpiricalLogLaplace(benchmark::State& state) {
  const auto x = paretoSample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(empiricalLogLaplace(x, 0.1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EmpiricalLogLaplace)->Arg(1'000'000);

void BM_FitGammaMle(benchmark::State& state) {
  const auto x = paretoSample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fitGammaMle(x));
}
BENCHMARK(BM_FitGammaMle)->Arg(100'000)->Unit(benchmark::kMillisecond);

void BM_FitGgc(benchmark::State& state) {
  const auto x = paretoSample(100'000);
  const auto atoms = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fitGammaConvolution(x, atoms, std::nullopt, 1));
}
BENCHMARK(BM_FitGgc)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond)->Iterations(1);

void BM_SampleCrossedModel(benchmark::State& state) {
  const auto spec = presets::model("paper-4b");
  SamplingOptions opt;
  opt.threads = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) {
    Rng rng(3);
    benchmark::DoNotOptimize(sampleModel(spec.model, static_cast<std::size_t>(state.range(0)), rng, opt));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleCrossedModel)->Args({10'000, 1})->Args({10'000, 4})->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_KendallTau(benchmark::State& state) {
  Rng rng(5);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = sample(Distribution::gamma(1, 1), rng, n);
  auto b = a;
  const auto noise = sample(Distribution::gaussian(0, 1), rng, n);
  for (std::size_t k = 0; k < n; ++k) b[k] += noise[k];
  for (auto _ : state) benchmark::DoNotOptimize(kendallTau(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KendallTau)->RangeMultiplier(10)->Range(1'000, 1'000'000)->Complexity(benchmark::oNLogN);

void BM_Kde(benchmark::State& state) {
  const auto x = paretoSample(static_cast<std::size_t>(state.range(0)));
  std::vector<double> grid(256);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = 20.0 * static_cast<double>(i) / 255.0;
  for (auto _ : state) benchmark::DoNotOptimize(kde(x, grid));
}
BENCHMARK(BM_Kde)->Arg(10'000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
