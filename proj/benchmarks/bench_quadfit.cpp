#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "quadfit/chi_star.hpp"
#include "quadfit/gof.hpp"
#include "quadfit/spectral.hpp"

using namespace quadfit;

namespace {

std::vector<double> normal_sample(std::size_t n, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::vector<double> x(n);
  for (auto& v : x) v = z(rng);
  return x;
}

}  // namespace

static void BM_CenteredKernelMatrix(benchmark::State& state) {
  const auto k = center_kernel(Kernel::normal(0.5), BaselineMeasure::normal(0.0, 1.0));
  const auto x = normal_sample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(k.matrix(x));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CenteredKernelMatrix)->RangeMultiplier(4)->Range(64, 1024)->Complexity(benchmark::oNSquared);

static void BM_ChiStarSampling(benchmark::State& state) {
  const auto d = ChiStarDistribution::from_spectrum(poisson_spectrum(0.5, 60), false);
  for (auto _ : state) benchmark::DoNotOptimize(ChiStarTail(d, static_cast<std::size_t>(state.range(0)), 7, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ChiStarSampling)->Arg(20000)->Arg(200000)->Unit(benchmark::kMillisecond);

static void BM_EmpiricalEigs(benchmark::State& state) {
  const auto k = center_kernel(Kernel::normal(0.5), BaselineMeasure::normal(0.0, 1.0));
  EmpiricalKernelMatrix m;
  m.entries = k.matrix(normal_sample(static_cast<std::size_t>(state.range(0))));
  m.centered = true;
  for (auto _ : state) benchmark::DoNotOptimize(empirical_eigs(m));
}
BENCHMARK(BM_EmpiricalEigs)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_MehlerSpectrum(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(normal_spectrum(0.5, 1.0, 60));
}
BENCHMARK(BM_MehlerSpectrum);

static void BM_CompositeStatistic(benchmark::State& state) {
  const auto model = normal_model();
  const auto x = normal_sample(static_cast<std::size_t>(state.range(0)));
  const ScoreCenteredKernel k(Kernel::normal(1.0), model, model->fit_mle(x));
  for (auto _ : state) benchmark::DoNotOptimize(composite_statistic(x, k, Estimator::v_stat));
}
BENCHMARK(BM_CompositeStatistic)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_CompositeTestQuadratureRoute(benchmark::State& state) {
  const auto model = normal_model();
  const auto x = normal_sample(200);
  GofOptions opt;
  opt.draws = 20000;
  opt.spectrum.route = SpectrumRoute::quadrature;
  for (auto _ : state) benchmark::DoNotOptimize(composite_null_test(x, model, Kernel::normal(1.0), opt));
}
BENCHMARK(BM_CompositeTestQuadratureRoute)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
