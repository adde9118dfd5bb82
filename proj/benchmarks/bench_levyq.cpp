#include <benchmark/benchmark.h>

#include <vector>

#include "levyq/config.hpp"
#include "levyq/direct_scheme.hpp"
#include "levyq/harness.hpp"
#include "levyq/inversion.hpp"
#include "levyq/kernels.hpp"
#include "levyq/option_scheme.hpp"
#include "levyq/pipeline.hpp"
#include "levyq/simulate.hpp"

using namespace levyq;

namespace {

LevyModel paper_model() { return LevyModel::martingale(0.01, Cgmy{1.0, 5.0, 8.0, 0.5}); }

OptionChain paper_chain(std::size_t n, std::uint64_t seed) {
  return generate_synthetic_chain(paper_model(), 0.25, 0.06, n, 0.01, StrikeLaw{}, seed);
}

void BM_OptionFunction(benchmark::State& state) {
  const auto m = paper_model();
  std::vector<double> xs;
  for (int i = 0; i < state.range(0); ++i) xs.push_back(-2.0 + 4.0 * i / state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(option_function(m, 0.25, xs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_OptionFunction)->Arg(100)->Arg(10000);

void BM_OptionSpectra(benchmark::State& state) {
  const auto chain = paper_chain(static_cast<std::size_t>(state.range(0)), 1);
  const SplineOptionFunction spline(chain);
  const auto grid = FrequencyGrid::with_spacing(100.0, 0.05);
  const TrustRegion trust{static_cast<double>(chain.size()), 0.01};
  for (auto _ : state) benchmark::DoNotOptimize(sample_option_spectra(spline, 0.25, grid, trust));
}
BENCHMARK(BM_OptionSpectra)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_EcfDerivatives(benchmark::State& state) {
  const LevyModel m{0.01, 1.0, CompoundPoisson{1.0, exponential_jumps(1.0)}};
  const auto sample =
      sample_increments({m, 0.5, SamplingMethod::compound_poisson, 3}, static_cast<std::size_t>(state.range(0)));
  const auto grid = FrequencyGrid::with_spacing(40.0, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(ecf_derivatives_on_grid(sample, grid));
}
BENCHMARK(BM_EcfDerivatives)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_LatticeInversion(benchmark::State& state) {
  const auto psi2 = exact_psi2(paper_model());
  const SpectralInverter inverter(psi2, 0.01);
  const auto kernel = SpectralKernel::flat_top(0.5);
  const double h = 0.05;
  for (auto _ : state) {
    const auto est = inverter.at(kernel, h);
    benchmark::DoNotOptimize(est.quantile(1.0, 0.02, Side::positive, InversionSettings{}));
  }
}
BENCHMARK(BM_LatticeInversion)->Unit(benchmark::kMillisecond);

void BM_AnalyzeChain(benchmark::State& state) {
  const auto chain = paper_chain(100, 7);
  const std::vector<double> taus{0.5, 1.0, 1.5, 2.0, 2.5};
  const auto settings = ExperimentConfig::default_pipeline();
  for (auto _ : state) benchmark::DoNotOptimize(analyze_chain(chain, taus, settings, state.range(0) != 0));
}
BENCHMARK(BM_AnalyzeChain)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
