#include <benchmark/benchmark.h>

#include "nlrt/first_passage.hpp"
#include "nlrt/mixture.hpp"
#include "nlrt/rng.hpp"

namespace {

nlrt::PerturbedWalkModel ma_model() {
  nlrt::PerturbedWalkModel m;
  m.vector = nlrt::VectorLaw::centered_increment();
  m.quadratic = nlrt::QuadraticSpec{nlrt::Matrix{{0.5}}};
  m.stationary = nlrt::with_auto_centering(
      nlrt::StationarySpec::geometric_ma(nlrt::WMap::identity, 0.5, 30), m.increment);
  return m;
}

void BM_Philox(benchmark::State& state) {
  nlrt::Philox4x32 gen({1, 0, 0});
  for (auto _ : state) benchmark::DoNotOptimize(gen());
}
BENCHMARK(BM_Philox);

void BM_SimulatePassage(benchmark::State& state) {
  const auto model = ma_model();
  const double a = static_cast<double>(state.range(0));
  std::uint64_t r = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(nlrt::simulate_passage(model, a, {1, r++, nlrt::streams::passage}));
}
BENCHMARK(BM_SimulatePassage)->Arg(25)->Arg(100)->Arg(400);

void BM_MixtureCdf(benchmark::State& state) {
  nlrt::MixtureCdf cdf(nlrt::ChiSquareMixture({2.0, 1.0, -0.5}));
  double z = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cdf(z));
    z = z > 10.0 ? 0.1 : z + 0.37;
  }
}
BENCHMARK(BM_MixtureCdf);

void BM_MixtureCdfFresh(benchmark::State& state) {
  const nlrt::ChiSquareMixture mix({2.0, 1.0, -0.5});
  for (auto _ : state) benchmark::DoNotOptimize(nlrt::mixture_cdf(mix, 1.7));
}
BENCHMARK(BM_MixtureCdfFresh)->Unit(benchmark::kMillisecond);

void BM_BackwardFunctional(benchmark::State& state) {
  const auto model = ma_model();
  for (auto _ : state)
    benchmark::DoNotOptimize(nlrt::backward_min_functional(model, 0, 1000, {1, 0, nlrt::streams::backward}));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_BackwardFunctional)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
