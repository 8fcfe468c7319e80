#include <benchmark/benchmark.h>

#include "twomode/analytics.hpp"
#include "twomode/ensemble.hpp"
#include "twomode/exact.hpp"
#include "twomode/fock.hpp"
#include "twomode/random.hpp"
#include "twomode/wick.hpp"

using namespace twomode;

namespace {

void BM_SampleState(benchmark::State& st) {
  const auto spec = make_subspace(1000, static_cast<int>(st.range(0)));
  const StreamFactory streams(1);
  std::size_t i = 0;
  for (auto _ : st) {
    auto rng = streams.stream(i++, stream_tag::state);
    benchmark::DoNotOptimize(sample_state(spec, rng));
  }
}
BENCHMARK(BM_SampleState)->Arg(3)->Arg(101)->Arg(1001);

void BM_PairMoments(benchmark::State& st) {
  const auto spec = make_subspace(200, static_cast<int>(st.range(0)));
  std::vector<std::vector<int>> sets;
  for (int a : spec.indices())
    for (int b : spec.indices()) sets.push_back({a, b});
  for (auto _ : st) benchmark::DoNotOptimize(sample_moments(spec, sets, 4096, 2));
  st.SetItemsProcessed(st.iterations() * 4096);
}
BENCHMARK(BM_PairMoments)->Arg(11)->Arg(101)->Unit(benchmark::kMillisecond);

void BM_WickProduct(benchmark::State& st) {
  const auto kernel = gaussian_kernel({1.2, 0.3});
  for (auto _ : st) benchmark::DoNotOptimize(wick_product(Momentum(0.3), Momentum(0.7), kernel));
}
BENCHMARK(BM_WickProduct)->Unit(benchmark::kMicrosecond);

void BM_ExactQuantumCov(benchmark::State& st) {
  const auto spec = make_subspace(400, static_cast<int>(st.range(0)));
  const auto kernel = plane_wave_kernel(make_plane_wave({1, 0, 0}));
  for (auto _ : st) benchmark::DoNotOptimize(exact_quantum_cov_avg(spec, kernel, Momentum(2.0), Momentum(2.0)));
}
BENCHMARK(BM_ExactQuantumCov)->Arg(11)->Arg(101)->Unit(benchmark::kMillisecond);

void BM_ExactEnsembleCov(benchmark::State& st) {
  const auto spec = make_subspace(2000, static_cast<int>(st.range(0)));
  const auto kernel = plane_wave_kernel(make_plane_wave({1, 0, 0}));
  for (auto _ : st) benchmark::DoNotOptimize(exact_ensemble_cov(spec, kernel, Momentum(2.0), Momentum(2.0)));
}
BENCHMARK(BM_ExactEnsembleCov)->Arg(101)->Arg(2001)->Unit(benchmark::kMicrosecond);

void BM_SSumsExact(benchmark::State& st) {
  const auto spec = make_subspace(static_cast<int>(st.range(0)), 11);
  for (auto _ : st) benchmark::DoNotOptimize(s_sums_exact(spec));
}
BENCHMARK(BM_SSumsExact)->Arg(200)->Arg(800)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
