#include <benchmark/benchmark.h>

#include <cmath>

#include "fep/engine.hpp"
#include "fep/exact_chain.hpp"
#include "fep/fenwick.hpp"
#include "fep/measures.hpp"
#include "fep/pde.hpp"

namespace {

using namespace fep;

void BM_SimulationStep(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const auto p = make_params(n, 0.3, 0.8, 0.0, 1.0);
  RngStream rng(1);
  SimulationState sim(sample(MeasureSpec::reference(0.3, 0.8, n), rng), p);
  for (auto _ : st) benchmark::DoNotOptimize(step(sim, rng));
  st.SetItemsProcessed(st.iterations());
}
BENCHMARK(BM_SimulationStep)->Arg(64)->Arg(512)->Arg(4096);

void BM_SampleReference(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const auto spec = MeasureSpec::reference(0.3, 0.8, n);
  RngStream rng(2);
  for (auto _ : st) benchmark::DoNotOptimize(sample(spec, rng));
  st.SetItemsProcessed(st.iterations() * (n - 1));
}
BENCHMARK(BM_SampleReference)->Arg(256)->Arg(4096);

void BM_FenwickSetFind(benchmark::State& st) {
  const auto size = static_cast<std::size_t>(st.range(0));
  FenwickTree tree(size);
  for (std::size_t i = 0; i < size; ++i) tree.set(i, 1.0);
  RngStream rng(3);
  for (auto _ : st) {
    const std::size_t i = tree.find(rng.uniform() * static_cast<double>(size));
    tree.set(i, 1.0 - tree.value(i) * 0.5);
    tree.set(i, 1.0);
    benchmark::DoNotOptimize(i);
  }
}
BENCHMARK(BM_FenwickSetFind)->Arg(512)->Arg(1 << 16);

void BM_BuildGenerator(benchmark::State& st) {
  const auto p = make_params(static_cast<int>(st.range(0)), 0.3, 0.8, 0.0, 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(build_generator(p));
}
BENCHMARK(BM_BuildGenerator)->Arg(12)->Arg(18)->Unit(benchmark::kMillisecond);

void BM_StationaryExact(benchmark::State& st) {
  const auto chain = build_generator(make_params(static_cast<int>(st.range(0)), 0.3, 0.8, 0.0, 1.0));
  for (auto _ : st) benchmark::DoNotOptimize(stationary_exact(chain));
}
BENCHMARK(BM_StationaryExact)->Arg(12)->Arg(18)->Unit(benchmark::kMillisecond);

void BM_PdeStep(benchmark::State& st) {
  auto grid = make_grid([](double u) { return 0.6 + 0.3 * u; }, Robin{1.0, 0.3, 0.8},
                        static_cast<int>(st.range(0)));
  const double dt = default_dt(grid);
  std::vector<double> scratch;
  for (auto _ : st) step_in_place(grid, dt, scratch);
  st.SetItemsProcessed(st.iterations() * (grid.cells() + 1));
}
BENCHMARK(BM_PdeStep)->Arg(256)->Arg(2048);

}  // namespace

BENCHMARK_MAIN();
