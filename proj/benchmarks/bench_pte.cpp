#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "desync/phase_connectivity.hpp"
#include "desync/synth.hpp"
#include "desync/windowing.hpp"

using namespace desync;

namespace {

std::vector<std::uint8_t> bins(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> d(0, 10);
  std::vector<std::uint8_t> v(n);
  for (auto& b : v) b = static_cast<std::uint8_t>(d(rng));
  return v;
}

}  // namespace

static void BM_PteLagged(benchmark::State& state) {
  auto x = bins(1000, 1), y = bins(1000, 2);
  const auto lag = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(pte_lagged(x, y, lag, 11));
}
BENCHMARK(BM_PteLagged)->Arg(0)->Arg(10)->Arg(100);

// One window of the full pairwise job, the unit of parallel work.
static void BM_WindowConnectivity(benchmark::State& state) {
  const auto n_ch = static_cast<std::size_t>(state.range(0));
  std::vector<std::uint8_t> all;
  for (std::size_t c = 0; c < n_ch; ++c) {
    auto b = bins(1000, 10 + c);
    all.insert(all.end(), b.begin(), b.end());
  }
  auto grid = make_lag_grid(0.1, 0.01, 1000.0);
  std::vector<double> values(n_ch * n_ch);
  std::vector<std::uint16_t> lags(n_ch * n_ch);
  for (auto _ : state) {
    window_connectivity(all, n_ch, 1000, 11, grid, values, lags);
    benchmark::DoNotOptimize(values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n_ch * (n_ch - 1)));
}
BENCHMARK(BM_WindowConnectivity)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_Tensor(benchmark::State& state) {
  auto out = generate(benchmark_scenario(1, EventKind::desync_cut));
  auto plan = build_plan(out.recording, 1.0, 0.25);
  ConnectivityOptions opt;
  opt.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(connectivity_tensor(out.recording, plan, opt));
}
BENCHMARK(BM_Tensor)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->Iterations(2);
BENCHMARK_MAIN();
