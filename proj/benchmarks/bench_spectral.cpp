#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "desync/spectral.hpp"

using namespace desync;

static void BM_EnergyRatio(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> d;
  std::vector<double> w(static_cast<std::size_t>(state.range(0)));
  for (double& v : w) v = d(rng);
  for (auto _ : state) benchmark::DoNotOptimize(energy_ratio(w, 1000.0, BandPair{}));
}
BENCHMARK(BM_EnergyRatio)->Arg(1000)->Arg(4096);
