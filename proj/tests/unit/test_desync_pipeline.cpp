#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "desync/desync_pipeline.hpp"
#include "desync/errors.hpp"
#include "desync/synth.hpp"
#include "oracles.hpp"

using namespace desync;
using namespace desync::testing;

namespace {

std::vector<std::string> labels(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("c" + std::to_string(i));
  return out;
}

// One window per entry of `slices`, each N*N row-major with row = source.
ConnectivityTensor tensor_of(std::size_t n, const std::vector<std::vector<double>>& slices) {
  std::vector<double> times;
  for (std::size_t w = 0; w < slices.size(); ++w) times.push_back(0.25 * static_cast<double>(w));
  ConnectivityTensor t(labels(n), times, make_lag_grid(0.1, 0.01, 1000.0));
  for (std::size_t w = 0; w < slices.size(); ++w) std::copy(slices[w].begin(), slices[w].end(), t.slice_mut(w).begin());
  return t;
}

std::vector<double> random_slice(std::mt19937_64& rng, std::size_t n) {
  std::gamma_distribution<double> g(2.0, 0.3);
  std::vector<double> s(n * n, 0.0);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (x != y) s[x * n + y] = g(rng);
  return s;
}

// Desync level straight from the definitions, for one channel of one
// (already smoothed) window.
double oracle_level(const std::vector<double>& s, std::size_t n, std::size_t x, double p25, double med,
                    double p75, double guard) {
  double psi_in = 0, psi_out = 0;
  std::size_t n_in = 0, n_out = 0;
  for (std::size_t y = 0; y < n; ++y) {
    if (y == x) continue;
    if (s[y * n + x] <= p25) {
      psi_in += s[y * n + x];
      ++n_in;
    }
    if (s[x * n + y] >= p75) {
      psi_out += s[x * n + y];
      ++n_out;
    }
  }
  const double num = std::sqrt(n_in * med) - std::sqrt(psi_in);
  const double den = std::sqrt(psi_out) - std::sqrt(n_out * med);
  if (num <= 1e-12 * std::sqrt(n_in * med)) return 0.0;
  return num / std::max(den, guard);
}

std::vector<double> off_diagonal(const std::vector<double>& s, std::size_t n) {
  std::vector<double> v;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (x != y) v.push_back(s[x * n + y]);
  return v;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

DiParams di_params_m(std::size_t m) {
  DiParams p;
  p.index.m = m;
  return p;
}

}  // namespace

TEST(Quantile, OneToEight) {
  std::vector<double> v{8, 3, 1, 6, 2, 7, 5, 4};
  EXPECT_DOUBLE_EQ(quantile_linear(v, 0.25), 2.75);
  EXPECT_DOUBLE_EQ(quantile_linear(v, 0.50), 4.5);
  EXPECT_DOUBLE_EQ(quantile_linear(v, 0.75), 6.25);
  EXPECT_DOUBLE_EQ(quantile_linear(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile_linear(v, 1.0), 8.0);
}

TEST(Quantile, MatchesOrderStatisticOracle) {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> pd(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    auto v = white(rng, 1 + t % 40);
    const double p = pd(rng);
    auto copy = v;
    EXPECT_NEAR(quantile_linear(copy, p), order_statistic_quantile(v, p), 1e-12);
  }
  std::vector<double> empty;
  EXPECT_THROW(quantile_linear(empty, 0.5), ValidationError);
}

TEST(NetworkStats, UniformNetwork) {
  std::vector<double> s(9, 0.4);
  for (std::size_t i = 0; i < 3; ++i) s[i * 3 + i] = 0.0;
  auto t = tensor_of(3, {s, s, s});
  auto st = network_stats(t, 0.3);
  for (std::size_t w = 0; w < 3; ++w) {
    EXPECT_EQ(st.p25[w], 0.4);
    EXPECT_EQ(st.median[w], 0.4);
    EXPECT_EQ(st.p75[w], 0.4);
    EXPECT_NEAR(st.median_smooth[w], 0.4, 1e-15);
  }
}

TEST(NetworkStats, OrderingAndAlphaIdentity) {
  std::mt19937_64 rng(73);
  std::vector<std::vector<double>> slices;
  for (int w = 0; w < 40; ++w) slices.push_back(random_slice(rng, 6));
  auto t = tensor_of(6, slices);
  auto raw = network_stats(t, 1.0);
  auto smooth = network_stats(t, 0.2);
  for (std::size_t w = 0; w < 40; ++w) {
    auto off = off_diagonal(slices[w], 6);
    EXPECT_NEAR(raw.p25[w], order_statistic_quantile(off, 0.25), 1e-12);
    EXPECT_NEAR(raw.median[w], order_statistic_quantile(off, 0.5), 1e-12);
    EXPECT_NEAR(raw.p75[w], order_statistic_quantile(off, 0.75), 1e-12);
    EXPECT_EQ(raw.p25_smooth[w], raw.p25[w]);
    EXPECT_EQ(raw.p75_smooth[w], raw.p75[w]);
    EXPECT_LE(smooth.p25_smooth[w], smooth.median_smooth[w]);
    EXPECT_LE(smooth.median_smooth[w], smooth.p75_smooth[w]);
    EXPECT_LE(raw.p25[w], raw.median[w]);
    EXPECT_LE(raw.median[w], raw.p75[w]);
  }
}

TEST(AbnormalSets, UniformNetworkIncludesEveryone) {
  std::vector<double> s(16, 1.0);
  for (std::size_t i = 0; i < 4; ++i) s[i * 4 + i] = 0.0;
  auto sets = abnormal_sets(s, 4, 1.0, 1.0, 2);
  EXPECT_EQ(sets.in, (std::vector<std::size_t>{0, 1, 3}));
  EXPECT_EQ(sets.out, (std::vector<std::size_t>{0, 1, 3}));
  auto d = densities(s, 4, sets, 2, 1.0);
  EXPECT_EQ(desync_level(d, 1e-9), 0.0);
}

TEST(AbnormalSets, FourNodeToy) {
  // Channel 0 receives one edge at 0 and two far above p25 and sends
  // nothing that reaches p75.
  std::vector<double> s(16, 0.0);
  auto set = [&](std::size_t x, std::size_t y, double v) { s[x * 4 + y] = v; };
  set(1, 0, 0.0);
  set(2, 0, 10.0);
  set(3, 0, 10.0);
  set(0, 1, 1.0);
  set(0, 2, 2.0);
  set(0, 3, 3.0);
  set(1, 2, 4.0);
  set(1, 3, 5.0);
  set(2, 1, 6.0);
  set(2, 3, 7.0);
  set(3, 1, 8.0);
  set(3, 2, 9.0);
  auto off = off_diagonal(s, 4);
  const double p25 = order_statistic_quantile(off, 0.25), p75 = order_statistic_quantile(off, 0.75);
  EXPECT_DOUBLE_EQ(p25, 2.75);
  EXPECT_DOUBLE_EQ(p75, 8.25);
  auto sets = abnormal_sets(s, 4, p25, p75, 0);
  EXPECT_EQ(sets.in, (std::vector<std::size_t>{1}));
  EXPECT_TRUE(sets.out.empty());
}

TEST(DesyncLevel, EmptySetsGiveZero) {
  Densities d;
  bool guarded = false;
  EXPECT_EQ(desync_level(d, 1e-9, &guarded), 0.0);
  EXPECT_TRUE(guarded);
}

TEST(DesyncLevel, CollapsedInwardEdgesHitTheGuard) {
  // Inward edges of channel 0 at 0, outward edges equal to the median and p75.
  std::vector<double> s(16, 1.0);
  for (std::size_t i = 0; i < 4; ++i) s[i * 4 + i] = 0.0;
  for (std::size_t y = 1; y < 4; ++y) s[y * 4 + 0] = 0.0;
  auto off = off_diagonal(s, 4);
  const double p25 = order_statistic_quantile(off, 0.25), med = order_statistic_quantile(off, 0.5),
               p75 = order_statistic_quantile(off, 0.75);
  ASSERT_DOUBLE_EQ(med, 1.0);
  ASSERT_DOUBLE_EQ(p75, 1.0);
  auto sets = abnormal_sets(s, 4, p25, p75, 0);
  ASSERT_EQ(sets.in.size(), 3u);
  ASSERT_EQ(sets.out.size(), 3u);
  auto d = densities(s, 4, sets, 0, med);
  EXPECT_EQ(d.psi_in, 0.0);
  EXPECT_DOUBLE_EQ(d.psi_in_expected, 3.0);
  EXPECT_DOUBLE_EQ(d.psi_out, d.psi_out_expected);
  bool guarded = false;
  const double absolute = guard_value({GuardMode::absolute, 1e-9}, med);
  EXPECT_DOUBLE_EQ(desync_level(d, absolute, &guarded), std::sqrt(3.0) / 1e-9);
  EXPECT_TRUE(guarded);
  const double relative = guard_value({}, med);
  EXPECT_DOUBLE_EQ(relative, 1.0);
  EXPECT_DOUBLE_EQ(desync_level(d, relative), std::sqrt(3.0));
  EXPECT_NEAR(desync_level(d, absolute), oracle_level(s, 4, 0, p25, med, p75, 1e-9), 1e-3);
}

TEST(DesyncLevel, GuardValues) {
  EXPECT_DOUBLE_EQ(guard_value({GuardMode::relative, 2.0}, 0.25), 1.0);
  EXPECT_DOUBLE_EQ(guard_value({GuardMode::relative, 1.0}, 0.0), kDenominatorFloor);
  EXPECT_DOUBLE_EQ(guard_value({GuardMode::absolute, 1e-9}, 5.0), 1e-9);
  EXPECT_THROW(guard_value({GuardMode::absolute, 0.0}, 1.0), ValidationError);
  EXPECT_THROW(parse_guard_mode("none"), ValidationError);
}

TEST(DesyncSeries, MatchesDefinitionOracle) {
  std::mt19937_64 rng(75);
  const std::size_t n = 7, nw = 30;
  std::vector<std::vector<double>> slices;
  for (std::size_t w = 0; w < nw; ++w) slices.push_back(random_slice(rng, n));
  auto t = tensor_of(n, slices);
  for (double alpha : {1.0, 0.35}) {
    auto stats = network_stats(t, alpha);
    for (GuardMode mode : {GuardMode::relative, GuardMode::absolute}) {
      DesyncGuard guard{mode, mode == GuardMode::absolute ? 1e-9 : 1.0};
      auto ds = desync_series(t, stats, alpha, guard);
      // Smooth every connection on its own, then apply the definitions.
      std::vector<std::vector<double>> smooth(nw, std::vector<double>(n * n));
      for (std::size_t o = 0; o < n * n; ++o) {
        std::vector<double> series;
        for (std::size_t w = 0; w < nw; ++w) series.push_back(slices[w][o]);
        auto e = literal_ewma(series, alpha);
        for (std::size_t w = 0; w < nw; ++w) smooth[w][o] = e[w];
      }
      auto lit_p25 = literal_ewma(stats.p25, alpha), lit_med = literal_ewma(stats.median, alpha),
           lit_p75 = literal_ewma(stats.p75, alpha);
      for (std::size_t w = 0; w < nw; ++w) {
        const double g = mode == GuardMode::absolute ? 1e-9 : std::max(std::sqrt(lit_med[w]), 1e-9);
        for (std::size_t x = 0; x < n; ++x) {
          const double want = oracle_level(smooth[w], n, x, lit_p25[w], lit_med[w], lit_p75[w], g);
          EXPECT_NEAR(ds.at(w, x), want, 1e-9 * std::max(1.0, want)) << w << " " << x;
        }
      }
    }
  }
}

TEST(DesyncSeries, InvariantsOnRandomTensors) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ad(0.05, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 4 + static_cast<std::size_t>(trial);
    std::vector<std::vector<double>> slices;
    for (int w = 0; w < 25; ++w) slices.push_back(random_slice(rng, n));
    auto t = tensor_of(n, slices);
    const double alpha = ad(rng);
    auto stats = network_stats(t, alpha);
    auto ds = desync_series(t, stats, alpha, {});
    for (std::size_t i = 0; i < ds.level.size(); ++i) {
      EXPECT_GE(ds.level[i], 0.0);
      EXPECT_TRUE(std::isfinite(ds.level[i]));
      const auto& d = ds.dens[i];
      EXPECT_LE(d.psi_in, d.psi_in_expected * (1 + 1e-12));
      EXPECT_GE(d.psi_out, d.psi_out_expected * (1 - 1e-12));
      EXPECT_GE(d.psi_in, 0.0);
      EXPECT_GE(d.psi_out_expected, 0.0);
    }
  }
}

TEST(CapSeries, ClampsAtPercentile) {
  std::vector<double> v(1000);
  std::iota(v.begin(), v.end(), 0.0);
  auto c = cap_series(v, 99.9);
  EXPECT_DOUBLE_EQ(*std::max_element(c.begin(), c.end()), order_statistic_quantile(v, 0.999));
  for (std::size_t i = 0; i < 998; ++i) EXPECT_EQ(c[i], v[i]);
  EXPECT_EQ(cap_series(v, 100.0), v);
  EXPECT_THROW(cap_series(v, 0.0), ValidationError);
}

TEST(ComputeDi, AlphaOneEqualsUnsmoothedPipeline) {
  auto out = generate(benchmark_scenario(3, EventKind::desync_cut));
  auto plan = build_plan(out.recording, 1.0, 0.25);
  ConnectivityTensor tensor;
  auto params = di_params_m(10);
  auto run = run_di(out.recording, plan, out.annotation, params, &tensor);
  // Rebuild the charted series with no smoothing anywhere.
  const std::size_t n = tensor.channel_count();
  std::vector<std::vector<double>> series(n, std::vector<double>(tensor.window_count()));
  for (std::size_t w = 0; w < tensor.window_count(); ++w) {
    std::vector<double> s(tensor.slice(w).begin(), tensor.slice(w).end());
    auto off = off_diagonal(s, n);
    const double p25 = order_statistic_quantile(off, 0.25), med = order_statistic_quantile(off, 0.5),
                 p75 = order_statistic_quantile(off, 0.75);
    for (std::size_t x = 0; x < n; ++x)
      series[x][w] = oracle_level(s, n, x, p25, med, p75, std::max(std::sqrt(med), 1e-9));
  }
  for (auto& s : series) s = cap_series(s, 99.9);
  auto table = score_series(tensor.channels(), series, tensor.window_times(), 0.25,
                            {out.annotation.t_base_s, out.annotation.t_start_s, out.annotation.t_end_s},
                            params.index);
  for (std::size_t x = 0; x < n; ++x) {
    EXPECT_NEAR(run.table.rows[x].raw_score, table.rows[x].raw_score,
                1e-9 * std::max(1.0, table.rows[x].raw_score));
    EXPECT_EQ(run.table.rows[x].selected, table.rows[x].selected);
  }
}

TEST(ComputeDi, StructuralInvariantsOnSyntheticEpoch) {
  auto out = generate(benchmark_scenario(5, EventKind::desync_cut));
  auto plan = build_plan(out.recording, 1.0, 0.25);
  auto params = di_params_m(10);
  params.alpha = 0.5;
  auto run = run_di(out.recording, plan, out.annotation, params);
  for (std::size_t w = 0; w < plan.size(); ++w) {
    EXPECT_LE(run.stats.p25[w], run.stats.median[w]);
    EXPECT_LE(run.stats.median[w], run.stats.p75[w]);
    EXPECT_LE(run.stats.p25_smooth[w], run.stats.median_smooth[w]);
    EXPECT_LE(run.stats.median_smooth[w], run.stats.p75_smooth[w]);
  }
  for (std::size_t i = 0; i < run.desync.level.size(); ++i) {
    EXPECT_GE(run.desync.level[i], 0.0);
    EXPECT_TRUE(std::isfinite(run.desync.level[i]));
    EXPECT_LE(run.desync.dens[i].psi_in, run.desync.dens[i].psi_in_expected * (1 + 1e-12));
    EXPECT_GE(run.desync.dens[i].psi_out, run.desync.dens[i].psi_out_expected * (1 - 1e-12));
  }
  std::size_t selected = 0;
  for (auto& r : run.table.rows) selected += r.selected;
  EXPECT_EQ(selected, 10u);
}

TEST(ComputeDi, LabelEquivariance) {
  auto out = generate(benchmark_scenario(8, EventKind::desync_cut));
  const auto& rec = out.recording;
  std::vector<std::size_t> perm(rec.channel_count());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(79);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::string> names;
  std::vector<double> samples;
  for (auto p : perm) {
    names.push_back(rec.channel_name(p));
    auto c = rec.channel(p);
    samples.insert(samples.end(), c.begin(), c.end());
  }
  MultichannelRecording shuffled(names, rec.fs(), samples);
  auto plan = build_plan(rec, 1.0, 0.25);
  auto a = compute_di(rec, plan, out.annotation, di_params_m(10));
  auto b = compute_di(shuffled, plan, out.annotation, di_params_m(10));
  for (std::size_t i = 0; i < perm.size(); ++i) {
    EXPECT_EQ(a.rows[perm[i]].channel, b.rows[i].channel);
    EXPECT_NEAR(a.rows[perm[i]].raw_score, b.rows[i].raw_score, 1e-12 * std::max(1.0, b.rows[i].raw_score));
    EXPECT_EQ(a.rows[perm[i]].selected, b.rows[i].selected);
  }
}

TEST(ComputeDi, CutTargetsInTopFive) {
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto out = generate(benchmark_scenario(seed, EventKind::desync_cut));
    auto plan = build_plan(out.recording, 1.0, 0.25);
    auto table = compute_di(out.recording, plan, out.annotation, di_params_m(10));
    std::vector<std::size_t> order(table.rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return table.rows[a].raw_score > table.rows[b].raw_score; });
    std::size_t found = 0;
    for (int k = 0; k < 5; ++k) found += out.annotation.ez_channels.count(table.rows[order[k]].channel);
    if (found == 3) ++hits;
  }
  EXPECT_GE(hits, 18);
}

TEST(ComputeDi, NullNetworkHasNoDominantChannel) {
  int within = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto out = generate(benchmark_scenario(seed, EventKind::desync_cut, false));
    auto plan = build_plan(out.recording, 1.0, 0.25);
    auto table = compute_di(out.recording, plan, out.annotation, di_params_m(10));
    std::vector<double> raw;
    for (auto& r : table.rows) raw.push_back(r.raw_score);
    if (*std::max_element(raw.begin(), raw.end()) <= 10.0 * median_of(raw)) ++within;
  }
  EXPECT_EQ(within, 20);
}

TEST(ComputeDi, WideMontageSelectsTen) {
  // 116 channels; a 30 s epoch keeps the run short.
  std::mt19937_64 rng(81);
  std::vector<std::vector<double>> ch(116);
  for (auto& c : ch) c = white(rng, 30000);
  auto rec = make_recording(ch, 1000.0);
  auto plan = build_plan(rec, 1.0, 0.25);
  EpochAnnotation ann;
  ann.t_base_s = 2.0;
  ann.t_start_s = 12.0;
  ann.t_end_s = 28.0;
  ann.epoch_duration_s = 30.0;
  auto table = compute_di(rec, plan, ann, di_params_m(10));
  EXPECT_EQ(table.selected.size(), 10u);
}
