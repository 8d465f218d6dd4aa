#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "desync/errors.hpp"
#include "desync/spectral.hpp"
#include "oracles.hpp"

using namespace desync;
using namespace desync::testing;

namespace {
const double kFs = 1000.0;
}

TEST(Spectrum, PureToneHasSingleDominantBin) {
  auto x = tone(1000, kFs, 100.0);
  auto s = window_spectrum(x, kFs);
  ASSERT_EQ(s.size(), 501u);
  std::size_t best = 0;
  double total = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    total += s[k].energy;
    if (s[k].energy > s[best].energy) best = k;
  }
  EXPECT_DOUBLE_EQ(s[best].frequency_hz, 100.0);
  EXPECT_GT(s[best].energy / total, 1.0 - 1e-9);
}

TEST(Spectrum, ZeroWindow) {
  for (auto& b : window_spectrum(std::vector<double>(64, 0.0), kFs)) EXPECT_EQ(b.energy, 0.0);
}

TEST(Spectrum, TooShort) { EXPECT_THROW(window_spectrum(std::vector<double>{1.0}, kFs), ValidationError); }

TEST(Spectrum, ParsevalAgainstDirectTransform) {
  std::mt19937_64 rng(11);
  for (std::size_t n : {2u, 3u, 17u, 64u, 250u, 1000u}) {
    auto x = white(rng, n);
    auto s = window_spectrum(x, kFs);
    double time_energy = 0;
    for (double v : x) time_energy += v * v;
    double spec_energy = 0;
    for (auto& b : s) spec_energy += b.energy;
    EXPECT_NEAR(spec_energy, time_energy, 1e-6 * time_energy) << n;
    // Bin by bin against the O(n^2) transform.
    auto X = direct_dft(x);
    for (std::size_t k = 0; k < s.size(); ++k) {
      const double w = (k == 0 || (n % 2 == 0 && k == n / 2)) ? 1.0 : 2.0;
      EXPECT_NEAR(s[k].energy, w * std::norm(X[k]) / static_cast<double>(n), 1e-9 * time_energy);
    }
  }
}

TEST(EnergyRatio, ToneInLowBand) {
  EXPECT_LE(energy_ratio(tone(1000, kFs, 8.0), kFs, BandPair{}), 1e-6);
}

TEST(EnergyRatio, EqualTonesAgainstOracle) {
  auto a = tone(1000, kFs, 8.0), b = tone(1000, kFs, 100.0, 1.0, 0.3);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  const double r = energy_ratio(a, kFs, BandPair{});
  const double oracle = direct_band_energy(a, kFs, 30, 250) / direct_band_energy(a, kFs, 4, 12);
  EXPECT_NEAR(r, 1.0, 0.05);
  EXPECT_NEAR(r, oracle, 1e-9);
}

TEST(EnergyRatio, WhiteNoiseMatchesBandwidthRatio) {
  // Flat spectrum: the expected ratio is the count of high-band bins over
  // low-band bins. Over 100 trials the mean must sit within 20% of 27.5.
  std::mt19937_64 rng(5);
  double sum = 0;
  for (int t = 0; t < 100; ++t) sum += energy_ratio(white(rng, 1000), kFs, BandPair{});
  const double mean = sum / 100.0;
  EXPECT_NEAR(mean, 27.5, 0.2 * 27.5);
  // The Monte-Carlo oracle from bin counts (221 / 9) agrees as well.
  EXPECT_NEAR(mean, 221.0 / 9.0, 0.2 * 221.0 / 9.0);
}

TEST(EnergyRatio, SilentChannelIsZero) {
  EXPECT_EQ(energy_ratio(std::vector<double>(1000, 0.0), kFs, BandPair{}), 0.0);
}

TEST(EnergyRatio, ScaleInvariance) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> cdist(-50.0, 50.0);
  for (int t = 0; t < 100; ++t) {
    auto x = white(rng, 1000);
    double c = cdist(rng);
    if (std::abs(c) < 1e-3) c = 1.5;
    auto y = x;
    for (double& v : y) v *= c;
    const double r1 = energy_ratio(x, kFs, BandPair{}), r2 = energy_ratio(y, kFs, BandPair{});
    EXPECT_NEAR(r2, r1, 1e-9 * r1);
  }
}

TEST(EnergyRatio, AddingHighToneNeverDecreases) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> fd(30.0, 250.0), ad(0.01, 3.0), pd(0.0, 6.28);
  for (int t = 0; t < 100; ++t) {
    // Integer-cycle tones keep the added component orthogonal to the rest.
    const double f_add = std::round(fd(rng));
    std::vector<double> x(1000, 0.0);
    for (double f = 4.0; f <= 250.0; f += 7.0) {
      if (f == f_add) continue;
      auto part = tone(1000, kFs, f, ad(rng), pd(rng));
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += part[i];
    }
    auto y = x;
    auto add = tone(1000, kFs, f_add, ad(rng), pd(rng));
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += add[i];
    EXPECT_GE(energy_ratio(y, kFs, BandPair{}), energy_ratio(x, kFs, BandPair{}) * (1 - 1e-12));
  }
}

TEST(EnergyRatio, BandValidation) {
  BandPair b;
  EXPECT_THROW(b.validate(400.0), ValidationError);  // 250 Hz above fs/2
  b.low = {12.0, 4.0};
  EXPECT_THROW(b.validate(1000.0), ValidationError);
  EXPECT_THROW(parse_band("30-250"), ValidationError);
  EXPECT_DOUBLE_EQ(parse_band("30:250").hi_hz, 250.0);
}

TEST(EnergySeries, StationaryToneIsConstant) {
  auto x = tone(10000, kFs, 100.0);
  auto y = tone(10000, kFs, 8.0);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += 0.5 * y[i];
  auto rec = make_recording({x}, kFs);
  auto plan = build_plan(rec, 1.0, 0.25);
  auto s = energy_series(rec, plan, BandPair{});
  for (double v : s[0].values) EXPECT_NEAR(v, s[0].values[0], 1e-3 * s[0].values[0]);
}

TEST(EnergySeries, StepAtTransition) {
  const std::size_t n = 20000;
  auto lo = tone(n, kFs, 8.0), hi = tone(n, kFs, 100.0);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = i < n / 2 ? lo[i] : hi[i];
  auto rec = make_recording({x}, kFs);
  auto plan = build_plan(rec, 1.0, 0.25);
  auto s = energy_series(rec, plan, BandPair{})[0].values;
  // First window whose ratio exceeds 1 must start within one window of 10 s.
  std::size_t k = 0;
  while (k < s.size() && s[k] <= 1.0) ++k;
  ASSERT_LT(k, s.size());
  EXPECT_NEAR(plan.window_times[k], 10.0, 1.0);
}

TEST(EnergySeries, DimensionsAndThreadIndependence) {
  std::mt19937_64 rng(1);
  std::vector<std::vector<double>> ch(8);
  for (auto& c : ch) c = white(rng, 6000);
  auto rec = make_recording(ch, kFs);
  auto plan = build_plan(rec, 1.0, 0.25);
  auto a = energy_series(rec, plan, BandPair{}, 1);
  auto b = energy_series(rec, plan, BandPair{}, 4);
  ASSERT_EQ(a.size(), 8u);
  for (std::size_t c = 0; c < 8; ++c) {
    EXPECT_EQ(a[c].values.size(), plan.size());
    EXPECT_EQ(a[c].values, b[c].values);
    EXPECT_EQ(a[c].channel, rec.channel_name(c));
    for (double v : a[c].values) EXPECT_GE(v, 0.0);
  }
}
