#include <gtest/gtest.h>

#include "desync/config.hpp"
#include "desync/errors.hpp"

using namespace desync;

TEST(Config, Defaults) {
  AnalysisConfig c;
  EXPECT_EQ(c.window_s, 1.0);
  EXPECT_EQ(c.shift_s, 0.25);
  EXPECT_EQ(c.bands.high.lo_hz, 30.0);
  EXPECT_EQ(c.bands.high.hi_hz, 250.0);
  EXPECT_EQ(c.bands.low.lo_hz, 4.0);
  EXPECT_EQ(c.bands.low.hi_hz, 12.0);
  EXPECT_EQ(c.tau_max_s, 0.10);
  EXPECT_EQ(c.lag_step_s, 0.010);
  EXPECT_EQ(c.delta_s, 5.0);
  EXPECT_EQ(c.gamma, 0.0);
  EXPECT_EQ(c.alpha, 1.0);
  EXPECT_EQ(c.eta, 0.0);
  EXPECT_EQ(c.t_base_offset_s, -20.0);
  EXPECT_EQ(c.comb_hz, 50.0);
  EXPECT_EQ(c.cusum_init, CusumInit::zero);
  EXPECT_EQ(c.bin_rule, BinRule::ceil);
  EXPECT_NO_THROW(c.validate(1000.0));
}

TEST(Config, ParseAndOverride) {
  auto c = parse_config("# comment\nwindow_s = 2\nband_high=40:200\nm=7\ncusum_norm=zscore\nbin_rule=round\n");
  EXPECT_EQ(c.window_s, 2.0);
  EXPECT_EQ(c.bands.high.lo_hz, 40.0);
  EXPECT_EQ(c.resolve_m(100), 7u);
  EXPECT_EQ(c.cusum_norm, CusumNorm::zscore);
  EXPECT_EQ(c.bin_rule, BinRule::round);
  c.set("gamma", "0.2");
  EXPECT_EQ(c.gamma, 0.2);
}

TEST(Config, MResolution) {
  AnalysisConfig c;
  EXPECT_EQ(c.resolve_m(152), 15u);
  c.m_pct = 25.0;
  EXPECT_EQ(c.resolve_m(10), 3u);
}

TEST(Config, Rejections) {
  EXPECT_THROW(parse_config("colour=blue\n"), ValidationError);
  EXPECT_THROW(parse_config("window_s=abc\n"), ValidationError);
  EXPECT_THROW(parse_config("m=3\nm_pct=10\n").validate(), ValidationError);
  EXPECT_THROW(parse_config("alpha=1.5\n").validate(), ValidationError);
  EXPECT_THROW(parse_config("band_high=300:600\n").validate(1000.0), ValidationError);
  EXPECT_THROW(parse_config("shift_s=0\n").validate(), ValidationError);
}

TEST(Config, CanonicalIsStable) {
  auto a = parse_config("window_s=1\ngamma=0\n");
  auto b = parse_config("gamma=0.0\nwindow_s=1.000\n");
  EXPECT_EQ(a.canonical(), b.canonical());
  EXPECT_NE(a.canonical(), parse_config("gamma=0.1\n").canonical());
}
