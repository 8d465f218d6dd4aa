#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "desync/detection_eval.hpp"
#include "desync/errors.hpp"

using namespace desync;

namespace {

IndexScoreTable table_of(const std::vector<double>& raw, std::size_t m) {
  IndexScoreTable t;
  t.m = m;
  std::vector<ChartPeak> peaks;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    ChannelIndexScore r;
    r.channel = "c" + std::to_string(i);
    r.raw_score = raw[i];
    r.peak_chart = raw[i];
    t.rows.push_back(r);
    peaks.push_back({r.channel, raw[i], 0.0});
  }
  t.ranking = rank_order(peaks);
  t.selected = rank_by_chart(peaks, m);
  for (auto i : t.selected) t.rows[i].selected = true;
  for (auto& r : t.rows)
    if (!r.selected) r.raw_score = 0.0;
  return t;
}

std::vector<std::string> names(std::size_t n, const char* prefix = "c") {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

std::vector<double> full_sweep() { return parse_sweep("1:100"); }

}  // namespace

TEST(Normalize, Examples) {
  auto r = normalize_scores(table_of({2, 1, 0}, 3));
  EXPECT_EQ(r.normalized, (std::vector<double>{1.0, 0.5, 0.0}));
  for (double v : normalize_scores(table_of({0, 0, 0}, 3)).normalized) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(normalize_scores(table_of({7}, 1)).normalized, (std::vector<double>{1.0}));
}

TEST(Normalize, RangeProperty) {
  std::mt19937_64 rng(91);
  std::exponential_distribution<double> d(1.0);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> raw(20);
    for (double& v : raw) v = d(rng);
    auto r = normalize_scores(table_of(raw, 20));
    double mx = 0;
    for (double v : r.normalized) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
      mx = std::max(mx, v);
    }
    EXPECT_EQ(mx, 1.0);
  }
}

TEST(Classify, Examples) {
  std::vector<double> raw(20);
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = 1.0 + static_cast<double>(i);
  auto r = normalize_scores(table_of(raw, 10));
  EXPECT_EQ(classify(r, 0.0).size(), 10u);
  EXPECT_TRUE(classify(r, 1.0).empty());
  auto s = normalize_scores(table_of({1.0, 0.5, 0.2}, 3));
  EXPECT_EQ(classify(s, 0.5), (ChannelSet{"c0"}));
  EXPECT_THROW(classify(s, 1.5), ValidationError);
}

TEST(Fuse, Examples) {
  ChannelSet ab{"A", "B"}, bc{"B", "C"};
  EXPECT_EQ(fuse(ab, bc, FuseMode::or_), (ChannelSet{"A", "B", "C"}));
  EXPECT_EQ(fuse(ab, bc, FuseMode::and_), (ChannelSet{"B"}));
  EXPECT_EQ(fuse(ab, {}, FuseMode::or_), ab);
}

TEST(Metrics, Examples) {
  auto all = names(100);
  ChannelSet truth{"c0", "c1", "c2", "c3", "c4"}, pred{"c5", "c6", "c7", "c8", "c9"};
  auto same = detection_metrics(truth, truth, all);
  EXPECT_EQ(same.sensitivity, 1.0);
  EXPECT_EQ(same.precision, 1.0);
  EXPECT_EQ(same.accuracy, 1.0);
  auto miss = detection_metrics(pred, truth, all);
  EXPECT_EQ(miss.sensitivity, 0.0);
  EXPECT_EQ(miss.precision, 0.0);
  EXPECT_DOUBLE_EQ(miss.accuracy, 0.90);
  EXPECT_EQ(detection_metrics({}, truth, all).precision, 0.0);
  EXPECT_THROW(detection_metrics(pred, {}, all), ValidationError);
  EXPECT_THROW(detection_metrics({"zz"}, truth, all), ValidationError);
}

TEST(Metrics, AccuracyOneIffExact) {
  std::mt19937_64 rng(93);
  std::bernoulli_distribution coin(0.3);
  auto all = names(12);
  for (int t = 0; t < 500; ++t) {
    ChannelSet truth, pred;
    for (auto& c : all) {
      if (coin(rng)) truth.insert(c);
      if (coin(rng)) pred.insert(c);
    }
    if (truth.empty()) continue;
    auto m = detection_metrics(pred, truth, all);
    EXPECT_EQ(m.accuracy == 1.0, pred == truth);
    EXPECT_EQ(m.counts.total(), all.size());
  }
}

TEST(MFromPercent, RoundsHalfUp) {
  EXPECT_EQ(m_from_percent(10, 152), 15u);
  EXPECT_EQ(m_from_percent(10, 116), 12u);
  EXPECT_EQ(m_from_percent(10, 16), 2u);
  EXPECT_EQ(m_from_percent(25, 10), 3u);  // 2.5 rounds up
  EXPECT_EQ(m_from_percent(1, 16), 1u);
  EXPECT_EQ(m_from_percent(100, 16), 16u);
  EXPECT_THROW(m_from_percent(0, 16), ValidationError);
}

TEST(Roc, PerfectAndInverted) {
  auto all = names(10);
  ChannelSet truth{"c0", "c1", "c2"};
  std::vector<std::size_t> perfect(10);
  std::iota(perfect.begin(), perfect.end(), 0);
  auto roc = roc_auc(all, perfect, truth, full_sweep());
  EXPECT_DOUBLE_EQ(roc.auc, 1.0);
  std::vector<std::size_t> inverted(perfect.rbegin(), perfect.rend());
  EXPECT_DOUBLE_EQ(roc_auc(all, inverted, truth, full_sweep()).auc, 0.0);
  EXPECT_EQ(roc.sweep.size(), 100u);
  EXPECT_EQ(roc.curve.front(), std::make_pair(0.0, 0.0));
  EXPECT_EQ(roc.curve.back(), std::make_pair(1.0, 1.0));
  EXPECT_EQ(roc.sweep.back().tpr, 1.0);
  EXPECT_EQ(roc.sweep.back().fpr, 1.0);
}

TEST(Roc, DegenerateTruth) {
  auto all = names(4);
  std::vector<std::size_t> r{0, 1, 2, 3};
  EXPECT_THROW(roc_auc(all, r, {}, full_sweep()), ValidationError);
  EXPECT_THROW(roc_auc(all, r, ChannelSet(all.begin(), all.end()), full_sweep()), ValidationError);
}

TEST(Roc, MatchesPairwiseRankStatistic) {
  // With every M from 1 to N on the sweep, the trapezoid area equals the
  // fraction of (positive, negative) pairs ranked correctly.
  std::mt19937_64 rng(95);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 20;
    auto all = names(n);
    std::vector<double> scores(n);
    for (double& s : scores) s = u(rng);
    ChannelSet truth;
    for (std::size_t i = 0; i < n; ++i)
      if (u(rng) < 0.3) truth.insert(all[i]);
    if (truth.empty() || truth.size() == n) continue;
    auto ranking = ranking_from_scores(scores, all);
    std::vector<double> sweep;
    for (std::size_t m = 1; m <= n; ++m) sweep.push_back(100.0 * static_cast<double>(m) / n);
    double good = 0, pairs = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (truth.count(all[i]) && !truth.count(all[j])) {
          pairs += 1;
          good += scores[i] > scores[j];
        }
    EXPECT_NEAR(roc_auc(all, ranking, truth, sweep).auc, good / pairs, 1e-12);
  }
}

TEST(Roc, MonotoneTransformInvariance) {
  std::mt19937_64 rng(97);
  std::exponential_distribution<double> d(1.0);
  auto all = names(30);
  ChannelSet truth{"c1", "c4", "c9", "c20"};
  for (int t = 0; t < 50; ++t) {
    std::vector<double> s(30), f(30);
    for (std::size_t i = 0; i < 30; ++i) {
      s[i] = d(rng);
      f[i] = std::log1p(s[i]) * 4.0 + s[i] * s[i];
    }
    EXPECT_EQ(roc_auc(all, ranking_from_scores(s, all), truth, full_sweep()).auc,
              roc_auc(all, ranking_from_scores(f, all), truth, full_sweep()).auc);
  }
}

TEST(Roc, SweepParsing) {
  EXPECT_EQ(parse_sweep("1:100").size(), 100u);
  EXPECT_EQ(parse_sweep("5:7"), (std::vector<double>{5, 6, 7}));
  EXPECT_THROW(parse_sweep("0:100"), ValidationError);
  EXPECT_THROW(parse_sweep("50:10"), ValidationError);
  EXPECT_THROW(parse_sweep("10"), ValidationError);
}

TEST(Fusion, LawsOnRandomEvaluations) {
  std::mt19937_64 rng(99);
  std::exponential_distribution<double> d(1.0);
  std::bernoulli_distribution zero(0.2);
  std::uniform_int_distribution<std::size_t> md(1, 25);
  std::uniform_real_distribution<double> ed(0.0, 0.8);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> a(25), b(25);
    for (std::size_t i = 0; i < 25; ++i) {
      a[i] = zero(rng) ? 0.0 : d(rng);
      b[i] = zero(rng) ? 0.0 : d(rng);
    }
    const std::size_t m = md(rng);
    auto ei = table_of(a, m), di = table_of(b, m);
    ChannelSet truth{"c0", "c3", "c7"};
    auto reports = evaluate_patient(ei, di, ed(rng), truth, full_sweep());
    ASSERT_EQ(reports.size(), 4u);
    EXPECT_TRUE(check_fusion_laws(reports).empty());
    EXPECT_GE(reports[3].metrics.sensitivity,
              std::max(reports[0].metrics.sensitivity, reports[1].metrics.sensitivity));
    EXPECT_LE(reports[2].metrics.sensitivity,
              std::min(reports[0].metrics.sensitivity, reports[1].metrics.sensitivity));
    for (auto& r : reports) {
      EXPECT_EQ(r.roc.sweep.back().tpr, 1.0);
      EXPECT_EQ(r.roc.sweep.back().fpr, 1.0);
      EXPECT_GE(r.roc.auc, 0.0);
      EXPECT_LE(r.roc.auc, 1.0);
    }
  }
}

TEST(Fusion, CheckerFlagsViolations) {
  auto ei = table_of({3, 2, 1, 0}, 2), di = table_of({0, 1, 2, 3}, 2);
  auto reports = evaluate_patient(ei, di, 0.0, {"c0"}, full_sweep());
  reports[2].positives.insert("c1");
  reports[3].metrics.sensitivity = 0.0;
  EXPECT_EQ(check_fusion_laws(reports).size(), 2u);
}

TEST(Aggregate, IdenticalReportsAndMacroAuc) {
  auto ei = table_of({3, 2, 1, 0, 0.5}, 2), di = table_of({0, 1, 2, 3, 0.1}, 2);
  auto one = evaluate_patient(ei, di, 0.0, {"c0", "c3"}, full_sweep());
  auto rows = aggregate_patients({one, one, one});
  for (std::size_t d = 0; d < 4; ++d) {
    EXPECT_DOUBLE_EQ(rows[d].macro.sensitivity, one[d].metrics.sensitivity);
    EXPECT_DOUBLE_EQ(rows[d].macro.precision, one[d].metrics.precision);
    EXPECT_DOUBLE_EQ(rows[d].macro.accuracy, one[d].metrics.accuracy);
    EXPECT_DOUBLE_EQ(rows[d].macro_auc, one[d].roc.auc);
    EXPECT_DOUBLE_EQ(rows[d].micro.sensitivity, one[d].metrics.sensitivity);
    EXPECT_DOUBLE_EQ(rows[d].micro_auc, one[d].roc.auc);
  }
  auto p = one, q = one;
  for (auto& r : p) r.roc.auc = 0.8;
  for (auto& r : q) r.roc.auc = 0.6;
  EXPECT_DOUBLE_EQ(aggregate_patients({p, q})[0].macro_auc, 0.7);
}

TEST(Aggregate, MacroAndMicroDifferForUnequalSizes) {
  EvaluationReport a, b;
  a.metrics = detection_metrics({"a1"}, {"a1", "a2"}, names(10, "a"));  // TP1 FN1 FP0 TN8
  b.metrics = detection_metrics({"b1", "b2"}, {"b1"}, names(4, "b"));    // TP1 FN0 FP1 TN2
  ASSERT_EQ(a.metrics.counts.tn, 8u);
  ASSERT_EQ(b.metrics.counts.tn, 2u);
  auto row = aggregate_patients({{a}, {b}})[0];
  EXPECT_DOUBLE_EQ(row.macro.sensitivity, (0.5 + 1.0) / 2);
  EXPECT_DOUBLE_EQ(row.macro.precision, (1.0 + 0.5) / 2);
  EXPECT_DOUBLE_EQ(row.macro.accuracy, (0.9 + 0.75) / 2);
  EXPECT_DOUBLE_EQ(row.micro.sensitivity, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(row.micro.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(row.micro.accuracy, 12.0 / 14.0);
  EXPECT_NE(row.macro.accuracy, row.micro.accuracy);
}
