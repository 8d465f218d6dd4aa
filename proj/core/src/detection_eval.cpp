#include "desync/detection_eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "desync/errors.hpp"
#include "desync/text_io.hpp"

namespace desync {

std::string_view detector_name(Detector d) {
  switch (d) {
    case Detector::ei: return "EI";
    case Detector::di: return "DI";
    case Detector::ei_and_di: return "EI-and-DI";
    case Detector::ei_or_di: return "EI-or-DI";
  }
  return "?";
}

DetectionResult normalize_scores(const IndexScoreTable& table, Detector detector) {
  DetectionResult r;
  r.detector = detector;
  r.m = table.m;
  double top = 0.0;
  for (auto& row : table.rows) {
    if (row.raw_score < 0.0) throw ValidationError("raw scores must be non-negative");
    top = std::max(top, row.raw_score);
  }
  for (auto& row : table.rows) {
    r.channels.push_back(row.channel);
    r.normalized.push_back(top > 0.0 ? row.raw_score / top : 0.0);
    r.selected.push_back(row.selected);
  }
  return r;
}

ChannelSet classify(const DetectionResult& result, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw ValidationError("eta must lie in [0, 1]");
  ChannelSet out;
  for (std::size_t i = 0; i < result.channels.size(); ++i)
    if (result.selected[i] && result.normalized[i] > eta) out.insert(result.channels[i]);
  return out;
}

ChannelSet fuse(const ChannelSet& a, const ChannelSet& b, FuseMode mode) {
  ChannelSet out;
  if (mode == FuseMode::and_) {
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  } else {
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  }
  return out;
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
  return *this;
}

ConfusionCounts confusion(const ChannelSet& pred, const ChannelSet& truth, const std::vector<std::string>& all) {
  ChannelSet universe(all.begin(), all.end());
  for (auto& p : pred)
    if (!universe.count(p)) throw ValidationError("predicted channel '" + p + "' not in the channel list");
  for (auto& t : truth)
    if (!universe.count(t)) throw ValidationError("labeled channel '" + t + "' not in the channel list");
  ConfusionCounts c;
  for (auto& ch : universe) {
    const bool p = pred.count(ch) > 0, t = truth.count(ch) > 0;
    if (p && t) ++c.tp;
    else if (p) ++c.fp;
    else if (t) ++c.fn;
    else ++c.tn;
  }
  return c;
}

DetectionMetrics metrics_from_counts(const ConfusionCounts& c) {
  if (c.tp + c.fn == 0) throw ValidationError("no ground truth");
  DetectionMetrics m;
  m.counts = c;
  m.sensitivity = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  m.precision = c.tp + c.fp ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
  m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  return m;
}

DetectionMetrics detection_metrics(const ChannelSet& pred, const ChannelSet& truth,
                                   const std::vector<std::string>& all) {
  return metrics_from_counts(confusion(pred, truth, all));
}

std::size_t m_from_percent(double pct, std::size_t n) {
  if (!(pct > 0.0 && pct <= 100.0)) throw ValidationError("M percent must lie in (0, 100]");
  auto m = static_cast<std::size_t>(std::floor(pct * static_cast<double>(n) / 100.0 + 0.5 + 1e-9));
  return std::clamp<std::size_t>(m, 1, std::max<std::size_t>(n, 1));
}

double trapezoid_auc(std::vector<std::pair<double, double>> points) {
  points.emplace_back(0.0, 0.0);
  points.emplace_back(1.0, 1.0);
  std::sort(points.begin(), points.end());
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i)
    area += (points[i].first - points[i - 1].first) * (points[i].second + points[i - 1].second) / 2.0;
  return area;
}

RocCurve roc_curve(const PositiveSetFn& positives, const ChannelSet& truth,
                   const std::vector<std::string>& all, std::span<const double> sweep_pct) {
  const std::size_t n = all.size();
  if (truth.empty() || truth.size() >= n) throw ValidationError("ROC needs both positive and negative channels");
  RocCurve roc;
  std::vector<std::pair<double, double>> pts;
  for (double pct : sweep_pct) {
    RocPoint p;
    p.m_pct = pct;
    p.m = m_from_percent(pct, n);
    p.counts = confusion(positives(p.m), truth, all);
    p.tpr = static_cast<double>(p.counts.tp) / static_cast<double>(p.counts.tp + p.counts.fn);
    p.fpr = static_cast<double>(p.counts.fp) / static_cast<double>(p.counts.fp + p.counts.tn);
    pts.emplace_back(p.fpr, p.tpr);
    roc.sweep.push_back(p);
  }
  roc.auc = trapezoid_auc(pts);
  pts.emplace_back(0.0, 0.0);
  pts.emplace_back(1.0, 1.0);
  std::sort(pts.begin(), pts.end());
  roc.curve = std::move(pts);
  return roc;
}

std::vector<double> parse_sweep(std::string_view text) {
  auto parts = split(text, ':');
  if (parts.size() != 2) throw ValidationError("sweep must be written lo:hi");
  auto lo = parse_int(parts[0], "sweep start");
  auto hi = parse_int(parts[1], "sweep end");
  if (lo < 1 || hi > 100 || lo > hi) throw ValidationError("sweep must satisfy 1 <= lo <= hi <= 100");
  std::vector<double> out;
  for (auto p = lo; p <= hi; ++p) out.push_back(static_cast<double>(p));
  return out;
}

ChannelSet top_m(const std::vector<std::string>& channels, std::span<const std::size_t> ranking, std::size_t m) {
  ChannelSet out;
  for (std::size_t i = 0; i < std::min(m, ranking.size()); ++i) out.insert(channels.at(ranking[i]));
  return out;
}

std::vector<std::size_t> ranking_from_scores(std::span<const double> scores, const std::vector<std::string>& names) {
  if (scores.size() != names.size()) throw ValidationError("one score per channel required");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return names[a] < names[b];
  });
  return order;
}

namespace {

std::vector<std::string> names_of(const IndexScoreTable& t) {
  std::vector<std::string> out;
  for (auto& r : t.rows) out.push_back(r.channel);
  return out;
}

}  // namespace

RocCurve roc_auc(const std::vector<std::string>& channels, std::span<const std::size_t> ranking,
                 const ChannelSet& truth, std::span<const double> sweep_pct) {
  return roc_curve([&](std::size_t m) { return top_m(channels, ranking, m); }, truth, channels, sweep_pct);
}

RocCurve roc_auc(const IndexScoreTable& table, const ChannelSet& truth, std::span<const double> sweep_pct) {
  return roc_auc(names_of(table), table.ranking, truth, sweep_pct);
}

RocCurve roc_auc_fused(const IndexScoreTable& ei, const IndexScoreTable& di, FuseMode mode,
                       const ChannelSet& truth, std::span<const double> sweep_pct) {
  auto names = names_of(ei);
  if (names != names_of(di)) throw ValidationError("EI and DI tables cover different channels");
  return roc_curve(
      [&](std::size_t m) { return fuse(top_m(names, ei.ranking, m), top_m(names, di.ranking, m), mode); }, truth,
      names, sweep_pct);
}

std::vector<EvaluationReport> evaluate_patient(const IndexScoreTable& ei, const IndexScoreTable& di, double eta,
                                               const ChannelSet& truth, std::span<const double> sweep_pct) {
  auto names = names_of(ei);
  if (names != names_of(di)) throw ValidationError("EI and DI tables cover different channels");
  auto ei_pos = classify(normalize_scores(ei, Detector::ei), eta);
  auto di_pos = classify(normalize_scores(di, Detector::di), eta);
  std::vector<EvaluationReport> out(4);
  out[0] = {Detector::ei, ei.m, eta, ei_pos, {}, roc_auc(ei, truth, sweep_pct)};
  out[1] = {Detector::di, di.m, eta, di_pos, {}, roc_auc(di, truth, sweep_pct)};
  out[2] = {Detector::ei_and_di, ei.m, eta, fuse(ei_pos, di_pos, FuseMode::and_), {},
            roc_auc_fused(ei, di, FuseMode::and_, truth, sweep_pct)};
  out[3] = {Detector::ei_or_di, ei.m, eta, fuse(ei_pos, di_pos, FuseMode::or_), {},
            roc_auc_fused(ei, di, FuseMode::or_, truth, sweep_pct)};
  for (auto& r : out) r.metrics = detection_metrics(r.positives, truth, names);
  return out;
}

std::vector<AggregateRow> aggregate_patients(const std::vector<std::vector<EvaluationReport>>& patients) {
  if (patients.empty()) throw ValidationError("no reports to aggregate");
  const std::size_t detectors = patients[0].size();
  std::vector<AggregateRow> rows(detectors);
  for (std::size_t d = 0; d < detectors; ++d) {
    auto& row = rows[d];
    row.detector = patients[0][d].detector;
    row.patients = patients.size();
    ConfusionCounts pooled;
    std::vector<ConfusionCounts> pooled_sweep(patients[0][d].roc.sweep.size());
    for (auto& p : patients) {
      if (p.size() != detectors || p[d].detector != row.detector)
        throw ValidationError("patient reports list different detectors");
      auto& r = p[d];
      row.macro.sensitivity += r.metrics.sensitivity;
      row.macro.precision += r.metrics.precision;
      row.macro.accuracy += r.metrics.accuracy;
      row.macro_auc += r.roc.auc;
      pooled += r.metrics.counts;
      if (r.roc.sweep.size() != pooled_sweep.size()) throw ValidationError("patients use different M sweeps");
      for (std::size_t i = 0; i < pooled_sweep.size(); ++i) pooled_sweep[i] += r.roc.sweep[i].counts;
    }
    const double k = static_cast<double>(patients.size());
    row.macro.sensitivity /= k;
    row.macro.precision /= k;
    row.macro.accuracy /= k;
    row.macro.counts = pooled;
    row.macro_auc /= k;
    row.micro = metrics_from_counts(pooled);
    std::vector<std::pair<double, double>> pts;
    for (auto& c : pooled_sweep)
      pts.emplace_back(static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn),
                       static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn));
    row.micro_auc = pooled_sweep.empty() ? 0.0 : trapezoid_auc(pts);
  }
  return rows;
}

std::vector<std::string> check_fusion_laws(const std::vector<EvaluationReport>& reports) {
  std::vector<std::string> problems;
  const EvaluationReport *ei = nullptr, *di = nullptr, *both = nullptr, *any = nullptr;
  for (auto& r : reports) {
    if (r.detector == Detector::ei) ei = &r;
    if (r.detector == Detector::di) di = &r;
    if (r.detector == Detector::ei_and_di) both = &r;
    if (r.detector == Detector::ei_or_di) any = &r;
  }
  if (!ei || !di || !both || !any) return {"missing detector report"};
  if (any->metrics.sensitivity < std::max(ei->metrics.sensitivity, di->metrics.sensitivity))
    problems.push_back("OR sensitivity below one of its parts");
  for (auto& c : both->positives)
    if (!ei->positives.count(c) || !di->positives.count(c)) problems.push_back("AND positive " + c + " outside a part");
  for (std::size_t i = 0; i < any->roc.sweep.size(); ++i) {
    auto& o = any->roc.sweep[i];
    if (o.tpr < std::max(ei->roc.sweep[i].tpr, di->roc.sweep[i].tpr))
      problems.push_back("OR sweep TPR below a part at M=" + std::to_string(o.m));
    auto& a = both->roc.sweep[i];
    if (a.counts.tp + a.counts.fp > std::min(ei->roc.sweep[i].counts.tp + ei->roc.sweep[i].counts.fp,
                                             di->roc.sweep[i].counts.tp + di->roc.sweep[i].counts.fp))
      problems.push_back("AND sweep larger than a part at M=" + std::to_string(a.m));
  }
  for (auto& r : reports)
    for (auto& p : r.roc.sweep)
      if (p.m_pct == 100.0 && (p.tpr != 1.0 || p.fpr != 1.0))
        problems.push_back(std::string(detector_name(r.detector)) + " terminal point is not (1, 1)");
  return problems;
}

}  // namespace desync
