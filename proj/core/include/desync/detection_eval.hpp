#pragma once

#include <cstddef>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "desync/index_scoring.hpp"

namespace desync {

enum class Detector { ei, di, ei_and_di, ei_or_di };
enum class FuseMode { and_, or_ };

std::string_view detector_name(Detector d);

using ChannelSet = std::set<std::string>;

struct DetectionResult {
  Detector detector = Detector::ei;
  std::vector<std::string> channels;
  std::vector<double> normalized;  // raw / max raw, or all 0
  std::vector<bool> selected;      // member of the top-M set
  std::size_t m = 0;
};

DetectionResult normalize_scores(const IndexScoreTable& table, Detector detector = Detector::ei);

// Selected channels with normalized score strictly above eta.
ChannelSet classify(const DetectionResult& result, double eta);

ChannelSet fuse(const ChannelSet& a, const ChannelSet& b, FuseMode mode);

struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o);
};

struct DetectionMetrics {
  double sensitivity = 0.0;
  double precision = 0.0;
  double accuracy = 0.0;
  ConfusionCounts counts;
};

ConfusionCounts confusion(const ChannelSet& pred, const ChannelSet& truth, const std::vector<std::string>& all);
DetectionMetrics metrics_from_counts(const ConfusionCounts& c);
DetectionMetrics detection_metrics(const ChannelSet& pred, const ChannelSet& truth,
                                   const std::vector<std::string>& all);

// max(1, round-half-up(pct * n / 100)), capped at n.
std::size_t m_from_percent(double pct, std::size_t n);

struct RocPoint {
  double m_pct = 0.0;
  std::size_t m = 0;
  double fpr = 0.0;
  double tpr = 0.0;
  ConfusionCounts counts;
};

struct RocCurve {
  std::vector<RocPoint> sweep;                     // in sweep order
  std::vector<std::pair<double, double>> curve;    // sorted, anchored (fpr, tpr)
  double auc = 0.0;
};

using PositiveSetFn = std::function<ChannelSet(std::size_t m)>;

// Trapezoid area under the anchored, sorted (fpr, tpr) points.
double trapezoid_auc(std::vector<std::pair<double, double>> points);

RocCurve roc_curve(const PositiveSetFn& positives, const ChannelSet& truth,
                   const std::vector<std::string>& all, std::span<const double> sweep_pct);

// Percent grid lo..hi in unit steps ("1:100").
std::vector<double> parse_sweep(std::string_view text);

// The first m entries of a full ranking, as names.
ChannelSet top_m(const std::vector<std::string>& channels, std::span<const std::size_t> ranking, std::size_t m);

// Ranking by a score vector (descending, ties by name).
std::vector<std::size_t> ranking_from_scores(std::span<const double> scores, const std::vector<std::string>& names);

RocCurve roc_auc(const std::vector<std::string>& channels, std::span<const std::size_t> ranking,
                 const ChannelSet& truth, std::span<const double> sweep_pct);
RocCurve roc_auc(const IndexScoreTable& table, const ChannelSet& truth, std::span<const double> sweep_pct);
RocCurve roc_auc_fused(const IndexScoreTable& ei, const IndexScoreTable& di, FuseMode mode,
                       const ChannelSet& truth, std::span<const double> sweep_pct);

struct EvaluationReport {
  Detector detector = Detector::ei;
  std::size_t m = 0;
  double eta = 0.0;
  ChannelSet positives;
  DetectionMetrics metrics;
  RocCurve roc;
};

// All four detectors for one patient: EI, DI and both fusions at the given M
// and eta, plus their M-sweep ROC curves.
std::vector<EvaluationReport> evaluate_patient(const IndexScoreTable& ei, const IndexScoreTable& di, double eta,
                                               const ChannelSet& truth, std::span<const double> sweep_pct);

struct AggregateRow {
  Detector detector = Detector::ei;
  std::size_t patients = 0;
  DetectionMetrics macro;  // unweighted means over patients; counts summed
  double macro_auc = 0.0;
  DetectionMetrics micro;  // from pooled confusion counts
  double micro_auc = 0.0;  // pooled counts at every sweep point
};

std::vector<AggregateRow> aggregate_patients(const std::vector<std::vector<EvaluationReport>>& patients);

// Checks the fusion laws and the terminal ROC point; returns violations.
std::vector<std::string> check_fusion_laws(const std::vector<EvaluationReport>& reports);

}  // namespace desync
