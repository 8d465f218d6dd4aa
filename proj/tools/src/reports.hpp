#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "desync/control_charts.hpp"
#include "desync/desync_pipeline.hpp"
#include "desync/detection_eval.hpp"
#include "desync/index_scoring.hpp"
#include "desync/spectral.hpp"

namespace desync::cli {

struct Provenance {
  std::string command;
  std::string config_hash;
  std::string input_hash;
};

std::string provenance_header(const Provenance& p);

std::string energy_csv(const Provenance& p, const std::vector<EnergyRatioSeries>& series,
                       const std::vector<double>& times);

// One row per chart point: channel, chart, t, value.
std::string charts_csv(const Provenance& p, std::string_view chart, const std::vector<ChartSeries>& charts);
std::string network_stats_csv(const Provenance& p, const NetworkStatsSeries& s, const std::vector<double>& times);

std::string scores_csv(const Provenance& p, const IndexScoreTable& table);
std::string di_series_csv(const Provenance& p, const DesyncSeries& d, const std::vector<double>& times);

struct DetectionSets {
  ChannelSet ei, di, both, any;
};

std::string detect_csv(const Provenance& p, const IndexScoreTable& ei, const IndexScoreTable& di,
                       const DetectionSets& sets);

struct PatientEval {
  std::string label;
  std::vector<EvaluationReport> reports;
};

std::string metrics_csv(const Provenance& p, const std::vector<PatientEval>& patients,
                        const std::vector<AggregateRow>& aggregate);
std::string roc_csv(const Provenance& p, const std::vector<PatientEval>& patients);

// Structured key=value summary.
class Summary {
 public:
  explicit Summary(const Provenance& p);
  void add(std::string_view key, std::string_view value);
  void add(std::string_view key, double value);
  void add(std::string_view key, std::size_t value);
  void add_set(std::string_view key, const ChannelSet& set);
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

void summarize_table(Summary& s, std::string_view prefix, const IndexScoreTable& table);

}  // namespace desync::cli
