#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "desync/control_charts.hpp"
#include "desync/recording.hpp"
#include "desync/spectral.hpp"
#include "desync/windowing.hpp"

namespace desync {

struct ChartPeak {
  std::string channel;
  double value = 0.0;            // chart value at activation
  double activation_time = 0.0;
};

// Every channel ordered by peak descending, then earlier activation, then name.
std::vector<std::size_t> rank_order(std::span<const ChartPeak> peaks);

// The first min(m, N) channels of rank_order that have a strictly positive peak.
std::vector<std::size_t> rank_by_chart(std::span<const ChartPeak> peaks, std::size_t m);

// tonicity / max(activation - t_start, dt)
double index_value(double activation_time, double tonicity, double t_start, double dt);

struct IndexParams {
  double gamma = 0.0;
  double delta_s = 5.0;
  std::size_t m = 10;
  CusumOptions cusum;
};

struct ChannelIndexScore {
  std::string channel;
  double raw_score = 0.0;
  double activation_time = 0.0;
  double tonicity = 0.0;
  double peak_chart = 0.0;
  double baseline_mean = 0.0;
  double baseline_std = 0.0;
  bool selected = false;
  bool degenerate_baseline = false;
};

struct IndexScoreTable {
  std::vector<ChannelIndexScore> rows;
  std::size_t m = 0;
  std::vector<std::size_t> ranking;   // full order, used by the M sweep
  std::vector<std::size_t> selected;  // ranked members of the top-M set
  std::vector<std::string> warnings;

  std::vector<ChartPeak> peaks() const;
};

struct EpochTimes {
  double t_base = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
};

// Shared tail of both pipelines: baseline, CUSUM, activation, tonicity,
// selection and index value. `series[c]` is the driving signal of channel c.
IndexScoreTable score_series(const std::vector<std::string>& channels,
                             const std::vector<std::vector<double>>& series,
                             std::span<const double> times, double dt, const EpochTimes& epoch,
                             const IndexParams& params, std::vector<ChartSeries>* charts = nullptr);

struct EiRun {
  std::vector<EnergyRatioSeries> series;
  std::vector<ChartSeries> charts;
  IndexScoreTable table;
};

EiRun run_ei(const MultichannelRecording& rec, const WindowPlan& plan, const EpochAnnotation& ann,
             const BandPair& bands, const IndexParams& params, unsigned threads = 0);

IndexScoreTable compute_ei(const MultichannelRecording& rec, const WindowPlan& plan,
                           const EpochAnnotation& ann, const BandPair& bands,
                           const IndexParams& params, unsigned threads = 0);

}  // namespace desync
