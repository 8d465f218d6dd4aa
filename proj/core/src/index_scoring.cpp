#include "desync/index_scoring.hpp"

#include <algorithm>
#include <numeric>

#include "desync/errors.hpp"

namespace desync {

std::vector<std::size_t> rank_order(std::span<const ChartPeak> peaks) {
  std::vector<std::size_t> order(peaks.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& pa = peaks[a];
    const auto& pb = peaks[b];
    if (pa.value != pb.value) return pa.value > pb.value;
    if (pa.activation_time != pb.activation_time) return pa.activation_time < pb.activation_time;
    return pa.channel < pb.channel;
  });
  return order;
}

std::vector<std::size_t> rank_by_chart(std::span<const ChartPeak> peaks, std::size_t m) {
  if (m < 1) throw ValidationError("M must be at least 1");
  std::vector<std::size_t> out;
  for (std::size_t idx : rank_order(peaks)) {
    if (out.size() == m) break;
    if (peaks[idx].value > 0.0) out.push_back(idx);
  }
  return out;
}

double index_value(double activation_time, double tonicity, double t_start, double dt) {
  return tonicity / std::max(activation_time - t_start, dt);
}

std::vector<ChartPeak> IndexScoreTable::peaks() const {
  std::vector<ChartPeak> p(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    p[i] = {rows[i].channel, rows[i].peak_chart, rows[i].activation_time};
  return p;
}

IndexScoreTable score_series(const std::vector<std::string>& channels,
                             const std::vector<std::vector<double>>& series,
                             std::span<const double> times, double dt, const EpochTimes& epoch,
                             const IndexParams& params, std::vector<ChartSeries>* charts) {
  if (channels.size() != series.size()) throw ValidationError("one series per channel required");
  if (params.m < 1) throw ValidationError("M must be at least 1");
  if (!(params.delta_s > 0.0)) throw ValidationError("delta must be positive");

  IndexScoreTable table;
  table.m = params.m;
  table.rows.resize(channels.size());
  if (charts) charts->clear();
  for (std::size_t c = 0; c < channels.size(); ++c) {
    auto& row = table.rows[c];
    row.channel = channels[c];
    auto stats = baseline_stats(series[c], times, epoch.t_base, epoch.t_start);
    row.baseline_mean = stats.mean;
    row.baseline_std = stats.std;
    auto chart = cusum(series[c], times, stats, params.gamma, epoch.t_start, epoch.t_end, params.cusum);
    chart.source = channels[c];
    row.degenerate_baseline = chart.degenerate;
    if (chart.degenerate)
      table.warnings.push_back("degenerate baseline on channel " + channels[c] + "; chart held at 0");
    auto act = activation(chart, series[c], times, params.delta_s, dt);
    row.activation_time = act.activation_time;
    row.tonicity = act.tonicity;
    row.peak_chart = act.peak_chart_value;
    if (charts) charts->push_back(std::move(chart));
  }

  auto peaks = table.peaks();
  table.ranking = rank_order(peaks);
  table.selected = rank_by_chart(peaks, params.m);
  for (std::size_t idx : table.selected) {
    auto& row = table.rows[idx];
    row.selected = true;
    row.raw_score = index_value(row.activation_time, row.tonicity, epoch.t_start, dt);
  }
  return table;
}

EiRun run_ei(const MultichannelRecording& rec, const WindowPlan& plan, const EpochAnnotation& ann,
             const BandPair& bands, const IndexParams& params, unsigned threads) {
  ann.validate(rec);
  EiRun run;
  run.series = energy_series(rec, plan, bands, threads);
  std::vector<std::vector<double>> values;
  values.reserve(run.series.size());
  for (auto& s : run.series) values.push_back(s.values);
  run.table = score_series(rec.channel_names(), values, plan.window_times, plan.shift_s,
                           {ann.t_base_s, ann.t_start_s, ann.t_end_s}, params, &run.charts);
  return run;
}

IndexScoreTable compute_ei(const MultichannelRecording& rec, const WindowPlan& plan,
                           const EpochAnnotation& ann, const BandPair& bands,
                           const IndexParams& params, unsigned threads) {
  return run_ei(rec, plan, ann, bands, params, threads).table;
}

}  // namespace desync
