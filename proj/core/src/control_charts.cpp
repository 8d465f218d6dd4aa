#include "desync/control_charts.hpp"

#include <algorithm>
#include <cmath>

#include "desync/errors.hpp"
#include "desync/windowing.hpp"

namespace desync {

namespace {

void check_lengths(std::span<const double> series, std::span<const double> times) {
  if (series.size() != times.size()) throw ValidationError("series and times differ in length");
}

}  // namespace

CusumInit parse_cusum_init(std::string_view s) {
  if (s == "zero") return CusumInit::zero;
  if (s == "literal") return CusumInit::literal;
  throw ValidationError("cusum_init must be zero or literal");
}

CusumNorm parse_cusum_norm(std::string_view s) {
  if (s == "mean") return CusumNorm::mean;
  if (s == "zscore") return CusumNorm::zscore;
  throw ValidationError("cusum_norm must be mean or zscore");
}

BaselineStats baseline_stats(std::span<const double> values) {
  if (values.size() < 2) throw ValidationError("baseline interval holds fewer than 2 windows");
  BaselineStats s;
  s.count = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.count);
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(s.count - 1));
  return s;
}

BaselineStats baseline_stats(std::span<const double> series, std::span<const double> times,
                             double t_base, double t_start) {
  check_lengths(series, times);
  std::vector<double> picked;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double t = times[i];
    if (t >= t_base - time_tolerance(t_base) && t < t_start - time_tolerance(t_start))
      picked.push_back(series[i]);
  }
  return baseline_stats(picked);
}

ChartSeries cusum(std::span<const double> series, std::span<const double> times,
                  const BaselineStats& stats, double gamma, double t_start, double t_end,
                  CusumOptions options) {
  check_lengths(series, times);
  ChartSeries chart;
  chart.kind = ChartKind::cusum;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double t = times[i];
    if (t >= t_start - time_tolerance(t_start) && t <= t_end + time_tolerance(t_end)) {
      chart.windows.push_back(i);
      chart.times.push_back(t);
    }
  }
  if (chart.windows.empty()) throw ValidationError("chart interval holds no windows");
  chart.values.assign(chart.windows.size(), 0.0);

  const double scale = options.norm == CusumNorm::mean ? stats.mean : stats.std;
  if (!(std::abs(scale) >= kMeanFloor)) {
    chart.degenerate = true;
    return chart;
  }
  double g = 0.0;
  for (std::size_t k = 0; k < chart.windows.size(); ++k) {
    const double w = series[chart.windows[k]];
    if (k == 0 && options.init == CusumInit::literal) {
      g = w;
    } else {
      g = std::max(0.0, g + (w - stats.mean) / scale - gamma);
    }
    chart.values[k] = g;
  }
  return chart;
}

std::vector<double> ewma(std::span<const double> series, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in [0, 1]");
  std::vector<double> out(series.begin(), series.end());
  if (alpha == 1.0) return out;
  for (std::size_t i = 1; i < out.size(); ++i) out[i] = alpha * series[i] + (1.0 - alpha) * out[i - 1];
  return out;
}

ChartSeries ewma_chart(std::span<const double> series, std::span<const double> times, double alpha) {
  check_lengths(series, times);
  ChartSeries chart;
  chart.kind = ChartKind::ewma;
  chart.values = ewma(series, alpha);
  chart.times.assign(times.begin(), times.end());
  chart.windows.resize(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) chart.windows[i] = i;
  return chart;
}

std::size_t argmax_earliest(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

double activation_time(const ChartSeries& chart) {
  if (chart.values.empty()) throw ValidationError("empty chart");
  return chart.times[argmax_earliest(chart.values)];
}

double tonicity(std::span<const double> series, std::span<const double> times, double activation,
                double delta, double dt) {
  check_lengths(series, times);
  if (!(delta > 0.0)) throw ValidationError("tonicity interval must be positive");
  const double stop = activation + delta;
  double sum = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double t = times[i];
    if (t >= activation - time_tolerance(activation) && t < stop - time_tolerance(stop)) sum += series[i];
  }
  return dt * sum;
}

ActivationResult activation(const ChartSeries& chart, std::span<const double> series,
                            std::span<const double> times, double delta, double dt) {
  if (chart.values.empty()) throw ValidationError("empty chart");
  ActivationResult r;
  r.chart_index = argmax_earliest(chart.values);
  r.activation_time = chart.times[r.chart_index];
  r.peak_chart_value = chart.values[r.chart_index];
  r.tonicity = tonicity(series, times, r.activation_time, delta, dt);
  return r;
}

}  // namespace desync
