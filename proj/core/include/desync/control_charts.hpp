#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace desync {

struct BaselineStats {
  double mean = 0.0;
  double std = 0.0;  // sample (n-1) deviation
  std::size_t count = 0;
};

enum class ChartKind { cusum, ewma };
enum class CusumInit { zero, literal };
enum class CusumNorm { mean, zscore };

CusumInit parse_cusum_init(std::string_view s);
CusumNorm parse_cusum_norm(std::string_view s);

struct CusumOptions {
  CusumInit init = CusumInit::zero;
  CusumNorm norm = CusumNorm::mean;
};

struct ChartSeries {
  ChartKind kind = ChartKind::cusum;
  std::string source;
  std::vector<std::size_t> windows;  // indices into the source series
  std::vector<double> times;
  std::vector<double> values;
  bool degenerate = false;  // baseline too small to normalize by
};

struct ActivationResult {
  double activation_time = 0.0;
  double tonicity = 0.0;
  double peak_chart_value = 0.0;
  std::size_t chart_index = 0;  // position inside ChartSeries::values
};

inline constexpr double kMeanFloor = 1e-12;

// `times` carries one entry per series value; intervals are matched against
// it with the window-time tolerance.
BaselineStats baseline_stats(std::span<const double> series, std::span<const double> times,
                             double t_base, double t_start);
BaselineStats baseline_stats(std::span<const double> values);

ChartSeries cusum(std::span<const double> series, std::span<const double> times,
                  const BaselineStats& stats, double gamma, double t_start, double t_end,
                  CusumOptions options = {});

std::vector<double> ewma(std::span<const double> series, double alpha);
ChartSeries ewma_chart(std::span<const double> series, std::span<const double> times, double alpha);

// Index of the earliest maximum; 0 for an empty chart.
std::size_t argmax_earliest(std::span<const double> values);
double activation_time(const ChartSeries& chart);

// dt * sum of series over windows with t in [activation, activation + delta).
double tonicity(std::span<const double> series, std::span<const double> times, double activation,
                double delta, double dt);

ActivationResult activation(const ChartSeries& chart, std::span<const double> series,
                            std::span<const double> times, double delta, double dt);

}  // namespace desync
