#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "desync/control_charts.hpp"
#include "desync/index_scoring.hpp"
#include "desync/phase_connectivity.hpp"

namespace desync {

// Linear interpolation between order statistics at h = (n-1)p. Sorts `values`.
double quantile_linear(std::vector<double>& values, double p);
double quantile_sorted(std::span<const double> sorted, double p);

struct NetworkStatsSeries {
  std::vector<double> p25, median, p75;                    // raw, per window
  std::vector<double> p25_smooth, median_smooth, p75_smooth;
};

NetworkStatsSeries network_stats(const ConnectivityTensor& tensor, double alpha);

struct AbnormalSets {
  std::vector<std::size_t> in;   // y with E(T[y->x]) <= E(P25)
  std::vector<std::size_t> out;  // y with E(T[x->y]) >= E(P75)
};

// `slice` is one window of the smoothed tensor (N*N, row = source).
AbnormalSets abnormal_sets(std::span<const double> slice, std::size_t channels, double p25, double p75,
                           std::size_t x);

struct Densities {
  double psi_in = 0.0;
  double psi_in_expected = 0.0;
  double psi_out = 0.0;
  double psi_out_expected = 0.0;
};

Densities densities(std::span<const double> slice, std::size_t channels, const AbnormalSets& sets,
                    std::size_t x, double median);

enum class GuardMode { relative, absolute };

GuardMode parse_guard_mode(std::string_view s);

struct DesyncGuard {
  GuardMode mode = GuardMode::relative;
  double epsilon = 1.0;  // relative: multiple of sqrt(E(M)); absolute: the floor itself
};

inline constexpr double kDenominatorFloor = 1e-9;

double guard_value(const DesyncGuard& guard, double median_smooth);

// (sqrt(psi_in_hat) - sqrt(psi_in)) / max(sqrt(psi_out) - sqrt(psi_out_hat), guard), or 0
// when the numerator vanishes. `guarded` reports whether the guard was used.
double desync_level(const Densities& d, double guard, bool* guarded = nullptr);

struct DesyncSeries {
  std::vector<std::string> channels;
  std::size_t windows = 0;
  // Indexed [w * N + x].
  std::vector<double> level;
  std::vector<std::uint32_t> in_size, out_size;
  std::vector<Densities> dens;
  std::vector<std::uint8_t> guarded;

  double at(std::size_t w, std::size_t x) const { return level[w * channels.size() + x]; }
  std::vector<double> channel_series(std::size_t x) const;
};

DesyncSeries desync_series(const ConnectivityTensor& tensor, const NetworkStatsSeries& stats, double alpha,
                           const DesyncGuard& guard);

// Clamps each value to the given percentile of the series.
std::vector<double> cap_series(std::span<const double> series, double percentile);

struct DiParams {
  ConnectivityOptions connectivity;
  double alpha = 1.0;
  IndexParams index;
  DesyncGuard guard;
  double cap_percentile = 99.9;
};

struct DiRun {
  NetworkStatsSeries stats;
  DesyncSeries desync;
  std::vector<std::vector<double>> capped;  // per channel, the charted series
  std::vector<ChartSeries> charts;
  IndexScoreTable table;
};

DiRun run_di_from_tensor(const ConnectivityTensor& tensor, const EpochTimes& epoch, double dt,
                         const DiParams& params);

DiRun run_di(const MultichannelRecording& rec, const WindowPlan& plan, const EpochAnnotation& ann,
             const DiParams& params, ConnectivityTensor* tensor_out = nullptr);

IndexScoreTable compute_di(const MultichannelRecording& rec, const WindowPlan& plan,
                           const EpochAnnotation& ann, const DiParams& params);

}  // namespace desync
