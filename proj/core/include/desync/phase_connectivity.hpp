#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "desync/recording.hpp"
#include "desync/windowing.hpp"

namespace desync {

enum class BinRule { ceil, round };

BinRule parse_bin_rule(std::string_view s);

struct PhaseBinning {
  std::size_t bin_count = 0;
  double bin_width = 0.0;  // 2*pi / bin_count
};

PhaseBinning phase_bins(std::size_t n, BinRule rule = BinRule::ceil);

// Phases of the analytic signal, mapped into [-pi, pi).
std::vector<double> instantaneous_phase(std::span<const double> window);

std::size_t phase_bin_index(double phase, const PhaseBinning& binning);
std::vector<std::uint8_t> bin_phases(std::span<const double> phases, const PhaseBinning& binning);

// Lagged phase transfer entropy x -> y in nats, from plug-in histograms over
// the n - lag aligned triples (x[s], y[s], y[s+lag]). Clamped at 0.
double pte_lagged(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y, std::size_t lag,
                  std::size_t bin_count);

struct LagGrid {
  double tau_max_s = 0.1;
  double lag_step_s = 0.01;
  double fs = 0.0;
  std::vector<std::size_t> lags;  // samples, strictly increasing, starts at 0

  double delay_s(std::size_t lag_index) const { return static_cast<double>(lags.at(lag_index)) / fs; }
};

LagGrid make_lag_grid(double tau_max_s, double lag_step_s, double fs);

struct PteMax {
  double value = 0.0;
  std::size_t lag_index = 0;  // smallest grid lag attaining the maximum
  double delay_s = 0.0;
};

PteMax pte_max(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y, const LagGrid& grid,
               std::size_t bin_count);

struct ConnectivityOptions {
  double tau_max_s = 0.1;
  double lag_step_s = 0.01;
  BinRule bin_rule = BinRule::ceil;
  unsigned threads = 0;
};

// values[(w*N + x)*N + y] is T_{x->y} at window w; the diagonal holds 0.
class ConnectivityTensor {
 public:
  ConnectivityTensor() = default;
  ConnectivityTensor(std::vector<std::string> channels, std::vector<double> window_times, LagGrid grid);

  std::size_t window_count() const { return window_times_.size(); }
  std::size_t channel_count() const { return channels_.size(); }
  const std::vector<std::string>& channels() const { return channels_; }
  const std::vector<double>& window_times() const { return window_times_; }
  const LagGrid& grid() const { return grid_; }

  std::size_t offset(std::size_t w, std::size_t x, std::size_t y) const {
    return (w * channels_.size() + x) * channels_.size() + y;
  }
  double value(std::size_t w, std::size_t x, std::size_t y) const { return values_[offset(w, x, y)]; }
  double delay_s(std::size_t w, std::size_t x, std::size_t y) const {
    return grid_.delay_s(lag_index_[offset(w, x, y)]);
  }
  std::uint16_t lag_index(std::size_t w, std::size_t x, std::size_t y) const {
    return lag_index_[offset(w, x, y)];
  }

  std::span<const double> slice(std::size_t w) const;  // N*N values of one window
  std::span<double> slice_mut(std::size_t w);
  std::span<std::uint16_t> lag_slice_mut(std::size_t w);

  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<std::string> channels_;
  std::vector<double> window_times_;
  LagGrid grid_;
  std::vector<double> values_;
  std::vector<std::uint16_t> lag_index_;
};

ConnectivityTensor connectivity_tensor(const MultichannelRecording& rec, const WindowPlan& plan,
                                       const ConnectivityOptions& options = {});

// All ordered pairs of one window from pre-binned channels (row-major, n each).
void window_connectivity(std::span<const std::uint8_t> bins, std::size_t channels, std::size_t n,
                         std::size_t bin_count, const LagGrid& grid, std::span<double> values,
                         std::span<std::uint16_t> lag_index);

// Tensor dump: text header then float32 values and float32 delays (seconds).
std::string serialize_tensor(const ConnectivityTensor& tensor);
ConnectivityTensor parse_tensor(std::string_view bytes);
void save_tensor(const ConnectivityTensor& tensor, const std::string& path);
ConnectivityTensor load_tensor(const std::string& path);

}  // namespace desync
