#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "desync/recording.hpp"

namespace desync {

struct WindowPlan {
  double window_s = 0.0;
  double shift_s = 0.0;
  double fs = 0.0;
  std::size_t window_samples = 0;
  std::vector<std::size_t> start_samples;
  std::vector<double> window_times;  // k * shift_s

  std::size_t size() const { return window_times.size(); }

  // Index of the window starting at `t`; throws if `t` is not a plan time.
  std::size_t index_of(double t) const;

  // Windows whose start time lies in [from, to) or [from, to].
  std::vector<std::size_t> windows_in(double from, double to, bool include_end) const;
};

WindowPlan build_plan(const MultichannelRecording& rec, double window_s, double shift_s);
WindowPlan build_plan(std::size_t sample_count, double fs, double window_s, double shift_s);

std::span<const double> window_view(const MultichannelRecording& rec, const WindowPlan& plan,
                                     std::size_t channel, double t);
std::span<const double> window_view_at(const MultichannelRecording& rec, const WindowPlan& plan,
                                       std::size_t channel, std::size_t window_index);

// Tolerance used to compare window times that were produced by arithmetic.
constexpr double time_tolerance(double t) { return 1e-9 * (t < 0 ? (-t > 1 ? -t : 1) : (t > 1 ? t : 1)); }

}  // namespace desync
