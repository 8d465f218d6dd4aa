#include "desync/windowing.hpp"

#include <cmath>

#include "desync/errors.hpp"
#include "desync/text_io.hpp"

namespace desync {

namespace {

std::size_t round_half_up(double v) { return static_cast<std::size_t>(std::floor(v + 0.5)); }

}  // namespace

WindowPlan build_plan(std::size_t sample_count, double fs, double window_s, double shift_s) {
  if (!(fs > 0.0)) throw ValidationError("sampling rate must be positive");
  if (!(shift_s > 0.0)) throw ValidationError("window shift must be positive");
  if (!(window_s > 0.0)) throw ValidationError("window length must be positive");
  const double duration = static_cast<double>(sample_count) / fs;
  if (window_s > duration + time_tolerance(duration))
    throw ValidationError("window longer than recording");

  WindowPlan plan;
  plan.window_s = window_s;
  plan.shift_s = shift_s;
  plan.fs = fs;
  plan.window_samples = round_half_up(window_s * fs);
  if (plan.window_samples < 2) throw ValidationError("window must span at least 2 samples");
  if (plan.window_samples > sample_count) throw ValidationError("window longer than recording");

  auto count = static_cast<std::size_t>(std::floor((duration - window_s) / shift_s + 1e-9)) + 1;
  // Sample quantization can push the very last start one sample too far.
  while (count > 1 && round_half_up((count - 1) * shift_s * fs) + plan.window_samples > sample_count)
    --count;
  plan.start_samples.resize(count);
  plan.window_times.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    plan.window_times[k] = static_cast<double>(k) * shift_s;
    plan.start_samples[k] = round_half_up(plan.window_times[k] * fs);
  }
  return plan;
}

WindowPlan build_plan(const MultichannelRecording& rec, double window_s, double shift_s) {
  return build_plan(rec.sample_count(), rec.fs(), window_s, shift_s);
}

std::size_t WindowPlan::index_of(double t) const {
  const double k = std::round(t / shift_s);
  if (k >= 0 && k < static_cast<double>(size())) {
    auto i = static_cast<std::size_t>(k);
    if (std::abs(window_times[i] - t) <= time_tolerance(t)) return i;
  }
  throw ValidationError("time " + format_double(t) + " s is not a window of the plan");
}

std::vector<std::size_t> WindowPlan::windows_in(double from, double to, bool include_end) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i) {
    const double t = window_times[i];
    if (t < from - time_tolerance(from)) continue;
    if (include_end ? t > to + time_tolerance(to) : t >= to - time_tolerance(to)) continue;
    out.push_back(i);
  }
  return out;
}

std::span<const double> window_view_at(const MultichannelRecording& rec, const WindowPlan& plan,
                                       std::size_t channel, std::size_t window_index) {
  if (window_index >= plan.size()) throw ValidationError("window index outside plan");
  return rec.channel(channel).subspan(plan.start_samples[window_index], plan.window_samples);
}

std::span<const double> window_view(const MultichannelRecording& rec, const WindowPlan& plan,
                                    std::size_t channel, double t) {
  return window_view_at(rec, plan, channel, plan.index_of(t));
}

}  // namespace desync
