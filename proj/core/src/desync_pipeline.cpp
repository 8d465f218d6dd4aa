#include "desync/desync_pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "desync/errors.hpp"

namespace desync {

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw ValidationError("quantile of an empty set");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("quantile level must lie in [0, 1]");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

double quantile_linear(std::vector<double>& values, double p) {
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, p);
}

NetworkStatsSeries network_stats(const ConnectivityTensor& tensor, double alpha) {
  const std::size_t nch = tensor.channel_count();
  if (tensor.window_count() == 0 || nch < 2) throw ValidationError("tensor has no off-diagonal entries");
  NetworkStatsSeries s;
  std::vector<double> off;
  off.reserve(nch * (nch - 1));
  for (std::size_t w = 0; w < tensor.window_count(); ++w) {
    auto slice = tensor.slice(w);
    off.clear();
    for (std::size_t x = 0; x < nch; ++x)
      for (std::size_t y = 0; y < nch; ++y)
        if (x != y) off.push_back(slice[x * nch + y]);
    std::sort(off.begin(), off.end());
    s.p25.push_back(quantile_sorted(off, 0.25));
    s.median.push_back(quantile_sorted(off, 0.50));
    s.p75.push_back(quantile_sorted(off, 0.75));
  }
  s.p25_smooth = ewma(s.p25, alpha);
  s.median_smooth = ewma(s.median, alpha);
  s.p75_smooth = ewma(s.p75, alpha);
  return s;
}

AbnormalSets abnormal_sets(std::span<const double> slice, std::size_t channels, double p25, double p75,
                           std::size_t x) {
  if (x >= channels) throw ValidationError("channel outside network");
  AbnormalSets sets;
  for (std::size_t y = 0; y < channels; ++y) {
    if (y == x) continue;
    if (slice[y * channels + x] <= p25) sets.in.push_back(y);
    if (slice[x * channels + y] >= p75) sets.out.push_back(y);
  }
  return sets;
}

Densities densities(std::span<const double> slice, std::size_t channels, const AbnormalSets& sets,
                    std::size_t x, double median) {
  Densities d;
  for (std::size_t y : sets.in) d.psi_in += slice[y * channels + x];
  for (std::size_t y : sets.out) d.psi_out += slice[x * channels + y];
  d.psi_in_expected = static_cast<double>(sets.in.size()) * median;
  d.psi_out_expected = static_cast<double>(sets.out.size()) * median;
  return d;
}

GuardMode parse_guard_mode(std::string_view s) {
  if (s == "relative") return GuardMode::relative;
  if (s == "absolute") return GuardMode::absolute;
  throw ValidationError("desync_guard must be relative or absolute");
}

double guard_value(const DesyncGuard& guard, double median_smooth) {
  if (!(guard.epsilon > 0.0)) throw ValidationError("guard epsilon must be positive");
  if (guard.mode == GuardMode::absolute) return guard.epsilon;
  return std::max(guard.epsilon * std::sqrt(std::max(median_smooth, 0.0)), kDenominatorFloor);
}

double desync_level(const Densities& d, double guard, bool* guarded) {
  const double a = std::sqrt(d.psi_in_expected);
  const double num = a - std::sqrt(d.psi_in);
  const double den = std::sqrt(d.psi_out) - std::sqrt(d.psi_out_expected);
  if (guarded) *guarded = den < guard;
  // Summation order alone can leave a few ulps when psi_in equals its
  // expectation; such a numerator counts as zero.
  if (!(num > 1e-12 * a)) return 0.0;
  return num / std::max(den, guard);
}

std::vector<double> DesyncSeries::channel_series(std::size_t x) const {
  std::vector<double> out(windows);
  for (std::size_t w = 0; w < windows; ++w) out[w] = at(w, x);
  return out;
}

DesyncSeries desync_series(const ConnectivityTensor& tensor, const NetworkStatsSeries& stats, double alpha,
                           const DesyncGuard& guard) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in [0, 1]");
  const std::size_t nch = tensor.channel_count();
  const std::size_t nw = tensor.window_count();
  DesyncSeries out;
  out.channels = tensor.channels();
  out.windows = nw;
  out.level.assign(nw * nch, 0.0);
  out.in_size.assign(nw * nch, 0);
  out.out_size.assign(nw * nch, 0);
  out.dens.assign(nw * nch, {});
  out.guarded.assign(nw * nch, 0);

  std::vector<double> smooth;
  for (std::size_t w = 0; w < nw; ++w) {
    auto raw = tensor.slice(w);
    if (w == 0 || alpha == 1.0) {
      smooth.assign(raw.begin(), raw.end());
    } else {
      for (std::size_t i = 0; i < smooth.size(); ++i) smooth[i] = alpha * raw[i] + (1.0 - alpha) * smooth[i];
    }
    const double g = guard_value(guard, stats.median_smooth[w]);
    for (std::size_t x = 0; x < nch; ++x) {
      auto sets = abnormal_sets(smooth, nch, stats.p25_smooth[w], stats.p75_smooth[w], x);
      auto d = densities(smooth, nch, sets, x, stats.median_smooth[w]);
      bool used = false;
      const std::size_t o = w * nch + x;
      out.level[o] = desync_level(d, g, &used);
      out.in_size[o] = static_cast<std::uint32_t>(sets.in.size());
      out.out_size[o] = static_cast<std::uint32_t>(sets.out.size());
      out.dens[o] = d;
      out.guarded[o] = used ? 1 : 0;
    }
  }
  return out;
}

std::vector<double> cap_series(std::span<const double> series, double percentile) {
  if (!(percentile > 0.0 && percentile <= 100.0)) throw ValidationError("cap percentile must lie in (0, 100]");
  std::vector<double> sorted(series.begin(), series.end());
  const double cap = quantile_linear(sorted, percentile / 100.0);
  std::vector<double> out(series.begin(), series.end());
  for (double& v : out) v = std::min(v, cap);
  return out;
}

DiRun run_di_from_tensor(const ConnectivityTensor& tensor, const EpochTimes& epoch, double dt,
                         const DiParams& params) {
  DiRun run;
  run.stats = network_stats(tensor, params.alpha);
  run.desync = desync_series(tensor, run.stats, params.alpha, params.guard);
  const std::size_t nch = tensor.channel_count();
  run.capped.resize(nch);
  for (std::size_t x = 0; x < nch; ++x) run.capped[x] = cap_series(run.desync.channel_series(x), params.cap_percentile);
  run.table = score_series(tensor.channels(), run.capped, tensor.window_times(), dt, epoch, params.index, &run.charts);
  return run;
}

DiRun run_di(const MultichannelRecording& rec, const WindowPlan& plan, const EpochAnnotation& ann,
             const DiParams& params, ConnectivityTensor* tensor_out) {
  ann.validate(rec);
  auto tensor = connectivity_tensor(rec, plan, params.connectivity);
  auto run = run_di_from_tensor(tensor, {ann.t_base_s, ann.t_start_s, ann.t_end_s}, plan.shift_s, params);
  if (tensor_out) *tensor_out = std::move(tensor);
  return run;
}

IndexScoreTable compute_di(const MultichannelRecording& rec, const WindowPlan& plan,
                           const EpochAnnotation& ann, const DiParams& params) {
  return run_di(rec, plan, ann, params).table;
}

}  // namespace desync
