#include "desync/phase_connectivity.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "desync/errors.hpp"
#include "desync/parallel.hpp"
#include "fft.hpp"

namespace desync {

namespace {

constexpr double kPi = std::numbers::pi;

// Histogram entropies are carried as F = sum c*ln(c); with m tuples
// H = ln(m) - F/m, so the ln(m) terms of the four-entropy combination
// cancel and PTE = (F3 + F1 - F2 - F2b) / m.
class EntropyTables {
 public:
  explicit EntropyTables(std::size_t n) : up_(n + 1), down_(n + 2) {
    auto clogc = [](std::size_t c) { return c ? static_cast<double>(c) * std::log(static_cast<double>(c)) : 0.0; };
    for (std::size_t c = 0; c <= n; ++c) up_[c] = clogc(c + 1) - clogc(c);
    for (std::size_t c = 1; c <= n + 1; ++c) down_[c] = clogc(c - 1) - clogc(c);
  }
  double up(std::uint32_t c) const { return up_[c]; }      // c -> c+1
  double down(std::uint32_t c) const { return down_[c]; }  // c -> c-1

 private:
  std::vector<double> up_, down_;
};

class PairKernel {
 public:
  PairKernel(std::size_t n, std::size_t bins, const LagGrid& grid)
      : n_(n), b_(bins), grid_(grid), tables_(n),
        h1_(bins, 0), h2_(bins * bins, 0), h3_(bins * bins * bins, 0),
        xy_(n), f1_(grid.lags.size()), f2b_(grid.lags.size()) {}

  // Per-target terms F1(y) and F2b(y, y_lag) for every grid lag.
  void prepare_target(const std::uint8_t* y) {
    double f1 = 0.0;
    for (std::size_t s = 0; s < n_; ++s) f1 += tables_.up(h1_[y[s]]++);
    std::size_t m_prev = n_;
    for (std::size_t k = 0; k < grid_.lags.size(); ++k) {
      const std::size_t m = n_ - grid_.lags[k];
      for (std::size_t s = m; s < m_prev; ++s) f1 += tables_.down(h1_[y[s]]--);
      m_prev = m;
      f1_[k] = f1;
      const std::size_t lag = grid_.lags[k];
      double f2b = 0.0;
      for (std::size_t s = 0; s < m; ++s) f2b += tables_.up(h2_[y[s] * b_ + y[s + lag]]++);
      for (std::size_t s = 0; s < m; ++s) h2_[y[s] * b_ + y[s + lag]] = 0;
      f2b_[k] = f2b;
    }
    for (std::size_t s = 0; s < m_prev; ++s) h1_[y[s]] = 0;
  }

  PteMax pair(const std::uint8_t* x, const std::uint8_t* y) {
    for (std::size_t s = 0; s < n_; ++s) xy_[s] = static_cast<std::uint16_t>(x[s] * b_ + y[s]);
    double f2 = 0.0;
    for (std::size_t s = 0; s < n_; ++s) f2 += tables_.up(h2_[xy_[s]]++);
    PteMax best;
    std::size_t m_prev = n_;
    for (std::size_t k = 0; k < grid_.lags.size(); ++k) {
      const std::size_t lag = grid_.lags[k];
      const std::size_t m = n_ - lag;
      for (std::size_t s = m; s < m_prev; ++s) f2 += tables_.down(h2_[xy_[s]]--);
      m_prev = m;
      if (lag == 0) continue;  // the triple collapses: exactly 0
      double f3 = 0.0;
      for (std::size_t s = 0; s < m; ++s) f3 += tables_.up(h3_[xy_[s] * b_ + y[s + lag]]++);
      for (std::size_t s = 0; s < m; ++s) h3_[xy_[s] * b_ + y[s + lag]] = 0;
      double v = ((f3 - f2) + (f1_[k] - f2b_[k])) / static_cast<double>(m);
      if (v > best.value) {
        best.value = v;
        best.lag_index = k;
      }
    }
    for (std::size_t s = 0; s < m_prev; ++s) h2_[xy_[s]] = 0;
    best.delay_s = grid_.delay_s(best.lag_index);
    return best;
  }

 private:
  std::size_t n_, b_;
  const LagGrid& grid_;
  EntropyTables tables_;
  std::vector<std::uint32_t> h1_, h2_, h3_;
  std::vector<std::uint16_t> xy_;
  std::vector<double> f1_, f2b_;
};

void check_bins(std::span<const std::uint8_t> v, std::size_t bins) {
  for (auto b : v)
    if (b >= bins) throw ValidationError("bin index outside [0, B)");
}

}  // namespace

BinRule parse_bin_rule(std::string_view s) {
  if (s == "ceil") return BinRule::ceil;
  if (s == "round") return BinRule::round;
  throw ValidationError("bin_rule must be ceil or round");
}

PhaseBinning phase_bins(std::size_t n, BinRule rule) {
  if (n < 2) throw ValidationError("phase binning needs n >= 2");
  const double sturges = std::log2(static_cast<double>(n)) + 1.0;
  // Exact powers of two must not be pushed up by log2 rounding.
  const double snapped = std::abs(sturges - std::round(sturges)) < 1e-12 ? std::round(sturges) : sturges;
  const double b = rule == BinRule::ceil ? std::ceil(snapped) : std::floor(snapped + 0.5);
  PhaseBinning pb;
  pb.bin_count = static_cast<std::size_t>(b);
  if (pb.bin_count > 255) throw ValidationError("window too long for 8-bit phase bins");
  pb.bin_width = 2.0 * kPi / b;
  return pb;
}

std::vector<double> instantaneous_phase(std::span<const double> window) {
  if (window.size() < 4) throw ValidationError("instantaneous phase needs n >= 4");
  thread_local std::vector<std::complex<double>> z;
  detail::analytic_signal(window, z);
  std::vector<double> phase(window.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    double p = std::atan2(z[i].imag(), z[i].real());
    phase[i] = p >= kPi ? p - 2.0 * kPi : p;
  }
  return phase;
}

std::size_t phase_bin_index(double phase, const PhaseBinning& binning) {
  double p = phase;
  if (p < -kPi || p >= kPi) p -= 2.0 * kPi * std::floor((p + kPi) / (2.0 * kPi));
  auto b = static_cast<long long>(std::floor((p + kPi) / binning.bin_width));
  if (b < 0) b = 0;
  if (b >= static_cast<long long>(binning.bin_count)) b = static_cast<long long>(binning.bin_count) - 1;
  return static_cast<std::size_t>(b);
}

std::vector<std::uint8_t> bin_phases(std::span<const double> phases, const PhaseBinning& binning) {
  std::vector<std::uint8_t> out(phases.size());
  for (std::size_t i = 0; i < phases.size(); ++i)
    out[i] = static_cast<std::uint8_t>(phase_bin_index(phases[i], binning));
  return out;
}

LagGrid make_lag_grid(double tau_max_s, double lag_step_s, double fs) {
  if (!(fs > 0.0)) throw ValidationError("sampling rate must be positive");
  if (!(tau_max_s >= 0.0)) throw ValidationError("tau_max must be non-negative");
  if (!(lag_step_s > 0.0)) throw ValidationError("lag step must be positive");
  if (lag_step_s * fs < 1.0 - 1e-9) throw ValidationError("lag step is shorter than one sample");
  LagGrid g;
  g.tau_max_s = tau_max_s;
  g.lag_step_s = lag_step_s;
  g.fs = fs;
  const auto count = static_cast<std::size_t>(std::floor(tau_max_s / lag_step_s + 1e-9)) + 1;
  for (std::size_t k = 0; k < count; ++k)
    g.lags.push_back(static_cast<std::size_t>(std::floor(static_cast<double>(k) * lag_step_s * fs + 0.5)));
  if (g.lags.size() > 65535) throw ValidationError("lag grid too large");
  return g;
}

double pte_lagged(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y, std::size_t lag,
                  std::size_t bin_count) {
  const std::size_t n = x.size();
  if (y.size() != n) throw ValidationError("phase sequences differ in length");
  if (lag >= n) throw ValidationError("lag must be shorter than the window");
  check_bins(x, bin_count);
  check_bins(y, bin_count);
  if (lag == 0) return 0.0;
  const std::size_t m = n - lag;
  const std::size_t b = bin_count;
  EntropyTables t(m);
  std::vector<std::uint32_t> h1(b, 0), h2(b * b, 0), h2b(b * b, 0), h3(b * b * b, 0);
  double f1 = 0, f2 = 0, f2b = 0, f3 = 0;
  for (std::size_t s = 0; s < m; ++s) {
    const std::size_t xs = x[s], ys = y[s], yl = y[s + lag];
    f1 += t.up(h1[ys]++);
    f2 += t.up(h2[xs * b + ys]++);
    f2b += t.up(h2b[ys * b + yl]++);
    f3 += t.up(h3[(xs * b + ys) * b + yl]++);
  }
  return std::max(0.0, ((f3 - f2) + (f1 - f2b)) / static_cast<double>(m));
}

PteMax pte_max(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y, const LagGrid& grid,
               std::size_t bin_count) {
  if (grid.lags.empty()) throw ValidationError("empty lag grid");
  PteMax best;
  for (std::size_t k = 0; k < grid.lags.size(); ++k) {
    double v = pte_lagged(x, y, grid.lags[k], bin_count);
    if (v > best.value) {
      best.value = v;
      best.lag_index = k;
    }
  }
  best.delay_s = grid.delay_s(best.lag_index);
  return best;
}

ConnectivityTensor::ConnectivityTensor(std::vector<std::string> channels, std::vector<double> window_times,
                                       LagGrid grid)
    : channels_(std::move(channels)), window_times_(std::move(window_times)), grid_(std::move(grid)) {
  const std::size_t total = window_times_.size() * channels_.size() * channels_.size();
  values_.assign(total, 0.0);
  lag_index_.assign(total, 0);
}

std::span<const double> ConnectivityTensor::slice(std::size_t w) const {
  const std::size_t nn = channels_.size() * channels_.size();
  return std::span<const double>(values_).subspan(w * nn, nn);
}

std::span<double> ConnectivityTensor::slice_mut(std::size_t w) {
  const std::size_t nn = channels_.size() * channels_.size();
  return std::span<double>(values_).subspan(w * nn, nn);
}

std::span<std::uint16_t> ConnectivityTensor::lag_slice_mut(std::size_t w) {
  const std::size_t nn = channels_.size() * channels_.size();
  return std::span<std::uint16_t>(lag_index_).subspan(w * nn, nn);
}

void window_connectivity(std::span<const std::uint8_t> bins, std::size_t channels, std::size_t n,
                         std::size_t bin_count, const LagGrid& grid, std::span<double> values,
                         std::span<std::uint16_t> lag_index) {
  if (grid.lags.empty()) throw ValidationError("empty lag grid");
  if (grid.lags.back() >= n) throw ValidationError("largest lag must be shorter than the window");
  PairKernel kernel(n, bin_count, grid);
  for (std::size_t y = 0; y < channels; ++y) {
    const std::uint8_t* by = bins.data() + y * n;
    kernel.prepare_target(by);
    for (std::size_t x = 0; x < channels; ++x) {
      const std::size_t o = x * channels + y;
      if (x == y) {
        values[o] = 0.0;
        lag_index[o] = 0;
        continue;
      }
      auto r = kernel.pair(bins.data() + x * n, by);
      values[o] = r.value;
      lag_index[o] = static_cast<std::uint16_t>(r.lag_index);
    }
  }
}

ConnectivityTensor connectivity_tensor(const MultichannelRecording& rec, const WindowPlan& plan,
                                       const ConnectivityOptions& options) {
  const std::size_t n = plan.window_samples;
  const std::size_t nch = rec.channel_count();
  auto grid = make_lag_grid(options.tau_max_s, options.lag_step_s, rec.fs());
  if (grid.lags.back() >= n) throw ValidationError("tau_max must be shorter than the window");
  auto binning = phase_bins(n, options.bin_rule);
  ConnectivityTensor tensor(rec.channel_names(), plan.window_times, grid);

  const unsigned threads = resolve_threads(options.threads);
  std::vector<std::vector<std::uint8_t>> scratch(threads);
  parallel_for(plan.size(), threads, [&](std::size_t w, unsigned worker) {
    auto& bins = scratch[worker];
    bins.resize(nch * n);
    for (std::size_t c = 0; c < nch; ++c) {
      auto b = bin_phases(instantaneous_phase(window_view_at(rec, plan, c, w)), binning);
      std::copy(b.begin(), b.end(), bins.begin() + static_cast<std::ptrdiff_t>(c * n));
    }
    window_connectivity(bins, nch, n, binning.bin_count, tensor.grid(), tensor.slice_mut(w),
                        tensor.lag_slice_mut(w));
  });
  return tensor;
}

}  // namespace desync
