#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "desync/errors.hpp"
#include "desync/recording.hpp"

namespace desync {

namespace {

struct Biquad {
  double b0, b1, b2, a1, a2;
};

// RBJ notch with -3 dB width `bw` around `f`.
Biquad notch(double f, double bw, double fs) {
  const double w0 = 2.0 * std::numbers::pi * f / fs;
  const double alpha = std::tan(std::numbers::pi * bw / fs);
  const double c = std::cos(w0);
  const double a0 = 1.0 + alpha;
  return {1.0 / a0, -2.0 * c / a0, 1.0 / a0, -2.0 * c / a0, (1.0 - alpha) / a0};
}

// Three staggered notches per harmonic flatten the stop band so the whole
// +/- bw/2 neighbourhood sits below -30 dB after the two passes.
constexpr std::array<double, 3> kStagger{-0.4, 0.0, 0.4};

std::vector<Biquad> design(double fs, const FilterSpec& spec) {
  const double nyq = fs / 2.0;
  const double ceiling = spec.max_harmonic_hz > 0 ? std::min(spec.max_harmonic_hz, nyq) : nyq;
  std::vector<Biquad> sections;
  for (int k = 1; k * spec.comb_center_hz < ceiling; ++k) {
    const double f = k * spec.comb_center_hz;
    for (double s : kStagger) {
      const double fc = f + s * spec.notch_bandwidth_hz;
      if (fc <= 0.0 || fc >= nyq) continue;
      sections.push_back(notch(fc, spec.notch_bandwidth_hz, fs));
    }
  }
  return sections;
}

void run_section(const Biquad& q, std::vector<double>& x) {
  // Transposed direct form II, state primed for a constant input of x[0].
  const double v = x.empty() ? 0.0 : x[0];
  double z2 = (q.b2 - q.a2) * v;
  double z1 = (q.b1 - q.a1) * v + z2;
  for (double& s : x) {
    const double in = s;
    const double out = q.b0 * in + z1;
    z1 = q.b1 * in - q.a1 * out + z2;
    z2 = q.b2 * in - q.a2 * out;
    s = out;
  }
}

}  // namespace

void FilterSpec::validate(double fs) const {
  if (!(comb_center_hz > 0.0)) throw ValidationError("comb center must be positive");
  if (!(comb_center_hz < fs / 2.0)) throw ValidationError("comb center must lie below fs/2");
  if (!(notch_bandwidth_hz > 0.0)) throw ValidationError("notch bandwidth must be positive");
  if (max_harmonic_hz < 0.0) throw ValidationError("max harmonic must be non-negative");
}

std::vector<double> comb_filter_channel(std::span<const double> x, double fs, const FilterSpec& spec) {
  spec.validate(fs);
  const std::size_t n = x.size();
  if (n < 2) return std::vector<double>(x.begin(), x.end());
  auto sections = design(fs, spec);
  if (sections.empty()) return std::vector<double>(x.begin(), x.end());

  const double settle_s = 10.0 / (std::numbers::pi * spec.notch_bandwidth_hz);
  const std::size_t pad = std::min<std::size_t>(n - 1, static_cast<std::size_t>(std::ceil(settle_s * fs)));
  std::vector<double> buf(n + 2 * pad);
  for (std::size_t k = 0; k < pad; ++k) {
    buf[pad - 1 - k] = 2.0 * x[0] - x[k + 1];
    buf[pad + n + k] = 2.0 * x[n - 1] - x[n - 2 - k];
  }
  std::copy(x.begin(), x.end(), buf.begin() + static_cast<std::ptrdiff_t>(pad));

  for (auto& q : sections) run_section(q, buf);
  std::reverse(buf.begin(), buf.end());
  for (auto& q : sections) run_section(q, buf);
  std::reverse(buf.begin(), buf.end());

  return std::vector<double>(buf.begin() + static_cast<std::ptrdiff_t>(pad),
                             buf.begin() + static_cast<std::ptrdiff_t>(pad + n));
}

MultichannelRecording apply_comb_filter(const MultichannelRecording& rec, const FilterSpec& spec) {
  spec.validate(rec.fs());
  std::vector<double> samples;
  samples.reserve(rec.samples().size());
  for (std::size_t c = 0; c < rec.channel_count(); ++c) {
    auto y = comb_filter_channel(rec.channel(c), rec.fs(), spec);
    samples.insert(samples.end(), y.begin(), y.end());
  }
  return MultichannelRecording(rec.channel_names(), rec.fs(), std::move(samples));
}

}  // namespace desync
