#include "desync/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "desync/errors.hpp"
#include "desync/parallel.hpp"
#include "desync/text_io.hpp"
#include "fft.hpp"

namespace desync {

namespace {

void check_band(const Band& b, double fs, const char* which) {
  if (!(b.lo_hz >= 0.0 && b.lo_hz < b.hi_hz && b.hi_hz <= fs / 2.0))
    throw ValidationError(std::string(which) + " band must satisfy 0 <= lo < hi <= fs/2");
}

bool in_band(double f, const Band& b) {
  const double tol = 1e-9 * std::max(1.0, b.hi_hz);
  return f >= b.lo_hz - tol && f <= b.hi_hz + tol;
}

}  // namespace

void BandPair::validate(double fs) const {
  check_band(high, fs, "high");
  check_band(low, fs, "low");
}

Band parse_band(std::string_view text) {
  auto parts = split(text, ':');
  if (parts.size() != 2) throw ValidationError("band must be written lo:hi");
  return {parse_double(parts[0], "band low edge"), parse_double(parts[1], "band high edge")};
}

std::vector<SpectrumBin> window_spectrum(std::span<const double> window, double fs) {
  const std::size_t n = window.size();
  if (n < 2) throw ValidationError("window shorter than 2 samples");
  thread_local std::vector<std::complex<double>> dft;
  detail::real_dft(window, dft);
  std::vector<SpectrumBin> out(dft.size());
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < dft.size(); ++k) {
    const bool unpaired = k == 0 || (n % 2 == 0 && k == n / 2);
    out[k].frequency_hz = static_cast<double>(k) * fs * inv_n;
    out[k].energy = std::norm(dft[k]) * inv_n * (unpaired ? 1.0 : 2.0);
  }
  return out;
}

double energy_ratio(std::span<const SpectrumBin> spectrum, const BandPair& bands) {
  double hi = 0.0, lo = 0.0;
  for (auto& bin : spectrum) {
    if (in_band(bin.frequency_hz, bands.high)) hi += bin.energy;
    if (in_band(bin.frequency_hz, bands.low)) lo += bin.energy;
  }
  return hi / std::max(lo, kEnergyFloor);
}

double energy_ratio(std::span<const double> window, double fs, const BandPair& bands) {
  bands.validate(fs);
  auto spectrum = window_spectrum(window, fs);
  return energy_ratio(spectrum, bands);
}

std::vector<EnergyRatioSeries> energy_series(const MultichannelRecording& rec, const WindowPlan& plan,
                                             const BandPair& bands, unsigned threads) {
  bands.validate(rec.fs());
  std::vector<EnergyRatioSeries> out(rec.channel_count());
  parallel_for(rec.channel_count(), threads, [&](std::size_t c, unsigned) {
    out[c].channel = rec.channel_name(c);
    out[c].values.resize(plan.size());
    for (std::size_t w = 0; w < plan.size(); ++w) {
      auto spectrum = window_spectrum(window_view_at(rec, plan, c, w), rec.fs());
      out[c].values[w] = energy_ratio(spectrum, bands);
    }
  });
  return out;
}

}  // namespace desync
