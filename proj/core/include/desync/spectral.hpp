#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "desync/recording.hpp"
#include "desync/windowing.hpp"

namespace desync {

struct Band {
  double lo_hz = 0.0;
  double hi_hz = 0.0;
};

struct BandPair {
  Band high{30.0, 250.0};
  Band low{4.0, 12.0};

  void validate(double fs) const;
};

Band parse_band(std::string_view text);  // "lo:hi"

struct SpectrumBin {
  double frequency_hz;
  double energy;  // one-sided, sums to the time-domain energy
};

struct EnergyRatioSeries {
  std::string channel;
  std::vector<double> values;  // one per plan window
};

inline constexpr double kEnergyFloor = 1e-12;

std::vector<SpectrumBin> window_spectrum(std::span<const double> window, double fs);

// Band sums over bins whose centre lies in [lo, hi]; denominator floored at
// kEnergyFloor.
double energy_ratio(std::span<const double> window, double fs, const BandPair& bands);
double energy_ratio(std::span<const SpectrumBin> spectrum, const BandPair& bands);

std::vector<EnergyRatioSeries> energy_series(const MultichannelRecording& rec, const WindowPlan& plan,
                                             const BandPair& bands, unsigned threads = 0);

}  // namespace desync
