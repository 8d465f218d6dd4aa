#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "desync/control_charts.hpp"
#include "desync/desync_pipeline.hpp"
#include "desync/index_scoring.hpp"
#include "desync/phase_connectivity.hpp"
#include "desync/recording.hpp"
#include "desync/spectral.hpp"

namespace desync {

struct AnalysisConfig {
  double window_s = 1.0;
  double shift_s = 0.25;
  BandPair bands;
  double tau_max_s = 0.10;
  double lag_step_s = 0.010;
  double delta_s = 5.0;
  double gamma = 0.0;
  double alpha = 1.0;
  double eta = 0.0;
  std::optional<std::size_t> m;   // absolute count
  std::optional<double> m_pct;    // percent of analysed channels
  double t_base_offset_s = -20.0;
  double comb_hz = 50.0;          // 0 disables the comb filter
  double notch_bw_hz = 1.0;
  double max_harmonic_hz = 0.0;
  CusumInit cusum_init = CusumInit::zero;
  CusumNorm cusum_norm = CusumNorm::mean;
  BinRule bin_rule = BinRule::ceil;
  GuardMode desync_guard = GuardMode::relative;
  std::optional<double> desync_guard_eps;
  double cap_percentile = 99.9;

  // Applies one key=value setting; unknown keys and malformed values throw.
  void set(std::string_view key, std::string_view value);

  // Checks every field; `fs` adds the band and filter checks.
  void validate(std::optional<double> fs = std::nullopt) const;

  // M for a recording with `channels` analysed channels (default 10%).
  std::size_t resolve_m(std::size_t channels) const;

  FilterSpec filter() const;
  IndexParams index_params(std::size_t channels) const;
  DiParams di_params(std::size_t channels, unsigned threads) const;
  DesyncGuard guard() const;

  // Canonical key=value text of every field, for hashing into reports.
  std::string canonical() const;
};

AnalysisConfig parse_config(std::string_view text);
AnalysisConfig load_config(const std::string& path);

}  // namespace desync
