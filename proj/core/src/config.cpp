#include "desync/config.hpp"

#include <cmath>

#include "desync/detection_eval.hpp"
#include "desync/errors.hpp"
#include "desync/text_io.hpp"

namespace desync {

namespace {

std::string band_text(const Band& b) { return format_double(b.lo_hz) + ":" + format_double(b.hi_hz); }

const char* name_of(CusumInit v) { return v == CusumInit::zero ? "zero" : "literal"; }
const char* name_of(CusumNorm v) { return v == CusumNorm::mean ? "mean" : "zscore"; }
const char* name_of(BinRule v) { return v == BinRule::ceil ? "ceil" : "round"; }
const char* name_of(GuardMode v) { return v == GuardMode::relative ? "relative" : "absolute"; }

}  // namespace

void AnalysisConfig::set(std::string_view key, std::string_view raw) {
  const std::string value = trim(raw);
  auto num = [&] { return parse_double(value, key); };
  if (key == "window_s") window_s = num();
  else if (key == "shift_s") shift_s = num();
  else if (key == "band_high") bands.high = parse_band(value);
  else if (key == "band_low") bands.low = parse_band(value);
  else if (key == "tau_max_s") tau_max_s = num();
  else if (key == "lag_step_s") lag_step_s = num();
  else if (key == "delta_s") delta_s = num();
  else if (key == "gamma") gamma = num();
  else if (key == "alpha") alpha = num();
  else if (key == "eta") eta = num();
  else if (key == "m") {
    auto v = parse_int(value, key);
    if (v < 1) throw ValidationError("m must be at least 1");
    m = static_cast<std::size_t>(v);
  }
  else if (key == "m_pct") m_pct = num();
  else if (key == "t_base_offset_s") t_base_offset_s = num();
  else if (key == "comb_hz") comb_hz = num();
  else if (key == "notch_bw_hz") notch_bw_hz = num();
  else if (key == "max_harmonic_hz") max_harmonic_hz = num();
  else if (key == "cusum_init") cusum_init = parse_cusum_init(value);
  else if (key == "cusum_norm") cusum_norm = parse_cusum_norm(value);
  else if (key == "bin_rule") bin_rule = parse_bin_rule(value);
  else if (key == "desync_guard") desync_guard = parse_guard_mode(value);
  else if (key == "desync_guard_eps") desync_guard_eps = num();
  else if (key == "cap_percentile") cap_percentile = num();
  else throw ValidationError("unknown config key '" + std::string(key) + "'");
}

void AnalysisConfig::validate(std::optional<double> fs) const {
  if (!(window_s > 0.0)) throw ValidationError("window_s must be positive");
  if (!(shift_s > 0.0)) throw ValidationError("shift_s must be positive");
  if (!(tau_max_s >= 0.0)) throw ValidationError("tau_max_s must be non-negative");
  if (!(lag_step_s > 0.0)) throw ValidationError("lag_step_s must be positive");
  if (tau_max_s >= window_s) throw ValidationError("tau_max_s must be shorter than the window");
  if (!(delta_s > 0.0)) throw ValidationError("delta_s must be positive");
  if (!(gamma >= 0.0)) throw ValidationError("gamma must be non-negative");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in [0, 1]");
  if (!(eta >= 0.0 && eta <= 1.0)) throw ValidationError("eta must lie in [0, 1]");
  if (m && m_pct) throw ValidationError("m and m_pct are mutually exclusive");
  if (m_pct && !(*m_pct > 0.0 && *m_pct <= 100.0)) throw ValidationError("m_pct must lie in (0, 100]");
  if (!(t_base_offset_s < 0.0)) throw ValidationError("t_base_offset_s must be negative");
  if (!(comb_hz >= 0.0)) throw ValidationError("comb_hz must be non-negative");
  if (!(notch_bw_hz > 0.0)) throw ValidationError("notch_bw_hz must be positive");
  if (desync_guard_eps && !(*desync_guard_eps > 0.0)) throw ValidationError("desync_guard_eps must be positive");
  if (!(cap_percentile > 0.0 && cap_percentile <= 100.0)) throw ValidationError("cap_percentile must lie in (0, 100]");
  if (fs) {
    bands.validate(*fs);
    if (comb_hz > 0.0) filter().validate(*fs);
    if (lag_step_s * *fs < 1.0 - 1e-9) throw ValidationError("lag_step_s is shorter than one sample");
  }
}

std::size_t AnalysisConfig::resolve_m(std::size_t channels) const {
  if (m) return *m;
  return m_from_percent(m_pct.value_or(10.0), channels);
}

FilterSpec AnalysisConfig::filter() const { return {comb_hz, notch_bw_hz, max_harmonic_hz}; }

IndexParams AnalysisConfig::index_params(std::size_t channels) const {
  IndexParams p;
  p.gamma = gamma;
  p.delta_s = delta_s;
  p.m = resolve_m(channels);
  p.cusum = {cusum_init, cusum_norm};
  return p;
}

DesyncGuard AnalysisConfig::guard() const {
  DesyncGuard g;
  g.mode = desync_guard;
  g.epsilon = desync_guard_eps.value_or(desync_guard == GuardMode::relative ? 1.0 : kDenominatorFloor);
  return g;
}

DiParams AnalysisConfig::di_params(std::size_t channels, unsigned threads) const {
  DiParams p;
  p.connectivity = {tau_max_s, lag_step_s, bin_rule, threads};
  p.alpha = alpha;
  p.index = index_params(channels);
  p.guard = guard();
  p.cap_percentile = cap_percentile;
  return p;
}

std::string AnalysisConfig::canonical() const {
  std::string out;
  auto line = [&](const char* k, const std::string& v) { out += std::string(k) + "=" + v + "\n"; };
  line("window_s", format_double(window_s));
  line("shift_s", format_double(shift_s));
  line("band_high", band_text(bands.high));
  line("band_low", band_text(bands.low));
  line("tau_max_s", format_double(tau_max_s));
  line("lag_step_s", format_double(lag_step_s));
  line("delta_s", format_double(delta_s));
  line("gamma", format_double(gamma));
  line("alpha", format_double(alpha));
  line("eta", format_double(eta));
  if (m) line("m", std::to_string(*m));
  if (m_pct) line("m_pct", format_double(*m_pct));
  line("t_base_offset_s", format_double(t_base_offset_s));
  line("comb_hz", format_double(comb_hz));
  line("notch_bw_hz", format_double(notch_bw_hz));
  line("max_harmonic_hz", format_double(max_harmonic_hz));
  line("cusum_init", name_of(cusum_init));
  line("cusum_norm", name_of(cusum_norm));
  line("bin_rule", name_of(bin_rule));
  line("desync_guard", name_of(desync_guard));
  line("desync_guard_eps", format_double(guard().epsilon));
  line("cap_percentile", format_double(cap_percentile));
  return out;
}

AnalysisConfig parse_config(std::string_view text) {
  AnalysisConfig cfg;
  auto doc = parse_key_values(text);
  for (auto& [k, v] : doc.repeated) cfg.set(k, v);
  cfg.validate();
  return cfg;
}

AnalysisConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

}  // namespace desync
