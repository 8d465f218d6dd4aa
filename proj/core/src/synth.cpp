#include "desync/synth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "desync/errors.hpp"
#include "desync/text_io.hpp"
#include "fft.hpp"

namespace desync {

namespace {

std::vector<std::string> tokens(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

std::string_view kind_name(EventKind k) { return k == EventKind::desync_cut ? "desync-cut" : "hf-burst"; }

EventKind parse_kind(std::string_view s) {
  if (s == "desync-cut") return EventKind::desync_cut;
  if (s == "hf-burst") return EventKind::hf_burst;
  throw ValidationError("unknown event kind '" + std::string(s) + "'");
}

// White Gaussian noise reshaped in the frequency domain by `weight(f)`,
// scaled to unit standard deviation.
template <class Weight>
std::vector<double> shaped_noise(std::mt19937_64& rng, std::size_t n, double fs, Weight weight) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> white(n);
  for (double& v : white) v = normal(rng);
  std::vector<std::complex<double>> half;
  detail::real_dft(white, half);
  for (std::size_t k = 0; k < half.size(); ++k) half[k] *= weight(static_cast<double>(k) * fs / static_cast<double>(n));
  std::vector<double> out;
  detail::inverse_real_dft(half, n, out);
  double mean = 0.0;
  for (double v : out) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : out) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n));
  for (double& v : out) v = sd > 0.0 ? (v - mean) / sd : 0.0;
  return out;
}

constexpr double kPinkHighPassHz = 2.0;

std::size_t to_sample(double t, double fs) { return static_cast<std::size_t>(std::floor(t * fs + 0.5)); }

}  // namespace

std::vector<std::string> SynthScenario::channel_names() const {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n_channels; ++i) names.push_back(channel_prefix + std::to_string(i + 1));
  return names;
}

void SynthScenario::validate() const {
  if (n_channels < 1) throw ValidationError("scenario needs at least one channel");
  if (!(fs > 0.0)) throw ValidationError("scenario fs must be positive");
  if (!(duration_s > 0.0)) throw ValidationError("scenario duration must be positive");
  if (!(noise >= 0.0)) throw ValidationError("noise level must be non-negative");
  if (!(lag_min_s >= 0.0 && lag_min_s <= lag_max_s && lag_max_s <= tau_max_s))
    throw ValidationError("dense lags must satisfy 0 <= lag_min <= lag_max <= tau_max");
  if (!(coupling_strength >= 0.0 && coupling_strength <= 1.0))
    throw ValidationError("coupling strength must lie in [0, 1]");
  auto names = channel_names();
  std::set<std::string> known(names.begin(), names.end());
  for (auto& e : edges) {
    if (!known.count(e.source) || !known.count(e.target)) throw ValidationError("edge names an unknown channel");
    if (e.source == e.target) throw ValidationError("self-edge on " + e.source);
    if (!(e.lag_s >= 0.0 && e.lag_s <= tau_max_s)) throw ValidationError("edge lag outside [0, tau_max]");
    if (!(e.strength >= 0.0 && e.strength <= 1.0)) throw ValidationError("edge strength outside [0, 1]");
  }
  for (auto& ev : events) {
    if (!(ev.time_s >= 0.0 && ev.time_s < duration_s)) throw ValidationError("event time outside the epoch");
    if (ev.targets.empty()) throw ValidationError("event without targets");
    for (auto& t : ev.targets)
      if (!known.count(t)) throw ValidationError("event names an unknown channel '" + t + "'");
    if (ev.kind == EventKind::hf_burst && !(ev.band.lo_hz >= 0.0 && ev.band.lo_hz < ev.band.hi_hz && ev.band.hi_hz <= fs / 2))
      throw ValidationError("burst band must satisfy 0 <= lo < hi <= fs/2");
  }
  for (auto& x : excluded)
    if (!known.count(x)) throw ValidationError("excluded channel '" + x + "' unknown");
}

SynthScenario parse_scenario(std::string_view text) {
  auto doc = parse_key_values(text);
  static const std::set<std::string> known{"n_channels", "fs_hz", "duration_s", "noise", "seed", "channel_prefix",
                                           "t_base_s", "t_start_s", "t_end_s", "tau_max_s", "excluded",
                                           "edges", "coupling_strength", "lag_min_s", "lag_max_s", "edge", "event"};
  for (auto& [k, v] : doc.values)
    if (!known.count(k)) throw ValidationError("unknown scenario key '" + k + "'");
  SynthScenario s;
  auto num = [&](const char* key, double& field) {
    if (doc.contains(key)) field = parse_double(doc.at(key), key);
  };
  if (doc.contains("n_channels")) {
    auto n = parse_int(doc.at("n_channels"), "n_channels");
    if (n < 1) throw ValidationError("n_channels must be positive");
    s.n_channels = static_cast<std::size_t>(n);
  }
  num("fs_hz", s.fs);
  num("duration_s", s.duration_s);
  num("noise", s.noise);
  if (doc.contains("seed")) {
    auto v = parse_int(doc.at("seed"), "seed");
    if (v < 0) throw ValidationError("seed must be non-negative");
    s.seed = static_cast<std::uint64_t>(v);
  }
  s.channel_prefix = doc.get_or("channel_prefix", s.channel_prefix);
  num("t_base_s", s.t_base_s);
  num("t_start_s", s.t_start_s);
  num("t_end_s", s.t_end_s);
  num("tau_max_s", s.tau_max_s);
  num("coupling_strength", s.coupling_strength);
  num("lag_min_s", s.lag_min_s);
  num("lag_max_s", s.lag_max_s);
  s.excluded = split_list(doc.get_or("excluded", ""));
  if (doc.contains("edges")) {
    auto v = doc.at("edges");
    if (v == "all") s.dense = true;
    else if (v != "none") throw ValidationError("edges must be all or none");
  }
  auto [eb, ee] = doc.repeated.equal_range("edge");
  for (auto it = eb; it != ee; ++it) {
    auto t = tokens(it->second);
    if (t.size() != 4) throw ValidationError("edge needs: source target lag_s strength");
    s.edges.push_back({t[0], t[1], parse_double(t[2], "edge lag"), parse_double(t[3], "edge strength")});
  }
  auto [vb, ve] = doc.repeated.equal_range("event");
  for (auto it = vb; it != ve; ++it) {
    auto t = tokens(it->second);
    if (t.size() < 3 || t.size() > 5) throw ValidationError("event needs: kind time_s targets [lo:hi] [amplitude]");
    SynthEvent ev;
    ev.kind = parse_kind(t[0]);
    ev.time_s = parse_double(t[1], "event time");
    ev.targets = split_list(t[2]);
    if (t.size() > 3) ev.band = parse_band(t[3]);
    if (t.size() > 4) ev.amplitude = parse_double(t[4], "event amplitude");
    s.events.push_back(std::move(ev));
  }
  s.validate();
  return s;
}

std::string serialize_scenario(const SynthScenario& s) {
  std::string out;
  out += "n_channels=" + std::to_string(s.n_channels) + "\n";
  out += "fs_hz=" + format_double(s.fs) + "\n";
  out += "duration_s=" + format_double(s.duration_s) + "\n";
  out += "noise=" + format_double(s.noise) + "\n";
  out += "seed=" + std::to_string(s.seed) + "\n";
  out += "channel_prefix=" + s.channel_prefix + "\n";
  out += "t_base_s=" + format_double(s.t_base_s) + "\n";
  out += "t_start_s=" + format_double(s.t_start_s) + "\n";
  out += "t_end_s=" + format_double(s.t_end_s) + "\n";
  out += "tau_max_s=" + format_double(s.tau_max_s) + "\n";
  if (!s.excluded.empty()) out += "excluded=" + join(s.excluded, ",") + "\n";
  out += std::string("edges=") + (s.dense ? "all" : "none") + "\n";
  out += "coupling_strength=" + format_double(s.coupling_strength) + "\n";
  out += "lag_min_s=" + format_double(s.lag_min_s) + "\n";
  out += "lag_max_s=" + format_double(s.lag_max_s) + "\n";
  for (auto& e : s.edges)
    out += "edge=" + e.source + " " + e.target + " " + format_double(e.lag_s) + " " + format_double(e.strength) + "\n";
  for (auto& ev : s.events) {
    out += "event=" + std::string(kind_name(ev.kind)) + " " + format_double(ev.time_s) + " " + join(ev.targets, ",");
    if (ev.kind == EventKind::hf_burst)
      out += " " + format_double(ev.band.lo_hz) + ":" + format_double(ev.band.hi_hz) + " " + format_double(ev.amplitude);
    out += "\n";
  }
  return out;
}

SynthScenario benchmark_scenario(std::uint64_t seed, EventKind kind, bool events) {
  SynthScenario s;
  s.seed = seed;
  s.dense = true;
  if (events) {
    SynthEvent ev;
    ev.kind = kind;
    ev.time_s = s.t_start_s;
    ev.targets = {"S1", "S2", "S3"};
    s.events.push_back(ev);
  }
  return s;
}

SynthOutput generate(const SynthScenario& sc) {
  sc.validate();
  const std::size_t n = to_sample(sc.duration_s, sc.fs);
  if (n < 2) throw ValidationError("scenario shorter than two samples");
  const std::size_t nch = sc.n_channels;
  auto names = sc.channel_names();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < nch; ++i) index[names[i]] = i;

  std::mt19937_64 rng(sc.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double two_pi = 2.0 * std::numbers::pi;

  std::vector<std::vector<double>> own(nch, std::vector<double>(n));
  for (std::size_t c = 0; c < nch; ++c) {
    const double f1 = 4.0 + 8.0 * unit(rng), f2 = 4.0 + 8.0 * unit(rng);
    const double p1 = two_pi * unit(rng), p2 = two_pi * unit(rng);
    auto pink = shaped_noise(rng, n, sc.fs, [](double f) { return f < kPinkHighPassHz ? 0.0 : 1.0 / std::sqrt(f); });
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / sc.fs;
      own[c][i] = std::sin(two_pi * f1 * t + p1) + std::sin(two_pi * f2 * t + p2) + sc.noise * pink[i];
    }
  }

  std::vector<SynthEdge> edges;
  if (sc.dense) {
    for (std::size_t a = 0; a < nch; ++a)
      for (std::size_t b = 0; b < nch; ++b) {
        if (a == b) continue;
        const double lag = sc.lag_min_s + (sc.lag_max_s - sc.lag_min_s) * unit(rng);
        edges.push_back({names[a], names[b], lag, sc.coupling_strength});
      }
  }
  edges.insert(edges.end(), sc.edges.begin(), sc.edges.end());

  std::vector<std::size_t> cut(nch, n);
  for (auto& ev : sc.events)
    if (ev.kind == EventKind::desync_cut)
      for (auto& t : ev.targets) cut[index[t]] = std::min(cut[index[t]], to_sample(ev.time_s, sc.fs));

  auto mixed = own;
  for (auto& e : edges) {
    const std::size_t a = index[e.source], b = index[e.target];
    const std::size_t lag = to_sample(e.lag_s, sc.fs);
    for (std::size_t i = lag; i < cut[b]; ++i) mixed[b][i] += e.strength * own[a][i - lag];
  }

  for (auto& ev : sc.events) {
    if (ev.kind != EventKind::hf_burst) continue;
    const std::size_t start = to_sample(ev.time_s, sc.fs);
    for (auto& t : ev.targets) {
      auto burst = shaped_noise(rng, n, sc.fs, [&](double f) { return f >= ev.band.lo_hz && f <= ev.band.hi_hz ? 1.0 : 0.0; });
      auto& x = mixed[index[t]];
      for (std::size_t i = start; i < n; ++i) x[i] += ev.amplitude * burst[i];
    }
  }

  std::vector<double> samples;
  samples.reserve(nch * n);
  for (auto& ch : mixed) samples.insert(samples.end(), ch.begin(), ch.end());
  MultichannelRecording rec(names, sc.fs, std::move(samples));

  EpochAnnotation ann;
  ann.epoch_duration_s = rec.duration_s();
  ann.t_base_s = sc.t_base_s;
  ann.t_start_s = sc.t_start_s;
  ann.t_end_s = sc.t_end_s;
  ann.excluded_channels.insert(sc.excluded.begin(), sc.excluded.end());
  for (auto& ev : sc.events) ann.ez_channels.insert(ev.targets.begin(), ev.targets.end());
  ann.validate(rec);
  return SynthOutput{std::move(rec), std::move(ann)};
}

}  // namespace desync
