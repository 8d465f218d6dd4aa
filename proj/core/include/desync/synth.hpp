#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "desync/recording.hpp"
#include "desync/spectral.hpp"

namespace desync {

struct SynthEdge {
  std::string source;
  std::string target;
  double lag_s = 0.02;
  double strength = 0.3;
};

enum class EventKind { desync_cut, hf_burst };

struct SynthEvent {
  EventKind kind = EventKind::desync_cut;
  double time_s = 0.0;
  std::vector<std::string> targets;
  Band band{30.0, 250.0};  // bursts only
  double amplitude = 1.0;  // bursts only, std of the added noise
};

// Text form, one key=value per line:
//   n_channels, fs_hz, duration_s, noise, seed, channel_prefix,
//   t_base_s, t_start_s, t_end_s, tau_max_s, excluded
//   edges=all                      dense graph, lags drawn in [lag_min_s, lag_max_s]
//   coupling_strength, lag_min_s, lag_max_s
//   edge=<source> <target> <lag_s> <strength>        (repeatable)
//   event=<desync-cut|hf-burst> <time_s> <t1,t2,...> [lo:hi] [amplitude]   (repeatable)
struct SynthScenario {
  std::size_t n_channels = 16;
  double fs = 1000.0;
  double duration_s = 60.0;
  double noise = 0.1;
  std::uint64_t seed = 1;
  std::string channel_prefix = "S";
  double t_base_s = 10.0;
  double t_start_s = 30.0;
  double t_end_s = 50.0;
  double tau_max_s = 0.1;
  std::vector<std::string> excluded;

  bool dense = false;
  double coupling_strength = 0.3;
  double lag_min_s = 0.01;
  double lag_max_s = 0.05;
  std::vector<SynthEdge> edges;
  std::vector<SynthEvent> events;

  std::vector<std::string> channel_names() const;
  void validate() const;
};

SynthScenario parse_scenario(std::string_view text);
std::string serialize_scenario(const SynthScenario& s);

// The benchmark network: 16 channels, dense coupling, 60 s. `kind` picks the
// event injected on the first three channels at t_start; `events = false`
// gives the null scenario.
SynthScenario benchmark_scenario(std::uint64_t seed, EventKind kind, bool events = true);

struct SynthOutput {
  MultichannelRecording recording;
  EpochAnnotation annotation;
};

SynthOutput generate(const SynthScenario& scenario);

}  // namespace desync
