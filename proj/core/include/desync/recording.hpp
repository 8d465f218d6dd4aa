#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace desync {

/// Channel-labeled sample matrix in microvolts, stored channel-major.
///
/// Construction validates the invariants (unique non-empty names, fs > 0,
/// one full row per channel); instances are immutable afterwards and may be
/// shared freely across threads.
class MultichannelRecording {
 public:
  MultichannelRecording(std::vector<std::string> channel_names, double fs_hz,
                        std::vector<double> samples);

  std::size_t channel_count() const { return names_.size(); }
  std::size_t sample_count() const { return samples_per_channel_; }
  double fs() const { return fs_; }
  double duration_s() const { return static_cast<double>(samples_per_channel_) / fs_; }

  const std::vector<std::string>& channel_names() const { return names_; }
  const std::string& channel_name(std::size_t i) const { return names_.at(i); }
  std::span<const double> channel(std::size_t i) const;
  std::span<const double> samples() const { return samples_; }

  std::optional<std::size_t> index_of(std::string_view name) const;
  std::size_t require_index(std::string_view name) const;

 private:
  std::vector<std::string> names_;
  double fs_;
  std::size_t samples_per_channel_;
  std::vector<double> samples_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

struct EpochAnnotation {
  double t_base_s = 0.0;
  double t_start_s = 0.0;
  double t_end_s = 0.0;
  std::set<std::string> excluded_channels;  // white-matter sites
  std::set<std::string> ez_channels;        // ground-truth labels
  double epoch_duration_s = 0.0;

  // Checks ordering of the instants against the recording, disjointness
  // of the two channel sets and that every named channel exists.
  void validate(const MultichannelRecording& rec) const;
};

enum class RecordingFormat { native, csv };

RecordingFormat parse_recording_format(std::string_view tag);

// `csv_fs_hz` is required for CSV input, which carries no header for it.
MultichannelRecording load_recording(const std::string& path, RecordingFormat format,
                                     std::optional<double> csv_fs_hz = std::nullopt);
MultichannelRecording parse_native_recording(std::string_view bytes);
MultichannelRecording parse_csv_recording(std::string_view text, double fs_hz);
std::string serialize_native_recording(const MultichannelRecording& rec);
void save_native_recording(const MultichannelRecording& rec, const std::string& path);

// Missing t_base_s is filled as t_start_s + default_base_offset_s.
EpochAnnotation parse_annotation(std::string_view text, double epoch_duration_s,
                                 double default_base_offset_s = -20.0);
EpochAnnotation load_annotation(const std::string& path, double epoch_duration_s,
                                double default_base_offset_s = -20.0);
std::string serialize_annotation(const EpochAnnotation& ann);

struct FilterSpec {
  double comb_center_hz = 50.0;
  double notch_bandwidth_hz = 1.0;
  double max_harmonic_hz = 0.0;  // 0 means fs/2

  void validate(double fs) const;
};

// Zero-phase powerline removal: one second-order notch per harmonic below
// min(max_harmonic, fs/2), applied forward then backward with odd-reflection
// padding long enough for the notch transients to settle.
MultichannelRecording apply_comb_filter(const MultichannelRecording& rec, const FilterSpec& spec);
std::vector<double> comb_filter_channel(std::span<const double> x, double fs, const FilterSpec& spec);

MultichannelRecording exclude_channels(const MultichannelRecording& rec, const EpochAnnotation& ann);
MultichannelRecording exclude_channels(const MultichannelRecording& rec,
                                       const std::set<std::string>& excluded);

using ElectrodeGroups = std::vector<std::pair<std::string, std::vector<std::string>>>;

// Adjacent-contact differences per electrode, named "A1-A2".
MultichannelRecording bipolar_montage(const MultichannelRecording& rec, const ElectrodeGroups& groups);

// Groups contacts by their alphabetic prefix and orders them by the trailing
// contact number ("A'1", "A'2" ...). Channels without a trailing number are
// skipped.
ElectrodeGroups electrode_groups_from_names(const std::vector<std::string>& names);

}  // namespace desync
