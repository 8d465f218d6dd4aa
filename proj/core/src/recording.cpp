#include "desync/recording.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <sstream>

#include "desync/errors.hpp"
#include "desync/text_io.hpp"

namespace desync {

namespace {

void check_name(const std::string& name) {
  if (name.empty()) throw ValidationError("empty channel name");
  if (name.find_first_of(",\n\r=") != std::string::npos)
    throw ValidationError("channel name '" + name + "' contains a reserved character");
}

std::uint32_t byteswap32(std::uint32_t v) {
  return (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
}

}  // namespace

MultichannelRecording::MultichannelRecording(std::vector<std::string> channel_names, double fs_hz,
                                             std::vector<double> samples)
    : names_(std::move(channel_names)), fs_(fs_hz), samples_(std::move(samples)) {
  if (names_.empty()) throw ValidationError("no channels");
  if (!(fs_ > 0.0) || !std::isfinite(fs_)) throw ValidationError("sampling rate must be positive");
  if (samples_.size() % names_.size() != 0)
    throw ValidationError("inconsistent channel lengths");
  samples_per_channel_ = samples_.size() / names_.size();
  for (std::size_t i = 0; i < names_.size(); ++i) {
    check_name(names_[i]);
    if (!index_.emplace(names_[i], i).second)
      throw ValidationError("duplicate channel name '" + names_[i] + "'");
  }
}

std::span<const double> MultichannelRecording::channel(std::size_t i) const {
  if (i >= names_.size()) throw ValidationError("channel index out of range");
  return std::span<const double>(samples_).subspan(i * samples_per_channel_, samples_per_channel_);
}

std::optional<std::size_t> MultichannelRecording::index_of(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t MultichannelRecording::require_index(std::string_view name) const {
  auto idx = index_of(name);
  if (!idx) throw ValidationError("unknown channel '" + std::string(name) + "'");
  return *idx;
}

void EpochAnnotation::validate(const MultichannelRecording& rec) const {
  const double tol = 1e-9 * std::max(1.0, epoch_duration_s);
  if (!(t_base_s < t_start_s)) throw ValidationError("annotation requires t_base < t_start");
  if (!(t_start_s < t_end_s)) throw ValidationError("annotation requires t_start < t_end");
  if (t_end_s > epoch_duration_s + tol)
    throw ValidationError("annotation t_end exceeds the epoch duration");
  for (auto& name : excluded_channels) rec.require_index(name);
  for (auto& name : ez_channels) {
    rec.require_index(name);
    if (excluded_channels.count(name))
      throw ValidationError("channel '" + name + "' is both excluded and labeled EZ");
  }
}

RecordingFormat parse_recording_format(std::string_view tag) {
  if (tag == "native") return RecordingFormat::native;
  if (tag == "csv") return RecordingFormat::csv;
  throw ValidationError("unknown recording format '" + std::string(tag) + "'");
}

MultichannelRecording parse_native_recording(std::string_view bytes) {
  static constexpr std::string_view kEnd = "end_header\n";
  auto end = bytes.find(kEnd);
  if (end == std::string_view::npos) throw ValidationError("malformed header: no end_header");
  auto doc = parse_key_values(bytes.substr(0, end));
  if (doc.at("version") != "1") throw ValidationError("unsupported recording version");
  if (doc.at("encoding") != "f32le") throw ValidationError("unsupported sample encoding");
  double fs = parse_double(doc.at("fs_hz"), "fs_hz");
  long long nch = parse_int(doc.at("n_channels"), "n_channels");
  long long ns = parse_int(doc.at("n_samples"), "n_samples");
  auto names = split_list(doc.at("channels"));
  if (nch < 0 || ns < 0) throw ValidationError("malformed header: negative dimension");
  if (static_cast<long long>(names.size()) != nch)
    throw ValidationError("malformed header: channel list does not match n_channels");
  auto payload = bytes.substr(end + kEnd.size());
  const std::size_t count = static_cast<std::size_t>(nch) * static_cast<std::size_t>(ns);
  if (payload.size() != count * 4) throw ValidationError("inconsistent channel lengths");
  std::vector<double> samples(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t u;
    std::memcpy(&u, payload.data() + 4 * i, 4);
    if constexpr (std::endian::native == std::endian::big) u = byteswap32(u);
    float f;
    std::memcpy(&f, &u, 4);
    samples[i] = f;
  }
  return MultichannelRecording(std::move(names), fs, std::move(samples));
}

MultichannelRecording parse_csv_recording(std::string_view text, double fs_hz) {
  auto lines = split(text, '\n');
  std::size_t li = 0;
  while (li < lines.size() && trim(lines[li]).empty()) ++li;
  if (li == lines.size()) throw ValidationError("no channels");
  auto names = split_list(lines[li++]);
  const std::size_t nch = names.size();
  if (nch == 0) throw ValidationError("no channels");
  std::vector<std::vector<double>> rows(nch);
  for (; li < lines.size(); ++li) {
    auto line = trim(lines[li]);
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != nch) throw ValidationError("inconsistent channel lengths");
    for (std::size_t c = 0; c < nch; ++c) rows[c].push_back(parse_double(cells[c], "sample"));
  }
  std::vector<double> samples;
  samples.reserve(nch * (rows.empty() ? 0 : rows[0].size()));
  for (auto& r : rows) samples.insert(samples.end(), r.begin(), r.end());
  return MultichannelRecording(std::move(names), fs_hz, std::move(samples));
}

MultichannelRecording load_recording(const std::string& path, RecordingFormat format,
                                     std::optional<double> csv_fs_hz) {
  auto bytes = read_file(path);
  if (format == RecordingFormat::native) return parse_native_recording(bytes);
  if (!csv_fs_hz) throw ValidationError("CSV recordings need an explicit sampling rate");
  return parse_csv_recording(bytes, *csv_fs_hz);
}

std::string serialize_native_recording(const MultichannelRecording& rec) {
  std::string out;
  out += "version=1\n";
  out += "fs_hz=" + format_double(rec.fs()) + "\n";
  out += "n_channels=" + std::to_string(rec.channel_count()) + "\n";
  out += "n_samples=" + std::to_string(rec.sample_count()) + "\n";
  out += "channels=" + join(rec.channel_names(), ",") + "\n";
  out += "encoding=f32le\n";
  out += "end_header\n";
  auto data = rec.samples();
  const std::size_t head = out.size();
  out.resize(head + 4 * data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    float f = static_cast<float>(data[i]);
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    if constexpr (std::endian::native == std::endian::big) u = byteswap32(u);
    std::memcpy(out.data() + head + 4 * i, &u, 4);
  }
  return out;
}

void save_native_recording(const MultichannelRecording& rec, const std::string& path) {
  write_file_atomic(path, serialize_native_recording(rec));
}

EpochAnnotation parse_annotation(std::string_view text, double epoch_duration_s,
                                 double default_base_offset_s) {
  auto doc = parse_key_values(text);
  static const std::set<std::string> known{"t_base_s", "t_start_s", "t_end_s", "excluded", "ez"};
  for (auto& [k, v] : doc.values)
    if (!known.count(k)) throw ValidationError("unknown annotation key '" + k + "'");
  EpochAnnotation ann;
  ann.epoch_duration_s = epoch_duration_s;
  ann.t_start_s = parse_double(doc.at("t_start_s"), "t_start_s");
  ann.t_end_s = parse_double(doc.at("t_end_s"), "t_end_s");
  ann.t_base_s = doc.contains("t_base_s") ? parse_double(doc.at("t_base_s"), "t_base_s")
                                          : ann.t_start_s + default_base_offset_s;
  for (auto& n : split_list(doc.get_or("excluded", ""))) ann.excluded_channels.insert(n);
  for (auto& n : split_list(doc.get_or("ez", ""))) ann.ez_channels.insert(n);
  return ann;
}

EpochAnnotation load_annotation(const std::string& path, double epoch_duration_s,
                                double default_base_offset_s) {
  return parse_annotation(read_file(path), epoch_duration_s, default_base_offset_s);
}

std::string serialize_annotation(const EpochAnnotation& ann) {
  std::vector<std::string> ex(ann.excluded_channels.begin(), ann.excluded_channels.end());
  std::vector<std::string> ez(ann.ez_channels.begin(), ann.ez_channels.end());
  std::string out;
  out += "t_base_s=" + format_double(ann.t_base_s) + "\n";
  out += "t_start_s=" + format_double(ann.t_start_s) + "\n";
  out += "t_end_s=" + format_double(ann.t_end_s) + "\n";
  out += "excluded=" + join(ex, ",") + "\n";
  out += "ez=" + join(ez, ",") + "\n";
  return out;
}

MultichannelRecording exclude_channels(const MultichannelRecording& rec, const EpochAnnotation& ann) {
  return exclude_channels(rec, ann.excluded_channels);
}

MultichannelRecording exclude_channels(const MultichannelRecording& rec,
                                       const std::set<std::string>& excluded) {
  for (auto& name : excluded) rec.require_index(name);
  std::vector<std::string> names;
  std::vector<double> samples;
  for (std::size_t c = 0; c < rec.channel_count(); ++c) {
    if (excluded.count(rec.channel_name(c))) continue;
    names.push_back(rec.channel_name(c));
    auto ch = rec.channel(c);
    samples.insert(samples.end(), ch.begin(), ch.end());
  }
  if (names.empty()) throw ValidationError("empty recording after exclusion");
  return MultichannelRecording(std::move(names), rec.fs(), std::move(samples));
}

MultichannelRecording bipolar_montage(const MultichannelRecording& rec, const ElectrodeGroups& groups) {
  std::vector<std::string> names;
  std::vector<double> samples;
  for (auto& [electrode, contacts] : groups) {
    if (contacts.size() < 2)
      throw ValidationError("electrode '" + electrode + "' needs at least 2 contacts");
    for (std::size_t k = 0; k + 1 < contacts.size(); ++k) {
      auto a = rec.channel(rec.require_index(contacts[k]));
      auto b = rec.channel(rec.require_index(contacts[k + 1]));
      names.push_back(contacts[k] + "-" + contacts[k + 1]);
      for (std::size_t s = 0; s < a.size(); ++s) samples.push_back(a[s] - b[s]);
    }
  }
  return MultichannelRecording(std::move(names), rec.fs(), std::move(samples));
}

ElectrodeGroups electrode_groups_from_names(const std::vector<std::string>& names) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::pair<long long, std::string>>> contacts;
  for (auto& name : names) {
    std::size_t d = name.size();
    while (d > 0 && name[d - 1] >= '0' && name[d - 1] <= '9') --d;
    if (d == name.size() || d == 0) continue;
    auto prefix = name.substr(0, d);
    if (!contacts.count(prefix)) order.push_back(prefix);
    contacts[prefix].emplace_back(std::stoll(name.substr(d)), name);
  }
  ElectrodeGroups groups;
  for (auto& prefix : order) {
    auto list = contacts[prefix];
    std::sort(list.begin(), list.end());
    std::vector<std::string> ordered;
    for (auto& [num, n] : list) ordered.push_back(n);
    groups.emplace_back(prefix, std::move(ordered));
  }
  return groups;
}

}  // namespace desync
