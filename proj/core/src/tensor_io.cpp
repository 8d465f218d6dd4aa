#include <bit>
#include <cmath>
#include <cstring>
#include <map>

#include "desync/errors.hpp"
#include "desync/phase_connectivity.hpp"
#include "desync/text_io.hpp"

namespace desync {

namespace {

constexpr std::string_view kEnd = "end_header\n";

void put_f32(std::string& out, std::size_t at, float f) {
  std::uint32_t u;
  std::memcpy(&u, &f, 4);
  if constexpr (std::endian::native == std::endian::big)
    u = (u >> 24) | ((u >> 8) & 0xff00u) | ((u << 8) & 0xff0000u) | (u << 24);
  std::memcpy(out.data() + at, &u, 4);
}

float get_f32(std::string_view in, std::size_t at) {
  std::uint32_t u;
  std::memcpy(&u, in.data() + at, 4);
  if constexpr (std::endian::native == std::endian::big)
    u = (u >> 24) | ((u >> 8) & 0xff00u) | ((u << 8) & 0xff0000u) | (u << 24);
  float f;
  std::memcpy(&f, &u, 4);
  return f;
}

}  // namespace

std::string serialize_tensor(const ConnectivityTensor& tensor) {
  std::vector<std::string> times;
  times.reserve(tensor.window_count());
  for (double t : tensor.window_times()) times.push_back(format_double(t));
  std::string out;
  out += "desync_tensor=1\n";
  out += "fs_hz=" + format_double(tensor.grid().fs) + "\n";
  out += "tau_max_s=" + format_double(tensor.grid().tau_max_s) + "\n";
  out += "lag_step_s=" + format_double(tensor.grid().lag_step_s) + "\n";
  out += "n_channels=" + std::to_string(tensor.channel_count()) + "\n";
  out += "n_windows=" + std::to_string(tensor.window_count()) + "\n";
  out += "channels=" + join(tensor.channels(), ",") + "\n";
  out += "window_times=" + join(times, ",") + "\n";
  out += "encoding=f32le\n";
  out += std::string(kEnd);
  const std::size_t count = tensor.values().size();
  const std::size_t head = out.size();
  out.resize(head + 8 * count);
  const std::size_t nch = tensor.channel_count();
  std::size_t i = 0;
  for (std::size_t w = 0; w < tensor.window_count(); ++w)
    for (std::size_t x = 0; x < nch; ++x)
      for (std::size_t y = 0; y < nch; ++y, ++i) {
        put_f32(out, head + 4 * i, static_cast<float>(tensor.value(w, x, y)));
        put_f32(out, head + 4 * (count + i), static_cast<float>(tensor.delay_s(w, x, y)));
      }
  return out;
}

ConnectivityTensor parse_tensor(std::string_view bytes) {
  auto end = bytes.find(kEnd);
  if (end == std::string_view::npos) throw ValidationError("malformed tensor header");
  auto doc = parse_key_values(bytes.substr(0, end));
  if (doc.at("desync_tensor") != "1" || doc.at("encoding") != "f32le")
    throw ValidationError("unsupported tensor dump");
  auto grid = make_lag_grid(parse_double(doc.at("tau_max_s"), "tau_max_s"),
                            parse_double(doc.at("lag_step_s"), "lag_step_s"),
                            parse_double(doc.at("fs_hz"), "fs_hz"));
  auto channels = split_list(doc.at("channels"));
  std::vector<double> times;
  for (auto& t : split_list(doc.at("window_times"))) times.push_back(parse_double(t, "window time"));
  if (static_cast<long long>(channels.size()) != parse_int(doc.at("n_channels"), "n_channels") ||
      static_cast<long long>(times.size()) != parse_int(doc.at("n_windows"), "n_windows"))
    throw ValidationError("tensor header dimensions disagree");
  std::map<std::size_t, std::uint16_t> lag_of;
  for (std::size_t k = 0; k < grid.lags.size(); ++k) lag_of.emplace(grid.lags[k], static_cast<std::uint16_t>(k));
  const double fs = grid.fs;
  ConnectivityTensor tensor(std::move(channels), std::move(times), std::move(grid));
  auto payload = bytes.substr(end + kEnd.size());
  const std::size_t count = tensor.values().size();
  if (payload.size() != 8 * count) throw ValidationError("tensor payload size mismatch");
  const std::size_t nn = tensor.channel_count() * tensor.channel_count();
  for (std::size_t w = 0; w < tensor.window_count(); ++w) {
    auto values = tensor.slice_mut(w);
    auto lags = tensor.lag_slice_mut(w);
    for (std::size_t j = 0; j < nn; ++j) {
      const std::size_t i = w * nn + j;
      values[j] = get_f32(payload, 4 * i);
      const double delay = get_f32(payload, 4 * (count + i));
      auto it = lag_of.find(static_cast<std::size_t>(std::llround(delay * fs)));
      if (it == lag_of.end()) throw ValidationError("tensor delay is not on the lag grid");
      lags[j] = it->second;
    }
  }
  return tensor;
}

void save_tensor(const ConnectivityTensor& tensor, const std::string& path) {
  write_file_atomic(path, serialize_tensor(tensor));
}

ConnectivityTensor load_tensor(const std::string& path) { return parse_tensor(read_file(path)); }

}  // namespace desync
