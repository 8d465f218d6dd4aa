#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace desync {

// Ordered key=value document. Blank lines and lines starting with '#' are
// ignored; a repeated key keeps every occurrence in `repeated`.
struct KeyValueDocument {
  std::map<std::string, std::string> values;
  std::multimap<std::string, std::string> repeated;

  bool contains(std::string_view key) const;
  const std::string& at(std::string_view key) const;
  std::string get_or(std::string_view key, std::string fallback) const;
};

KeyValueDocument parse_key_values(std::string_view text);

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_list(std::string_view s);  // comma list, empty → {}
std::string join(const std::vector<std::string>& parts, std::string_view sep);

double parse_double(std::string_view s, std::string_view what);
long long parse_int(std::string_view s, std::string_view what);

// Shortest round-trip decimal representation; stable across runs.
std::string format_double(double v);

std::string read_file(const std::string& path);
// Writes through a temporary file and renames, so readers never observe a
// partially written output.
void write_file_atomic(const std::string& path, std::string_view contents);

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 1469598103934665603ULL);
std::string hex64(std::uint64_t v);

}  // namespace desync
