#include "desync/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "desync/errors.hpp"

namespace desync {

double oracle_entropy(const std::vector<std::vector<int>>& tuples) {
  if (tuples.empty()) throw ValidationError("entropy of no tuples");
  std::map<std::vector<int>, std::size_t> counts;
  for (auto& t : tuples) ++counts[t];
  const double total = static_cast<double>(tuples.size());
  double h = 0.0;
  for (auto& [key, c] : counts) {
    const double p = static_cast<double>(c) / total;
    h -= p * std::log(p);
  }
  return h;
}

double oracle_pte(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y, std::size_t lag) {
  if (x.size() != y.size()) throw ValidationError("sequences differ in length");
  if (lag >= x.size()) throw ValidationError("lag must be shorter than the window");
  const std::size_t m = x.size() - lag;
  std::vector<std::vector<int>> yy, xy, xyy, y1;
  for (std::size_t s = 0; s < m; ++s) {
    yy.push_back({y[s], y[s + lag]});
    xy.push_back({x[s], y[s]});
    xyy.push_back({x[s], y[s], y[s + lag]});
    y1.push_back({y[s]});
  }
  const double v = oracle_entropy(yy) + oracle_entropy(xy) - oracle_entropy(xyy) - oracle_entropy(y1);
  return std::max(0.0, v);
}

double oracle_conditional_entropy(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y,
                                  std::size_t count) {
  std::vector<std::vector<int>> xy, y1;
  for (std::size_t s = 0; s < count; ++s) {
    xy.push_back({x[s], y[s]});
    y1.push_back({y[s]});
  }
  return oracle_entropy(xy) - oracle_entropy(y1);
}

}  // namespace desync
