#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace desync {

// Plug-in entropy (nats) of a materialized list of joint symbols.
double oracle_entropy(const std::vector<std::vector<int>>& tuples);

// Four-entropy phase transfer entropy x -> y at `lag`, clamped at 0.
double oracle_pte(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y, std::size_t lag);

// H(x | y) over the first n - lag samples.
double oracle_conditional_entropy(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y,
                                  std::size_t count);

}  // namespace desync
