#pragma once

#include <cstdint>
#include <numeric>

namespace ttplan {

// All times are integer microseconds.
using Duration = std::int64_t;
using Instant = std::int64_t;
using FlowId = std::uint64_t;

// Floor division for b > 0, correct for negative a.
constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

constexpr std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  return -floor_div(-a, b);
}

// a mod b in [0, b) for b > 0.
constexpr std::int64_t pos_mod(std::int64_t a, std::int64_t b) {
  std::int64_t r = a % b;
  return r < 0 ? r + b : r;
}

}  // namespace ttplan
