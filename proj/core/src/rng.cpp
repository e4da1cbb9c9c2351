#include "ttplan/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ttplan {

std::uint64_t rng_below(Rng& g, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("rng_below: n must be positive");
  // rejection sampling to avoid modulo bias
  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = g();
  } while (x >= limit);
  return x % n;
}

double rng_unit(Rng& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

std::int64_t rng_range(Rng& g, std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw std::invalid_argument("rng_range: empty range");
  return lo + static_cast<std::int64_t>(rng_below(g, static_cast<std::uint64_t>(hi - lo) + 1));
}

int poisson_sample(Rng& g, double mean) {
  if (mean < 0) throw std::invalid_argument("poisson_sample: negative mean");
  if (mean == 0) return 0;
  // Knuth's product method; fine for the desk-scale means used here.
  double limit = std::exp(-mean);
  int k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= rng_unit(g);
  } while (p > limit);
  return k - 1;
}

std::vector<std::size_t> rng_index_subset(Rng& g, std::size_t n, std::size_t k) {
  if (k > n) throw std::invalid_argument("rng_index_subset: k > n");
  // Floyd's algorithm, then sort for a canonical order.
  std::vector<std::size_t> out;
  out.reserve(k);
  std::vector<bool> taken(n, false);
  for (std::size_t j = n - k; j < n; ++j) {
    std::size_t t = rng_below(g, j + 1);
    if (taken[t]) t = j;
    taken[t] = true;
    out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace ttplan
