#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace ttplan {

// Deterministic sampling helpers on top of mt19937_64. std::*_distribution is
// implementation-defined, so everything that must reproduce across toolchains
// goes through these.
using Rng = std::mt19937_64;

std::uint64_t rng_below(Rng& g, std::uint64_t n);  // uniform in [0, n)
double rng_unit(Rng& g);                           // uniform in [0, 1)
std::int64_t rng_range(Rng& g, std::int64_t lo, std::int64_t hi);  // inclusive
int poisson_sample(Rng& g, double mean);

// k distinct indices from [0, n), in increasing order.
std::vector<std::size_t> rng_index_subset(Rng& g, std::size_t n, std::size_t k);

template <class T>
const T& rng_pick(Rng& g, const std::vector<T>& v) {
  return v[rng_below(g, v.size())];
}

}  // namespace ttplan
