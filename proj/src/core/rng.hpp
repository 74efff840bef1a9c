#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace hcs {

// mt19937_64 output mapped to doubles explicitly so sequences do not depend
// on the standard library's distribution implementations.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * uniform01(gen);
}

template <typename T>
void shuffle_in_place(std::vector<T>& v, std::mt19937_64& gen) {
  for (size_t i = v.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(gen() % i);
    std::swap(v[i - 1], v[j]);
  }
}

inline std::mt19937_64 seeded_rng(uint64_t seed, uint64_t stream = 0) {
  return std::mt19937_64(seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1)));
}

}  // namespace hcs
