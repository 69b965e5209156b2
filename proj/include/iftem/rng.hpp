#pragma once

#include <cstdint>
#include <random>

namespace iftem {

/// splitmix64 step; used to derive independent per-trial seeds from a
/// master seed so trials are order-independent.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t trial_seed(uint64_t master, uint64_t trial_index) {
  return splitmix64(master ^ splitmix64(trial_index + 1));
}

inline std::mt19937_64 make_engine(uint64_t seed) {
  return std::mt19937_64(seed);
}

}  // namespace iftem
