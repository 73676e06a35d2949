#pragma once

#include <cstdint>
#include <span>

namespace ultracoral {

// Counter-based substreams: every draw is a pure function of
// (seed, branch path, stream tag), so evaluation order and parallel
// scheduling cannot change the sequence.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t path_key(std::uint64_t seed, std::span<const std::uint8_t> path) {
  std::uint64_t k = splitmix64(seed);
  for (std::uint8_t digit : path) k = splitmix64(k ^ (static_cast<std::uint64_t>(digit) + 1));
  return k;
}

// strictly inside (0, 1)
inline double uniform01(std::uint64_t key, std::uint64_t stream) {
  std::uint64_t bits = splitmix64(key ^ stream);
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace ultracoral
