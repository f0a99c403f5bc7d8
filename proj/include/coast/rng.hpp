#pragma once

#include <cstdint>
#include <random>

namespace coast {

// splitmix64; used to derive independent substreams from a master seed so
// that per-episode streams are reproducible regardless of execution order.
inline uint64_t splitmix64(uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Substream seed for (seed, stream, index). `stream` separates roles
// (world construction, fit episodes, test episodes, ...), `index` the
// element within a role (episode number).
inline uint64_t derive_seed(uint64_t seed, uint64_t stream, uint64_t index = 0) {
  uint64_t s = seed;
  uint64_t a = splitmix64(s);
  s = a ^ (stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
  uint64_t b = splitmix64(s);
  s = b ^ (index * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL);
  return splitmix64(s);
}

inline std::mt19937_64 make_engine(uint64_t seed, uint64_t stream, uint64_t index = 0) {
  return std::mt19937_64(derive_seed(seed, stream, index));
}

// roles for derive_seed's stream argument, kept in one place so fit and
// test rollouts can never collide
namespace rng_stream {
inline constexpr uint64_t world = 1;
inline constexpr uint64_t fit_episodes = 2;
inline constexpr uint64_t test_episodes = 3;
inline constexpr uint64_t controls = 4;
}  // namespace rng_stream

}  // namespace coast
