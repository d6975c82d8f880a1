#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace stem {

using Engine = std::mt19937_64;

/// One SplitMix64 step; advances `state`.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent child seed for the stream addressed by `path` under `master`,
/// e.g. derive_seed(seed, {replication, purpose}).
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t state = master;
  std::uint64_t out = splitmix64(state);
  for (std::uint64_t p : path) {
    state = out ^ (p * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    out = splitmix64(state);
  }
  return out;
}

inline Engine make_engine(std::uint64_t seed) {
  std::uint64_t state = seed;
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state))};
  return Engine(seq);
}

} // namespace stem
