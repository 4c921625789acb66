#pragma once

#include <cstdint>
#include <random>

namespace gsreg {

/// SplitMix64 finalizer; used to derive independent per-replicate seeds from
/// (base seed, stream counters) so parallel replication is deterministic no
/// matter how work is scheduled.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

using Rng = std::mt19937_64;

/// RNG for a (seed, stream, substream) triple. Distinct triples give
/// independently seeded generators.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0,
                    std::uint64_t substream = 0) {
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ splitmix64(stream + 0x51ed2701ULL));
  s = splitmix64(s ^ splitmix64(substream + 0xa511e9b3ULL));
  return Rng(s);
}

}  // namespace gsreg
