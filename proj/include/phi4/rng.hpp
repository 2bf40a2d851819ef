#pragma once

#include <cstdint>
#include <random>

namespace phi4 {

using Rng = std::mt19937_64;

// Stream for one replica: the master seed and the replica index are both
// split into 32-bit halves and fed through std::seed_seq, so streams for
// different (master, replica) pairs are decorrelated and reproducible.
inline Rng replica_rng(std::uint64_t master, std::uint64_t replica) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(replica), static_cast<std::uint32_t>(replica >> 32),
                    0x70686934u};
  return Rng(seq);
}

// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace phi4
