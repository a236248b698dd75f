#pragma once

#include <cstdint>
#include <random>

namespace popdyn {

using Engine = std::mt19937_64;

/// One splitmix64 scrambling round.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stable per-run seed for replicate `replicate` at population size `n`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t n, std::uint64_t replicate) noexcept {
  return splitmix64(splitmix64(splitmix64(master) ^ n) ^ replicate);
}

}  // namespace popdyn
