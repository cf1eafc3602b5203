#pragma once

#include <cstdint>
#include <random>

namespace qot {

/// Random stream used throughout the simulator: 64-bit Mersenne Twister
/// (std::mt19937_64), whose output sequence is fixed by the standard.
/// Distributions are implemented here rather than taken from <random> so
/// transcripts are identical across standard library implementations.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer; mixes (seed, index) into an independent stream seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Uniform real in [0, 1) with 53 random bits.
template <typename Urbg>
double uniform_real(Urbg& rng) {
  static_assert(Urbg::max() - Urbg::min() == ~std::uint64_t{0}, "64-bit generator required");
  return static_cast<double>((rng() - Urbg::min()) >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n), unbiased (rejection on the top partial block).
template <typename Urbg>
std::uint64_t uniform_index(Urbg& rng, std::uint64_t n) {
  static_assert(Urbg::max() - Urbg::min() == ~std::uint64_t{0}, "64-bit generator required");
  if (n <= 1) return 0;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = rng() - Urbg::min();
  } while (x >= limit);
  return x % n;
}

template <typename Urbg>
int random_bit(Urbg& rng) {
  return static_cast<int>((rng() - Urbg::min()) >> 63);
}

}  // namespace qot
