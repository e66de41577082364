#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace fermispin {

/// A computational basis state of n spins-1/2 is an n-bit word: bit k set
/// means spin k points up along z, bit k clear means down. The basis index
/// of the state is the word itself, so index <-> configuration is the
/// identity bijection for the whole process lifetime.
using BasisIndex = std::uint32_t;

inline constexpr int kDefaultMaxParticles = 12;

inline std::size_t dimension(int n) { return std::size_t{1} << n; }

/// Twice the total z-projection of the word: #up - #down.
inline int sz_twice(BasisIndex bits, int n) { return 2 * std::popcount(bits) - n; }

/// Twice the z-projection restricted to the spins selected by `mask`
/// (a bit mask over positions, not an index list).
inline int sz_twice_masked(BasisIndex bits, BasisIndex mask) {
  return 2 * std::popcount(bits & mask) - std::popcount(mask);
}

inline BasisIndex position_mask(std::span<const int> positions) {
  BasisIndex m = 0;
  for (int p : positions) m |= BasisIndex{1} << p;
  return m;
}

/// Applies a spin permutation to a basis word: bit perm[k] of the result
/// equals bit k of `bits`.
inline BasisIndex permute_bits(BasisIndex bits, std::span<const int> perm) {
  BasisIndex out = 0;
  for (std::size_t k = 0; k < perm.size(); ++k)
    if (bits >> k & 1u) out |= BasisIndex{1} << perm[k];
  return out;
}

inline void require_even_particle_count(int n, int max_n = kDefaultMaxParticles) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("particle count must be even and >= 2, got " + std::to_string(n));
  if (n > max_n)
    throw std::invalid_argument("particle count " + std::to_string(n) + " exceeds the configured maximum " +
                                std::to_string(max_n));
}

/// All basis words of n spins with exactly n/2 bits set, ascending.
/// The density matrices built here live entirely on this block.
inline std::vector<BasisIndex> sz_zero_sector(int n) {
  std::vector<BasisIndex> sector;
  for (BasisIndex b = 0; b < dimension(n); ++b)
    if (2 * std::popcount(b) == n) sector.push_back(b);
  return sector;
}

}  // namespace fermispin
