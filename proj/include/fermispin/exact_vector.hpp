#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>

#include "fermispin/basis.hpp"
#include "fermispin/matching.hpp"
#include "fermispin/rational.hpp"

namespace fermispin {

/// Spin-state vector with integer amplitudes and a tracked power-of-two
/// normalization: the physical vector is 2^(-norm_exponent/2) * amps.
/// Pairing states have 2^(n/2) amplitudes, all +-1, and norm_exponent = n/2,
/// so their squared norm is exactly 1.
struct ExactVector {
  int n = 0;
  int norm_exponent = 0;
  std::map<BasisIndex, std::int64_t> amps;
};

/// Tensor product over the pairs (k,l), k < l, of (|up_k down_l> - |down_k up_l>).
/// The +1 amplitude always sits on the term with spin-up at the smaller index.
inline ExactVector pairing_state(const PerfectMatching& m) {
  const int n = m.particle_count();
  ExactVector v;
  v.n = n;
  v.norm_exponent = n / 2;
  const int npairs = n / 2;
  for (std::uint32_t choice = 0; choice < (std::uint32_t{1} << npairs); ++choice) {
    BasisIndex bits = 0;
    int sign = 1;
    for (int p = 0; p < npairs; ++p) {
      const auto [k, l] = m.pairs[p];
      if (choice >> p & 1u) {
        bits |= BasisIndex{1} << l;  // down_k up_l, carries -1
        sign = -sign;
      } else {
        bits |= BasisIndex{1} << k;  // up_k down_l
      }
    }
    v.amps[bits] = sign;
  }
  return v;
}

/// <a|b> as an exact rational. Requires matching particle counts and an even
/// combined norm exponent (always the case for pairing states of equal n).
inline Rational overlap(const ExactVector& a, const ExactVector& b) {
  if (a.n != b.n)
    throw std::invalid_argument("overlap: mismatched particle counts " + std::to_string(a.n) + " vs " +
                                std::to_string(b.n));
  const int e = a.norm_exponent + b.norm_exponent;
  if (e % 2 != 0) throw std::invalid_argument("overlap: combined norm exponent is odd, result irrational");
  std::int64_t dot = 0;
  for (const auto& [bits, amp] : a.amps) {
    auto it = b.amps.find(bits);
    if (it != b.amps.end()) dot += amp * it->second;
  }
  return Rational(dot, std::int64_t{1} << (e / 2));
}

inline ExactVector add(const ExactVector& a, const ExactVector& b) {
  if (a.n != b.n || a.norm_exponent != b.norm_exponent)
    throw std::invalid_argument("add: vectors must share particle count and norm exponent");
  ExactVector v = a;
  for (const auto& [bits, amp] : b.amps) {
    const std::int64_t s = v.amps[bits] + amp;
    if (s == 0)
      v.amps.erase(bits);
    else
      v.amps[bits] = s;
  }
  return v;
}

inline ExactVector negate(const ExactVector& a) {
  ExactVector v = a;
  for (auto& [bits, amp] : v.amps) amp = -amp;
  return v;
}

}  // namespace fermispin
