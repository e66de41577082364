#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fermispin/basis.hpp"

namespace fermispin {

/// A perfect matching of {0..n-1}: n/2 disjoint index pairs covering every
/// element. Canonical form stores each pair as (k,l) with k < l and sorts
/// pairs by their smaller member.
struct PerfectMatching {
  std::vector<std::pair<int, int>> pairs;

  int particle_count() const { return 2 * static_cast<int>(pairs.size()); }

  void canonicalize() {
    for (auto& [k, l] : pairs)
      if (k > l) std::swap(k, l);
    std::sort(pairs.begin(), pairs.end());
  }

  friend bool operator==(const PerfectMatching& a, const PerfectMatching& b) { return a.pairs == b.pairs; }

  std::string to_string() const {
    std::string s;
    for (const auto& [k, l] : pairs) s += "(" + std::to_string(k) + "," + std::to_string(l) + ")";
    return s;
  }
};

namespace detail {

inline void extend_matching(std::vector<int>& free_indices, PerfectMatching& partial,
                            std::vector<PerfectMatching>& out) {
  if (free_indices.empty()) {
    out.push_back(partial);
    return;
  }
  // Always pair off the smallest free index; partners ascend, so the output
  // order is lexicographic on the canonical pair lists.
  const int first = free_indices.front();
  for (std::size_t i = 1; i < free_indices.size(); ++i) {
    const int partner = free_indices[i];
    std::vector<int> rest;
    rest.reserve(free_indices.size() - 2);
    for (std::size_t j = 1; j < free_indices.size(); ++j)
      if (j != i) rest.push_back(free_indices[j]);
    partial.pairs.emplace_back(first, partner);
    extend_matching(rest, partial, out);
    partial.pairs.pop_back();
  }
}

}  // namespace detail

/// Number of perfect matchings of n elements, (n-1)!! = n!/(2^(n/2) (n/2)!).
inline std::uint64_t matching_count(int n) {
  std::uint64_t c = 1;
  for (int k = n - 1; k > 1; k -= 2) c *= static_cast<std::uint64_t>(k);
  return c;
}

/// Enumerates every perfect matching of {0..n-1} in deterministic
/// lexicographic order. n must be even and within the configured maximum.
inline std::vector<PerfectMatching> enumerate_matchings(int n, int max_n = kDefaultMaxParticles) {
  require_even_particle_count(n, max_n);
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  std::vector<PerfectMatching> out;
  out.reserve(matching_count(n));
  PerfectMatching partial;
  detail::extend_matching(all, partial, out);
  return out;
}

}  // namespace fermispin
