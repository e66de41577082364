#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "fermispin/basis.hpp"
#include "fermispin/rational.hpp"
#include "fermispin/rational_matrix.hpp"

namespace fermispin {

/// Flag value for the infinite-particle limit of the analytic pair
/// formulas; the limit is exact, not a large-n approximation.
inline constexpr long kInfiniteParticles = -1;

/// Spin indices retained by a partial trace, strictly increasing.
struct SubsystemMask {
  std::vector<int> keep;
  int n_total = 0;

  SubsystemMask(std::vector<int> keep_indices, int n) : keep(std::move(keep_indices)), n_total(n) {
    if (keep.empty()) throw std::invalid_argument("SubsystemMask: keep set must be non-empty");
    if (!std::is_sorted(keep.begin(), keep.end()) ||
        std::adjacent_find(keep.begin(), keep.end()) != keep.end())
      throw std::invalid_argument("SubsystemMask: keep indices must be strictly increasing");
    if (keep.front() < 0 || keep.back() >= n_total)
      throw std::invalid_argument("SubsystemMask: keep indices out of range for n=" + std::to_string(n_total));
  }
};

namespace detail {

/// Positions not selected by the mask, ascending.
inline std::vector<int> complement_positions(const std::vector<int>& keep, int n) {
  std::vector<int> env;
  for (int k = 0, j = 0; k < n; ++k) {
    if (j < static_cast<int>(keep.size()) && keep[j] == k)
      ++j;
    else
      env.push_back(k);
  }
  return env;
}

/// Spreads the low bits of `packed` onto the given positions.
inline BasisIndex scatter_bits(BasisIndex packed, const std::vector<int>& positions) {
  BasisIndex out = 0;
  for (std::size_t k = 0; k < positions.size(); ++k)
    if (packed >> k & 1u) out |= BasisIndex{1} << positions[k];
  return out;
}

}  // namespace detail

/// Partial trace over every spin not in the mask, on any dense Eigen
/// matrix of dimension 2^n_total. Row/column bit k of the result is spin
/// keep[k] of the parent system.
template <class Derived>
DenseMatrix<typename Derived::Scalar> partial_trace_dense(const Eigen::MatrixBase<Derived>& m,
                                                          const SubsystemMask& mask) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != static_cast<Eigen::Index>(dimension(mask.n_total)) || m.rows() != m.cols())
    throw std::invalid_argument("partial_trace: matrix dimension does not match the mask's n_total");
  const auto env = detail::complement_positions(mask.keep, mask.n_total);
  const std::size_t dk = dimension(static_cast<int>(mask.keep.size()));
  const std::size_t de = dimension(static_cast<int>(env.size()));
  DenseMatrix<Scalar> out = DenseMatrix<Scalar>::Zero(dk, dk);
  for (BasisIndex c = 0; c < dk; ++c) {
    const BasisIndex cb = detail::scatter_bits(c, mask.keep);
    for (BasisIndex r = 0; r < dk; ++r) {
      const BasisIndex rb = detail::scatter_bits(r, mask.keep);
      Scalar acc{};
      for (BasisIndex e = 0; e < de; ++e) {
        const BasisIndex eb = detail::scatter_bits(e, env);
        acc += m(rb | eb, cb | eb);
      }
      out(r, c) = acc;
    }
  }
  return out;
}

inline RationalMatrix partial_trace(const RationalMatrix& rho, const SubsystemMask& mask) {
  RationalMatrix out;
  out.n = static_cast<int>(mask.keep.size());
  out.den = rho.den;
  out.num = partial_trace_dense(rho.num, mask);
  out.canonicalize();
  return out;
}

/// Mixing weights of the reduced pair state: a singlet share plus three
/// equal triplet shares summing to one.
struct TwoSpinWeights {
  long n = 0;  // parent particle count, or kInfiniteParticles
  Rational singlet;
  Rational triplet_each;
};

/// Closed form for the reduced two-spin state of the n-particle ground
/// state: singlet weight (n+2)/(4(n-1)), each triplet weight
/// (n-2)/(4(n-1)). Degenerates to the pure singlet at n=2 and to the
/// maximally mixed pair in the infinite limit.
inline TwoSpinWeights two_spin_reduced_analytic(long n) {
  if (n == kInfiniteParticles) return {n, Rational(1, 4), Rational(1, 4)};
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("particle count must be even and >= 2, got " + std::to_string(n));
  return {n, Rational(n + 2, 4 * (n - 1)), Rational(n - 2, 4 * (n - 1))};
}

/// The exact 4x4 pair matrix for the given weights, ordered with spin 0 on
/// bit 0: w_s |S><S| + w_t (I - |S><S|).
inline RationalMatrix two_spin_matrix(const TwoSpinWeights& w) {
  RationalMatrix singlet = make_zero_matrix(2, 2);
  // |S> = 2^(-1/2)(|up0 down1> - |down0 up1>) = 2^(-1/2)(|01> - |10>)
  singlet.num(1, 1) = 1;
  singlet.num(2, 2) = 1;
  singlet.num(1, 2) = -1;
  singlet.num(2, 1) = -1;
  RationalMatrix identity = make_zero_matrix(2, 1);
  identity.num.setIdentity();
  return add(scale(singlet, w.singlet - w.triplet_each), scale(identity, w.triplet_each));
}

/// Normalized pair correlation <S1.S2>/|S1||S2| = -1/(n-1); zero in the
/// infinite limit.
inline Rational pair_correlation(long n) {
  if (n == kInfiniteParticles) return Rational(0);
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("particle count must be even and >= 2, got " + std::to_string(n));
  return Rational(-1, n - 1);
}

/// Tr((sigma.sigma)/3 rho_pair) on an exact 4x4 pair matrix; the numeric
/// counterpart of pair_correlation.
inline Rational pair_correlation_from_matrix(const RationalMatrix& pair) {
  if (pair.dim() != 4) throw std::invalid_argument("pair_correlation_from_matrix: expected a 4x4 matrix");
  // sigma.sigma = diag(1,-1,-1,1) + 2 (|01><10| + |10><01|)
  const std::int64_t num = pair.num(0, 0) - pair.num(1, 1) - pair.num(2, 2) + pair.num(3, 3) +
                           2 * (pair.num(1, 2) + pair.num(2, 1));
  return Rational(num, 3 * pair.den);
}

}  // namespace fermispin
