#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "fermispin/basis.hpp"
#include "fermispin/matching.hpp"
#include "fermispin/rational_matrix.hpp"

namespace fermispin {

/// Raised when a requested system size would exceed the configured dense
/// limit; the message carries a memory estimate.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_dense_buildable(int n, int max_n) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("particle count must be even and >= 2, got " + std::to_string(n));
  if (n > max_n) {
    const double gib = static_cast<double>(dimension(n)) * static_cast<double>(dimension(n)) * 8.0 /
                       (1024.0 * 1024.0 * 1024.0);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "n=%d exceeds the configured maximum %d; a dense %zu x %zu numerator grid alone needs ~%.1f GiB",
                  n, max_n, dimension(n), dimension(n), gib);
    throw ResourceLimitError(buf);
  }
}

inline int permutation_sign(const std::vector<int>& perm) {
  int inversions = 0;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) ++inversions;
  return inversions % 2 == 0 ? 1 : -1;
}

inline std::int64_t factorial(int n) {
  std::int64_t f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace detail

/// Uniform mixture of the projectors onto all pairing states:
/// rho = (1/M) sum_m |v_m><v_m| over the M perfect matchings of n spins.
/// Entries are exact, with common denominator M * 2^(n/2).
inline RationalMatrix build_rho_pairing(int n, int max_n = kDefaultMaxParticles) {
  detail::require_dense_buildable(n, max_n);
  const auto matchings = enumerate_matchings(n, max_n);
  const std::int64_t m_count = static_cast<std::int64_t>(matchings.size());
  RationalMatrix rho = make_zero_matrix(n, m_count << (n / 2));
  for (const auto& m : matchings) {
    const ExactVector v = pairing_state(m);
    for (const auto& [i, a] : v.amps)
      for (const auto& [j, b] : v.amps) rho.num(i, j) += a * b;
  }
  rho.canonicalize();
  return rho;
}

/// Brute-force cross-check of build_rho_pairing from first principles:
/// antisymmetrize the n spin-orbitals {orbital_i x up, orbital_i x down}
/// over n particles, form the pure-state projector, and trace out the
/// orbital labels assuming they are orthonormal. Deliberately O(n!).
inline RationalMatrix build_rho_slater_oracle(int n) {
  constexpr int kOracleLimit = 8;
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("particle count must be even and >= 2, got " + std::to_string(n));
  if (n > kOracleLimit)
    throw std::invalid_argument("determinant oracle is factorial-cost and unsupported beyond n=" +
                                std::to_string(kOracleLimit) + ", got n=" + std::to_string(n));

  // Spin-orbital 2i   = (orbital i, up)
  // Spin-orbital 2i+1 = (orbital i, down)
  // Every permutation assigns spin-orbital perm[j] to particle j; the term's
  // orbital assignment is packed 4 bits per particle and spins into a word.
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::unordered_map<std::uint64_t, std::vector<std::pair<BasisIndex, int>>> by_orbital_assignment;
  do {
    const int sign = detail::permutation_sign(perm);
    std::uint64_t key = 0;
    BasisIndex spins = 0;
    for (int j = 0; j < n; ++j) {
      key |= static_cast<std::uint64_t>(perm[j] >> 1) << (4 * j);
      if ((perm[j] & 1) == 0) spins |= BasisIndex{1} << j;
    }
    by_orbital_assignment[key].emplace_back(spins, sign);
  } while (std::next_permutation(perm.begin(), perm.end()));

  // Tracing over orthonormal orbital labels keeps only products of terms
  // that share the orbital assignment.
  RationalMatrix rho = make_zero_matrix(n, detail::factorial(n));
  for (const auto& [key, terms] : by_orbital_assignment)
    for (const auto& [si, ai] : terms)
      for (const auto& [sj, aj] : terms) rho.num(si, sj) += ai * aj;
  rho.canonicalize();
  return rho;
}

struct SingletProjector {
  RationalMatrix projector;  // exact orthogonal projector onto total spin S = 0
  int rank = 0;              // its dimension d0
};

/// Builds the S = 0 projector as a spectral polynomial in the total-spin
/// operator restricted to the zero-magnetization sector: every eigenvalue
/// s(s+1) with s >= 1 is annihilated by one factor. Evaluated in doubles,
/// then snapped to the exact rational grid shared with build_rho_pairing;
/// entries farther than 1e-10 from the grid raise an error.
inline SingletProjector build_singlet_projector(int n, int max_n = kDefaultMaxParticles) {
  detail::require_dense_buildable(n, max_n);
  const std::vector<BasisIndex> sector = sz_zero_sector(n);
  const Eigen::Index sd = static_cast<Eigen::Index>(sector.size());
  std::vector<Eigen::Index> pos(dimension(n), -1);
  for (Eigen::Index i = 0; i < sd; ++i) pos[sector[i]] = i;

  // S^2 = Sz^2 + Sz + S-S+ has integer action on the sector: the diagonal
  // counts the down spins and each (up,down) exchange contributes 1.
  Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(sd, sd);
  for (Eigen::Index c = 0; c < sd; ++c) {
    const BasisIndex b = sector[c];
    s2(c, c) = n / 2;
    for (int k = 0; k < n; ++k) {
      if (b >> k & 1u) continue;  // need a down spin at k
      for (int l = 0; l < n; ++l) {
        if (l == k || !(b >> l & 1u)) continue;  // and an up spin at l
        const BasisIndex moved = (b | (BasisIndex{1} << k)) & ~(BasisIndex{1} << l);
        s2(pos[moved], c) += 1.0;
      }
    }
  }

  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(sd, sd);
  for (int s = 1; s <= n / 2; ++s) {
    const double c_s = static_cast<double>(s) * (s + 1);
    p = p * ((c_s * Eigen::MatrixXd::Identity(sd, sd) - s2) / c_s);
  }

  const std::int64_t grid = static_cast<std::int64_t>(matching_count(n)) << (n / 2);
  RationalMatrix out = make_zero_matrix(n, grid);
  for (Eigen::Index j = 0; j < sd; ++j) {
    for (Eigen::Index i = 0; i < sd; ++i) {
      const double x = p(i, j);
      const std::int64_t k = std::llround(x * static_cast<double>(grid));
      if (std::abs(x - static_cast<double>(k) / static_cast<double>(grid)) > 1e-10)
        throw std::runtime_error("singlet projector entry is not within 1e-10 of the rational grid");
      out.num(sector[i], sector[j]) = k;
    }
  }
  out.canonicalize();

  const int rank = static_cast<int>(std::llround(p.trace()));
  return {std::move(out), rank};
}

/// -sum lambda ln lambda in nats over eigenvalues above the cutoff.
/// Eigenvalues below -psd_tol mean the input is not a density matrix.
inline double von_neumann_entropy(const RationalMatrix& rho, double psd_tol = 1e-10, double cutoff = 1e-12) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_dense(rho), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& evs = solver.eigenvalues();
  if (evs.minCoeff() < -psd_tol)
    throw std::domain_error("von_neumann_entropy: input is not positive semidefinite (min eigenvalue " +
                            std::to_string(evs.minCoeff()) + ")");
  double entropy = 0.0;
  for (Eigen::Index i = 0; i < evs.size(); ++i)
    if (evs[i] > cutoff) entropy -= evs[i] * std::log(evs[i]);
  return entropy;
}

/// Conjugates by the unitary that permutes spins: entry (perm(i), perm(j))
/// of the result equals entry (i, j) of the input. Exact.
inline RationalMatrix conjugate_by_spin_permutation(const RationalMatrix& m, std::span<const int> perm) {
  RationalMatrix out = make_zero_matrix(m.n, m.den);
  for (Eigen::Index j = 0; j < m.dim(); ++j)
    for (Eigen::Index i = 0; i < m.dim(); ++i)
      out.num(permute_bits(static_cast<BasisIndex>(i), perm), permute_bits(static_cast<BasisIndex>(j), perm)) =
          m.num(i, j);
  return out;
}

/// Exact commutator check against the total Pauli operator on the given
/// axis ('x', 'y' or 'z'). For y the imaginary unit is factored out, which
/// leaves an integer matrix and does not change whether the commutator
/// vanishes. Returns the largest |numerator| of [Sigma_a, m]; 0 means the
/// commutator is exactly zero.
inline std::int64_t total_pauli_commutator_max_abs(const RationalMatrix& m, char axis) {
  if (axis != 'x' && axis != 'y' && axis != 'z') throw std::invalid_argument("axis must be x, y or z");
  const int n = m.n;
  std::unordered_map<std::uint64_t, std::int64_t> comm;
  auto key = [](Eigen::Index i, Eigen::Index j) {
    return (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint64_t>(j);
  };
  // Row action of the single-site generator at spin k on basis column b:
  // sigma_x: |b^bit> <- |b>; sigma_y/i: |b^bit> with sign +1 raising, -1
  // lowering; sigma_z: diagonal +-1.
  for (Eigen::Index j = 0; j < m.dim(); ++j) {
    for (Eigen::Index i = 0; i < m.dim(); ++i) {
      const std::int64_t v = m.num(i, j);
      if (v == 0) continue;
      const auto bi = static_cast<BasisIndex>(i);
      const auto bj = static_cast<BasisIndex>(j);
      for (int k = 0; k < n; ++k) {
        const BasisIndex bit = BasisIndex{1} << k;
        if (axis == 'z') {
          const int zi = (bi & bit) ? 1 : -1;
          const int zj = (bj & bit) ? 1 : -1;
          if (zi != zj) comm[key(i, j)] += static_cast<std::int64_t>(zi - zj) * v;
        } else {
          const int up_sign_left = (axis == 'y' && (bi & bit)) ? -1 : 1;    // A[i^bit][i]
          const int up_sign_right = (axis == 'y' && !(bj & bit)) ? -1 : 1;  // A[j][j^bit]
          comm[key(static_cast<Eigen::Index>(bi ^ bit), j)] += up_sign_left * v;
          comm[key(i, static_cast<Eigen::Index>(bj ^ bit))] -= up_sign_right * v;
        }
      }
    }
  }
  std::int64_t worst = 0;
  for (const auto& [k, v] : comm) worst = std::max(worst, v < 0 ? -v : v);
  return worst;
}

}  // namespace fermispin
