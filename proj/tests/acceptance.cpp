// Acceptance suite: one line per criterion, every tolerance pinned in code.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fermispin/bell.hpp"
#include "fermispin/cache.hpp"
#include "fermispin/entanglement.hpp"
#include "fermispin/matching.hpp"
#include "fermispin/rational_matrix.hpp"
#include "fermispin/reduction.hpp"
#include "fermispin/rho.hpp"

using namespace fermispin;

namespace {

struct Check {
  std::string name;
  std::function<bool(std::string&)> run;
};

bool check_overlaps(std::string& detail) {
  const auto ms = enumerate_matchings(4);
  const ExactVector a = pairing_state(ms[0]);
  const ExactVector b = pairing_state(ms[1]);
  const ExactVector c = pairing_state(ms[2]);
  const Rational o1 = overlap(a, b), o2 = overlap(a, c), o3 = overlap(b, c);
  detail = o1.to_string() + ", " + o2.to_string() + ", " + o3.to_string();
  return o1 == Rational(1, 2) && o2 == Rational(-1, 2) && o3 == Rational(1, 2);
}

bool check_triple_equivalence(std::string& detail) {
  const RationalMatrix pairing = build_rho_pairing(4);
  const RationalMatrix slater = build_rho_slater_oracle(4);
  const auto proj = build_singlet_projector(4);
  const double diff = max_abs_difference(scale(proj.projector, Rational(1, 2)), pairing);
  detail = "pairing==slater: " + std::string(pairing == slater ? "yes" : "NO") +
           ", |pairing - P0/2| = " + std::to_string(diff) + ", d0 = " + std::to_string(proj.rank);
  return pairing == slater && diff <= 1e-12 && proj.rank == 2;
}

bool check_entropy(std::string& detail) {
  const double s4 = von_neumann_entropy(build_rho_pairing(4));
  const double s6 = von_neumann_entropy(build_rho_pairing(6));
  std::ostringstream os;
  os << "S4 = " << s4 << " (ln 2 = " << std::log(2.0) << "), S6 = " << s6 << " (ln 5 = " << std::log(5.0)
     << ")";
  detail = os.str();
  return std::abs(s4 - std::log(2.0)) <= 1e-9 && std::abs(s6 - std::log(5.0)) <= 1e-9;
}

bool check_reduced_pair(std::string& detail) {
  for (int n = 2; n <= 8; n += 2) {
    const RationalMatrix rho = build_rho_pairing(n);
    const RationalMatrix expected = two_spin_matrix(two_spin_reduced_analytic(n));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (partial_trace(rho, SubsystemMask({i, j}, n)) != expected) {
          detail = "pair (" + std::to_string(i) + "," + std::to_string(j) + ") of n=" + std::to_string(n) +
                   " deviates";
          return false;
        }
  }
  const TwoSpinWeights w4 = two_spin_reduced_analytic(4);
  const bool weights_ok = w4.singlet == Rational(1, 2) && w4.triplet_each == Rational(1, 6);
  const bool pure2 = two_spin_reduced_analytic(2).singlet == Rational(1);
  detail = "all pairs of n=2,4,6,8 exact; n=4 weights (1/2, 1/6); n=2 pure singlet";
  return weights_ok && pure2;
}

bool check_correlation_law(std::string& detail) {
  for (int n = 2; n <= 10; n += 2) {
    const RationalMatrix pair = partial_trace(build_rho_pairing(n), SubsystemMask({0, 1}, n));
    if (pair_correlation_from_matrix(pair) != Rational(-1, n - 1)) {
      detail = "numeric route deviates at n=" + std::to_string(n);
      return false;
    }
  }
  for (long n = 2; n <= 1000000; n += 2) {
    if (pair_correlation(n) != Rational(-1, n - 1)) {
      detail = "analytic route deviates at n=" + std::to_string(n);
      return false;
    }
  }
  detail = "numeric n<=10 and analytic n<=10^6 both equal -1/(n-1); limit = " +
           pair_correlation(kInfiniteParticles).to_string();
  return pair_correlation(kInfiniteParticles) == Rational(0);
}

bool check_negativity(std::string& detail) {
  const auto result = negativity_measure(build_rho_pairing(4), Bipartition({0, 1}, 4));
  const auto count = [&](double target) {
    return std::count_if(result.eigenvalues.begin(), result.eigenvalues.end(),
                         [&](double ev) { return std::abs(ev - target) <= 1e-10; });
  };
  std::ostringstream os;
  os << "spectrum counts {1/2: " << count(0.5) << ", 1/6: " << count(1.0 / 6.0)
     << ", -1/6: " << count(-1.0 / 6.0) << "}, E = " << result.negativity;
  detail = os.str();
  return count(0.5) == 1 && count(1.0 / 6.0) == 6 && count(-1.0 / 6.0) == 3 &&
         std::abs(result.negativity - 1.0) <= 1e-10;
}

bool check_pair_separability(std::string& detail) {
  if (ppt_separability_pair(2)) {
    detail = "n=2 should be NPT";
    return false;
  }
  for (long n = 4; n <= 1000; n += 2)
    if (!ppt_separability_pair(n)) {
      detail = "n=" + std::to_string(n) + " should be PPT";
      return false;
    }
  const auto evs = pair_pt_eigenvalues(two_spin_reduced_analytic(2));
  detail = "n=2 NPT (min PT eigenvalue " + evs[0].to_string() + "), n=4..1000 PPT";
  return evs[0] == Rational(-1, 2);
}

bool check_witness(std::string& detail) {
  for (int n = 4; n <= 10; n += 2) {
    const RationalMatrix rho = build_rho_pairing(n);
    std::vector<int> half(n / 2);
    std::iota(half.begin(), half.end(), 0);
    for (const auto& a : {std::vector<int>{0}, half}) {
      const Bipartition bp(a, n);
      const auto w = sylvester_witness(rho, bp);
      if (!w || !(w->minor_value < Rational(0)) ||
          w->minor_value != -(w->source_element * w->source_element)) {
        detail = "no valid witness for n=" + std::to_string(n) + ", |A|=" + std::to_string(a.size());
        return false;
      }
      const auto neg = negativity_measure(rho, bp);
      if (!(neg.eigenvalues.front() < 0.0)) {
        detail = "eigensolve disagrees with the witness at n=" + std::to_string(n);
        return false;
      }
    }
  }
  detail = "negative minor found for 1|(n-1) and half/half splits of n=4,6,8,10; eigensolves agree";
  return true;
}

bool check_chsh(std::string& detail) {
  for (long n : {2, 4, 6, 8})
    if (std::abs(chsh_value_full(n) - 2.0 * std::sqrt(2.0)) > 1e-10) {
      detail = "full route deviates at n=" + std::to_string(n);
      return false;
    }
  for (long n = 2; n <= 1000000; n += 2)
    if (chsh_evaluate_reduced(n).value_pre_sqrt2() != Rational(2)) {
      detail = "reduced route deviates at n=" + std::to_string(n);
      return false;
    }
  RationalMatrix product = make_zero_matrix(2, 4);
  product.num.setIdentity();
  const ChshReport prod = chsh_classical_bound_check(2, "full", product);
  const ChshReport sep = chsh_classical_bound_check(2, "full", two_spin_matrix(two_spin_reduced_analytic(4)));
  std::ostringstream os;
  os << "full n=2..8 at 2*sqrt(2); reduced exact to n=10^6; product state " << prod.value
     << "; separable pair " << sep.value;
  detail = os.str();
  return prod.value == 0.0 && !prod.violated && sep.value <= 2.0 && !sep.violated;
}

bool check_symmetry(std::string& detail) {
  for (int n : {4, 6}) {
    const RationalMatrix rho = build_rho_pairing(n);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      if (conjugate_by_spin_permutation(rho, perm) != rho) {
        detail = "permutation invariance fails at n=" + std::to_string(n);
        return false;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  {
    const RationalMatrix rho8 = build_rho_pairing(8);
    std::mt19937 rng(1234);
    std::vector<int> perm(8);
    std::iota(perm.begin(), perm.end(), 0);
    for (int t = 0; t < 50; ++t) {
      std::shuffle(perm.begin(), perm.end(), rng);
      if (conjugate_by_spin_permutation(rho8, perm) != rho8) {
        detail = "sampled permutation invariance fails at n=8";
        return false;
      }
    }
  }
  for (int n : {4, 6, 8}) {
    const RationalMatrix rho = build_rho_pairing(n);
    for (char axis : {'x', 'y', 'z'})
      if (total_pauli_commutator_max_abs(rho, axis) != 0) {
        detail = std::string("commutator with total sigma_") + axis + " nonzero at n=" + std::to_string(n);
        return false;
      }
    for (Eigen::Index i = 0; i < rho.dim(); ++i)
      for (Eigen::Index j = 0; j < rho.dim(); ++j)
        if (rho.num(i, j) != 0 && (sz_twice(static_cast<BasisIndex>(i), n) != 0 ||
                                   sz_twice(static_cast<BasisIndex>(j), n) != 0)) {
          detail = "support outside the Sz=0 block at n=" + std::to_string(n);
          return false;
        }
  }
  detail = "all n! permutations (n=4,6), 50 sampled (n=8); exact commutation; Sz=0 support";
  return true;
}

bool check_cache(std::string& detail) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "fermispin_acceptance_cache";
  fs::remove_all(dir);
  bool ok = true;
  for (Builder b : {Builder::pairing, Builder::slater, Builder::singlet_projector}) {
    for (int n = 2; n <= 8 && ok; n += 2) {
      const RationalMatrix fresh = run_builder(b, n);
      cache_get_or_build(b, n, dir);  // populate
      const RationalMatrix cached = cache_get_or_build(b, n, dir);
      ok = cached == fresh && load_cached_matrix(cache_file_path(dir, b, n), b, n).has_value();
      if (!ok) detail = "round trip failed for " + builder_name(b) + " n=" + std::to_string(n);
    }
  }
  fs::remove_all(dir);
  if (ok) detail = "rebuild-vs-cache exact for pairing, slater, projector at n=2,4,6,8";
  return ok;
}

}  // namespace

int main() {
  const std::vector<Check> checks{
      {"1 pairing overlaps (exact)", check_overlaps},
      {"2 rho4 triple route equivalence", check_triple_equivalence},
      {"3 entropies ln 2 and ln 5 (1e-9)", check_entropy},
      {"4 reduced pair closed form (exact)", check_reduced_pair},
      {"5 correlation law -1/(n-1)", check_correlation_law},
      {"6 negativity spectrum and E=1 (1e-10)", check_negativity},
      {"7 pair separability PPT/NPT (exact)", check_pair_separability},
      {"8 sylvester witness without eigensolves", check_witness},
      {"9 CHSH 2*sqrt(2) on both routes", check_chsh},
      {"10 permutation/rotation/block symmetry", check_symmetry},
      {"11 cache round-trip identity", check_cache},
  };

  int failures = 0;
  for (const auto& check : checks) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = check.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %-42s [%6.2fs] %s\n", ok ? "PASS" : "FAIL", check.name.c_str(), seconds,
                detail.c_str());
    if (!ok) ++failures;
  }
  if (failures == 0)
    std::printf("acceptance: all %zu criteria passed\n", checks.size());
  else
    std::printf("acceptance: %d of %zu criteria FAILED\n", failures, checks.size());
  return failures;
}
