#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "fermispin/reduction.hpp"
#include "fermispin/rho.hpp"

using namespace fermispin;

TEST_CASE("reduced pair state matches the closed form for every pair", "[reduction]") {
  for (int n = 2; n <= 8; n += 2) {
    CAPTURE(n);
    const RationalMatrix rho = build_rho_pairing(n);
    const RationalMatrix expected = two_spin_matrix(two_spin_reduced_analytic(n));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        CAPTURE(i, j);
        CHECK(partial_trace(rho, SubsystemMask({i, j}, n)) == expected);
      }
  }
}

TEST_CASE("single-spin reduction is maximally mixed", "[reduction]") {
  for (int n : {2, 4, 6}) {
    const RationalMatrix rho = build_rho_pairing(n);
    for (int k = 0; k < n; ++k) {
      const RationalMatrix one = partial_trace(rho, SubsystemMask({k}, n));
      CHECK(one.den == 2);
      CHECK(one.num(0, 0) == 1);
      CHECK(one.num(1, 1) == 1);
      CHECK(one.num(0, 1) == 0);
      CHECK(one.num(1, 0) == 0);
    }
  }
}

TEST_CASE("analytic pair weights", "[reduction]") {
  const TwoSpinWeights w2 = two_spin_reduced_analytic(2);
  CHECK(w2.singlet == Rational(1));
  CHECK(w2.triplet_each == Rational(0));
  const TwoSpinWeights w4 = two_spin_reduced_analytic(4);
  CHECK(w4.singlet == Rational(1, 2));
  CHECK(w4.triplet_each == Rational(1, 6));
  const TwoSpinWeights w6 = two_spin_reduced_analytic(6);
  CHECK(w6.singlet == Rational(2, 5));
  CHECK(w6.triplet_each == Rational(1, 5));
  for (long n = 2; n <= 40; n += 2) {
    const TwoSpinWeights w = two_spin_reduced_analytic(n);
    CHECK(w.singlet + Rational(3) * w.triplet_each == Rational(1));
  }
  const TwoSpinWeights winf = two_spin_reduced_analytic(kInfiniteParticles);
  CHECK(winf.singlet == Rational(1, 4));
  CHECK(winf.triplet_each == Rational(1, 4));
  // The limit state is the two-spin identity / 4.
  RationalMatrix mixed = make_zero_matrix(2, 4);
  mixed.num.setIdentity();
  mixed.canonicalize();
  CHECK(two_spin_matrix(winf) == mixed);
  CHECK_THROWS_AS(two_spin_reduced_analytic(5), std::invalid_argument);
}

TEST_CASE("pair correlation is -1/(n-1) on both routes", "[reduction]") {
  CHECK(pair_correlation(2) == Rational(-1));
  CHECK(pair_correlation(4) == Rational(-1, 3));
  CHECK(pair_correlation(kInfiniteParticles) == Rational(0));
  for (int n = 2; n <= 10; n += 2) {
    CAPTURE(n);
    const RationalMatrix pair = partial_trace(build_rho_pairing(n), SubsystemMask({0, 1}, n));
    CHECK(pair_correlation_from_matrix(pair) == pair_correlation(n));
    CHECK(pair_correlation(n) == Rational(-1, n - 1));
  }
}

TEST_CASE("correlation magnitude decreases monotonically toward zero", "[reduction]") {
  Rational prev = pair_correlation(2);
  for (long n = 4; n <= 100; n += 2) {
    const Rational r = pair_correlation(n);
    CHECK(r < Rational(0));
    CHECK(-r < -prev);
    prev = r;
  }
  CHECK(-pair_correlation(1000000) < Rational(1, 100000));
}

TEST_CASE("nested partial traces are consistent", "[reduction]") {
  const RationalMatrix rho = build_rho_pairing(8);
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    // Random keep-sets A strictly inside A-union-B.
    std::vector<int> indices{0, 1, 2, 3, 4, 5, 6, 7};
    std::shuffle(indices.begin(), indices.end(), rng);
    const int union_size = 2 + static_cast<int>(rng() % 5);
    const int a_size = 1 + static_cast<int>(rng() % union_size);
    std::vector<int> ab(indices.begin(), indices.begin() + union_size);
    std::sort(ab.begin(), ab.end());
    std::vector<int> a(ab.begin(), ab.begin() + a_size);
    // Positions of a within ab, for the inner mask.
    std::vector<int> a_in_ab;
    for (int k = 0; k < union_size; ++k)
      if (std::find(a.begin(), a.end(), ab[k]) != a.end()) a_in_ab.push_back(k);
    const RationalMatrix via_union =
        partial_trace(partial_trace(rho, SubsystemMask(ab, 8)), SubsystemMask(a_in_ab, union_size));
    CHECK(via_union == partial_trace(rho, SubsystemMask(a, 8)));
  }
}

TEST_CASE("three-spin reduction is an ordinary partial trace", "[reduction]") {
  const RationalMatrix rho = build_rho_pairing(4);
  const RationalMatrix three = partial_trace(rho, SubsystemMask({0, 1, 2}, 4));
  CHECK(three.dim() == 8);
  CHECK(trace_of(three) == Rational(1));
  CHECK(is_symmetric(three));
}

TEST_CASE("mask validation", "[reduction]") {
  CHECK_THROWS_AS(SubsystemMask({}, 4), std::invalid_argument);
  CHECK_THROWS_AS(SubsystemMask({0, 0}, 4), std::invalid_argument);
  CHECK_THROWS_AS(SubsystemMask({1, 0}, 4), std::invalid_argument);
  CHECK_THROWS_AS(SubsystemMask({0, 4}, 4), std::invalid_argument);
  const RationalMatrix rho = build_rho_pairing(4);
  CHECK_THROWS_AS(partial_trace(rho, SubsystemMask({0, 1}, 6)), std::invalid_argument);
}
