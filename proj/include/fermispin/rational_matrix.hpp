#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <numeric>
#include <stdexcept>

#include "fermispin/basis.hpp"
#include "fermispin/exact_vector.hpp"
#include "fermispin/rational.hpp"

namespace fermispin {

template <class Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using IntMatrix = DenseMatrix<std::int64_t>;

/// Dense 2^n x 2^n matrix with exact rational entries: integer numerators
/// over one positive common denominator. Canonical form divides out the gcd
/// of all numerators and the denominator, so equal matrices compare equal
/// entrywise. Density matrices built by this library are symmetric with
/// trace 1; partial transposes reuse the same representation but need not
/// stay positive semidefinite.
struct RationalMatrix {
  int n = 0;
  std::int64_t den = 1;
  IntMatrix num;

  Eigen::Index dim() const { return num.rows(); }

  Rational entry(Eigen::Index i, Eigen::Index j) const { return Rational(num(i, j), den); }

  void canonicalize() {
    if (den < 0) {
      den = -den;
      num = -num;
    }
    std::int64_t g = den;
    for (Eigen::Index j = 0; j < num.cols() && g > 1; ++j)
      for (Eigen::Index i = 0; i < num.rows() && g > 1; ++i)
        g = std::gcd(g, num(i, j) < 0 ? -num(i, j) : num(i, j));
    if (g > 1) {
      den /= g;
      num /= g;
    }
  }

  friend bool operator==(const RationalMatrix& a, const RationalMatrix& b) {
    return a.n == b.n && a.den == b.den && a.num == b.num;
  }
};

inline RationalMatrix make_zero_matrix(int n, std::int64_t den = 1) {
  RationalMatrix m;
  m.n = n;
  m.den = den;
  m.num = IntMatrix::Zero(dimension(n), dimension(n));
  return m;
}

/// Double-precision view, derived on demand.
inline Eigen::MatrixXd to_dense(const RationalMatrix& m) {
  return m.num.cast<double>() / static_cast<double>(m.den);
}

inline Rational trace_of(const RationalMatrix& m) { return Rational(m.num.trace(), m.den); }

inline bool is_symmetric(const RationalMatrix& m) { return m.num == m.num.transpose(); }

/// |v><v| as an exact matrix; the squared normalization 2^(-e) becomes the
/// common denominator.
inline RationalMatrix outer_product(const ExactVector& v) {
  RationalMatrix m = make_zero_matrix(v.n, std::int64_t{1} << v.norm_exponent);
  for (const auto& [i, a] : v.amps)
    for (const auto& [j, b] : v.amps) m.num(i, j) = a * b;
  return m;
}

inline RationalMatrix add(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.n != b.n) throw std::invalid_argument("add: mismatched particle counts");
  RationalMatrix m;
  m.n = a.n;
  m.den = std::lcm(a.den, b.den);
  m.num = a.num * (m.den / a.den) + b.num * (m.den / b.den);
  m.canonicalize();
  return m;
}

inline RationalMatrix scale(const RationalMatrix& a, const Rational& c) {
  RationalMatrix m;
  m.n = a.n;
  m.den = a.den * c.den;
  m.num = a.num * c.num;
  m.canonicalize();
  return m;
}

/// Largest |num(i,j)/den - other(i,j)/other_den| over all entries, as a
/// double; handy for the float-tolerance route comparisons.
inline double max_abs_difference(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.n != b.n) throw std::invalid_argument("max_abs_difference: mismatched particle counts");
  return (to_dense(a) - to_dense(b)).cwiseAbs().maxCoeff();
}

}  // namespace fermispin
