#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "dirapprox/error.hpp"

namespace dirapprox {

using Real = long double;

/// Converts mantissa * 2^-bits to the nearest-below long double (64-bit significand).
Real to_real(const mpz_class& mantissa, int bits);

/// The dyadic interval [lo, hi] * 2^-bits.
struct DyadicInterval {
  mpz_class lo;
  mpz_class hi;
  int bits = 0;

  Real midpoint() const;
  Real width() const { return to_real(mpz_class(hi - lo), bits); }
};

/// Monic integer polynomial c_0 + c_1 x + ... + x^d that defines a totally real field.
///
/// Construction validates: monic, degree >= 2, squarefree, no rational root,
/// no monic integer quadratic factor when d <= 4, and d real roots (Sturm count).
/// For d > 4 irreducibility is not decided and irreducibility_verified() is false.
class MinimalPolynomial {
 public:
  explicit MinimalPolynomial(std::vector<mpz_class> coeffs);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<mpz_class>& coeffs() const { return coeffs_; }
  bool irreducibility_verified() const { return irreducibility_verified_; }

  /// Sign of f(mantissa * 2^-bits), computed exactly.
  int sign_at(const mpz_class& mantissa, int bits) const;

 private:
  std::vector<mpz_class> coeffs_;
  bool irreducibility_verified_ = true;
};

/// Parses "c0,c1,...,cd" (constant term first).
std::vector<mpz_class> parse_coefficients(std::string_view text);

struct NumberField {
  MinimalPolynomial polynomial;
  /// Ascending isolating intervals, each of width <= 2^-precisionBits.
  std::vector<DyadicInterval> roots;
  int precisionBits = 192;

  int degree() const { return polynomial.degree(); }
};

NumberField make_field(const std::vector<mpz_class>& coeffs, int precisionBits = 192);

/// Refines the isolating interval of a simple root to width 2^-targetBits by
/// safeguarded Newton iteration in fixed point, with certified endpoints.
DyadicInterval refine_root(const MinimalPolynomial& poly, const DyadicInterval& isolating,
                           int targetBits);

/// Joint algebraic tuple alpha_i = theta^i (i = 1..n), theta the largest real root.
///
/// Row j of the embedding table holds sigma_j(1), sigma_j(alpha_1), ..., sigma_j(alpha_n)
/// as fixed-point mantissas at field.precisionBits. sigma_1 is the identity embedding
/// (theta itself); the remaining rows follow ascending root order.
struct AlgebraicTuple {
  NumberField field;
  int n = 0;
  /// Coordinates of 1, alpha_1..alpha_n in the power basis (rows), over Q.
  std::vector<std::vector<mpq_class>> coords;
  std::vector<std::vector<mpz_class>> embed;
  /// Per-entry error bound in units of 2^-precisionBits.
  std::vector<std::vector<mpz_class>> errorUlps;
  /// rootIndex[j] is the index into field.roots used by sigma_j.
  std::vector<int> rootIndex;

  int bits() const { return field.precisionBits; }
  int dim() const { return n + 1; }
  Real value(int row, int col) const { return to_real(embed[row][col], bits()); }
  /// alpha_i for i = 1..n.
  Real alpha(int i) const { return value(0, i); }
  std::vector<Real> alphas() const;
  /// Largest per-entry error, in ulps.
  const mpz_class& max_error_ulps() const;
};

AlgebraicTuple power_tuple(const NumberField& field);

/// Nearest integer vector to k * alpha and the signed displacement k*alpha - p.
struct NearestVector {
  std::vector<mpz_class> p;
  /// Displacements as mantissas at `bits` fraction bits, each in [-1/2, 1/2).
  std::vector<mpz_class> dispMantissa;
  int bits = 0;
  std::vector<Real> disp;
  Real delta = 0;
};

/// Throws PrecisionExhausted when k * error * 2^-bits >= 2^-64.
NearestVector frac_nearest(const AlgebraicTuple& tuple, const mpz_class& k);

/// Largest k for which frac_nearest is certified.
mpz_class max_certified_multiplier(const AlgebraicTuple& tuple);

bool is_prime(std::uint64_t p);
unsigned padic_valuation(const mpz_class& k, std::uint64_t p);
/// |k|_p = p^-v(k). Throws NotPrime.
mpq_class padic_norm(const mpz_class& k, std::uint64_t p);

}  // namespace dirapprox
