#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "dirapprox/numberfield.hpp"
#include "dirapprox/reduce.hpp"

namespace dirapprox {

/// d x d long double matrix with a shared absolute error bound.
struct SquareMatrix {
  RealMatrix entries;
  Real errorBound = 0;

  int dim() const { return static_cast<int>(entries.rows()); }
  Real operator()(int i, int j) const { return entries(i, j); }
};

using BigIntMatrix = std::vector<std::vector<mpz_class>>;

BigIntMatrix big_identity(int d);
BigIntMatrix multiply(const BigIntMatrix& a, const IndexMatrix& t);
bool is_identity(const IndexMatrix& t);

/// scale * M * 2^-bits with integer mantissas M.
///
/// Lattices that are flowed far into the cusp lose all significance in long double
/// once the basis is skewed; keeping the mantissas exact lets us realize
/// diag(e^rowLog) * M * G for any integer change of basis G without cancellation.
struct ExactFrame {
  BigIntMatrix mantissa;
  int bits = 0;
  Real scale = 1;
  /// Row scaling diag(e^rowLog) applied before everything else; empty means zero.
  std::vector<Real> rowLog;

  int dim() const { return static_cast<int>(mantissa.size()); }
  static ExactFrame from_real(const RealMatrix& m);
  RealMatrix realize(const std::vector<Real>& rowLog, const BigIntMatrix& g) const;
  RealMatrix realize() const;
};

struct ReducedFrame {
  BigIntMatrix g;
  RealMatrix basis;
};

/// LLL-reduces diag(e^rowLog) * frame * g0, repeating until the transform is trivial.
/// g0 must already be close to reduced for the target; see reduce_along_flow.
ReducedFrame reduce_frame(const ExactFrame& frame, const std::vector<Real>& rowLog,
                          const BigIntMatrix& g0);

/// Walks from rowLog = 0 to the target in steps of at most `step` per row,
/// reducing at each stop.
ReducedFrame reduce_along_flow(const ExactFrame& frame, const std::vector<Real>& rowLog,
                               Real step = 0.5L);

/// Columns are basis vectors.
struct LatticeBasis {
  SquareMatrix matrix;
  Real covolume = 0;
  bool unimodular = false;
  /// Exact representation of the same basis, when one is available.
  std::shared_ptr<const ExactFrame> frame;

  int dim() const { return matrix.dim(); }
  static LatticeBasis from_matrix(RealMatrix m, Real errorBound = 0);
  static LatticeBasis from_frame(ExactFrame frame);
  /// The frame, or one built from the long double entries.
  std::shared_ptr<const ExactFrame> exact() const;
};

struct ConePointSet {
  LatticeBasis basis;
  Real epsilon = 0;
  std::vector<RealVector> points;
  std::vector<IndexVector> coefficients;
};

/// The same lattice with an LLL-reduced basis (exact path when a frame is present).
LatticeBasis reduced(const LatticeBasis& basis);

/// a(t) * basis, kept exact when a frame is present.
LatticeBasis flow(const LatticeBasis& basis, Real t);

SquareMatrix diag_flow(Real t, int d);
SquareMatrix unipotent(const std::vector<Real>& values);

struct EmbeddingLattice {
  SquareMatrix raw;
  LatticeBasis normalized;
  Real absDet = 0;
};

/// Rows (1, sigma_j(alpha_1), ..., sigma_j(alpha_n)).
EmbeddingLattice embedding_lattice(const AlgebraicTuple& tuple);

/// Unimodular basis Y of the compact-orbit lattice for which u(alpha) * Y^-1 is
/// block lower triangular (see README). Equal to the normalized embedding lattice when n = 1.
LatticeBasis conjugation_basis(const AlgebraicTuple& tuple);

/// conjugation_basis * a(-t_k), t_k = k ln p / (n + 1).
LatticeBasis hecke_scaled_lattice(const AlgebraicTuple& tuple, std::uint64_t p, unsigned k);

/// Exact frame of u(ell * alpha).
ExactFrame unipotent_frame(const AlgebraicTuple& tuple, const mpz_class& ell);

struct Conjugator {
  SquareMatrix U;
  SquareMatrix U0;
  Real det = 0;
  /// max |U * Y - u(alpha)|
  Real residual = 0;
  /// max |U_{i,d}|, i < d, before those entries are set to zero.
  Real blockResidual = 0;
};

Conjugator solve_conjugator(const AlgebraicTuple& tuple);

/// Flow time ln(ell)/(n+1) (Corrected) or ln(ell)/n (Uncorrected) in a(t) u(alpha) a(-t).
enum class ExponentRule { Uncorrected, Corrected };

Real conjugation_residual(const AlgebraicTuple& tuple, std::uint64_t ell, ExponentRule rule);

/// Lattice points with 0 < max_{i<d} |v_i| < eps and |v_d| <= 1.
ConePointSet enumerate_cone(const LatticeBasis& basis, Real eps, std::size_t cap = 1'000'000);
bool in_cone(const RealVector& v, Real eps);

/// Upper-triangular HNF matrices of determinant m; row i lists the coefficients
/// of the i-th sublattice generator.
std::vector<IndexMatrix> hecke_neighbors(int d, std::int64_t m);
/// Elementary divisors, ascending.
std::vector<std::int64_t> elementary_divisors(const IndexMatrix& h);
/// HNFs whose elementary divisors equal `divisors` (ascending, length d).
std::vector<IndexMatrix> hecke_neighbors_typed(int d, const std::vector<std::int64_t>& divisors);
/// Sublattice basis * H^T rescaled by det(H)^(-1/d).
LatticeBasis apply_hecke(const LatticeBasis& basis, const IndexMatrix& h);

/// Row-major CSV, 17 significant digits.
void write_matrix_csv(std::ostream& out, const RealMatrix& m);
/// "# covolume=<value>" header followed by the matrix.
void write_lattice_csv(std::ostream& out, const LatticeBasis& basis);

}  // namespace dirapprox
