#include "dirapprox/latgeo.hpp"

#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include <fmt/format.h>

namespace dirapprox {

namespace {

mpz_class big_det(BigIntMatrix a) {
  // Bareiss fraction-free elimination.
  const int d = static_cast<int>(a.size());
  int sign = 1;
  mpz_class prev = 1;
  for (int k = 0; k < d - 1; ++k) {
    if (a[k][k] == 0) {
      int swap = -1;
      for (int r = k + 1; r < d; ++r) {
        if (a[r][k] != 0) {
          swap = r;
          break;
        }
      }
      if (swap < 0) return 0;
      std::swap(a[k], a[swap]);
      sign = -sign;
    }
    for (int i = k + 1; i < d; ++i) {
      for (int j = k + 1; j < d; ++j) {
        a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
      }
    }
    prev = a[k][k];
  }
  return sign * a[d - 1][d - 1];
}

BigIntMatrix minor_of(const BigIntMatrix& a, int row, int col) {
  BigIntMatrix out;
  for (int i = 0; i < static_cast<int>(a.size()); ++i) {
    if (i == row) continue;
    std::vector<mpz_class> r;
    for (int j = 0; j < static_cast<int>(a.size()); ++j) {
      if (j != col) r.push_back(a[i][j]);
    }
    out.push_back(std::move(r));
  }
  return out;
}

BigIntMatrix cofactors(const BigIntMatrix& a) {
  const int d = static_cast<int>(a.size());
  BigIntMatrix c(d, std::vector<mpz_class>(d));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const mpz_class m = big_det(minor_of(a, i, j));
      c[i][j] = (i + j) % 2 == 0 ? m : mpz_class(-m);
    }
  }
  return c;
}

std::int64_t small_det(const IndexMatrix& m) {
  const Eigen::Index d = m.rows();
  if (d == 0) return 1;
  if (d == 1) return m(0, 0);
  std::int64_t total = 0;
  for (Eigen::Index j = 0; j < d; ++j) {
    IndexMatrix sub(d - 1, d - 1);
    for (Eigen::Index i = 1; i < d; ++i) {
      for (Eigen::Index c = 0, cc = 0; c < d; ++c) {
        if (c == j) continue;
        sub(i - 1, cc++) = m(i, c);
      }
    }
    const std::int64_t term = m(0, j) * small_det(sub);
    total += j % 2 == 0 ? term : -term;
  }
  return total;
}

void subsets(int n, int k, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    subsets(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

Real frame_covolume(const ExactFrame& f) {
  const mpz_class det = big_det(f.mantissa);
  Real logSum = 0;
  for (Real x : f.rowLog) logSum += x;
  return std::fabs(to_real(det, f.bits * f.dim())) * std::pow(f.scale, static_cast<Real>(f.dim())) *
         std::exp(logSum);
}

}  // namespace

BigIntMatrix big_identity(int d) {
  BigIntMatrix out(d, std::vector<mpz_class>(d, 0));
  for (int i = 0; i < d; ++i) out[i][i] = 1;
  return out;
}

BigIntMatrix multiply(const BigIntMatrix& a, const IndexMatrix& t) {
  const int rows = static_cast<int>(a.size());
  const int cols = static_cast<int>(t.cols());
  BigIntMatrix out(rows, std::vector<mpz_class>(cols, 0));
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      for (int k = 0; k < static_cast<int>(t.rows()); ++k) {
        if (t(k, j) != 0) out[i][j] += a[i][k] * mpz_class(static_cast<long>(t(k, j)));
      }
    }
  }
  return out;
}

bool is_identity(const IndexMatrix& t) { return t == IndexMatrix::Identity(t.rows(), t.cols()); }

ExactFrame ExactFrame::from_real(const RealMatrix& m) {
  const int d = static_cast<int>(m.rows());
  std::vector<std::vector<int>> frac(d, std::vector<int>(d, 0));
  BigIntMatrix mant(d, std::vector<mpz_class>(d, 0));
  int bits = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const Real x = m(i, j);
      if (x == 0) continue;
      int e = 0;
      const Real f = std::frexp(std::fabs(x), &e);
      const auto top = static_cast<unsigned long>(std::ldexp(f, 64));
      mant[i][j] = top;
      if (x < 0) mant[i][j] = -mant[i][j];
      frac[i][j] = 64 - e;
      bits = std::max(bits, frac[i][j]);
    }
  }
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (mant[i][j] != 0) mant[i][j] <<= static_cast<mp_bitcnt_t>(bits - frac[i][j]);
    }
  }
  return {std::move(mant), bits, 1, {}};
}

RealMatrix ExactFrame::realize(const std::vector<Real>& rowLog, const BigIntMatrix& g) const {
  const int d = dim();
  RealMatrix out(d, d);
  mpz_class acc;
  for (int i = 0; i < d; ++i) {
    Real log = rowLog.empty() ? 0 : rowLog[i];
    if (!this->rowLog.empty()) log += this->rowLog[i];
    const Real rowScale = scale * std::exp(log);
    for (int j = 0; j < d; ++j) {
      acc = 0;
      for (int k = 0; k < d; ++k) acc += mantissa[i][k] * g[k][j];
      out(i, j) = rowScale * to_real(acc, bits);
    }
  }
  return out;
}

RealMatrix ExactFrame::realize() const { return realize({}, big_identity(dim())); }

ReducedFrame reduce_frame(const ExactFrame& frame, const std::vector<Real>& rowLog,
                          const BigIntMatrix& g0) {
  ReducedFrame out{g0, frame.realize(rowLog, g0)};
  for (int pass = 0; pass < 16; ++pass) {
    const Reduction red = lll_reduce(out.basis);
    if (is_identity(red.transform)) break;
    out.g = multiply(out.g, red.transform);
    out.basis = frame.realize(rowLog, out.g);
  }
  return out;
}

ReducedFrame reduce_along_flow(const ExactFrame& frame, const std::vector<Real>& rowLog,
                               Real step) {
  const int d = frame.dim();
  Real size = 0;
  for (Real x : rowLog) size = std::max(size, std::fabs(x));
  const int stops = std::max(1, static_cast<int>(std::ceil(size / step)));
  ReducedFrame out = reduce_frame(frame, {}, big_identity(d));
  if (rowLog.empty()) return out;
  std::vector<Real> partial(d);
  for (int s = 1; s <= stops; ++s) {
    for (int i = 0; i < d; ++i) partial[i] = rowLog[i] * s / stops;
    out = reduce_frame(frame, partial, out.g);
  }
  return out;
}

LatticeBasis reduced(const LatticeBasis& basis) {
  const auto frame = basis.exact();
  ExactFrame flat = *frame;
  flat.rowLog.clear();
  const ReducedFrame red = reduce_along_flow(flat, frame->rowLog);
  ExactFrame next = *frame;
  const int d = frame->dim();
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      next.mantissa[i][j] = 0;
      for (int k = 0; k < d; ++k) next.mantissa[i][j] += frame->mantissa[i][k] * red.g[k][j];
    }
  }
  LatticeBasis out = LatticeBasis::from_frame(std::move(next));
  out.covolume = basis.covolume;
  out.unimodular = basis.unimodular;
  return out;
}

LatticeBasis flow(const LatticeBasis& basis, Real t) {
  ExactFrame next = *basis.exact();
  const int d = next.dim();
  if (next.rowLog.empty()) next.rowLog.assign(d, 0);
  for (int i = 0; i + 1 < d; ++i) next.rowLog[i] += t;
  next.rowLog[d - 1] -= (d - 1) * t;
  LatticeBasis out = LatticeBasis::from_frame(std::move(next));
  out.covolume = basis.covolume;
  out.unimodular = basis.unimodular;
  return out;
}

LatticeBasis LatticeBasis::from_matrix(RealMatrix m, Real errorBound) {
  LatticeBasis out;
  out.covolume = std::fabs(m.determinant());
  out.unimodular = std::fabs(out.covolume - 1) <= 1e-10L;
  out.matrix = {std::move(m), errorBound};
  return out;
}

LatticeBasis LatticeBasis::from_frame(ExactFrame frame) {
  LatticeBasis out;
  out.matrix = {frame.realize(), std::ldexp(Real(1), -62)};
  out.covolume = frame_covolume(frame);
  out.unimodular = std::fabs(out.covolume - 1) <= 1e-10L;
  out.frame = std::make_shared<const ExactFrame>(std::move(frame));
  return out;
}

std::shared_ptr<const ExactFrame> LatticeBasis::exact() const {
  if (frame) return frame;
  return std::make_shared<const ExactFrame>(ExactFrame::from_real(matrix.entries));
}

SquareMatrix diag_flow(Real t, int d) {
  if (d < 2) throw Error(ErrorCode::InvalidArgument, "diag_flow needs d >= 2");
  RealMatrix m = RealMatrix::Zero(d, d);
  for (int i = 0; i < d - 1; ++i) m(i, i) = std::exp(t);
  m(d - 1, d - 1) = std::exp(-(d - 1) * t);
  return {m, 0};
}

SquareMatrix unipotent(const std::vector<Real>& values) {
  const int d = static_cast<int>(values.size()) + 1;
  RealMatrix m = RealMatrix::Identity(d, d);
  for (int i = 0; i < d - 1; ++i) m(i, d - 1) = values[i];
  return {m, 0};
}

EmbeddingLattice embedding_lattice(const AlgebraicTuple& tuple) {
  const int d = tuple.dim();
  BigIntMatrix mant = tuple.embed;
  RealMatrix raw(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) raw(j, i) = tuple.value(j, i);
  }
  const Real absDet = std::fabs(to_real(big_det(mant), tuple.bits() * d));
  if (absDet < 1e-10L) {
    throw Error(ErrorCode::SingularEmbedding, fmt::format("|det B| = {:.3g}", static_cast<double>(absDet)));
  }
  const Real err = std::ldexp(to_real(tuple.max_error_ulps(), 0), -tuple.bits());
  ExactFrame frame{std::move(mant), tuple.bits(), std::pow(absDet, -Real(1) / d), {}};
  return {{raw, err}, LatticeBasis::from_frame(std::move(frame)), absDet};
}

LatticeBasis conjugation_basis(const AlgebraicTuple& tuple) {
  const int d = tuple.dim();
  // Trace dual of the module with basis (-alpha_1, ..., -alpha_n, 1), with the
  // identity embedding moved to the last row.
  BigIntMatrix z(d, std::vector<mpz_class>(d));
  for (int r = 0; r < d; ++r) {
    const auto& row = tuple.embed[(r + 1) % d];
    for (int i = 0; i + 1 < d; ++i) z[r][i] = -row[i + 1];
    z[r][d - 1] = row[0];
  }
  const mpz_class detZ = big_det(z);
  if (detZ == 0) throw Error(ErrorCode::SingularEmbedding, "conjugation basis is singular");
  BigIntMatrix f = cofactors(z);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (sgn(detZ) < 0) f[i][j] = -f[i][j];
      if (i == d - 1) f[i][j] = -f[i][j];
    }
  }
  ExactFrame frame{std::move(f), tuple.bits() * (d - 1), 1, {}};
  const Real cov = frame_covolume(frame);
  frame.scale = std::pow(cov, -Real(1) / d);
  return LatticeBasis::from_frame(std::move(frame));
}

LatticeBasis hecke_scaled_lattice(const AlgebraicTuple& tuple, std::uint64_t p, unsigned k) {
  if (!is_prime(p)) throw Error(ErrorCode::NotPrime, std::to_string(p) + " is not prime");
  const LatticeBasis base = conjugation_basis(tuple);
  if (k == 0) return base;
  const int d = tuple.dim();
  ExactFrame frame = *base.frame;
  mpz_class pk;
  mpz_ui_pow_ui(pk.get_mpz_t(), p, k);
  for (int i = 0; i < d; ++i) frame.mantissa[i][d - 1] *= pk;
  if (big_det(frame.mantissa) != pk * big_det(base.frame->mantissa)) {
    throw Error(ErrorCode::StructureViolation, "scaled lattice is not an index p^k sublattice");
  }
  frame.scale *= std::pow(static_cast<Real>(p), -static_cast<Real>(k) / d);
  return LatticeBasis::from_frame(std::move(frame));
}

ExactFrame unipotent_frame(const AlgebraicTuple& tuple, const mpz_class& ell) {
  const int d = tuple.dim();
  BigIntMatrix m(d, std::vector<mpz_class>(d, 0));
  const mpz_class one = mpz_class(1) << tuple.bits();
  for (int i = 0; i < d; ++i) m[i][i] = one;
  for (int i = 0; i + 1 < d; ++i) m[i][d - 1] = ell * tuple.embed[0][i + 1];
  return {std::move(m), tuple.bits(), 1, {}};
}

Conjugator solve_conjugator(const AlgebraicTuple& tuple) {
  const int d = tuple.dim();
  const RealMatrix y = conjugation_basis(tuple).matrix.entries;
  const RealMatrix u = unipotent(tuple.alphas()).entries;
  RealMatrix uMat = y.transpose().fullPivLu().solve(u.transpose()).transpose();

  Conjugator out;
  for (int i = 0; i + 1 < d; ++i) out.blockResidual = std::max(out.blockResidual, std::fabs(uMat(i, d - 1)));
  if (out.blockResidual > 1e-10L) {
    throw Error(ErrorCode::StructureViolation,
                fmt::format("U(i,d) = {:.3g} for i < d", static_cast<double>(out.blockResidual)));
  }
  for (int i = 0; i + 1 < d; ++i) uMat(i, d - 1) = 0;
  out.residual = (uMat * y - u).cwiseAbs().maxCoeff();
  out.det = uMat.determinant();
  if (std::fabs(std::fabs(out.det) - 1) > 1e-10L) {
    throw Error(ErrorCode::StructureViolation,
                fmt::format("|det U| = {:.12g}", static_cast<double>(std::fabs(out.det))));
  }
  RealMatrix u0 = uMat;
  for (int j = 0; j + 1 < d; ++j) u0(d - 1, j) = 0;
  out.U = {uMat, out.residual};
  out.U0 = {u0, out.residual};
  return out;
}

Real conjugation_residual(const AlgebraicTuple& tuple, std::uint64_t ell, ExponentRule rule) {
  if (ell < 1) throw Error(ErrorCode::InvalidArgument, "ell must be >= 1");
  const int n = tuple.n;
  const Real logEll = std::log(static_cast<Real>(ell));
  const Real t = rule == ExponentRule::Corrected ? logEll / (n + 1) : logEll / n;
  std::vector<Real> scaled;
  for (Real a : tuple.alphas()) scaled.push_back(static_cast<Real>(ell) * a);
  const RealMatrix lhs = unipotent(scaled).entries;
  const RealMatrix rhs =
      diag_flow(t, n + 1).entries * unipotent(tuple.alphas()).entries * diag_flow(-t, n + 1).entries;
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

bool in_cone(const RealVector& v, Real eps) {
  const Eigen::Index d = v.size();
  Real proj = 0;
  for (Eigen::Index i = 0; i + 1 < d; ++i) proj = std::max(proj, std::fabs(v(i)));
  return proj > 1e-30L && proj < eps && std::fabs(v(d - 1)) <= 1;
}

ConePointSet enumerate_cone(const LatticeBasis& basis, Real eps, std::size_t cap) {
  if (!(eps > 0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  const int d = basis.dim();
  RealVector widths = RealVector::Constant(d, eps);
  widths(d - 1) = 1;
  ConePointSet out{basis, eps, {}, {}};
  for (auto& pt : enumerate_box(basis.matrix.entries, widths, cap)) {
    if (!in_cone(pt.point, eps)) continue;
    out.points.push_back(std::move(pt.point));
    out.coefficients.push_back(std::move(pt.coeffs));
  }
  return out;
}

std::vector<IndexMatrix> hecke_neighbors(int d, std::int64_t m) {
  if (d < 2 || m < 1) throw Error(ErrorCode::InvalidArgument, "hecke_neighbors needs d >= 2, m >= 1");
  std::vector<IndexMatrix> out;
  std::vector<std::int64_t> diag(d);
  // Diagonal tuples with product m, then off-diagonal entries reduced mod the diagonal below.
  auto fill = [&](auto&& self, IndexMatrix& h, int i, int j) -> void {
    if (i < 0) {
      out.push_back(h);
      return;
    }
    if (j >= d) {
      self(self, h, i - 1, i);
      return;
    }
    for (std::int64_t x = 0; x < h(j, j); ++x) {
      h(i, j) = x;
      self(self, h, i, j + 1);
    }
    h(i, j) = 0;
  };
  auto choose = [&](auto&& self, int i, std::int64_t rest) -> void {
    if (i == d - 1) {
      diag[i] = rest;
      IndexMatrix h = IndexMatrix::Zero(d, d);
      for (int k = 0; k < d; ++k) h(k, k) = diag[k];
      fill(fill, h, d - 2, d - 1);
      return;
    }
    for (std::int64_t a = 1; a <= rest; ++a) {
      if (rest % a != 0) continue;
      diag[i] = a;
      self(self, i + 1, rest / a);
    }
  };
  choose(choose, 0, m);
  return out;
}

std::vector<std::int64_t> elementary_divisors(const IndexMatrix& h) {
  const int d = static_cast<int>(h.rows());
  std::vector<std::int64_t> out;
  std::int64_t prevGcd = 1;
  for (int k = 1; k <= d; ++k) {
    std::vector<std::vector<int>> sets;
    std::vector<int> cur;
    subsets(d, k, 0, cur, sets);
    std::int64_t g = 0;
    for (const auto& rows : sets) {
      for (const auto& cols : sets) {
        IndexMatrix sub(k, k);
        for (int a = 0; a < k; ++a) {
          for (int b = 0; b < k; ++b) sub(a, b) = h(rows[a], cols[b]);
        }
        g = std::gcd(g, small_det(sub));
      }
    }
    out.push_back(prevGcd == 0 ? 0 : g / prevGcd);
    prevGcd = g;
  }
  return out;
}

std::vector<IndexMatrix> hecke_neighbors_typed(int d, const std::vector<std::int64_t>& divisors) {
  if (static_cast<int>(divisors.size()) != d) {
    throw Error(ErrorCode::DimensionMismatch, "need d elementary divisors");
  }
  std::int64_t m = 1;
  for (auto a : divisors) m *= a;
  std::vector<IndexMatrix> out;
  for (auto& h : hecke_neighbors(d, m)) {
    if (elementary_divisors(h) == divisors) out.push_back(std::move(h));
  }
  return out;
}

LatticeBasis apply_hecke(const LatticeBasis& basis, const IndexMatrix& h) {
  const int d = basis.dim();
  const Real m = static_cast<Real>(small_det(h));
  RealMatrix sub = basis.matrix.entries * h.transpose().cast<Real>();
  sub *= std::pow(m, -Real(1) / d);
  return LatticeBasis::from_matrix(std::move(sub), basis.matrix.errorBound);
}

void write_matrix_csv(std::ostream& out, const RealMatrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << (j ? "," : "") << fmt::format("{:.17g}", static_cast<double>(m(i, j)));
    }
    out << '\n';
  }
}

void write_lattice_csv(std::ostream& out, const LatticeBasis& basis) {
  out << fmt::format("# covolume={:.17g}\n", static_cast<double>(basis.covolume));
  write_matrix_csv(out, basis.matrix.entries);
}

}  // namespace dirapprox
