#include "dirapprox/reduce.hpp"

#include <cmath>
#include <string>

namespace dirapprox {

namespace {

void gram_schmidt(const RealMatrix& b, RealMatrix& mu, RealVector& norms) {
  const Eigen::Index d = b.cols();
  RealMatrix star = b;
  mu.setZero(d, d);
  norms.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      mu(i, j) = b.col(i).dot(star.col(j)) / norms(j);
      star.col(i) -= mu(i, j) * star.col(j);
    }
    norms(i) = star.col(i).squaredNorm();
  }
}

constexpr Real kMaxCoefficient = 4.6e18L;  // about 2^62

}  // namespace

Reduction lll_reduce(const RealMatrix& basis, Real delta) {
  const Eigen::Index d = basis.cols();
  Reduction out{basis, IndexMatrix::Identity(d, d)};
  if (d < 2) return out;
  RealMatrix& b = out.basis;
  IndexMatrix& t = out.transform;
  RealMatrix mu;
  RealVector norms;
  gram_schmidt(b, mu, norms);

  Eigen::Index k = 1;
  for (int iter = 0; k < d && iter < 100000; ++iter) {
    for (Eigen::Index j = k - 1; j >= 0; --j) {
      const Real r = std::round(mu(k, j));
      if (r == 0) continue;
      if (std::fabs(r) > kMaxCoefficient) {
        throw Error(ErrorCode::PrecisionExhausted, "LLL coefficient exceeds 62 bits");
      }
      const auto ri = static_cast<std::int64_t>(r);
      b.col(k) -= r * b.col(j);
      t.col(k) -= ri * t.col(j);
      gram_schmidt(b, mu, norms);
    }
    if (norms(k) >= (delta - mu(k, k - 1) * mu(k, k - 1)) * norms(k - 1)) {
      ++k;
    } else {
      b.col(k).swap(b.col(k - 1));
      t.col(k).swap(t.col(k - 1));
      gram_schmidt(b, mu, norms);
      k = std::max<Eigen::Index>(k - 1, 1);
    }
  }
  return out;
}

std::vector<BoxPoint> enumerate_box(const RealMatrix& basis, const RealVector& halfWidths,
                                    std::size_t cap) {
  const Eigen::Index d = basis.cols();
  if (basis.rows() != d || halfWidths.size() != d) {
    throw Error(ErrorCode::DimensionMismatch, "enumerate_box needs a square basis and d widths");
  }
  RealMatrix scaled = halfWidths.cwiseInverse().asDiagonal() * basis;
  const Reduction red = lll_reduce(scaled);
  Eigen::HouseholderQR<RealMatrix> qr(red.basis);
  const RealMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();

  // Inside the unit cube implies Euclidean norm at most sqrt(d).
  const Real radius2 = static_cast<Real>(d) * (1 + 1e-9L);
  const Real slack = 1 + 1e-12L;
  std::vector<BoxPoint> out;
  std::vector<std::int64_t> c(d, 0);
  std::vector<Real> partial(d + 1, 0);
  std::size_t visited = 0;

  auto leaf = [&]() {
    bool zero = true;
    for (auto x : c) zero = zero && x == 0;
    if (zero) return;
    if (++visited > 50 * cap + 1000) {
      throw Error(ErrorCode::TooManyPoints, "enumeration tree exceeds the point cap");
    }
    IndexVector local(d);
    for (Eigen::Index i = 0; i < d; ++i) local(i) = c[i];
    IndexVector coeffs = red.transform * local;
    RealVector v = basis * coeffs.cast<Real>();
    for (Eigen::Index i = 0; i < d; ++i) {
      if (std::fabs(v(i)) > halfWidths(i) * slack) return;
    }
    out.push_back({std::move(coeffs), std::move(v)});
    if (out.size() > cap) {
      throw Error(ErrorCode::TooManyPoints,
                  "more than " + std::to_string(cap) + " points in the box");
    }
  };

  // partial[i] = squared norm contributed by coordinates i..d-1.
  auto recurse = [&](auto&& self, Eigen::Index i) -> void {
    if (i < 0) {
      leaf();
      return;
    }
    Real center = 0;
    for (Eigen::Index j = i + 1; j < d; ++j) center -= r(i, j) * static_cast<Real>(c[j]);
    const Real rii = r(i, i);
    center /= rii;
    const Real remaining = radius2 - partial[i + 1];
    if (remaining < 0) return;
    const Real span = std::sqrt(remaining) / std::fabs(rii);
    const auto lo = static_cast<std::int64_t>(std::ceil(center - span));
    const auto hi = static_cast<std::int64_t>(std::floor(center + span));
    for (std::int64_t x = lo; x <= hi; ++x) {
      const Real diff = rii * (static_cast<Real>(x) - center);
      partial[i] = partial[i + 1] + diff * diff;
      if (partial[i] > radius2) continue;
      c[i] = x;
      self(self, i - 1);
    }
    c[i] = 0;
  };
  recurse(recurse, d - 1);
  return out;
}

}  // namespace dirapprox
