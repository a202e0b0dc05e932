#include <doctest.h>

#include <random>
#include <sstream>

#include "dirapprox/latgeo.hpp"
#include "oracles.hpp"

using namespace dirapprox;

namespace {

AlgebraicTuple tuple_of(std::initializer_list<long> c) {
  std::vector<mpz_class> big;
  for (long x : c) big.emplace_back(x);
  return power_tuple(make_field(big));
}

RealMatrix mat(int d, std::initializer_list<Real> v) {
  RealMatrix m(d, d);
  auto it = v.begin();
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = *it++;
  }
  return m;
}

Real max_abs(const RealMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("diag_flow") {
  CHECK(max_abs(diag_flow(0, 3).entries - RealMatrix::Identity(3, 3)) == 0);
  CHECK(max_abs(diag_flow(std::log(2.0L), 3).entries - mat(3, {2, 0, 0, 0, 2, 0, 0, 0, 0.25L})) < 1e-15L);
  CHECK(max_abs(diag_flow(std::log(3.0L), 2).entries - mat(2, {3, 0, 0, 1.0L / 3})) < 1e-15L);
  for (Real t = -10; t <= 10; t += 0.5L) {
    for (int d : {2, 3, 4}) {
      CHECK(std::fabs(diag_flow(t, d).entries.determinant() - 1) < 1e-12L);
      const RealMatrix prod = diag_flow(0.3L, d).entries * diag_flow(t, d).entries;
      CHECK(max_abs(prod - diag_flow(t + 0.3L, d).entries) < 1e-12L * std::max<Real>(1, max_abs(prod)));
    }
  }
}

TEST_CASE("unipotent") {
  CHECK(max_abs(unipotent({0}).entries - RealMatrix::Identity(2, 2)) == 0);
  CHECK(max_abs(unipotent({1.6180339887L}).entries - mat(2, {1, 1.6180339887L, 0, 1})) == 0);
  const AlgebraicTuple cubic = tuple_of({-1, -3, 0, 1});
  const RealMatrix u = unipotent(cubic.alphas()).entries;
  CHECK(static_cast<double>(u(0, 2)) == doctest::Approx(1.8793852416).epsilon(1e-10));
  CHECK(static_cast<double>(u(1, 2)) == doctest::Approx(3.5320888862).epsilon(1e-10));
  CHECK(u(2, 2) == 1);
  CHECK(u(1, 0) == 0);
  CHECK(u.determinant() == 1);
}

TEST_CASE("embedding lattice") {
  const AlgebraicTuple phi = tuple_of({-1, -1, 1});
  const EmbeddingLattice e = embedding_lattice(phi);
  CHECK(max_abs(e.raw.entries - mat(2, {1, 1.6180339887498949L, 1, -0.6180339887498949L})) < 1e-15L);
  CHECK(static_cast<double>(e.absDet) == doctest::Approx(2.2360679775).epsilon(1e-10));
  CHECK(std::fabs(e.normalized.covolume - 1) < 1e-10L);
  CHECK(e.normalized.unimodular);
  const EmbeddingLattice c = embedding_lattice(tuple_of({-1, -3, 0, 1}));
  CHECK(std::fabs(c.absDet - 9) < 1e-12L);
  CHECK(std::fabs(c.normalized.covolume - 1) < 1e-10L);
}

TEST_CASE("conjugation basis equals Bnorm for n = 1 and is unimodular") {
  const AlgebraicTuple phi = tuple_of({-1, -1, 1});
  CHECK(max_abs(conjugation_basis(phi).matrix.entries - embedding_lattice(phi).normalized.matrix.entries) < 1e-15L);
  const LatticeBasis y = conjugation_basis(tuple_of({-1, -3, 0, 1}));
  CHECK(std::fabs(std::fabs(y.matrix.entries.determinant()) - 1) < 1e-12L);
  CHECK(y.unimodular);
}

TEST_CASE("hecke scaled lattice") {
  const AlgebraicTuple phi = tuple_of({-1, -1, 1});
  const RealMatrix bnorm = embedding_lattice(phi).normalized.matrix.entries;
  CHECK(max_abs(hecke_scaled_lattice(phi, 2, 0).matrix.entries - bnorm) < 1e-15L);
  const RealMatrix expected = bnorm * mat(2, {1 / std::sqrt(2.0L), 0, 0, std::sqrt(2.0L)});
  CHECK(max_abs(hecke_scaled_lattice(phi, 2, 1).matrix.entries - expected) < 1e-15L);
  const AlgebraicTuple cubic = tuple_of({-1, -3, 0, 1});
  const LatticeBasis x3 = hecke_scaled_lattice(cubic, 2, 3);
  CHECK(std::fabs(x3.covolume - 1) < 1e-10L);
  // p^(k/d) x_k is an index p^k sublattice of the k = 0 lattice.
  const RealMatrix coords = conjugation_basis(cubic).matrix.entries.inverse() * x3.matrix.entries *
                            std::pow(2.0L, 3.0L / 3);
  for (Eigen::Index i = 0; i < coords.size(); ++i) CHECK(std::fabs(coords(i) - std::round(coords(i))) < 1e-9L);
  CHECK(std::fabs(std::fabs(coords.determinant()) - 8) < 1e-9L);
}

TEST_CASE("conjugator for the golden ratio") {
  const Conjugator c = solve_conjugator(tuple_of({-1, -1, 1}));
  CHECK(max_abs(c.U.entries - mat(2, {1.4953487812L, 0, 0.6687403050L, -0.6687403050L})) < 1e-10L);
  CHECK(max_abs(c.U0.entries - mat(2, {1.4953487812L, 0, 0, -0.6687403050L})) < 1e-10L);
  CHECK(std::fabs(c.det + 1) < 1e-12L);
  CHECK(std::fabs(c.U(0, 0) - std::pow(5.0L, 0.25L)) < 1e-15L);
}

TEST_CASE("conjugator identities and flow limit") {
  for (const AlgebraicTuple& t : {tuple_of({-1, -1, 1}), tuple_of({-1, -3, 0, 1})}) {
    const Conjugator c = solve_conjugator(t);
    const RealMatrix y = conjugation_basis(t).matrix.entries;
    CHECK(max_abs(c.U.entries * y - unipotent(t.alphas()).entries) < 1e-12L);
    CHECK(c.residual < 1e-12L);
    CHECK(c.blockResidual < 1e-12L);
    CHECK(std::fabs(std::fabs(c.det) - 1) < 1e-10L);
    const int d = t.dim();
    for (int i = 0; i + 1 < d; ++i) CHECK(c.U(i, d - 1) == 0);
    Real previous = INFINITY;
    for (int s = 1; s <= 10; ++s) {
      const RealMatrix flowed = diag_flow(s, d).entries * c.U.entries * diag_flow(-s, d).entries;
      const Real gap = max_abs(flowed - c.U0.entries);
      CHECK(gap < previous);
      previous = gap;
    }
  }
}

TEST_CASE("exponent audit") {
  const AlgebraicTuple phi = tuple_of({-1, -1, 1});
  CHECK(conjugation_residual(phi, 1, ExponentRule::Corrected) == 0);
  CHECK(conjugation_residual(phi, 1, ExponentRule::Uncorrected) == 0);
  CHECK(static_cast<double>(conjugation_residual(phi, 4, ExponentRule::Uncorrected)) ==
        doctest::Approx(12 * 1.6180339887498949).epsilon(1e-12));
  for (const AlgebraicTuple& t : {phi, tuple_of({-1, -3, 0, 1})}) {
    for (std::uint64_t ell : {2, 4, 9}) CHECK(conjugation_residual(t, ell, ExponentRule::Corrected) < 1e-12L);
  }
}

TEST_CASE("cone enumeration examples") {
  CHECK(enumerate_cone(LatticeBasis::from_matrix(RealMatrix::Identity(2, 2)), 0.6L).points.empty());
  const auto pts = enumerate_cone(LatticeBasis::from_matrix(mat(2, {0.5L, 0, 0, 2})), 0.6L).points;
  REQUIRE(pts.size() == 2);
  CHECK(std::fabs(std::fabs(pts[0](0)) - 0.5L) < 1e-15L);
  CHECK(pts[0](0) == -pts[1](0));
  const auto phi = enumerate_cone(embedding_lattice(tuple_of({-1, -1, 1})).normalized, 0.7L).points;
  bool found = false;
  for (const auto& v : phi) {
    found |= std::fabs(v(0) - 0.6687403050L) < 1e-9L && std::fabs(v(1) - 0.6687403050L) < 1e-9L;
  }
  CHECK(found);
  CHECK_THROWS_AS(enumerate_cone(LatticeBasis::from_matrix(mat(2, {1e-4L, 0, 0, 1e4L})), 0.5L, 100), Error);
}

TEST_CASE("cone enumeration matches the coefficient box") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 2 + trial % 2;
    RealMatrix m(d, d);
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = u(rng);
    if (std::fabs(m.determinant()) < 0.2L) continue;
    // Unimodular rescale keeps coefficients of cone points small.
    m /= std::pow(std::fabs(m.determinant()), 1.0L / d);
    const LatticeBasis b = LatticeBasis::from_matrix(m);
    for (Real eps : {0.2L, 0.45L, 0.8L}) {
      const ConePointSet cone = enumerate_cone(b, eps);
      const int radius = static_cast<int>(m.inverse().cwiseAbs().rowwise().sum().maxCoeff()) + 1;
      REQUIRE(radius <= 40);
      const auto brute = oracle::brute_cone(m, eps, radius);
      CHECK(cone.points.size() == brute.size());
      CHECK(cone.points.size() % 2 == 0);
      for (std::size_t i = 0; i < cone.points.size(); ++i) {
        const RealVector c = m.inverse() * cone.points[i];
        for (int j = 0; j < d; ++j) CHECK(std::fabs(c(j) - std::round(c(j))) < 1e-9L);
        CHECK((m * cone.coefficients[i].cast<Real>() - cone.points[i]).cwiseAbs().maxCoeff() < 1e-12L);
      }
    }
  }
}

TEST_CASE("hecke neighbors") {
  const auto two = hecke_neighbors(2, 2);
  REQUIRE(two.size() == 3);
  std::set<std::vector<std::int64_t>> seen;
  for (const auto& h : two) seen.insert({h(0, 0), h(0, 1), h(1, 0), h(1, 1)});
  CHECK(seen == std::set<std::vector<std::int64_t>>{{2, 0, 0, 1}, {1, 0, 0, 2}, {1, 1, 0, 2}});
  CHECK(hecke_neighbors(2, 3).size() == 4);
  const auto one = hecke_neighbors(2, 1);
  REQUIRE(one.size() == 1);
  CHECK(is_identity(one[0]));
  for (std::int64_t p : {2, 3, 5, 7, 11, 13}) CHECK(hecke_neighbors(2, p).size() == std::size_t(p + 1));
  for (int m = 1; m <= 20; ++m) CHECK(hecke_neighbors(2, m).size() == std::size_t(oracle::divisor_sum(m)));
  for (int m = 1; m <= 12; ++m) CHECK(hecke_neighbors(2, m).size() == oracle::subgroup_count(m));
  // d = 3, prime index: p^2 + p + 1.
  CHECK(hecke_neighbors(3, 2).size() == 7);
  CHECK(hecke_neighbors(3, 3).size() == 13);
}

TEST_CASE("typed hecke neighbors partition T_m") {
  CHECK(hecke_neighbors_typed(2, {1, 4}).size() == 6);
  CHECK(hecke_neighbors_typed(2, {2, 2}).size() == 1);
  CHECK(hecke_neighbors_typed(2, {1, 4}).size() + hecke_neighbors_typed(2, {2, 2}).size() ==
        hecke_neighbors(2, 4).size());
  for (const auto& h : hecke_neighbors(2, 12)) {
    const auto e = elementary_divisors(h);
    CHECK(e[0] * e[1] == 12);
    CHECK(e[1] % e[0] == 0);
  }
}

TEST_CASE("normalized neighbor lattices are distinct for random bases") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 10; ++trial) {
    RealMatrix m(2, 2);
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = u(rng);
    const LatticeBasis base = LatticeBasis::from_matrix(m);
    for (std::int64_t idx : {2, 4, 6}) {
      std::vector<RealMatrix> distinct;
      for (const auto& h : hecke_neighbors(2, idx)) {
        const LatticeBasis nb = apply_hecke(base, h);
        CHECK(std::fabs(nb.covolume - base.covolume) < 1e-9L * base.covolume);
        bool dup = false;
        for (const auto& other : distinct) dup |= oracle::same_lattice(other, nb.matrix.entries);
        if (!dup) distinct.push_back(nb.matrix.entries);
      }
      CHECK(distinct.size() == std::size_t(oracle::divisor_sum(idx)));
    }
  }
}

TEST_CASE("reduction and flow keep the lattice") {
  const LatticeBasis y = conjugation_basis(tuple_of({-1, -3, 0, 1}));
  for (Real t : {0.0L, 1.5L, 7.0L, 20.0L}) {
    const LatticeBasis f = flow(y, t);
    const LatticeBasis r = reduced(f);
    CHECK(std::fabs(r.covolume - 1) < 1e-9L);
    if (t <= 7) {
      const RealMatrix direct = diag_flow(t, 3).entries * y.matrix.entries;
      CHECK(oracle::same_lattice(direct, r.matrix.entries, 1e-6L));
    }
  }
}

TEST_CASE("csv output") {
  std::ostringstream s;
  write_lattice_csv(s, LatticeBasis::from_matrix(mat(2, {0.5L, 0, 0, 2})));
  CHECK(s.str() == "# covolume=1\n0.5,0\n0,2\n");
}
