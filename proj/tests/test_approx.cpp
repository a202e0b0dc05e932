#include <doctest.h>

#include "dirapprox/approx.hpp"
#include "dirapprox/latgeo.hpp"
#include "oracles.hpp"

using namespace dirapprox;

namespace {

const std::vector<long> kPhi{-1, -1, 1};
const std::vector<long> kCubic{-1, -3, 0, 1};

AlgebraicTuple tuple_of(const std::vector<long>& c) {
  return power_tuple(make_field(std::vector<mpz_class>(c.begin(), c.end())));
}

ApproxRecord synthetic(long q, Real lo, Real hi) {
  ApproxRecord r;
  r.q = q;
  r.p = {0};
  r.disp = {0.1L};
  r.delta = 0.1L;
  r.tLo = lo;
  r.tHi = hi;
  r.theta = {1};
  return r;
}

ScanOptions with(ScanStrategy s, int threads = 1) {
  ScanOptions o;
  o.strategy = s;
  o.threads = threads;
  return o;
}

}  // namespace

TEST_CASE("scan examples") {
  const AlgebraicTuple phi = tuple_of(kPhi);
  for (ScanStrategy s : {ScanStrategy::Linear, ScanStrategy::Lattice}) {
    const auto recs = scan_records(phi, 1, 0.5L, 2, with(s));
    REQUIRE(recs.size() == 4);
    const long qs[] = {1, 2, 3, 5};
    const long ps[] = {2, 3, 5, 8};
    for (int i = 0; i < 4; ++i) {
      CHECK(recs[i].q == qs[i]);
      CHECK(recs[i].p[0] == ps[i]);
    }
    CHECK(scan_records(phi, 1, 0.3L, 5, with(s)).empty());
    const auto one = scan_records(phi, 1, 0.5L, 0.2L, with(s));
    REQUIRE(one.size() == 1);
    CHECK(one[0].p[0] == 2);
    CHECK(one[0].tLo == 0);
    CHECK(static_cast<double>(one[0].tHi) == doctest::Approx(0.26931).epsilon(1e-4));
  }
  // q = 4 is left out: 4 * |4 phi - 6| is well above 1/2.
  const ApproxRecord four = make_record(phi, 4, 1, 0.5L);
  CHECK(static_cast<double>(4 * four.delta) == doctest::Approx(1.8885).epsilon(1e-4));
  CHECK(four.tLo > four.tHi);
}

TEST_CASE("record invariants") {
  const AlgebraicTuple cubic = tuple_of(kCubic);
  for (const auto& r : scan_records(cubic, 3, 0.45L, 4)) {
    CHECK(r.primitive());
    CHECK(r.delta <= 0.5L);
    CHECK(std::fabs(std::hypot(r.theta[0], r.theta[1]) - 1) < 1e-12L);
    const bool good = std::sqrt(static_cast<Real>(r.q.get_d())) * r.delta < 0.45L;
    CHECK((r.tLo < r.tHi) == good);
  }
}

TEST_CASE("epsilon range") {
  const AlgebraicTuple phi = tuple_of(kPhi);
  try {
    scan_records(phi, 1, 0.51L, 1);
    FAIL("expected EpsilonTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EpsilonTooLarge);
  }
  CHECK_THROWS_AS(scan_records(phi, 1, 0, 1), Error);
  MeasureOptions opts;
  opts.floor = littlewood_floor(2, 2, 1);
  CHECK(static_cast<double>(opts.floor) == doctest::Approx(0.25));
  try {
    direction_measure(phi, 2, 2, 0.2L, 1, opts);
    FAIL("expected EpsilonBelowFloor");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EpsilonBelowFloor);
  }
}

TEST_CASE("scan equals brute force and both strategies agree") {
  struct Case {
    std::vector<long> poly;
    std::uint64_t ell;
    double eps;
    double T;
  };
  const Case cases[] = {{kPhi, 1, 0.5, 6},  {kPhi, 3, 0.45, 5},  {kPhi, 8, 0.4, 6},
                        {kCubic, 1, 0.4, 4}, {kCubic, 2, 0.49, 4}, {kCubic, 4, 0.3, 4}};
  for (const auto& c : cases) {
    const AlgebraicTuple t = tuple_of(c.poly);
    const auto alpha = oracle::powers_of_largest_root(c.poly, t.n);
    const auto brute = oracle::brute_scan(alpha, c.ell, c.eps, c.T);
    const auto linear = scan_records(t, c.ell, c.eps, c.T, with(ScanStrategy::Linear, 3));
    const auto lattice = scan_records(t, c.ell, c.eps, c.T, with(ScanStrategy::Lattice, 2));
    REQUIRE(linear.size() == brute.size());
    REQUIRE(lattice.size() == brute.size());
    for (std::size_t i = 0; i < brute.size(); ++i) {
      CHECK(linear[i].q == static_cast<unsigned long>(brute[i].q));
      CHECK(lattice[i].q == linear[i].q);
      CHECK(linear[i].p == brute[i].p);
      CHECK(lattice[i].p == brute[i].p);
      CHECK(static_cast<double>(linear[i].tHi) == doctest::Approx(brute[i].tHi).epsilon(1e-12));
    }
  }
}

TEST_CASE("scan does not depend on the thread count") {
  const AlgebraicTuple cubic = tuple_of(kCubic);
  for (ScanStrategy s : {ScanStrategy::Linear, ScanStrategy::Lattice}) {
    const auto one = scan_records(cubic, 2, 0.45L, 5, with(s, 1));
    for (int threads : {2, 3, 8}) {
      const auto many = scan_records(cubic, 2, 0.45L, 5, with(s, threads));
      REQUIRE(many.size() == one.size());
      for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(many[i].q == one[i].q);
        CHECK(many[i].disp == one[i].disp);
        CHECK(many[i].tHi == one[i].tHi);
      }
    }
  }
}

TEST_CASE("denominator limit excludes the boundary") {
  CHECK(denominator_limit(1, std::log(10.0L)) == 9);
  CHECK(denominator_limit(2, std::log(10.0L) / 2) == 9);
  CHECK(denominator_limit(1, std::log(10.5L)) == 10);
}

TEST_CASE("weights: golden ratio closed form") {
  const AlgebraicTuple phi = tuple_of(kPhi);
  const auto list = sweep_weights(scan_records(phi, 1, 0.5L, 1), 1, 0.5L);
  REQUIRE(list.weights.size() == 2);
  CHECK(static_cast<double>(list.weights[0]) == doctest::Approx(0.26931).epsilon(2e-4));
  CHECK(std::fabs(list.weights[0] - std::log(0.5L / (2 - 1.6180339887498949L))) < 1e-15L);
  CHECK(static_cast<double>(list.weights[1]) == doctest::Approx(0.05734).epsilon(1e-3));
  CHECK(static_cast<double>(list.records[1].tLo) == doctest::Approx(0.69315).epsilon(1e-5));
  CHECK(static_cast<double>(list.records[1].tHi) == doctest::Approx(0.75049).epsilon(1e-5));
  CHECK(static_cast<double>(list.total_weight()) == doctest::Approx(0.32665).epsilon(1e-4));
  CHECK(static_cast<double>(list.emptyFraction) == doctest::Approx(0.67335).epsilon(1e-4));
}

TEST_CASE("weights: synthetic overlaps") {
  const auto list = sweep_weights({synthetic(1, 0, 1), synthetic(2, 0.5L, 1)}, 1, 0.5L);
  const auto quad = oracle::quadrature_weights({{0, 1}, {0.5, 1}}, 1);
  CHECK(static_cast<double>(list.weights[0]) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(static_cast<double>(list.weights[1]) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(quad[0] == doctest::Approx(0.75).epsilon(1e-4));
  CHECK(quad[1] == doctest::Approx(0.25).epsilon(1e-4));
  const auto empty = sweep_weights({}, 3, 0.5L);
  CHECK(empty.total_weight() == 0);
  CHECK(empty.emptyFraction == 1);
}

TEST_CASE("weights: mass identity, bound and quadrature") {
  struct Case {
    std::vector<long> poly;
    std::uint64_t ell;
    Real eps;
    Real T;
  };
  const Case cases[] = {{kPhi, 1, 0.45L, 8}, {kPhi, 4, 0.5L, 6}, {kCubic, 1, 0.4L, 5}, {kCubic, 2, 0.49L, 5}};
  for (const auto& c : cases) {
    const AlgebraicTuple t = tuple_of(c.poly);
    const auto list = sweep_weights(scan_records(t, c.ell, c.eps, c.T), c.T, c.eps);
    CHECK(std::fabs(list.total_weight() + list.emptyFraction - 1) < 1e-12L);
    std::vector<std::pair<double, double>> intervals;
    for (std::size_t i = 0; i < list.records.size(); ++i) {
      const auto& r = list.records[i];
      CHECK(list.weights[i] >= 0);
      CHECK(list.weights[i] <= (std::min(r.tHi, c.T) - r.tLo) / c.T + 1e-15L);
      intervals.emplace_back(static_cast<double>(r.tLo), static_cast<double>(r.tHi));
    }
    const double covered = oracle::covered_fraction(intervals, static_cast<double>(c.T));
    CHECK(static_cast<double>(list.total_weight()) == doctest::Approx(covered).epsilon(1e-3));
    const auto quad = oracle::quadrature_weights(intervals, static_cast<double>(c.T), 200000);
    for (std::size_t i = 0; i < quad.size(); ++i) {
      CHECK(std::fabs(static_cast<double>(list.weights[i]) - quad[i]) < 1e-4);
    }
  }
}

TEST_CASE("direction measure") {
  const AlgebraicTuple phi = tuple_of(kPhi);
  const DirectionMeasure mu = direction_measure(phi, 2, 0, 0.5L, 1);
  REQUIRE(mu.atoms().size() == 2);
  CHECK(static_cast<double>(mu.total_mass()) == doctest::Approx(0.32665).epsilon(1e-4));
  CHECK(static_cast<double>(mu.positive_mass()) == doctest::Approx(0.05734).epsilon(1e-3));
  CHECK(static_cast<double>(mu.total_mass() - mu.positive_mass()) == doctest::Approx(0.26931).epsilon(2e-4));
  const DirectionMeasure longer = direction_measure(phi, 2, 0, 0.5L, 10);
  CHECK(longer.positive_mass() > 0);
  CHECK(longer.total_mass() - longer.positive_mass() > 0);
  CHECK(direction_measure(phi, 2, 0, 0.3L, 2).empty());
  const auto list = sweep_weights(scan_records(phi, 1, 0.5L, 10), 10, 0.5L);
  CHECK(std::fabs(longer.total_mass() - (1 - list.emptyFraction)) < 1e-12L);
}

TEST_CASE("littlewood values and records") {
  const AlgebraicTuple phi = tuple_of(kPhi);
  const auto recs = record_minima(phi, 2, 200);
  const std::vector<std::pair<std::uint64_t, double>> expected = {
      {1, 0.381966}, {2, 0.236068}, {8, 0.055728}, {144, 0.027950}};
  REQUIRE(recs.size() == expected.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(recs[i].k == expected[i].first);
    CHECK(std::fabs(static_cast<double>(recs[i].value) - expected[i].second) < 1e-5);
  }
  CHECK(record_minima(phi, 3, 10).front().k == 1);
  CHECK(static_cast<double>(record_minima(phi, 3, 10).front().value) == doctest::Approx(0.381966).epsilon(1e-5));
  const AlgebraicTuple cubic = tuple_of(kCubic);
  const auto cubicRecs = record_minima(cubic, 2, 20000, 3);
  for (std::size_t i = 1; i < cubicRecs.size(); ++i) {
    CHECK(cubicRecs[i].value < cubicRecs[i - 1].value);
    CHECK(cubicRecs[i].k > cubicRecs[i - 1].k);
  }
  // Brute force against the oracle for the first 300 k.
  const auto alpha = oracle::powers_of_largest_root(kCubic, 2);
  double running = 1e300;
  std::vector<std::uint64_t> bruteKs;
  for (std::uint64_t k = 1; k <= 300; ++k) {
    const auto r = oracle::nearest(alpha, mpz_class(static_cast<unsigned long>(k)));
    std::uint64_t v = 1;
    while ((k / v) % 2 == 0) v *= 2;
    const double value = std::sqrt(static_cast<double>(k / v)) * r.delta;
    CHECK(static_cast<double>(littlewood_value(cubic, 2, k)) == doctest::Approx(value).epsilon(1e-12));
    if (value < running) {
      running = value;
      bruteKs.push_back(k);
    }
  }
  std::vector<std::uint64_t> ours;
  for (const auto& r : record_minima(cubic, 2, 300)) ours.push_back(r.k);
  CHECK(ours == bruteKs);
  CHECK(record_minima(cubic, 2, 20000, 1).size() == cubicRecs.size());
}

TEST_CASE("scaled minima") {
  const AlgebraicTuple phi = tuple_of(kPhi);
  const struct {
    long ell;
    std::uint64_t k;
    double value;
  } cases[] = {{1, 1, 0.381966}, {2, 4, 0.222912}, {4, 2, 0.111456}};
  for (const auto& c : cases) {
    const MinimumRecord m = scaled_minima(phi, c.ell, 100, 2);
    CHECK(m.k == c.k);
    CHECK(std::fabs(static_cast<double>(m.value) - c.value) < 1e-6);
  }
  const AlgebraicTuple cubic = tuple_of(kCubic);
  const MinimumRecord m = scaled_minima(cubic, 1, 10000);
  CHECK(m.value > 0);
  CHECK(m.value < 1);
  CHECK(scaled_minima(cubic, 8, 5000, 1).k == scaled_minima(cubic, 8, 5000, 4).k);
}

TEST_CASE("dani correspondence on small grids") {
  for (const auto& poly : {kPhi, kCubic}) {
    const AlgebraicTuple t = tuple_of(poly);
    const auto alpha = oracle::powers_of_largest_root(poly, t.n);
    for (Real eps : {0.45L, 0.49L}) {
      for (std::uint64_t M : {10, 100, 1000}) {
        bool brute = false;
        for (std::uint64_t m = 1; m <= M && !brute; ++m) {
          const auto r = oracle::nearest(alpha, mpz_class(static_cast<unsigned long>(m)));
          brute = std::pow(static_cast<double>(m), 1.0 / t.n) * r.delta < static_cast<double>(eps);
        }
        const Real T = std::log(static_cast<Real>(M) + 0.5L) / t.n;
        const auto recs = scan_records(t, 1, eps, T);
        bool viaRecords = false;
        for (const auto& r : recs) {
          if (!(r.tLo < r.tHi)) continue;
          viaRecords = true;
          const Real mid = (r.tLo + r.tHi) / 2;
          RealVector v(t.dim());
          for (int i = 0; i < t.n; ++i) v(i) = -static_cast<Real>(r.p[i].get_d());
          v(t.n) = static_cast<Real>(r.q.get_d());
          const RealVector w = diag_flow(mid, t.dim()).entries * unipotent(t.alphas()).entries * v;
          CHECK(in_cone(w, eps));
        }
        CHECK(brute == viaRecords);
      }
    }
  }
}
