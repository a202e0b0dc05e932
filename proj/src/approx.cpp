#include "dirapprox/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "dirapprox/latgeo.hpp"
#include "parallel.hpp"

namespace dirapprox {

namespace {

mpz_class floor_to_mpz(Real x) {
  int e = 0;
  const Real f = std::frexp(x, &e);
  if (e <= 64) return mpz_class(static_cast<unsigned long>(std::floor(x)));
  mpz_class m(static_cast<unsigned long>(std::ldexp(f, 64)));
  m <<= static_cast<mp_bitcnt_t>(e - 64);
  return m;
}

Real log_of(const mpz_class& q) { return std::log(to_real(q, 0)); }

void check_eps(Real eps) {
  if (!(eps > 0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (eps > 0.5L) {
    throw Error(ErrorCode::EpsilonTooLarge, "epsilon > 1/2 makes the nearest vector ambiguous");
  }
}

std::vector<ApproxRecord> scan_linear(const AlgebraicTuple& tuple, const mpz_class& ell, Real eps,
                                      Real T, std::uint64_t qMax, int threads) {
  const int n = tuple.n;
  auto chunks = detail::run_chunks<std::vector<ApproxRecord>>(
      1, qMax + 1, threads, [&](std::uint64_t lo, std::uint64_t hi) {
        std::vector<ApproxRecord> out;
        const Real epsN = std::pow(eps, static_cast<Real>(n));
        mpz_class q;
        for (std::uint64_t k = lo; k < hi; ++k) {
          q = static_cast<unsigned long>(k);
          const NearestVector nv = frac_nearest(tuple, mpz_class(q * ell));
          // q * delta^n < eps^n is the membership test; the record is rebuilt exactly below.
          if (static_cast<Real>(k) * std::pow(nv.delta, static_cast<Real>(n)) >= epsN * 1.0001L) continue;
          ApproxRecord rec = make_record(tuple, q, ell, eps);
          if (rec.active_before(T) && rec.primitive()) out.push_back(std::move(rec));
        }
        return out;
      });
  std::vector<ApproxRecord> out;
  for (auto& c : chunks) {
    for (auto& r : c) out.push_back(std::move(r));
  }
  return out;
}

std::vector<ApproxRecord> scan_lattice(const AlgebraicTuple& tuple, const mpz_class& ell, Real eps,
                                       Real T, Real window) {
  // Every record is in the box |x_i| < eps, |x_d| <= e^(n h) of a(t0) u(ell alpha) Z^d
  // for the window start t0 = h floor(s / h) of any s in its interval.
  const int n = tuple.n;
  const int d = n + 1;
  const ExactFrame frame = unipotent_frame(tuple, ell);
  RealVector widths = RealVector::Constant(d, eps);
  widths(d - 1) = std::exp(n * window) * (1 + 1e-9L);
  std::set<mpz_class> candidates;
  BigIntMatrix g = big_identity(d);
  std::vector<Real> rowLog(d);
  const int windows = static_cast<int>(std::ceil(T / window));
  for (int w = 0; w < windows; ++w) {
    const Real t0 = w * window;
    for (int i = 0; i < n; ++i) rowLog[i] = t0;
    rowLog[d - 1] = -n * t0;
    const ReducedFrame red = reduce_frame(frame, rowLog, g);
    g = red.g;
    for (const auto& pt : enumerate_box(red.basis, widths)) {
      mpz_class q = 0;
      for (int k = 0; k < d; ++k) q += g[d - 1][k] * mpz_class(static_cast<long>(pt.coeffs(k)));
      if (q == 0) continue;
      candidates.insert(q < 0 ? mpz_class(-q) : q);
    }
  }
  std::vector<ApproxRecord> out;
  for (const auto& q : candidates) {
    ApproxRecord rec = make_record(tuple, q, ell, eps);
    if (rec.active_before(T) && rec.primitive()) out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace

bool ApproxRecord::primitive() const {
  mpz_class g = q;
  for (const auto& x : p) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  return g == 1;
}

ApproxRecord make_record(const AlgebraicTuple& tuple, const mpz_class& q, const mpz_class& ell,
                         Real eps) {
  NearestVector nv = frac_nearest(tuple, mpz_class(q * ell));
  ApproxRecord rec;
  rec.q = q;
  rec.p = std::move(nv.p);
  rec.disp = std::move(nv.disp);
  rec.delta = nv.delta;
  rec.tLo = log_of(q) / tuple.n;
  rec.tHi = rec.delta > 0 ? std::log(eps / rec.delta) : std::numeric_limits<Real>::infinity();
  Real norm = 0;
  for (Real x : rec.disp) norm += x * x;
  norm = std::sqrt(norm);
  for (Real x : rec.disp) rec.theta.push_back(x / norm);
  return rec;
}

mpz_class denominator_limit(int n, Real T) {
  const Real x = std::exp(n * T);
  mpz_class f = floor_to_mpz(x);
  if (static_cast<Real>(std::floor(x)) == x) f -= 1;
  return f;
}

std::vector<ApproxRecord> scan_records(const AlgebraicTuple& tuple, const mpz_class& ell, Real eps,
                                       Real T, const ScanOptions& options) {
  check_eps(eps);
  if (!(T > 0)) throw Error(ErrorCode::InvalidArgument, "T must be positive");
  if (ell < 1) throw Error(ErrorCode::InvalidArgument, "ell must be >= 1");
  const mpz_class qMax = denominator_limit(tuple.n, T);
  if (qMax * ell > max_certified_multiplier(tuple)) {
    throw Error(ErrorCode::PrecisionExhausted,
                "q * ell up to " + mpz_class(qMax * ell).get_str() + " exceeds the certified range");
  }
  ScanStrategy strategy = options.strategy;
  if (strategy == ScanStrategy::Auto) {
    strategy = qMax <= mpz_class(static_cast<unsigned long>(options.linearLimit)) ? ScanStrategy::Linear
                                                                                  : ScanStrategy::Lattice;
  }
  if (strategy == ScanStrategy::Linear) {
    if (qMax > mpz_class(1UL << 40)) {
      throw Error(ErrorCode::InvalidArgument, "linear scan over " + qMax.get_str() + " denominators");
    }
    return scan_linear(tuple, ell, eps, T, qMax.get_ui(), options.threads);
  }
  return scan_lattice(tuple, ell, eps, T, options.window);
}

Real WeightedApproxList::total_weight() const {
  Real s = 0;
  for (Real w : weights) s += w;
  return s;
}

WeightedApproxList sweep_weights(std::vector<ApproxRecord> records, Real T, Real eps) {
  if (!(T > 0)) throw Error(ErrorCode::InvalidArgument, "T must be positive");
  WeightedApproxList out;
  out.T = T;
  out.eps = eps;
  out.weights.assign(records.size(), 0);

  struct Event {
    Real at;
    int delta;
    std::size_t index;
  };
  std::vector<Event> events;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Real lo = std::max(records[i].tLo, Real(0));
    const Real hi = std::min(records[i].tHi, T);
    if (hi <= lo) continue;
    events.push_back({lo, +1, i});
    events.push_back({hi, -1, i});
  }
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.at != b.at) return a.at < b.at;
    return a.delta < b.delta;
  });
  std::set<std::size_t> active;
  Real covered = 0;
  Real x = 0;
  for (const auto& e : events) {
    if (e.at > x && !active.empty()) {
      const Real share = (e.at - x) / (T * static_cast<Real>(active.size()));
      for (auto i : active) out.weights[i] += share;
      covered += e.at - x;
    }
    x = std::max(x, e.at);
    if (e.delta > 0) {
      active.insert(e.index);
    } else {
      active.erase(e.index);
    }
  }
  out.emptyFraction = 1 - covered / T;
  out.records = std::move(records);
  return out;
}

DirectionMeasure measure_from_weights(const WeightedApproxList& list, int n) {
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < list.records.size(); ++i) {
    if (list.weights[i] > 0) atoms.push_back({list.records[i].theta, list.weights[i]});
  }
  return DirectionMeasure::from_atoms(n, std::move(atoms));
}

Real littlewood_floor(std::uint64_t p, unsigned k, int n) {
  return std::pow(static_cast<Real>(p), -static_cast<Real>(k) / n);
}

DirectionMeasure direction_measure(const AlgebraicTuple& tuple, std::uint64_t p, unsigned k, Real eps,
                                   Real T, const MeasureOptions& options) {
  if (!is_prime(p)) throw Error(ErrorCode::NotPrime, std::to_string(p) + " is not prime");
  check_eps(eps);
  if (eps <= options.floor) {
    throw Error(ErrorCode::EpsilonBelowFloor,
                "epsilon must exceed the floor " + std::to_string(static_cast<double>(options.floor)));
  }
  mpz_class ell;
  mpz_ui_pow_ui(ell.get_mpz_t(), p, k);
  auto records = scan_records(tuple, ell, eps, T, options.scan);
  return measure_from_weights(sweep_weights(std::move(records), T, eps), tuple.n);
}

Real littlewood_value(const AlgebraicTuple& tuple, std::uint64_t p, std::uint64_t k) {
  const mpz_class kk(static_cast<unsigned long>(k));
  const NearestVector nv = frac_nearest(tuple, kk);
  std::uint64_t m = k;
  while (m % p == 0) m /= p;
  return std::pow(static_cast<Real>(m), Real(1) / tuple.n) * nv.delta;
}

std::vector<MinimumRecord> record_minima(const AlgebraicTuple& tuple, std::uint64_t p,
                                         std::uint64_t K, int threads) {
  if (!is_prime(p)) throw Error(ErrorCode::NotPrime, std::to_string(p) + " is not prime");
  if (K < 1) throw Error(ErrorCode::InvalidArgument, "K must be >= 1");
  if (mpz_class(static_cast<unsigned long>(K)) > max_certified_multiplier(tuple)) {
    throw Error(ErrorCode::PrecisionExhausted, "K exceeds the certified range");
  }
  // A global running minimum is also a running minimum of its own chunk.
  auto chunks = detail::run_chunks<std::vector<MinimumRecord>>(
      1, K + 1, threads, [&](std::uint64_t lo, std::uint64_t hi) {
        std::vector<MinimumRecord> local;
        for (std::uint64_t k = lo; k < hi; ++k) {
          const Real v = littlewood_value(tuple, p, k);
          if (local.empty() || v < local.back().value) local.push_back({k, v});
        }
        return local;
      });
  std::vector<MinimumRecord> out;
  for (const auto& c : chunks) {
    for (const auto& r : c) {
      if (out.empty() || r.value < out.back().value) out.push_back(r);
    }
  }
  return out;
}

MinimumRecord scaled_minima(const AlgebraicTuple& tuple, const mpz_class& ell, std::uint64_t K,
                            int threads) {
  if (K < 1) throw Error(ErrorCode::InvalidArgument, "K must be >= 1");
  if (ell < 1) throw Error(ErrorCode::InvalidArgument, "ell must be >= 1");
  if (mpz_class(static_cast<unsigned long>(K)) * ell > max_certified_multiplier(tuple)) {
    throw Error(ErrorCode::PrecisionExhausted, "K * ell exceeds the certified range");
  }
  const Real inv = Real(1) / tuple.n;
  auto chunks = detail::run_chunks<MinimumRecord>(1, K + 1, threads, [&](std::uint64_t lo, std::uint64_t hi) {
    MinimumRecord best{0, std::numeric_limits<Real>::infinity()};
    for (std::uint64_t k = lo; k < hi; ++k) {
      const mpz_class m = mpz_class(static_cast<unsigned long>(k)) * ell;
      const Real v = std::pow(static_cast<Real>(k), inv) * frac_nearest(tuple, m).delta;
      if (v < best.value) best = {k, v};
    }
    return best;
  });
  MinimumRecord best = chunks.front();
  for (const auto& c : chunks) {
    if (c.value < best.value) best = c;
  }
  return best;
}

}  // namespace dirapprox
