#pragma once

#include <cstdint>
#include <vector>

#include "dirapprox/numberfield.hpp"
#include "dirapprox/spheremeasure.hpp"

namespace dirapprox {

/// One approximation (p, q) of the target ell * alpha.
struct ApproxRecord {
  mpz_class q;
  std::vector<mpz_class> p;
  std::vector<Real> disp;
  Real delta = 0;
  Real tLo = 0;
  Real tHi = 0;
  std::vector<Real> theta;

  bool primitive() const;
  /// Member of Q_t for some t in (0, T).
  bool active_before(Real T) const { return tLo < std::min(T, tHi); }
};

/// Nearest-vector record for denominator q of the target ell * alpha.
ApproxRecord make_record(const AlgebraicTuple& tuple, const mpz_class& q, const mpz_class& ell,
                         Real eps);

enum class ScanStrategy { Auto, Linear, Lattice };

struct ScanOptions {
  ScanStrategy strategy = ScanStrategy::Auto;
  int threads = 1;
  /// Flow window of the lattice strategy.
  Real window = 0.5L;
  /// Auto switches to the lattice strategy above this many denominators.
  std::uint64_t linearLimit = std::uint64_t(1) << 22;
};

/// Largest q with q < e^(nT).
mpz_class denominator_limit(int n, Real T);

/// Primitive records with tLo < min(T, tHi), ascending in q.
std::vector<ApproxRecord> scan_records(const AlgebraicTuple& tuple, const mpz_class& ell, Real eps,
                                       Real T, const ScanOptions& options = {});

struct WeightedApproxList {
  std::vector<ApproxRecord> records;
  Real T = 0;
  Real eps = 0;
  std::vector<Real> weights;
  Real emptyFraction = 1;

  Real total_weight() const;
};

WeightedApproxList sweep_weights(std::vector<ApproxRecord> records, Real T, Real eps);

DirectionMeasure measure_from_weights(const WeightedApproxList& list, int n);

/// p^(-k/n).
Real littlewood_floor(std::uint64_t p, unsigned k, int n);

struct MeasureOptions {
  /// eps must exceed this; littlewood_floor gives the theoretical choice.
  Real floor = 0;
  ScanOptions scan;
};

DirectionMeasure direction_measure(const AlgebraicTuple& tuple, std::uint64_t p, unsigned k, Real eps,
                                   Real T, const MeasureOptions& options = {});

/// (k |k|_p)^(1/n) * ||<k alpha>||_inf
Real littlewood_value(const AlgebraicTuple& tuple, std::uint64_t p, std::uint64_t k);

struct MinimumRecord {
  std::uint64_t k = 0;
  Real value = 0;
};

/// Running minima of littlewood_value over k = 1..K.
std::vector<MinimumRecord> record_minima(const AlgebraicTuple& tuple, std::uint64_t p,
                                         std::uint64_t K, int threads = 1);

/// min over k <= K of k^(1/n) * ||<k ell alpha>||_inf and the first k attaining it.
MinimumRecord scaled_minima(const AlgebraicTuple& tuple, const mpz_class& ell, std::uint64_t K,
                            int threads = 1);

}  // namespace dirapprox
