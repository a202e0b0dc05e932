#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "dirapprox/latgeo.hpp"
#include "dirapprox/spheremeasure.hpp"

namespace dirapprox {

/// Points exp(diag(v_1, ..., v_n, -sum v)) * base with v uniform in [-L, L]^n.
struct OrbitSampleSet {
  LatticeBasis base;
  Real L = 0;
  std::size_t N = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<Real>> logs;
  /// Each sample is stored with an LLL-reduced basis.
  std::vector<LatticeBasis> samples;
};

/// Uniform draws in [0, 1) keyed by (seed, index, coordinate).
Real counter_uniform(std::uint64_t seed, std::uint64_t index, std::uint64_t coordinate);

OrbitSampleSet sample_orbit(const LatticeBasis& base, Real L, std::size_t N, std::uint64_t seed,
                            int threads = 1);

/// Symmetric: every cone point (v and -v) counts. Oriented: one of each pair, the one
/// with v_d > 0, which matches the sign convention of approximation displacements.
enum class Orientation { Symmetric, Oriented };

/// Uniform probability measure on pi(v)/|pi(v)|_2 over the cone points, or zero.
DirectionMeasure theta_eps(const LatticeBasis& lattice, Real eps,
                           Orientation orientation = Orientation::Symmetric);

/// (1/N) sum_i theta_eps(U * sample_i).
DirectionMeasure pushforward_minvec(const OrbitSampleSet& samples, Real eps,
                                    const std::optional<SquareMatrix>& U = std::nullopt,
                                    int threads = 1,
                                    Orientation orientation = Orientation::Symmetric);

/// Number of samples whose (U-translated) lattice meets the cone.
std::size_t cone_hits(const OrbitSampleSet& samples, Real eps,
                      const std::optional<SquareMatrix>& U = std::nullopt, int threads = 1);

/// Fraction of samples with a nonzero-projection lattice point within tol of the
/// cone boundary (|pi(v)|_inf = eps or |v_d| = 1).
Real boundary_fraction(const OrbitSampleSet& samples, Real eps,
                       const std::optional<SquareMatrix>& U = std::nullopt, Real tol = 1e-6L,
                       int threads = 1);

}  // namespace dirapprox
