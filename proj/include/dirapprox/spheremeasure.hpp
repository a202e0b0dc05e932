#pragma once

#include <vector>

#include "dirapprox/numberfield.hpp"

namespace dirapprox {

struct Atom {
  std::vector<Real> direction;
  Real weight = 0;
};

/// Finite atomic measure on S^(n-1) with total mass at most 1.
class DirectionMeasure {
 public:
  DirectionMeasure() = default;
  explicit DirectionMeasure(int n) : n_(n) {}

  /// Validates and merges atoms closer than 1e-9 (in angle for n <= 2).
  static DirectionMeasure from_atoms(int n, std::vector<Atom> atoms);

  int dim() const { return n_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  Real total_mass() const { return total_; }
  bool empty() const { return atoms_.empty(); }
  /// Mass of the atom at +1 (n = 1 only).
  Real positive_mass() const;

 private:
  int n_ = 0;
  std::vector<Atom> atoms_;
  Real total_ = 0;
};

/// Angle in [0, 2 pi) of a planar direction.
Real angle_of(const std::vector<Real>& direction);

DirectionMeasure normalize(const DirectionMeasure& mu);

/// Total variation on S^0, Wasserstein-1 (arc length) on S^1. Both inputs must be
/// probability measures.
Real distance(const DirectionMeasure& a, const DirectionMeasure& b);

/// Upper bound for Wasserstein-1 by greedy nearest-pair matching, any n.
Real greedy_transport_distance(const DirectionMeasure& a, const DirectionMeasure& b);

/// min over arcs (s, s + width] of the mass they carry (n = 2).
Real min_arc_mass(const DirectionMeasure& mu, Real width);

}  // namespace dirapprox
