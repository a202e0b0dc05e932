#include "dirapprox/spheremeasure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace dirapprox {

namespace {

constexpr Real kTwoPi = 2 * std::numbers::pi_v<Real>;
constexpr Real kMergeTol = 1e-9L;

Real norm2(const std::vector<Real>& v) {
  Real s = 0;
  for (Real x : v) s += x * x;
  return std::sqrt(s);
}

Real chord(const std::vector<Real>& a, const std::vector<Real>& b) {
  Real s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

Real geodesic(const std::vector<Real>& a, const std::vector<Real>& b) {
  Real dot = 0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return std::acos(std::clamp(dot, Real(-1), Real(1)));
}

void require_probability(const DirectionMeasure& mu) {
  if (std::fabs(mu.total_mass() - 1) > 1e-9L) {
    throw Error(ErrorCode::InvalidArgument, "distance needs probability measures (normalize first)");
  }
}

}  // namespace

Real angle_of(const std::vector<Real>& direction) {
  Real a = std::atan2(direction[1], direction[0]);
  if (a < 0) a += kTwoPi;
  if (a >= kTwoPi) a -= kTwoPi;
  return a;
}

DirectionMeasure DirectionMeasure::from_atoms(int n, std::vector<Atom> atoms) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "sphere dimension must be >= 1");
  DirectionMeasure out(n);
  for (const auto& a : atoms) {
    if (static_cast<int>(a.direction.size()) != n) {
      throw Error(ErrorCode::DimensionMismatch, "atom has the wrong dimension");
    }
    if (!(a.weight >= 0)) throw Error(ErrorCode::InvalidArgument, "negative atom weight");
    if (std::fabs(norm2(a.direction) - 1) > 1e-9L) {
      throw Error(ErrorCode::InvalidArgument, "atom direction is not a unit vector");
    }
  }
  std::erase_if(atoms, [](const Atom& a) { return a.weight == 0; });

  if (n == 1) {
    Real neg = 0, pos = 0;
    for (const auto& a : atoms) (a.direction[0] < 0 ? neg : pos) += a.weight;
    if (neg > 0) out.atoms_.push_back({{-1}, neg});
    if (pos > 0) out.atoms_.push_back({{1}, pos});
  } else if (n == 2) {
    std::vector<std::pair<Real, std::size_t>> order;
    for (std::size_t i = 0; i < atoms.size(); ++i) order.emplace_back(angle_of(atoms[i].direction), i);
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<Real> angles;
    for (const auto& [angle, idx] : order) {
      if (!angles.empty() && angle - angles.back() < kMergeTol) {
        out.atoms_.back().weight += atoms[idx].weight;
        continue;
      }
      angles.push_back(angle);
      out.atoms_.push_back(atoms[idx]);
    }
    if (out.atoms_.size() > 1 && angles.front() + kTwoPi - angles.back() < kMergeTol) {
      out.atoms_.front().weight += out.atoms_.back().weight;
      out.atoms_.pop_back();
    }
  } else {
    std::stable_sort(atoms.begin(), atoms.end(),
                     [](const Atom& x, const Atom& y) { return x.direction < y.direction; });
    for (auto& a : atoms) {
      auto same = std::find_if(out.atoms_.begin(), out.atoms_.end(), [&](const Atom& b) {
        return chord(a.direction, b.direction) < kMergeTol;
      });
      if (same != out.atoms_.end()) {
        same->weight += a.weight;
      } else {
        out.atoms_.push_back(std::move(a));
      }
    }
  }
  for (const auto& a : out.atoms_) out.total_ += a.weight;
  if (out.total_ > 1 + 1e-9L) {
    throw Error(ErrorCode::InvalidArgument, "total mass exceeds 1");
  }
  return out;
}

Real DirectionMeasure::positive_mass() const {
  if (n_ != 1) throw Error(ErrorCode::DimensionMismatch, "positive_mass needs n = 1");
  Real m = 0;
  for (const auto& a : atoms_) {
    if (a.direction[0] > 0) m += a.weight;
  }
  return m;
}

DirectionMeasure normalize(const DirectionMeasure& mu) {
  if (!(mu.total_mass() > 0)) throw Error(ErrorCode::ZeroMass, "cannot normalize the zero measure");
  std::vector<Atom> atoms = mu.atoms();
  const Real total = mu.total_mass();
  for (auto& a : atoms) a.weight /= total;
  return DirectionMeasure::from_atoms(mu.dim(), std::move(atoms));
}

Real distance(const DirectionMeasure& a, const DirectionMeasure& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "measures live on different spheres");
  if (a.dim() >= 3) {
    throw Error(ErrorCode::UnsupportedDimension,
                "distance supports n <= 2; use greedy_transport_distance for an upper bound");
  }
  require_probability(a);
  require_probability(b);
  if (a.dim() == 1) return std::fabs(a.positive_mass() - b.positive_mass());

  // F(x) = a[0, x] - b[0, x] is piecewise constant; W1 = min_c int |F - c|.
  std::vector<std::pair<Real, Real>> events;
  for (const auto& atom : a.atoms()) events.emplace_back(angle_of(atom.direction), atom.weight);
  for (const auto& atom : b.atoms()) events.emplace_back(angle_of(atom.direction), -atom.weight);
  std::sort(events.begin(), events.end());
  std::vector<std::pair<Real, Real>> pieces;  // (value, length)
  Real f = 0;
  Real x = 0;
  for (const auto& [angle, w] : events) {
    if (angle > x) pieces.emplace_back(f, angle - x);
    x = std::max(x, angle);
    f += w;
  }
  pieces.emplace_back(f, kTwoPi - x);
  std::vector<std::pair<Real, Real>> sorted = pieces;
  std::sort(sorted.begin(), sorted.end());
  Real half = 0;
  for (const auto& p : sorted) half += p.second;
  half /= 2;
  Real acc = 0;
  Real median = sorted.front().first;
  for (const auto& p : sorted) {
    acc += p.second;
    median = p.first;
    if (acc >= half) break;
  }
  Real total = 0;
  for (const auto& [value, length] : pieces) total += length * std::fabs(value - median);
  return total;
}

Real greedy_transport_distance(const DirectionMeasure& a, const DirectionMeasure& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "measures live on different spheres");
  require_probability(a);
  require_probability(b);
  struct Pair {
    Real cost;
    std::size_t i, j;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < a.atoms().size(); ++i) {
    for (std::size_t j = 0; j < b.atoms().size(); ++j) {
      pairs.push_back({geodesic(a.atoms()[i].direction, b.atoms()[j].direction), i, j});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.cost < y.cost; });
  std::vector<Real> ra, rb;
  for (const auto& atom : a.atoms()) ra.push_back(atom.weight);
  for (const auto& atom : b.atoms()) rb.push_back(atom.weight);
  Real total = 0;
  for (const auto& p : pairs) {
    const Real moved = std::min(ra[p.i], rb[p.j]);
    if (moved <= 0) continue;
    total += moved * p.cost;
    ra[p.i] -= moved;
    rb[p.j] -= moved;
  }
  return total;
}

Real min_arc_mass(const DirectionMeasure& mu, Real width) {
  if (mu.dim() != 2) throw Error(ErrorCode::UnsupportedDimension, "min_arc_mass needs n = 2");
  if (!(width > 0) || width > kTwoPi) throw Error(ErrorCode::InvalidArgument, "width must lie in (0, 2 pi]");
  if (width >= kTwoPi) return mu.total_mass();
  const auto& atoms = mu.atoms();
  const std::size_t m = atoms.size();
  if (m == 0) return 0;
  // Atoms are sorted by angle; duplicate them one turn later for wrap-around.
  std::vector<Real> angle(2 * m), weight(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    angle[i] = angle_of(atoms[i].direction);
    angle[i + m] = angle[i] + kTwoPi;
    weight[i] = weight[i + m] = atoms[i].weight;
  }
  Real best = mu.total_mass();
  Real window = 0;
  std::size_t hi = 1;  // window holds atoms (i, hi)
  for (std::size_t i = 0; i < m; ++i) {
    if (hi <= i + 1) {
      hi = i + 1;
      window = 0;
    }
    while (hi < i + m && angle[hi] - angle[i] <= width) window += weight[hi++];
    // An empty window is exactly zero, not a rounding residue.
    best = std::min(best, hi == i + 1 ? Real(0) : window);
    if (hi > i + 1) window -= weight[i + 1];
  }
  return std::max(best, Real(0));
}

}  // namespace dirapprox
