#include "dirapprox/orbitmeasure.hpp"

#include <cmath>
#include <map>

#include "parallel.hpp"

namespace dirapprox {

namespace {

constexpr Real kCellStep = 0.5L;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::vector<Real> full_log(const std::vector<Real>& v) {
  std::vector<Real> out = v;
  Real sum = 0;
  for (Real x : v) sum += x;
  out.push_back(-sum);
  return out;
}

using Cell = std::vector<int>;

/// Reduced transforms on a grid of the Lie algebra. A cell is reached from its
/// parent (largest coordinate moved one step toward zero), so consecutive
/// reductions only ever see a mildly distorted basis.
class Atlas {
 public:
  explicit Atlas(const ExactFrame& frame) : frame_(frame) {}

  const BigIntMatrix& get(const Cell& c) {
    auto it = cells_.find(c);
    if (it != cells_.end()) return it->second;
    const int d = frame_.dim();
    std::vector<Real> v(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) v[i] = c[i] * kCellStep;
    bool root = true;
    for (int x : c) root = root && x == 0;
    BigIntMatrix g;
    if (root) {
      g = reduce_frame(frame_, {}, big_identity(d)).g;
    } else {
      Cell parent = c;
      std::size_t arg = 0;
      for (std::size_t i = 1; i < c.size(); ++i) {
        if (std::abs(c[i]) > std::abs(c[arg])) arg = i;
      }
      parent[arg] += c[arg] > 0 ? -1 : 1;
      const BigIntMatrix& g0 = get(parent);
      g = reduce_frame(frame_, full_log(v), g0).g;
    }
    return cells_.emplace(c, std::move(g)).first->second;
  }

 private:
  const ExactFrame& frame_;
  std::map<Cell, BigIntMatrix> cells_;
};

Cell cell_of(const std::vector<Real>& v) {
  Cell c;
  for (Real x : v) c.push_back(static_cast<int>(std::lround(x / kCellStep)));
  return c;
}

RealMatrix translated(const LatticeBasis& sample, const std::optional<SquareMatrix>& U) {
  if (!U) return sample.matrix.entries;
  return U->entries * sample.matrix.entries;
}

std::vector<RealVector> selected_points(const ConePointSet& cone, Orientation orientation) {
  std::vector<RealVector> out;
  for (const auto& v : cone.points) {
    if (orientation == Orientation::Oriented) {
      const Eigen::Index d = v.size();
      if (v(d - 1) < 0) continue;
      if (v(d - 1) == 0) {
        Eigen::Index i = 0;
        while (i + 1 < d && v(i) == 0) ++i;
        if (v(i) < 0) continue;
      }
    }
    out.push_back(v);
  }
  return out;
}

void append_atoms(const std::vector<RealVector>& points, Real mass, std::vector<Atom>& atoms) {
  if (points.empty()) return;
  const Real w = mass / static_cast<Real>(points.size());
  for (const auto& v : points) {
    const Eigen::Index n = v.size() - 1;
    const Real norm = v.head(n).norm();
    std::vector<Real> dir(n);
    for (Eigen::Index i = 0; i < n; ++i) dir[i] = v(i) / norm;
    atoms.push_back({std::move(dir), w});
  }
}

}  // namespace

Real counter_uniform(std::uint64_t seed, std::uint64_t index, std::uint64_t coordinate) {
  const std::uint64_t h = splitmix64(splitmix64(splitmix64(seed) + index) + coordinate);
  return static_cast<Real>(h >> 11) * 0x1.0p-53L;
}

OrbitSampleSet sample_orbit(const LatticeBasis& base, Real L, std::size_t N, std::uint64_t seed,
                            int threads) {
  if (!(L > 0)) throw Error(ErrorCode::InvalidArgument, "L must be positive");
  const int d = base.dim();
  const int n = d - 1;
  OrbitSampleSet out{base, L, N, seed, {}, {}};
  if (N == 0) return out;
  const auto frame = base.exact();

  out.logs.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    for (int j = 0; j < n; ++j) out.logs[i].push_back(L * (2 * counter_uniform(seed, i, j) - 1));
  }
  Atlas atlas(*frame);
  std::vector<const BigIntMatrix*> start(N);
  for (std::size_t i = 0; i < N; ++i) start[i] = &atlas.get(cell_of(out.logs[i]));

  auto chunks = detail::run_chunks<std::vector<LatticeBasis>>(
      0, N, threads, [&](std::uint64_t lo, std::uint64_t hi) {
        std::vector<LatticeBasis> local;
        for (std::uint64_t i = lo; i < hi; ++i) {
          const ReducedFrame red = reduce_frame(*frame, full_log(out.logs[i]), *start[i]);
          local.push_back(LatticeBasis::from_matrix(red.basis, std::ldexp(Real(1), -60)));
        }
        return local;
      });
  out.samples.reserve(N);
  for (auto& c : chunks) {
    for (auto& s : c) out.samples.push_back(std::move(s));
  }
  return out;
}

DirectionMeasure theta_eps(const LatticeBasis& lattice, Real eps, Orientation orientation) {
  const int n = lattice.dim() - 1;
  const ConePointSet cone = enumerate_cone(lattice, eps);
  std::vector<Atom> atoms;
  append_atoms(selected_points(cone, orientation), 1, atoms);
  return DirectionMeasure::from_atoms(n, std::move(atoms));
}

DirectionMeasure pushforward_minvec(const OrbitSampleSet& samples, Real eps,
                                    const std::optional<SquareMatrix>& U, int threads,
                                    Orientation orientation) {
  if (!(eps > 0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  const int n = samples.base.dim() - 1;
  const std::size_t N = samples.samples.size();
  if (N == 0) return DirectionMeasure(n);
  const Real mass = Real(1) / static_cast<Real>(N);
  auto chunks = detail::run_chunks<std::vector<Atom>>(0, N, threads, [&](std::uint64_t lo, std::uint64_t hi) {
    std::vector<Atom> atoms;
    for (std::uint64_t i = lo; i < hi; ++i) {
      const auto lattice = LatticeBasis::from_matrix(translated(samples.samples[i], U));
      append_atoms(selected_points(enumerate_cone(lattice, eps), orientation), mass, atoms);
    }
    return atoms;
  });
  std::vector<Atom> atoms;
  for (auto& c : chunks) {
    for (auto& a : c) atoms.push_back(std::move(a));
  }
  return DirectionMeasure::from_atoms(n, std::move(atoms));
}

std::size_t cone_hits(const OrbitSampleSet& samples, Real eps, const std::optional<SquareMatrix>& U,
                      int threads) {
  auto chunks = detail::run_chunks<std::size_t>(0, samples.samples.size(), threads,
                                                [&](std::uint64_t lo, std::uint64_t hi) {
                                                  std::size_t hits = 0;
                                                  for (std::uint64_t i = lo; i < hi; ++i) {
                                                    const auto lattice = LatticeBasis::from_matrix(
                                                        translated(samples.samples[i], U));
                                                    if (!enumerate_cone(lattice, eps).points.empty()) ++hits;
                                                  }
                                                  return hits;
                                                });
  std::size_t total = 0;
  for (auto h : chunks) total += h;
  return total;
}

Real boundary_fraction(const OrbitSampleSet& samples, Real eps, const std::optional<SquareMatrix>& U,
                       Real tol, int threads) {
  const std::size_t N = samples.samples.size();
  if (N == 0) return 0;
  const int d = samples.base.dim();
  RealVector widths = RealVector::Constant(d, eps + tol);
  widths(d - 1) = 1 + tol;
  auto chunks = detail::run_chunks<std::size_t>(0, N, threads, [&](std::uint64_t lo, std::uint64_t hi) {
    std::size_t near = 0;
    for (std::uint64_t i = lo; i < hi; ++i) {
      for (const auto& pt : enumerate_box(translated(samples.samples[i], U), widths)) {
        Real proj = 0;
        for (int j = 0; j + 1 < d; ++j) proj = std::max(proj, std::fabs(pt.point(j)));
        if (proj == 0) continue;
        if (std::fabs(proj - eps) <= tol || std::fabs(std::fabs(pt.point(d - 1)) - 1) <= tol) {
          ++near;
          break;
        }
      }
    }
    return near;
  });
  std::size_t total = 0;
  for (auto c : chunks) total += c;
  return static_cast<Real>(total) / static_cast<Real>(N);
}

}  // namespace dirapprox
