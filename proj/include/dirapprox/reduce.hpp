#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "dirapprox/numberfield.hpp"

namespace dirapprox {

using RealMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using IndexMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IndexVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

/// basis * transform, with transform unimodular.
struct Reduction {
  RealMatrix basis;
  IndexMatrix transform;
};

/// LLL on the columns of a small (d <= 4) basis. Throws PrecisionExhausted if a
/// size-reduction coefficient does not fit in 62 bits.
Reduction lll_reduce(const RealMatrix& basis, Real delta = 0.99L);

struct BoxPoint {
  IndexVector coeffs;
  RealVector point;
};

/// All nonzero lattice points v = basis * c with |v_i| <= halfWidths_i.
///
/// Points within a relative 1e-12 of a face are kept; callers apply strict tests.
/// Throws TooManyPoints when more than `cap` points qualify.
std::vector<BoxPoint> enumerate_box(const RealMatrix& basis, const RealVector& halfWidths,
                                    std::size_t cap = 1'000'000);

}  // namespace dirapprox
