#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dirapprox/numberfield.hpp"

namespace dirapprox {

inline constexpr std::string_view kVersion = "0.1.0";

/// Flat key=value run description. Unknown keys are rejected.
struct RunConfig {
  std::vector<mpz_class> poly{-1, -1, 1};
  int precisionBits = 192;
  std::uint64_t prime = 2;
  unsigned kMin = 0;
  unsigned kMax = 0;
  unsigned mMin = 0;
  unsigned mMax = 0;
  Real epsilon = 0.45L;
  Real T = 1;
  std::uint64_t K = 100;
  Real L = 30;
  std::uint64_t N = 10000;
  std::uint64_t seed = 1;
  std::string out = "out";
  /// "0" (none), a number, or "littlewood" for p^(-k/n).
  std::string epsFloor = "0";
  Real arcWidth = 0.39269908169872415481L;  // pi / 8
  /// none, U or U0
  std::string applyU = "U0";
  bool minimaAll = false;
  /// auto, linear or lattice
  std::string scanStrategy = "auto";
  /// symmetric or oriented
  std::string orientation = "symmetric";

  /// Applies one key=value pair; throws InvalidArgument on unknown keys or bad values.
  void set(std::string_view key, std::string_view value);
  void validate() const;
  /// One line per key, fixed order; parse(serialize()) reproduces the config exactly.
  std::string serialize() const;
  static RunConfig parse(std::string_view text);
  static RunConfig load(const std::string& path);

  bool operator==(const RunConfig&) const = default;
};

/// Shortest decimal that reads back to the same long double.
std::string format_real(Real x);
Real parse_real(std::string_view text);

}  // namespace dirapprox
