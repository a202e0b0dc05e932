#include "dirapprox/config.hpp"

#include <cerrno>
#include <cmath>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace dirapprox {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::uint64_t parse_uint(std::string_view key, std::string_view text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("{}: '{}' is not a nonnegative integer", key, text));
  }
  return v;
}

std::string join_poly(const std::vector<mpz_class>& poly) {
  std::string out;
  for (std::size_t i = 0; i < poly.size(); ++i) out += (i ? "," : "") + poly[i].get_str();
  return out;
}

}  // namespace

std::string format_real(Real x) {
  if (x == std::trunc(x) && std::fabs(x) < 1e18L) return fmt::format("{:.0Lf}", x);
  for (int digits = 1; digits <= 21; ++digits) {
    std::string s = fmt::format("{:.{}Lg}", x, digits);
    if (parse_real(s) == x) return s;
  }
  return fmt::format("{:.21Lg}", x);
}

Real parse_real(std::string_view text) {
  const std::string s(text);
  char* end = nullptr;
  errno = 0;
  const Real v = std::strtold(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    throw Error(ErrorCode::InvalidArgument, "'" + s + "' is not a number");
  }
  return v;
}

void RunConfig::set(std::string_view rawKey, std::string_view rawValue) {
  const std::string key = trim(rawKey);
  const std::string value = trim(rawValue);
  if (key == "poly") {
    poly = parse_coefficients(value);
  } else if (key == "precision_bits") {
    precisionBits = static_cast<int>(parse_uint(key, value));
  } else if (key == "prime") {
    prime = parse_uint(key, value);
  } else if (key == "k_min") {
    kMin = static_cast<unsigned>(parse_uint(key, value));
  } else if (key == "k_max") {
    kMax = static_cast<unsigned>(parse_uint(key, value));
  } else if (key == "m_min") {
    mMin = static_cast<unsigned>(parse_uint(key, value));
  } else if (key == "m_max") {
    mMax = static_cast<unsigned>(parse_uint(key, value));
  } else if (key == "epsilon") {
    epsilon = parse_real(value);
  } else if (key == "T") {
    T = parse_real(value);
  } else if (key == "K") {
    K = parse_uint(key, value);
  } else if (key == "L") {
    L = parse_real(value);
  } else if (key == "N") {
    N = parse_uint(key, value);
  } else if (key == "seed") {
    seed = parse_uint(key, value);
  } else if (key == "out") {
    out = value;
  } else if (key == "eps_floor") {
    if (value != "littlewood") parse_real(value);
    epsFloor = value;
  } else if (key == "arc_width") {
    arcWidth = parse_real(value);
  } else if (key == "apply_u") {
    if (value != "none" && value != "U" && value != "U0") {
      throw Error(ErrorCode::InvalidArgument, "apply_u must be none, U or U0");
    }
    applyU = value;
  } else if (key == "minima_all") {
    if (value != "0" && value != "1") throw Error(ErrorCode::InvalidArgument, "minima_all must be 0 or 1");
    minimaAll = value == "1";
  } else if (key == "scan_strategy") {
    if (value != "auto" && value != "linear" && value != "lattice") {
      throw Error(ErrorCode::InvalidArgument, "scan_strategy must be auto, linear or lattice");
    }
    scanStrategy = value;
  } else if (key == "orientation") {
    if (value != "symmetric" && value != "oriented") {
      throw Error(ErrorCode::InvalidArgument, "orientation must be symmetric or oriented");
    }
    orientation = value;
  } else if (key == "command" || key == "version") {
    // Manifest bookkeeping.
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
  }
}

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); };
  if (precisionBits < 128) fail("precision_bits must be at least 128");
  if (!is_prime(prime)) throw Error(ErrorCode::NotPrime, fmt::format("prime = {} is not prime", prime));
  if (!(epsilon > 0)) fail("epsilon must be positive");
  if (!(T > 0)) fail("T must be positive");
  if (!(L > 0)) fail("L must be positive");
  if (!(arcWidth > 0) || arcWidth > 6.283185307179586477L) fail("arc_width must lie in (0, 2 pi]");
}

std::string RunConfig::serialize() const {
  std::ostringstream s;
  s << "poly=" << join_poly(poly) << '\n'
    << "precision_bits=" << precisionBits << '\n'
    << "prime=" << prime << '\n'
    << "k_min=" << kMin << '\n'
    << "k_max=" << kMax << '\n'
    << "m_min=" << mMin << '\n'
    << "m_max=" << mMax << '\n'
    << "epsilon=" << format_real(epsilon) << '\n'
    << "T=" << format_real(T) << '\n'
    << "K=" << K << '\n'
    << "L=" << format_real(L) << '\n'
    << "N=" << N << '\n'
    << "seed=" << seed << '\n'
    << "out=" << out << '\n'
    << "eps_floor=" << epsFloor << '\n'
    << "arc_width=" << format_real(arcWidth) << '\n'
    << "apply_u=" << applyU << '\n'
    << "minima_all=" << (minimaAll ? 1 : 0) << '\n'
    << "scan_strategy=" << scanStrategy << '\n'
    << "orientation=" << orientation << '\n';
  return s.str();
}

RunConfig RunConfig::parse(std::string_view text) {
  RunConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, fmt::format("line {}: expected key=value", lineNo));
    }
    cfg.set(std::string_view(t).substr(0, eq), std::string_view(t).substr(eq + 1));
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

}  // namespace dirapprox
