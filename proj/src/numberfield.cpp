#include "dirapprox/numberfield.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace dirapprox {

namespace {

using QPoly = std::vector<mpq_class>;  // index = degree

void trim(QPoly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

int qdegree(const QPoly& f) { return static_cast<int>(f.size()) - 1; }

QPoly derivative(const QPoly& f) {
  QPoly out;
  for (std::size_t i = 1; i < f.size(); ++i) out.push_back(f[i] * static_cast<long>(i));
  trim(out);
  return out;
}

QPoly remainder(QPoly a, const QPoly& b) {
  trim(a);
  const int db = qdegree(b);
  while (qdegree(a) >= db && !a.empty()) {
    const int shift = qdegree(a) - db;
    const mpq_class factor = a.back() / b.back();
    for (int i = 0; i <= db; ++i) a[i + shift] -= factor * b[i];
    a.back() = 0;
    trim(a);
  }
  return a;
}

QPoly gcd(QPoly a, QPoly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    QPoly r = remainder(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

mpq_class evaluate(const QPoly& f, const mpq_class& x) {
  mpq_class acc = 0;
  for (auto it = f.rbegin(); it != f.rend(); ++it) acc = acc * x + *it;
  return acc;
}

int sgn(const mpq_class& x) { return ::sgn(x); }

std::vector<QPoly> sturm_chain(const QPoly& f) {
  std::vector<QPoly> chain{f, derivative(f)};
  while (!chain.back().empty() && qdegree(chain.back()) > 0) {
    QPoly r = remainder(chain[chain.size() - 2], chain.back());
    if (r.empty()) break;
    for (auto& c : r) c = -c;
    chain.push_back(std::move(r));
  }
  return chain;
}

int sign_variations(const std::vector<QPoly>& chain, const mpq_class& x) {
  int variations = 0;
  int last = 0;
  for (const auto& p : chain) {
    const int s = sgn(evaluate(p, x));
    if (s == 0) continue;
    if (last != 0 && s != last) ++variations;
    last = s;
  }
  return variations;
}

// sign of +infinity / -infinity evaluations
int sign_variations_at_infinity(const std::vector<QPoly>& chain, bool positive) {
  int variations = 0;
  int last = 0;
  for (const auto& p : chain) {
    int s = sgn(p.back());
    if (!positive && qdegree(p) % 2 == 1) s = -s;
    if (last != 0 && s != last) ++variations;
    last = s;
  }
  return variations;
}

QPoly to_qpoly(const std::vector<mpz_class>& coeffs) {
  QPoly f;
  for (const auto& c : coeffs) f.emplace_back(c);
  return f;
}

// f(x) * 2^(bits * deg) for x = mantissa * 2^-bits.
mpz_class scaled_value(const std::vector<mpz_class>& coeffs, const mpz_class& mantissa, int bits) {
  const int deg = static_cast<int>(coeffs.size()) - 1;
  mpz_class acc = coeffs[deg];
  for (int i = deg - 1; i >= 0; --i) {
    mpz_class term = coeffs[i];
    mpz_mul_2exp(term.get_mpz_t(), term.get_mpz_t(), static_cast<mp_bitcnt_t>(bits) * (deg - i));
    acc = acc * mantissa + term;
  }
  return acc;
}

// f(x) as a fixed-point mantissa at `bits`.
mpz_class fixed_value(const std::vector<mpz_class>& coeffs, const mpz_class& mantissa, int bits) {
  const int deg = static_cast<int>(coeffs.size()) - 1;
  mpz_class v = scaled_value(coeffs, mantissa, bits);
  if (deg > 1) mpz_fdiv_q_2exp(v.get_mpz_t(), v.get_mpz_t(), static_cast<mp_bitcnt_t>(bits) * (deg - 1));
  if (deg == 0) mpz_mul_2exp(v.get_mpz_t(), v.get_mpz_t(), bits);
  return v;
}

mpz_class shifted(const mpz_class& x, int by) {
  mpz_class out;
  if (by >= 0) {
    mpz_mul_2exp(out.get_mpz_t(), x.get_mpz_t(), by);
  } else {
    mpz_fdiv_q_2exp(out.get_mpz_t(), x.get_mpz_t(), -by);
  }
  return out;
}

mpz_class ceil_shift_right(const mpz_class& x, int by) {
  mpz_class out;
  mpz_cdiv_q_2exp(out.get_mpz_t(), x.get_mpz_t(), by);
  return out;
}

bool has_rational_root(const std::vector<mpz_class>& c) {
  if (c[0] == 0) return true;
  // Monic: rational roots are integer divisors of c_0.
  mpz_class a = abs(c[0]);
  auto is_root = [&](const mpz_class& x) { return sgn(scaled_value(c, x, 0)) == 0; };
  for (mpz_class q = 1; q * q <= a; ++q) {
    if (a % q != 0) continue;
    const mpz_class other = a / q;
    if (is_root(q) || is_root(mpz_class(-q)) || is_root(other) || is_root(mpz_class(-other))) return true;
  }
  return false;
}

// Quartic x^4 + c3 x^3 + c2 x^2 + c1 x + c0 = (x^2 + a x + b)(x^2 + c x + e) over Z.
bool has_quadratic_factor(const std::vector<mpz_class>& coeffs) {
  const mpz_class& c0 = coeffs[0];
  const mpz_class& c1 = coeffs[1];
  const mpz_class& c2 = coeffs[2];
  const mpz_class& c3 = coeffs[3];
  const mpz_class m = abs(c0);
  auto check = [&](const mpz_class& b) {
    const mpz_class e = c0 / b;
    if (e != b) {
      const mpz_class num = c1 - b * c3;
      const mpz_class den = e - b;
      if (num % den != 0) return false;
      const mpz_class a = num / den;
      const mpz_class c = c3 - a;
      return a * c + b + e == c2 && a * e + b * c == c1;
    }
    if (c1 != b * c3) return false;
    // a + c = c3, a c = c2 - 2b
    const mpz_class disc = c3 * c3 - 4 * (c2 - 2 * b);
    if (disc < 0 || !mpz_perfect_square_p(disc.get_mpz_t())) return false;
    const mpz_class root = sqrt(disc);
    return (c3 + root) % 2 == 0;
  };
  for (mpz_class q = 1; q * q <= m; ++q) {
    if (m % q != 0) continue;
    for (const mpz_class& b : {q, mpz_class(-q), mpz_class(m / q), mpz_class(-(m / q))}) {
      if (check(b)) return true;
    }
  }
  return false;
}

int dyadic_exponent(const mpq_class& x) {
  const mpz_class& den = x.get_den();
  return static_cast<int>(mpz_sizeinbase(den.get_mpz_t(), 2)) - 1;
}

// Bisects [lo, hi] (mantissas at `bits`) down to width 2^-targetBits, keeping the sign change.
DyadicInterval bisect_to(const MinimalPolynomial& poly, mpz_class lo, mpz_class hi, int bits,
                         int targetBits) {
  if (targetBits > bits) {
    lo = shifted(lo, targetBits - bits);
    hi = shifted(hi, targetBits - bits);
    bits = targetBits;
  }
  const int sLo = poly.sign_at(lo, bits);
  while (hi - lo > 1) {
    mpz_class mid = (lo + hi);
    mpz_fdiv_q_2exp(mid.get_mpz_t(), mid.get_mpz_t(), 1);
    if (poly.sign_at(mid, bits) == sLo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {lo, hi, bits};
}

}  // namespace

Real to_real(const mpz_class& mantissa, int bits) {
  const int s = sgn(mantissa);
  if (s == 0) return 0.0L;
  mpz_class a = abs(mantissa);
  const long size = static_cast<long>(mpz_sizeinbase(a.get_mpz_t(), 2));
  long exponent = 0;
  if (size > 64) {
    exponent = size - 64;
    mpz_fdiv_q_2exp(a.get_mpz_t(), a.get_mpz_t(), static_cast<mp_bitcnt_t>(exponent));
  }
  const unsigned long top = mpz_get_ui(a.get_mpz_t());
  const Real r = std::ldexp(static_cast<Real>(top), static_cast<int>(exponent - bits));
  return s < 0 ? -r : r;
}

Real DyadicInterval::midpoint() const {
  mpz_class sum = lo + hi;
  return to_real(sum, bits + 1);
}

MinimalPolynomial::MinimalPolynomial(std::vector<mpz_class> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.size() < 3) {
    throw Error(ErrorCode::InvalidArgument, "polynomial degree must be at least 2");
  }
  if (coeffs_.back() != 1) {
    throw Error(ErrorCode::InvalidArgument, "polynomial must be monic (leading coefficient 1)");
  }
  const QPoly f = to_qpoly(coeffs_);
  if (qdegree(gcd(f, derivative(f))) > 0) {
    throw Error(ErrorCode::NotSquarefree, "gcd(f, f') is not constant");
  }
  if (has_rational_root(coeffs_)) {
    throw Error(ErrorCode::Reducible, "polynomial has a rational root");
  }
  const int d = degree();
  if (d == 4 && has_quadratic_factor(coeffs_)) {
    throw Error(ErrorCode::Reducible, "polynomial has a monic integer quadratic factor");
  }
  irreducibility_verified_ = d <= 4;
  const auto chain = sturm_chain(f);
  const int realRoots =
      sign_variations_at_infinity(chain, false) - sign_variations_at_infinity(chain, true);
  if (realRoots != d) {
    throw Error(ErrorCode::NotTotallyReal,
                "Sturm count " + std::to_string(realRoots) + " < degree " + std::to_string(d));
  }
}

int MinimalPolynomial::sign_at(const mpz_class& mantissa, int bits) const {
  return sgn(scaled_value(coeffs_, mantissa, bits));
}

std::vector<mpz_class> parse_coefficients(std::string_view text) {
  std::vector<mpz_class> out;
  std::string token;
  std::istringstream in{std::string(text)};
  while (std::getline(in, token, ',')) {
    const auto first = token.find_first_not_of(" \t");
    const auto last = token.find_last_not_of(" \t");
    if (first == std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, "empty coefficient in '" + std::string(text) + "'");
    }
    token = token.substr(first, last - first + 1);
    if (token.front() == '+') token.erase(0, 1);
    mpz_class c;
    if (c.set_str(token, 10) != 0) {
      throw Error(ErrorCode::InvalidArgument, "bad coefficient '" + token + "'");
    }
    out.push_back(c);
  }
  return out;
}

DyadicInterval refine_root(const MinimalPolynomial& poly, const DyadicInterval& isolating,
                           int targetBits) {
  // Coarse bracket by bisection, then Newton in fixed point with guard bits.
  const int coarseBits = std::max(isolating.bits, 48);
  mpz_class lo = shifted(isolating.lo, coarseBits - isolating.bits);
  mpz_class hi = shifted(isolating.hi, coarseBits - isolating.bits);
  DyadicInterval coarse = bisect_to(poly, lo, hi, coarseBits, coarseBits);
  {
    const int sLo = poly.sign_at(coarse.lo, coarse.bits);
    while (coarse.hi - coarse.lo > (mpz_class(1) << (coarseBits - 40))) {
      mpz_class mid = coarse.lo + coarse.hi;
      mpz_fdiv_q_2exp(mid.get_mpz_t(), mid.get_mpz_t(), 1);
      if (poly.sign_at(mid, coarseBits) == sLo) {
        coarse.lo = mid;
      } else {
        coarse.hi = mid;
      }
    }
  }
  if (targetBits <= coarseBits) {
    return bisect_to(poly, coarse.lo, coarse.hi, coarse.bits, targetBits);
  }

  const int guard = 16;
  const int work = targetBits + guard;
  const mpz_class bracketLo = shifted(coarse.lo, work - coarseBits);
  const mpz_class bracketHi = shifted(coarse.hi, work - coarseBits);
  std::vector<mpz_class> deriv;
  for (std::size_t i = 1; i < poly.coeffs().size(); ++i) {
    deriv.push_back(poly.coeffs()[i] * static_cast<long>(i));
  }
  mpz_class x = (bracketLo + bracketHi) / 2;
  bool converged = false;
  for (int iter = 0; iter < 64; ++iter) {
    const mpz_class fx = fixed_value(poly.coeffs(), x, work);
    const mpz_class dfx = fixed_value(deriv, x, work);
    if (dfx == 0) break;
    mpz_class step = shifted(fx, work);
    mpz_tdiv_q(step.get_mpz_t(), step.get_mpz_t(), dfx.get_mpz_t());
    x -= step;
    if (x < bracketLo || x > bracketHi) break;
    if (abs(step) <= 2) {
      converged = true;
      break;
    }
  }
  if (converged) {
    const mpz_class m = shifted(x, -guard);
    for (long offset : {0L, -1L, 1L}) {
      const mpz_class a = m + offset;
      const mpz_class b = a + 1;
      if (poly.sign_at(a, targetBits) * poly.sign_at(b, targetBits) < 0) {
        return {a, b, targetBits};
      }
    }
  }
  return bisect_to(poly, coarse.lo, coarse.hi, coarse.bits, targetBits);
}

NumberField make_field(const std::vector<mpz_class>& coeffs, int precisionBits) {
  if (precisionBits < 64) {
    throw Error(ErrorCode::InvalidArgument, "precisionBits must be at least 64");
  }
  MinimalPolynomial poly(coeffs);
  const QPoly f = to_qpoly(poly.coeffs());
  const auto chain = sturm_chain(f);

  mpz_class bound = 0;
  for (const auto& c : poly.coeffs()) bound = std::max(bound, mpz_class(abs(c)));
  bound += 1;

  // Roots in (a, b] = V(a) - V(b).
  std::vector<std::pair<mpq_class, mpq_class>> pending{{mpq_class(-bound), mpq_class(bound)}};
  std::vector<std::pair<mpq_class, mpq_class>> isolated;
  while (!pending.empty()) {
    auto [a, b] = pending.back();
    pending.pop_back();
    const int count = sign_variations(chain, a) - sign_variations(chain, b);
    if (count == 0) continue;
    if (count == 1) {
      isolated.emplace_back(a, b);
      continue;
    }
    const mpq_class mid = (a + b) / 2;
    pending.emplace_back(a, mid);
    pending.emplace_back(mid, b);
  }
  std::sort(isolated.begin(), isolated.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });

  NumberField field{poly, {}, precisionBits};
  for (const auto& [a, b] : isolated) {
    const int bits = std::max(dyadic_exponent(a), dyadic_exponent(b));
    mpq_class sa = a, sb = b;
    mpz_class scale = mpz_class(1) << bits;
    sa *= scale;
    sb *= scale;
    DyadicInterval iv{sa.get_num(), sb.get_num(), bits};
    field.roots.push_back(refine_root(poly, iv, precisionBits));
  }
  return field;
}

std::vector<Real> AlgebraicTuple::alphas() const {
  std::vector<Real> out;
  for (int i = 1; i <= n; ++i) out.push_back(alpha(i));
  return out;
}

const mpz_class& AlgebraicTuple::max_error_ulps() const {
  const mpz_class* best = &errorUlps[0][0];
  for (const auto& row : errorUlps) {
    for (const auto& e : row) {
      if (e > *best) best = &e;
    }
  }
  return *best;
}

AlgebraicTuple power_tuple(const NumberField& field) {
  const int d = field.degree();
  const int bits = field.precisionBits;
  const int work = bits + 64;

  AlgebraicTuple tuple{field, d - 1, {}, {}, {}, {}};
  tuple.coords.assign(d, std::vector<mpq_class>(d, 0));
  for (int i = 0; i < d; ++i) tuple.coords[i][i] = 1;

  tuple.rootIndex.push_back(d - 1);
  for (int j = 0; j < d - 1; ++j) tuple.rootIndex.push_back(j);

  for (int j = 0; j < d; ++j) {
    const DyadicInterval root = refine_root(field.polynomial, field.roots[tuple.rootIndex[j]], work);
    std::vector<mpz_class> row;
    std::vector<mpz_class> err;
    // theta^i as an exact interval at scale work * i.
    mpz_class lo = 1, hi = 1;
    for (int i = 0; i < d; ++i) {
      if (i == 0) {
        row.push_back(mpz_class(1) << bits);
        err.push_back(0);
        continue;
      }
      const mpz_class c[4] = {lo * root.lo, lo * root.hi, hi * root.lo, hi * root.hi};
      lo = *std::min_element(c, c + 4);
      hi = *std::max_element(c, c + 4);
      const int drop = work * i - bits;
      const mpz_class loB = shifted(lo, -drop);
      const mpz_class hiB = ceil_shift_right(hi, drop);
      mpz_class mid = loB + hiB;
      mpz_fdiv_q_2exp(mid.get_mpz_t(), mid.get_mpz_t(), 1);
      row.push_back(mid);
      err.push_back(std::max(mpz_class(hiB - mid), mpz_class(1)));
    }
    tuple.embed.push_back(std::move(row));
    tuple.errorUlps.push_back(std::move(err));
  }
  return tuple;
}

mpz_class max_certified_multiplier(const AlgebraicTuple& tuple) {
  const mpz_class limit = mpz_class(1) << (tuple.bits() - 64);
  return (limit - 1) / tuple.max_error_ulps();
}

NearestVector frac_nearest(const AlgebraicTuple& tuple, const mpz_class& k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "frac_nearest needs k >= 1");
  if (k > max_certified_multiplier(tuple)) {
    throw Error(ErrorCode::PrecisionExhausted,
                "k = " + k.get_str() + " exceeds the certified range at " +
                    std::to_string(tuple.bits()) + " bits");
  }
  const int bits = tuple.bits();
  const mpz_class half = mpz_class(1) << (bits - 1);
  NearestVector out;
  out.bits = bits;
  for (int i = 1; i <= tuple.n; ++i) {
    const mpz_class x = k * tuple.embed[0][i];
    mpz_class p = x + half;
    mpz_fdiv_q_2exp(p.get_mpz_t(), p.get_mpz_t(), bits);
    mpz_class disp = x - shifted(p, bits);
    const Real dv = to_real(disp, bits);
    out.delta = std::max(out.delta, std::fabs(dv));
    out.disp.push_back(dv);
    out.p.push_back(std::move(p));
    out.dispMantissa.push_back(std::move(disp));
  }
  return out;
}

bool is_prime(std::uint64_t p) {
  if (p < 2) return false;
  for (std::uint64_t q = 2; q * q <= p; ++q) {
    if (p % q == 0) return false;
  }
  return true;
}

unsigned padic_valuation(const mpz_class& k, std::uint64_t p) {
  if (!is_prime(p)) throw Error(ErrorCode::NotPrime, std::to_string(p) + " is not prime");
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "valuation of 0 is infinite");
  unsigned v = 0;
  mpz_class x = abs(k);
  while (mpz_divisible_ui_p(x.get_mpz_t(), p)) {
    mpz_divexact_ui(x.get_mpz_t(), x.get_mpz_t(), p);
    ++v;
  }
  return v;
}

mpq_class padic_norm(const mpz_class& k, std::uint64_t p) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "padic_norm needs k >= 1");
  const unsigned v = padic_valuation(k, p);
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), p, v);
  return mpq_class(mpz_class(1), den);
}

}  // namespace dirapprox
