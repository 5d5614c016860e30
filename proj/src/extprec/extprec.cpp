#include "trotter/extprec.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

extern "C" {
#include <quadmath.h>
}

namespace trotter::ext {

namespace {

using Raw = ExtReal::Raw;

// pi and ln2 split into a binary128 head and the binary128 rounding of the
// remainder.
constexpr Raw kPiHi = 0x1.921fb54442d18469898cc51701b8p+1Q;
constexpr Raw kPiLo = 0x1.cd129024e088a67cc74020bbea64p-114Q;
constexpr Raw kLn2Hi = 0x1.62e42fefa39ef35793c7673007e6p-1Q;
constexpr Raw kLn2Lo = -0x1.2a17e1979b31ace93a4ebe5d148fp-117Q;

constexpr Raw kSeriesStop = 0x1p-120Q;

bool raw_isnan(Raw x) { return x != x; }
bool raw_isinf(Raw x) { return !raw_isnan(x) && raw_isnan(x - x); }
Raw raw_abs(Raw x) { return x < 0 ? -x : x; }

// x * 2^e, exact unless the result leaves the normal range.
Raw raw_ldexp(Raw x, int e) {
  while (e > 1000) {
    x *= static_cast<Raw>(std::ldexp(1.0, 1000));
    e -= 1000;
  }
  while (e < -1000) {
    x *= static_cast<Raw>(std::ldexp(1.0, -1000));
    e += 1000;
  }
  return x * static_cast<Raw>(std::ldexp(1.0, e));
}

// Splits a finite nonzero x into f * 2^e with 0.5 <= |f| < 1.
Raw raw_frexp(Raw x, int* e) {
  int shift = 0;
  if (raw_abs(x) < 0x1p-16000Q) {
    x = raw_ldexp(x, 256);
    shift = 256;
  }
  unsigned __int128 bits;
  std::memcpy(&bits, &x, sizeof bits);
  const int biased = static_cast<int>((bits >> 112) & 0x7fff);
  *e = biased - 16382 - shift;
  bits &= ~(static_cast<unsigned __int128>(0x7fff) << 112);
  bits |= static_cast<unsigned __int128>(16382) << 112;
  Raw f;
  std::memcpy(&f, &bits, sizeof f);
  return f;
}

struct SinVers {
  Raw sin;
  Raw vers;
};

// Reciprocals 1/((2k)(2k+1)) and 1/((2k-1)(2k)) for the Taylor recurrences;
// multiplying by them is much cheaper than a software binary128 division.
struct TaylorTables {
  std::array<Raw, 40> sin_step{};
  std::array<Raw, 40> vers_step{};
  TaylorTables() {
    for (int k = 1; k < 40; ++k) {
      sin_step[k] = 1 / static_cast<Raw>((2 * k) * (2 * k + 1));
      vers_step[k] = 1 / static_cast<Raw>((2 * k - 1) * (2 * k));
    }
  }
};

const TaylorTables& taylor_tables() {
  static const TaylorTables t;
  return t;
}

// Taylor kernel for |y| <= pi/4: sin y and 1 - cos y, both without
// cancellation.
SinVers kernel(Raw y) {
  if (y == 0) return {0, 0};
  const TaylorTables& tab = taylor_tables();
  const Raw y2 = y * y;
  Raw term = y;
  Raw s = y;
  for (int k = 1; k < 40; ++k) {
    term *= -y2 * tab.sin_step[k];
    s += term;
    if (raw_abs(term) < kSeriesStop * raw_abs(s)) break;
  }
  term = y2 / 2;
  Raw v = term;
  for (int k = 2; k < 40; ++k) {
    term *= -y2 * tab.vers_step[k];
    v += term;
    if (raw_abs(term) < kSeriesStop * raw_abs(v)) break;
  }
  return {s, v};
}

// 2 * atanh(s) = log((1+s)/(1-s)) for |s| <= 0.18.
Raw two_atanh(Raw s) {
  const Raw s2 = s * s;
  Raw power = s;
  Raw sum = s;
  for (int k = 1; k < 80; ++k) {
    power *= s2;
    const Raw term = power / static_cast<Raw>(2 * k + 1);
    sum += term;
    if (raw_abs(term) < kSeriesStop * raw_abs(sum)) break;
  }
  return 2 * sum;
}

Raw raw_log_positive(Raw x) {
  int e = 0;
  Raw f = raw_frexp(x, &e);  // [0.5, 1)
  if (f < 0.70710678118654752440084436210485Q) {
    f *= 2;
    e -= 1;
  }
  const Raw s = (f - 1) / (f + 1);
  return (static_cast<Raw>(e) * kLn2Hi + static_cast<Raw>(e) * kLn2Lo) + two_atanh(s);
}

ExtReal wrap(Raw r) { return ExtReal::from_raw(r); }

SinCos from_kernel(Raw y) {
  const SinVers k = kernel(y);
  return {wrap(1 - k.vers), wrap(k.sin), wrap(k.vers)};
}

// Half-angle descent tables for q = 1 and q = 3, j = 0..64.
using DescentTable = std::array<SinCos, 65>;

DescentTable build_descent(unsigned q) {
  DescentTable t{};
  unsigned start = 0;
  if (q == 1) {
    t[0] = {wrap(-1), wrap(0), wrap(2)};
    t[1] = {wrap(0), wrap(1), wrap(1)};
    start = 1;
  } else {
    const Raw half_sqrt3 = sqrt(ExtReal(3)).raw() / 2;
    t[0] = {wrap(0.5Q), wrap(half_sqrt3), wrap(0.5Q)};
  }
  for (unsigned j = start + 1; j <= 64; ++j) {
    const Raw c = t[j - 1].cos.raw();
    const Raw s = t[j - 1].sin.raw();
    const Raw ch = sqrt(wrap((1 + c) / 2)).raw();
    const Raw sh = s / (2 * ch);
    const Raw vh = sh * sh / (1 + ch);
    t[j] = {wrap(ch), wrap(sh), wrap(vh)};
  }
  return t;
}

}  // namespace

ExtReal& ExtReal::operator/=(ExtReal o) {
  *this = *this / o;
  return *this;
}

ExtReal operator/(ExtReal a, ExtReal b) {
  if (b.v_ == 0) throw std::domain_error("ExtReal division by zero");
  return ExtReal::from_raw(a.v_ / b.v_);
}

ExtComplex operator/(const ExtComplex& a, const ExtComplex& b) {
  const ExtReal d = b.re * b.re + b.im * b.im;
  if (d == 0) throw std::domain_error("ExtComplex division by zero");
  return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}

ExtReal abs(ExtReal x) { return wrap(raw_abs(x.raw())); }

bool isfinite(ExtReal x) {
  return !raw_isnan(x.raw()) && !raw_isinf(x.raw());
}

ExtReal ldexp(ExtReal x, int e) { return wrap(raw_ldexp(x.raw(), e)); }

ExtReal sqrt(ExtReal x) {
  const Raw v = x.raw();
  if (raw_isnan(v)) return x;
  if (v < 0) throw std::domain_error("sqrt of negative value");
  if (v == 0 || raw_isinf(v)) return x;
  int e = 0;
  Raw f = raw_frexp(v, &e);
  if (e % 2 != 0) {
    f *= 2;
    e -= 1;
  }
  Raw y = std::sqrt(static_cast<double>(f));
  y = (y + f / y) / 2;
  y = (y + f / y) / 2;
  return wrap(raw_ldexp(y, e / 2));
}

ExtReal exp(ExtReal x) {
  const Raw v = x.raw();
  if (raw_isnan(v)) return x;
  if (raw_abs(v) > 700) throw std::range_error("exp argument outside [-700, 700]");
  const double kd = std::nearbyint(static_cast<double>(v / kLn2Hi));
  const Raw k = kd;
  const Raw r = (v - k * kLn2Hi) - k * kLn2Lo;
  // expm1 on r / 2^10, then expm1(2y) = expm1(y) * (2 + expm1(y)) ten times.
  const Raw s = raw_ldexp(r, -10);
  Raw term = s;
  Raw em1 = s;
  for (int i = 2; i < 40; ++i) {
    term *= s / static_cast<Raw>(i);
    em1 += term;
    if (raw_abs(term) < kSeriesStop * raw_abs(em1)) break;
  }
  for (int i = 0; i < 10; ++i) em1 *= 2 + em1;
  return wrap(raw_ldexp(1 + em1, static_cast<int>(kd)));
}

ExtReal log1p(ExtReal x) {
  const Raw v = x.raw();
  if (raw_isnan(v)) return x;
  if (v <= -1) throw std::domain_error("log1p argument must exceed -1");
  if (raw_isinf(v)) return x;
  if (raw_abs(v) <= 0.25Q) return wrap(two_atanh(v / (2 + v)));
  return wrap(raw_log_positive(1 + v));
}

ExtReal log(ExtReal x) {
  const Raw v = x.raw();
  if (raw_isnan(v)) return x;
  if (v <= 0) throw std::domain_error("log argument must be positive");
  if (raw_isinf(v)) return x;
  return wrap(raw_log_positive(v));
}

ExtReal pi() { return wrap(kPiHi); }
ExtReal ln2() { return wrap(kLn2Hi); }

SinCos sincos_small(ExtReal x) {
  const Raw v = x.raw();
  if (raw_isnan(v) || raw_abs(v) > kPiHi) {
    throw std::invalid_argument("sincos_small argument outside [-pi, pi]");
  }
  const bool negative = v < 0;
  const Raw a = raw_abs(v);
  SinCos out;
  if (a <= kPiHi / 4) {
    out = from_kernel(a);
  } else if (a <= 3 * kPiHi / 4) {
    const Raw y = (kPiHi / 2 - a) + kPiLo / 2;
    const SinVers k = kernel(y);
    out = {wrap(k.sin), wrap(1 - k.vers), wrap(1 - k.sin)};
  } else {
    const Raw z = (kPiHi - a) + kPiLo;
    const SinVers k = kernel(z);
    out = {wrap(k.vers - 1), wrap(k.sin), wrap(2 - k.vers)};
  }
  if (negative) out.sin = -out.sin;
  return out;
}

ExtReal one_minus_cos(ExtReal x) { return sincos_small(x).one_minus_cos; }

SinCos cospi_frac(unsigned j, unsigned q) {
  if (q != 1 && q != 3) throw std::invalid_argument("cospi_frac: q must be 1 or 3");
  if (j > 64) throw std::invalid_argument("cospi_frac: j must be <= 64");
  static const DescentTable one = build_descent(1);
  static const DescentTable three = build_descent(3);
  return q == 1 ? one[j] : three[j];
}

SinCos sincos_pi_ratio(std::int64_t num, std::int64_t den) {
  if (den <= 0 || den > (std::int64_t{1} << 60) || num > den || num < -den) {
    throw std::invalid_argument("sincos_pi_ratio: need 0 < den and |num| <= den");
  }
  const bool negative = num < 0;
  std::int64_t a = negative ? -num : num;
  bool reflect = false;  // angle -> pi - angle
  if (2 * a > den) {
    a = den - a;
    reflect = true;
  }
  SinCos out;
  if (a == 0) {
    out = {wrap(1), wrap(0), wrap(0)};
  } else if (4 * a > den) {
    // pi/2 - pi*a/den = pi*(den - 2a)/(2 den)
    const Raw phi = kPiHi * static_cast<Raw>(den - 2 * a) / static_cast<Raw>(2 * den);
    const SinVers k = kernel(phi);
    out = {wrap(k.sin), wrap(1 - k.vers), wrap(1 - k.sin)};
  } else {
    out = from_kernel(kPiHi * static_cast<Raw>(a) / static_cast<Raw>(den));
  }
  if (reflect) {
    out = {-out.cos, out.sin, wrap(2 - out.one_minus_cos.raw())};
  }
  if (negative) out.sin = -out.sin;
  return out;
}

ExtReal abs(const ExtComplex& z) { return sqrt(z.re * z.re + z.im * z.im); }

ExtReal modulus_sq_minus_one(const ExtComplex& d) {
  return -2 * d.re + (d.re * d.re + d.im * d.im);
}

std::string to_decimal(ExtReal x, int digits) {
  if (digits < 1 || digits > 34) throw std::invalid_argument("to_decimal: digits in [1, 34]");
  std::array<char, 96> buf{};
  quadmath_snprintf(buf.data(), buf.size(), "%.*Qe", digits - 1, x.raw());
  return std::string(buf.data());
}

ExtReal from_decimal(std::string_view s) {
  const std::string text(s);
  char* end = nullptr;
  const Raw v = strtoflt128(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw std::invalid_argument("from_decimal: not a number: " + text);
  }
  return wrap(v);
}

}  // namespace trotter::ext
