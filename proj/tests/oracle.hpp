#pragma once

// Integer and rational reference arithmetic for the tests.  Nothing here
// touches ExtReal except to_rational, which decomposes a value exactly.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>

#include "trotter/extprec.hpp"

namespace oracle {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

/// Exact value of an ExtReal as a rational.  A 113-bit significand always
/// splits into at most three doubles without rounding.
inline cpp_rational to_rational(trotter::ext::ExtReal x) {
  using Raw = trotter::ext::ExtReal::Raw;
  Raw r = x.raw();
  cpp_rational out = 0;
  for (int i = 0; i < 3; ++i) {
    const double d = static_cast<double>(r);
    out += cpp_rational(d);
    r -= static_cast<Raw>(d);
  }
  return out;
}

inline double to_double(const cpp_rational& q) { return static_cast<double>(q); }

inline double abs_error(trotter::ext::ExtReal x, const cpp_rational& exact) {
  return std::abs(to_double(to_rational(x) - exact));
}

inline double rel_error(trotter::ext::ExtReal x, const cpp_rational& exact) {
  if (exact == 0) return abs_error(x, exact);
  return std::abs(to_double((to_rational(x) - exact) / exact));
}

// Fixed-point numbers with kBits fractional bits.
constexpr unsigned kBits = 256;
inline cpp_int one() { return cpp_int(1) << kBits; }
inline cpp_int mul(const cpp_int& a, const cpp_int& b) { return a * b / one(); }
inline cpp_rational to_q(const cpp_int& fixed) { return cpp_rational(fixed, one()); }
inline cpp_int to_fixed(const cpp_rational& q) {
  return boost::multiprecision::numerator(q) * one() / boost::multiprecision::denominator(q);
}

/// atan(1/x) by its alternating series.
inline cpp_int atan_inv(unsigned x) {
  cpp_int sum = 0;
  cpp_int power = one() / x;
  const cpp_int x2 = cpp_int(x) * x;
  for (unsigned k = 0; power != 0; ++k) {
    const cpp_int term = power / (2 * k + 1);
    sum += (k % 2 == 0) ? term : cpp_int(-term);
    power /= x2;
  }
  return sum;
}

/// pi = 16 atan(1/5) - 4 atan(1/239).
inline const cpp_int& pi() {
  static const cpp_int v = 16 * atan_inv(5) - 4 * atan_inv(239);
  return v;
}

/// e = sum 1/k!.
inline cpp_int e() {
  cpp_int sum = 0;
  cpp_int term = one();
  for (unsigned k = 1; term != 0; ++k) {
    sum += term;
    term /= k;
  }
  return sum;
}

/// ln 2 = 2 atanh(1/3).
inline cpp_int ln2() {
  cpp_int sum = 0;
  cpp_int power = one() / 3;
  for (unsigned k = 0; power != 0; ++k) {
    sum += power / (2 * k + 1);
    power /= 9;
  }
  return 2 * sum;
}

/// floor(sqrt(v)) in fixed point, for an integer v.
inline cpp_int sqrt_int(unsigned v) { return boost::multiprecision::sqrt(cpp_int(v) << (2 * kBits)); }

struct CosSin {
  cpp_int cos;
  cpp_int sin;
};

/// cos and sin of a fixed-point angle with |x| <= 4, by Taylor series.
inline CosSin cos_sin(const cpp_int& angle) {
  const bool negative = angle < 0;
  const cpp_int x = negative ? cpp_int(-angle) : angle;
  CosSin out{0, 0};
  cpp_int term = one();  // x^k / k!
  for (unsigned k = 0; term != 0; ++k) {
    const cpp_int signed_term = ((k / 2) % 2 == 0) ? term : cpp_int(-term);
    if (k % 2 == 0) {
      out.cos += signed_term;
    } else {
      out.sin += signed_term;
    }
    term = mul(term, x) / (k + 1);
  }
  if (negative) out.sin = -out.sin;
  return out;
}

/// cos and sin of pi num / den with the numerator reduced into (-den, den].
inline CosSin cos_sin_pi(std::int64_t num, std::int64_t den) {
  return cos_sin(pi() * num / den);
}

}  // namespace oracle
