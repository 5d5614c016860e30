#pragma once

// Extended-precision real and complex scalars.
//
// ExtReal carries an IEEE binary128 value (113-bit significand, about 34
// significant decimal digits).  All arithmetic is performed in software by
// the compiler runtime, so results are bit-reproducible on a given platform
// regardless of optimisation flags, provided -ffast-math is not used.

#include <compare>
#include <concepts>
#include <cstdint>
#include <string>
#include <string_view>

#ifdef __FAST_MATH__
#error "extprec requires IEEE semantics; do not build with -ffast-math"
#endif

namespace trotter::ext {

class ExtReal {
 public:
  using Raw = __float128;

  constexpr ExtReal() = default;
  constexpr ExtReal(double v) : v_(v) {}  // NOLINT(google-explicit-constructor)
  template <std::integral I>
  constexpr ExtReal(I v) : v_(v) {}  // NOLINT(google-explicit-constructor)

  static constexpr ExtReal from_raw(Raw r) {
    ExtReal x;
    x.v_ = r;
    return x;
  }

  constexpr Raw raw() const { return v_; }
  constexpr double to_double() const { return static_cast<double>(v_); }

  constexpr ExtReal operator-() const { return from_raw(-v_); }
  constexpr ExtReal operator+() const { return *this; }

  ExtReal& operator+=(ExtReal o) { v_ += o.v_; return *this; }
  ExtReal& operator-=(ExtReal o) { v_ -= o.v_; return *this; }
  ExtReal& operator*=(ExtReal o) { v_ *= o.v_; return *this; }
  ExtReal& operator/=(ExtReal o);

  friend ExtReal operator+(ExtReal a, ExtReal b) { return from_raw(a.v_ + b.v_); }
  friend ExtReal operator-(ExtReal a, ExtReal b) { return from_raw(a.v_ - b.v_); }
  friend ExtReal operator*(ExtReal a, ExtReal b) { return from_raw(a.v_ * b.v_); }
  friend ExtReal operator/(ExtReal a, ExtReal b);

  friend constexpr bool operator==(ExtReal a, ExtReal b) { return a.v_ == b.v_; }
  friend constexpr std::partial_ordering operator<=>(ExtReal a, ExtReal b) {
    if (a.v_ < b.v_) return std::partial_ordering::less;
    if (a.v_ > b.v_) return std::partial_ordering::greater;
    if (a.v_ == b.v_) return std::partial_ordering::equivalent;
    return std::partial_ordering::unordered;
  }

 private:
  Raw v_ = 0;
};

struct ExtComplex {
  ExtReal re;
  ExtReal im;

  ExtComplex& operator+=(const ExtComplex& o) { re += o.re; im += o.im; return *this; }
  ExtComplex& operator-=(const ExtComplex& o) { re -= o.re; im -= o.im; return *this; }

  friend ExtComplex operator+(ExtComplex a, const ExtComplex& b) { return a += b; }
  friend ExtComplex operator-(ExtComplex a, const ExtComplex& b) { return a -= b; }
  friend ExtComplex operator-(const ExtComplex& a) { return {-a.re, -a.im}; }
  friend ExtComplex operator*(const ExtComplex& a, const ExtComplex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend ExtComplex operator*(ExtReal s, const ExtComplex& a) { return {s * a.re, s * a.im}; }
  friend ExtComplex operator/(const ExtComplex& a, const ExtComplex& b);
  friend bool operator==(const ExtComplex&, const ExtComplex&) = default;
};

/// Sine, cosine and the cancellation-free versine 1 - cos of one angle.
struct SinCos {
  ExtReal cos;
  ExtReal sin;
  ExtReal one_minus_cos;
};

// Elementary functions.  Argument errors are reported as std::invalid_argument,
// domain violations as std::domain_error and overflow as std::range_error.
ExtReal abs(ExtReal x);
ExtReal sqrt(ExtReal x);
ExtReal ldexp(ExtReal x, int e);
ExtReal exp(ExtReal x);    // |x| <= 700
ExtReal log1p(ExtReal x);  // x > -1
ExtReal log(ExtReal x);    // x > 0
bool isfinite(ExtReal x);

ExtReal pi();
ExtReal ln2();

/// (cos, sin, 1 - cos) of x for |x| <= pi.
SinCos sincos_small(ExtReal x);
ExtReal one_minus_cos(ExtReal x);

/// (cos, sin, 1 - cos) of pi / (q * 2^j), q in {1, 3}, j <= 64.
///
/// Evaluated by half-angle descent from the exact anchors cos(pi) = -1 and
/// cos(pi/3) = 1/2:
///   cos(t/2)     = sqrt((1 + cos t) / 2)
///   sin(t/2)     = sin t / (2 cos(t/2))
///   1 - cos(t/2) = sin^2(t/2) / (1 + cos(t/2))
/// so the relative error stays flat as the angle shrinks.
SinCos cospi_frac(unsigned j, unsigned q);

/// (cos, sin, 1 - cos) of pi * num / den for integers with |num| <= den.
/// The ratio is folded into [0, 1/2] with exact integer arithmetic before
/// any rounding happens.
SinCos sincos_pi_ratio(std::int64_t num, std::int64_t den);

ExtReal abs(const ExtComplex& z);
/// |z|^2 - 1 given d = 1 - z, formed as -2 Re d + |d|^2.
ExtReal modulus_sq_minus_one(const ExtComplex& one_minus_z);

/// Round-to-nearest scientific notation with `digits` significant digits
/// (1 <= digits <= 34).  Non-finite values print as "inf", "-inf", "nan".
std::string to_decimal(ExtReal x, int digits = 30);
/// Parses a decimal string produced by to_decimal (or any C literal).
ExtReal from_decimal(std::string_view s);

}  // namespace trotter::ext
