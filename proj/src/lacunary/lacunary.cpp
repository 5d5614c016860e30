#include "trotter/lacunary.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <stdexcept>
#include <string>

#include "number_theory.hpp"

namespace trotter::lacunary {

namespace {

// Beyond this many terms the remaining tail is below 2^-160 in modulus.
constexpr std::uint64_t kMaxTerms = 160;

ExtReal neg_infinity() {
  return ExtReal::from_raw(-std::numeric_limits<double>::infinity());
}

// exp(trace) for any trace <= 0, including values below exp's contract range.
ExtReal power_from_trace(ExtReal trace) {
  if (!ext::isfinite(trace)) return ExtReal(0);
  if (trace >= -700) return ext::exp(trace);
  int chunks = 1;
  while (trace / chunks < -700) chunks *= 2;
  ExtReal p = ext::exp(trace / chunks);
  for (int c = 1; c < chunks; c *= 2) p = p * p;
  return p;
}

}  // namespace

CnSample make_sample(std::uint64_t n, ExtComplex value, ExtComplex one_minus) {
  CnSample s{n, value, one_minus, {}, {}};
  const ExtReal arg = ext::modulus_sq_minus_one(one_minus);
  if (arg <= -1 || (value.re == 0 && value.im == 0)) {
    s.trace = neg_infinity();
  } else {
    s.trace = ExtReal(n) / 2 * ext::log1p(arg);
  }
  s.power = power_from_trace(s.trace);
  return s;
}

namespace {

CnSample make_real_sample(std::uint64_t n, ExtReal value, ExtReal one_minus) {
  CnSample s{n, {value, 0}, {one_minus, 0}, {}, {}};
  // value >= 15/17 for the L_p model, so log1p(-one_minus) is well defined.
  s.trace = ExtReal(n) * ext::log1p(-one_minus);
  s.power = power_from_trace(s.trace);
  return s;
}

struct SeriesSum {
  ExtComplex value;
  ExtComplex one_minus;
};

// One term 2^-k e^{i theta} and its contribution 2^-k (1 - e^{i theta}),
// where theta = pi r / n is reduced into (-pi, pi].
void add_term(SeriesSum& acc, std::uint64_t residue, std::uint64_t n, int k, ExtReal scale) {
  const auto r = static_cast<std::int64_t>(residue);
  const auto den = static_cast<std::int64_t>(n);
  const std::int64_t signed_num = r > den ? r - 2 * den : r;
  const ext::SinCos sc = ext::sincos_pi_ratio(signed_num, den);
  const ExtReal w = ext::ldexp(scale, -k);
  acc.value += {w * sc.cos, w * sc.sin};
  acc.one_minus += {w * sc.one_minus_cos, -(w * sc.sin)};
}

SeriesSum lacunary_series(std::uint64_t n) {
  const CycleDecomposition cyc = cycle_of_two_mod(n);
  const std::uint64_t p = cyc.preperiod.size();
  SeriesSum acc;
  if (p + cyc.period <= kMaxTerms) {
    for (std::uint64_t k = 1; k <= p; ++k) {
      add_term(acc, cyc.preperiod[k - 1], n, static_cast<int>(k), ExtReal(1));
    }
    // Tail sum_{k>p} = (one period) / (1 - 2^-L).
    const auto period = static_cast<int>(cyc.period);
    const ExtReal closure = ext::ldexp(ExtReal(1), period) / (ext::ldexp(ExtReal(1), period) - 1);
    for (std::uint64_t i = 0; i < cyc.period; ++i) {
      add_term(acc, cyc.cycle[i], n, static_cast<int>(p + 1 + i), closure);
    }
  } else {
    std::uint64_t r = 1;
    for (std::uint64_t k = 1; k <= kMaxTerms; ++k) {
      r = (2 * r) % cyc.modulus;
      add_term(acc, r, n, static_cast<int>(k), ExtReal(1));
    }
  }
  return acc;
}

void check_n(std::uint64_t n) {
  if (n < 1 || n > kMaxN) throw std::invalid_argument("n must lie in [1, 2^50], got " + std::to_string(n));
}

void check_m(int m, int lo) {
  if (m < lo || m > kMaxM) {
    throw std::invalid_argument("m must lie in [" + std::to_string(lo) + ", 50], got " + std::to_string(m));
  }
}

}  // namespace

std::uint64_t CycleDecomposition::residue(std::uint64_t k) const {
  if (k == 0) throw std::invalid_argument("residue index starts at 1");
  if (k <= preperiod.size()) return preperiod[k - 1];
  if (cycle_listed()) return cycle[(k - preperiod.size() - 1) % period];
  return detail::pow_mod(2, k, modulus);
}

CycleDecomposition cycle_of_two_mod(std::uint64_t n) {
  check_n(n);
  CycleDecomposition d;
  d.n = n;
  d.modulus = 2 * n;
  const int a = std::countr_zero(d.modulus);
  const std::uint64_t odd = d.modulus >> a;
  std::uint64_t r = 1;
  for (int k = 1; k < a; ++k) {
    r = (2 * r) % d.modulus;
    d.preperiod.push_back(r);
  }
  d.period = detail::order_of_two(odd);
  if (d.period <= CycleDecomposition::kMaxListedPeriod) {
    for (std::uint64_t i = 0; i < d.period; ++i) {
      r = (2 * r) % d.modulus;
      d.cycle.push_back(r);
    }
  }
  return d;
}

CnSample cn_hilbert(std::uint64_t n) {
  check_n(n);
  const SeriesSum s = lacunary_series(n);
  return make_sample(n, s.value, s.one_minus);
}

CnSample cn_lp(std::uint64_t n) {
  check_n(n);
  const SeriesSum s = lacunary_series(n);
  const ExtReal value = ExtReal(16) / 17 + s.value.re / 17;
  return make_real_sample(n, value, s.one_minus.re / 17);
}

CnSample lp_from_hilbert(const CnSample& h) {
  return make_real_sample(h.n, ExtReal(16) / 17 + h.value.re / 17, h.one_minus.re / 17);
}

CnSample cn_hilbert_subseq_pow2(int m) {
  check_m(m, 1);
  SeriesSum acc;
  for (int k = 1; k <= m - 1; ++k) {
    const ext::SinCos sc = ext::cospi_frac(static_cast<unsigned>(m - k), 1);
    const ExtReal w = ext::ldexp(ExtReal(1), -k);
    acc.value += {w * sc.cos, w * sc.sin};
    acc.one_minus += {w * sc.one_minus_cos, -(w * sc.sin)};
  }
  acc.one_minus.re += ext::ldexp(ExtReal(1), -(m - 1));
  return make_sample(std::uint64_t{1} << m, acc.value, acc.one_minus);
}

ExtComplex third_tail_sum() {
  // Orbit of 2^k mod 6 is 2, 4, 2, 4, ...: angles 2pi/3, 4pi/3 = -2pi/3.
  const ext::SinCos sc = ext::sincos_pi_ratio(2, 3);
  const ExtComplex even{sc.cos, -sc.sin};
  const ExtComplex odd{sc.cos, sc.sin};
  // (1/2 odd + 1/4 even) / (1 - 1/4)
  const ExtComplex period = ExtReal(0.5) * odd + ExtReal(0.25) * even;
  return ExtReal(4) / 3 * period;
}

CnSample cn_hilbert_subseq_3pow2(int m) {
  check_m(m, 1);
  SeriesSum acc;
  for (int k = 1; k <= m - 1; ++k) {
    const ext::SinCos sc = ext::cospi_frac(static_cast<unsigned>(m - k), 3);
    const ExtReal w = ext::ldexp(ExtReal(1), -k);
    acc.value += {w * sc.cos, w * sc.sin};
    acc.one_minus += {w * sc.one_minus_cos, -(w * sc.sin)};
  }
  // k = m term (1/2^m) e^{i pi/3} plus the tail (1/2^m) (-1/2 + i sqrt3/6)
  // collapse to i 2 sqrt3 / (3 2^m).
  const ExtReal correction = ext::ldexp(ExtReal(2) / ext::sqrt(ExtReal(3)), -m);
  acc.value.im += correction;
  acc.one_minus.re += ext::ldexp(ExtReal(1), -(m - 1));
  acc.one_minus.im -= correction;
  return make_sample(3 * (std::uint64_t{1} << m), acc.value, acc.one_minus);
}

EnvelopeCheck envelope_check_pow2(int m) {
  check_m(m, 2);
  const CnSample c = cn_hilbert_subseq_pow2(m);
  const ExtReal pi2 = ext::pi() * ext::pi();
  const ExtReal bound = ExtReal(1) - ext::ldexp(4 + pi2 / 4, -m) + ext::ldexp(pi2, -2 * m);
  const ExtReal slack = ext::abs(c.value) - bound;
  return {m, slack >= 0, slack};
}

EnvelopeCheck envelope_check_3pow2(int m) {
  check_m(m, 2);
  const CnSample c = cn_hilbert_subseq_3pow2(m);
  const ExtReal bound = ext::ldexp(ExtReal(m + 1) * ext::pi() / 3, -m);
  const ExtReal slack = bound - ext::abs(c.value.im);
  return {m, slack >= 0, slack};
}

BoundConstants bound_constants() {
  const ExtReal pi2 = ext::pi() * ext::pi();
  BoundConstants b;
  b.lower_exponent = 4 + pi2 / 4;
  b.upper_exponent = 6 + pi2 / 6 - pi2 * pi2 / (27 * 24 * 7);
  b.lower_bound = ext::exp(-b.lower_exponent);
  b.upper_bound = ext::exp(-b.upper_exponent);
  return b;
}

ExtReal upper_envelope_3pow2(int m) {
  check_m(m, 1);
  const std::uint64_t n = 3 * (std::uint64_t{1} << m);
  // Re bound R = 1 - delta, delta = sum 2^-k (a^2/2 - a^4/24) + 2^-(m-1).
  ExtReal delta = ext::ldexp(ExtReal(1), -(m - 1));
  for (int k = 1; k <= m - 1; ++k) {
    const ExtReal a = ext::ldexp(ext::pi() / 3, k - m);
    const ExtReal a2 = a * a;
    delta += ext::ldexp(a2 / 2 - a2 * a2 / 24, -k);
  }
  const ExtReal im = ext::ldexp(ExtReal(m + 1) * ext::pi() / 3, -m);
  // R^2 + I^2 - 1 = -2 delta + delta^2 + I^2
  const ExtReal arg = -2 * delta + delta * delta + im * im;
  return power_from_trace(ExtReal(n) / 2 * ext::log1p(arg));
}

std::string_view to_string(Model m) { return m == Model::hilbert ? "hilbert" : "lp"; }
std::string_view to_string(Subsequence s) { return s == Subsequence::pow2 ? "pow2" : "3pow2"; }
std::string_view to_string(Verdict v) { return v == Verdict::diverges ? "diverges" : "inconclusive"; }

std::optional<Model> parse_model(std::string_view s) {
  if (s == "hilbert") return Model::hilbert;
  if (s == "lp") return Model::lp;
  return std::nullopt;
}

std::optional<Subsequence> parse_subsequence(std::string_view s) {
  if (s == "pow2") return Subsequence::pow2;
  if (s == "3pow2" || s == "three_pow2") return Subsequence::three_pow2;
  return std::nullopt;
}

std::vector<CnSample> subsequence_scan(Model model, Subsequence subseq, int m_lo, int m_hi) {
  if (m_lo < 1 || m_hi > kMaxM || m_lo > m_hi) {
    throw std::invalid_argument("scan range must satisfy 1 <= m_lo <= m_hi <= 50");
  }
  std::vector<CnSample> out;
  out.reserve(static_cast<std::size_t>(m_hi - m_lo + 1));
  for (int m = m_lo; m <= m_hi; ++m) {
    CnSample s = subseq == Subsequence::pow2 ? cn_hilbert_subseq_pow2(m) : cn_hilbert_subseq_3pow2(m);
    out.push_back(model == Model::hilbert ? s : lp_from_hilbert(s));
  }
  return out;
}

namespace {

ExtReal tail_spread(const std::vector<CnSample>& samples) {
  const std::size_t count = std::min<std::size_t>(3, samples.size());
  ExtReal lo = samples.back().power;
  ExtReal hi = lo;
  for (std::size_t i = samples.size() - count; i < samples.size(); ++i) {
    lo = std::min(lo, samples[i].power);
    hi = std::max(hi, samples[i].power);
  }
  return hi - lo;
}

}  // namespace

Verdict recompute_verdict(const DivergenceCertificate& cert) {
  if (cert.pow2.empty() || cert.three_pow2.empty()) return Verdict::inconclusive;
  ExtReal liminf = cert.pow2.front().power;
  for (const auto& s : cert.pow2) liminf = std::min(liminf, s.power);
  ExtReal limsup = cert.three_pow2.front().power;
  for (const auto& s : cert.three_pow2) limsup = std::max(limsup, s.power);
  if (!(liminf - limsup >= cert.margin)) return Verdict::inconclusive;
  for (const auto& c : cert.bound_checks) {
    if (c.asserted && !(c.lower_pass && c.envelope_pass)) return Verdict::inconclusive;
  }
  return Verdict::diverges;
}

DivergenceCertificate certify_divergence(Model model, int m_lo, int m_hi, ExtReal margin) {
  if (!(margin > 0)) throw std::invalid_argument("margin must be positive");
  DivergenceCertificate cert;
  cert.model = model;
  cert.m_lo = m_lo;
  cert.m_hi = m_hi;
  cert.margin = margin;
  cert.pow2 = subsequence_scan(model, Subsequence::pow2, m_lo, m_hi);
  cert.three_pow2 = subsequence_scan(model, Subsequence::three_pow2, m_lo, m_hi);

  cert.liminf_estimate = cert.pow2.front().power;
  for (const auto& s : cert.pow2) cert.liminf_estimate = std::min(cert.liminf_estimate, s.power);
  cert.limsup_estimate = cert.three_pow2.front().power;
  for (const auto& s : cert.three_pow2) cert.limsup_estimate = std::max(cert.limsup_estimate, s.power);
  cert.gap = cert.liminf_estimate - cert.limsup_estimate;
  cert.pow2_spread = tail_spread(cert.pow2);
  cert.three_pow2_spread = tail_spread(cert.three_pow2);

  if (model == Model::hilbert) {
    const BoundConstants bc = bound_constants();
    const ExtReal asymptotic_limit = bc.upper_bound * (1 + ExtReal(DivergenceCertificate::kAsymptoticTolerance));
    for (int m = m_lo; m <= m_hi; ++m) {
      const auto i = static_cast<std::size_t>(m - m_lo);
      BoundCheck c;
      c.m = m;
      c.asserted = m >= DivergenceCertificate::kAssertFromM;
      c.lower_slack = cert.pow2[i].power - bc.lower_bound;
      c.lower_pass = c.lower_slack > 0;
      c.envelope = upper_envelope_3pow2(m);
      c.envelope_pass = cert.three_pow2[i].power <= c.envelope;
      c.asymptotic_ratio = cert.three_pow2[i].power / bc.upper_bound;
      c.asymptotic_pass = cert.three_pow2[i].power <= asymptotic_limit;
      cert.bound_checks.push_back(c);
    }
  }
  cert.verdict = recompute_verdict(cert);
  return cert;
}

}  // namespace trotter::lacunary
