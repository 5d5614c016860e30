#pragma once

// Scalar sequences c_n of the lacunary Trotter counterexamples.
//
// Hilbert variant:  c_n = sum_{k>=1} 2^-k exp(i pi 2^k / n)
// L_p variant:      c_n = 16/17 + (1/17) sum_{k>=1} 2^-k cos(pi 2^k / n)
//
// Every sample carries 1 - c_n accumulated term by term, so that the trace
// n log|c_n| stays accurate when |c_n| = 1 - O(1/n) and n is as large as 2^50.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "trotter/extprec.hpp"

namespace trotter::lacunary {

using ext::ExtComplex;
using ext::ExtReal;

inline constexpr std::uint64_t kMaxN = std::uint64_t{1} << 50;
inline constexpr int kMaxM = 50;

struct CnSample {
  std::uint64_t n = 0;
  ExtComplex value;
  ExtComplex one_minus;  // 1 - value, accumulated without cancellation
  ExtReal trace;         // n log|value|; -inf when value == 0
  ExtReal power;         // |value|^n
};

/// Orbit of k -> 2^k mod 2n for k >= 1.
///
/// With 2n = 2^a * odd the orbit has minimal preperiod a - 1 and minimal
/// period ord_odd(2).  The cycle residues are listed only when the period
/// is at most kMaxListedPeriod; residue() works in every case.
struct CycleDecomposition {
  static constexpr std::uint64_t kMaxListedPeriod = 4096;

  std::uint64_t n = 0;
  std::uint64_t modulus = 0;
  std::vector<std::uint64_t> preperiod;
  std::uint64_t period = 0;
  std::vector<std::uint64_t> cycle;

  bool cycle_listed() const { return cycle.size() == period; }
  /// 2^k mod 2n, k >= 1.
  std::uint64_t residue(std::uint64_t k) const;
};

CycleDecomposition cycle_of_two_mod(std::uint64_t n);

/// Fills trace and power from value and the separately accumulated 1 - value.
CnSample make_sample(std::uint64_t n, ExtComplex value, ExtComplex one_minus);

CnSample cn_hilbert(std::uint64_t n);
CnSample cn_lp(std::uint64_t n);

/// c_{2^m} from the finite closed form sum_{k=1}^{m-1} 2^-k exp(i pi 2^k/2^m).
CnSample cn_hilbert_subseq_pow2(int m);
/// c_{3 2^m} from sum_{k=1}^{m-1} 2^-k exp(i pi 2^k/(3 2^m)) + i 2 sqrt(3)/(3 2^m).
CnSample cn_hilbert_subseq_3pow2(int m);

/// sum_{k>=1} 2^-k exp(i pi 2^k / 3), folded into the 3 2^m closed form.
ExtComplex third_tail_sum();

struct EnvelopeCheck {
  int m = 0;
  bool pass = false;
  ExtReal slack;  // >= 0 iff pass
};

/// |c_{2^m}| >= 1 - (4 + pi^2/4)/2^m + pi^2/4^m.
EnvelopeCheck envelope_check_pow2(int m);
/// |Im c_{3 2^m}| <= (m+1) pi / (3 2^m).
EnvelopeCheck envelope_check_3pow2(int m);

struct BoundConstants {
  ExtReal lower_exponent;  // 4 + pi^2/4
  ExtReal upper_exponent;  // 6 + pi^2/6 - pi^4/(27*24*7)
  ExtReal lower_bound;     // exp(-lower_exponent)
  ExtReal upper_bound;     // exp(-upper_exponent)
};

BoundConstants bound_constants();

/// Explicit finite-m upper bound on |c_{3 2^m}|^{3 2^m} obtained from
/// cos a <= 1 - a^2/2 + a^4/24 on the real part and sin a <= a on the
/// imaginary part, before any limit is taken.
ExtReal upper_envelope_3pow2(int m);

enum class Model { hilbert, lp };
enum class Subsequence { pow2, three_pow2 };

std::string_view to_string(Model m);
std::string_view to_string(Subsequence s);
std::optional<Model> parse_model(std::string_view s);
std::optional<Subsequence> parse_subsequence(std::string_view s);

/// Converts a Hilbert sample into the L_p sample with the same n:
/// c = 16/17 + Re(c_H)/17 and 1 - c = Re(1 - c_H)/17.
CnSample lp_from_hilbert(const CnSample& hilbert);

/// Samples for m = m_lo..m_hi, ordered by m.  Both models use the closed
/// forms; pre 1 <= m_lo <= m_hi <= 50.
std::vector<CnSample> subsequence_scan(Model model, Subsequence subseq, int m_lo, int m_hi);

struct BoundCheck {
  int m = 0;
  bool asserted = false;         // m >= kAssertFromM
  bool lower_pass = false;       // power(2^m) > exp(-lower_exponent)
  ExtReal lower_slack;
  bool envelope_pass = false;    // power(3 2^m) <= upper_envelope_3pow2(m)
  ExtReal envelope;
  bool asymptotic_pass = false;  // power(3 2^m) <= exp(-upper_exponent) (1 + 1e-3)
  ExtReal asymptotic_ratio;      // power(3 2^m) / exp(-upper_exponent)
};

enum class Verdict { diverges, inconclusive };
std::string_view to_string(Verdict v);

struct DivergenceCertificate {
  static constexpr int kAssertFromM = 10;
  static constexpr double kAsymptoticTolerance = 1e-3;

  Model model = Model::hilbert;
  int m_lo = 0;
  int m_hi = 0;
  ExtReal margin;
  std::vector<CnSample> pow2;
  std::vector<CnSample> three_pow2;
  ExtReal liminf_estimate;  // min over pow2 powers
  ExtReal limsup_estimate;  // max over three_pow2 powers
  ExtReal gap;
  // Max - min of the powers over the last three m of each subsequence.
  ExtReal pow2_spread;
  ExtReal three_pow2_spread;
  std::vector<BoundCheck> bound_checks;  // hilbert only
  Verdict verdict = Verdict::inconclusive;
};

DivergenceCertificate certify_divergence(Model model, int m_lo, int m_hi, ExtReal margin);

/// Verdict recomputed from the certificate's own samples and checks.
Verdict recompute_verdict(const DivergenceCertificate& cert);

}  // namespace trotter::lacunary
