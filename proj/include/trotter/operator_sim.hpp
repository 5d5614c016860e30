#pragma once

// Direct simulation of the Trotter-projection iteration [S(t/n) P]^n f on
// two discretized carriers:
//
//  * GridFunction    -- piecewise-constant functions on a dyadic partition
//                       of [0,1], acted on by multiplication semigroups.
//  * FourierFunction -- real trigonometric polynomials on [0, 2 pi] with
//                       sparse coefficients, acted on by translation and
//                       diffusion semigroups.
//
// Carrier arithmetic is in double precision; the delicate n -> infinity
// scalar analysis lives in lacunary.hpp.

#include <complex>
#include <concepts>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "trotter/extprec.hpp"

namespace trotter::opsim {

using Complex = std::complex<double>;

/// Neumaier-compensated running sum.
template <typename T>
class CompensatedSum {
 public:
  void add(T value) {
    const T t = sum_ + value;
    if (magnitude(sum_) >= magnitude(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
  }
  T value() const { return sum_ + compensation_; }

 private:
  static double magnitude(double x) { return x < 0 ? -x : x; }
  T sum_{};
  T compensation_{};
};

template <>
class CompensatedSum<Complex> {
 public:
  void add(Complex v) {
    re_.add(v.real());
    im_.add(v.imag());
  }
  Complex value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum<double> re_;
  CompensatedSum<double> im_;
};

// ---------------------------------------------------------------------------
// Dyadic partitions of [0, 1].

enum class Layout {
  uniform,         // 2^depth equal cells
  lacunary_bands,  // cells (2^-k, 2^-(k-1)] for k = 1..depth, plus [0, 2^-depth]
};

struct Partition {
  Layout layout = Layout::uniform;
  int depth = 0;

  static Partition uniform(int depth);
  static Partition bands(int depth);

  std::size_t size() const;
  double width(std::size_t cell) const;
  /// Band index k of the cell, or 0 for the residual cell at the origin.
  int band(std::size_t cell) const;

  friend bool operator==(const Partition&, const Partition&) = default;
};

class GridFunction {
 public:
  using Scalar = Complex;

  GridFunction() = default;
  GridFunction(Partition partition, std::vector<Complex> values);
  static GridFunction constant(Partition partition, Complex value);

  const Partition& partition() const { return partition_; }
  const std::vector<Complex>& values() const { return values_; }
  std::vector<Complex>& values() { return values_; }
  std::size_t size() const { return values_.size(); }

 private:
  Partition partition_;
  std::vector<Complex> values_;
};

/// Real function c0 + sum_w (a_w cos wx + b_w sin wx) on [0, 2 pi].
struct FourierFunction {
  using Scalar = double;

  double constant_term = 0.0;
  std::map<std::uint64_t, double> cos_coeffs;
  std::map<std::uint64_t, double> sin_coeffs;

  double evaluate(double x) const;
};

Complex inner_product(const GridFunction& f, const GridFunction& g);
double inner_product(const FourierFunction& f, const FourierFunction& g);
double norm(const GridFunction& f);
double norm(const FourierFunction& f);

GridFunction scaled(const GridFunction& f, Complex a);
FourierFunction scaled(const FourierFunction& f, double a);
GridFunction difference(const GridFunction& f, const GridFunction& g);
FourierFunction difference(const FourierFunction& f, const FourierFunction& g);

template <typename F>
concept Carrier = requires(const F& f, typename F::Scalar a) {
  { inner_product(f, f) } -> std::same_as<typename F::Scalar>;
  { norm(f) } -> std::same_as<double>;
  { scaled(f, a) } -> std::same_as<F>;
  { difference(f, f) } -> std::same_as<F>;
};

// ---------------------------------------------------------------------------
// Semigroups.

/// (S(t) f)(x) = exp(i t h(x)) f(x) with h constant on each dyadic band:
/// h = 2^k pi on (2^-k, 2^-(k-1)], h = 0 on the residual cell at the origin.
struct MultiplicationSemigroup {
  using Function = GridFunction;

  Partition partition;
  /// h / pi per band index (index 0 is the residual cell).
  std::vector<double> band_h_over_pi;

  double h(std::size_t cell) const;
  GridFunction apply(double t, const GridFunction& f) const;
};

/// Uniform grid with 2^depth cells, 4 <= depth <= 24.
MultiplicationSemigroup build_h(int depth);
/// Lacunary band partition with `depth` bands, 4 <= depth <= 1000.
MultiplicationSemigroup build_h_bands(int depth);

/// (S(t) f)(x) = f(x + 2 pi t).
struct TranslationSemigroup {
  using Function = FourierFunction;
  FourierFunction apply(double t, const FourierFunction& f) const;
};

/// Fourier multiplier exp(-t w^2): the self-adjoint contraction semigroup
/// generated by d^2/dx^2.
struct DiffusionSemigroup {
  using Function = FourierFunction;
  FourierFunction apply(double t, const FourierFunction& f) const;
  /// 1 - <S(t) u, u> for unit u, without cancellation.
  double overlap_deficit(double t, const FourierFunction& u) const;
};

template <typename S>
concept Semigroup = Carrier<typename S::Function> &&
    requires(const S& s, double t, const typename S::Function& f) {
      { s.apply(t, f) } -> std::same_as<typename S::Function>;
    };

template <Semigroup S>
typename S::Function apply_semigroup(const S& s, double t, const typename S::Function& f) {
  if (!(t >= 0)) throw std::invalid_argument("semigroup time must be non-negative");
  return s.apply(t, f);
}

/// g(x) = (34 pi)^(-1/2) [4 + sum_{k=0}^{k_max} 2^(-k/2) cos(2^k x)], 8 <= k_max <= 50.
FourierFunction build_g(int k_max);

// ---------------------------------------------------------------------------
// Rank-one projections and the Trotter iteration.

inline constexpr double kUnitTolerance = 1e-12;

template <Carrier F>
class RankOneProjection {
 public:
  explicit RankOneProjection(F axis) : axis_(std::move(axis)) {
    if (std::abs(norm(axis_) - 1.0) > kUnitTolerance) {
      throw std::invalid_argument("projection axis must have unit norm");
    }
  }
  const F& axis() const { return axis_; }
  F apply(const F& f) const { return scaled(axis_, inner_product(f, axis_)); }

 private:
  F axis_;
};

template <Carrier F>
F project(const RankOneProjection<F>& p, const F& f) {
  return p.apply(f);
}

/// Literal n-fold loop f <- S(t/n) (P f).  The observer, when given, sees
/// every intermediate iterate.
template <Semigroup S>
typename S::Function trotter_iterate(
    const S& s, const RankOneProjection<typename S::Function>& p, double t, std::uint64_t n,
    typename S::Function f,
    const std::function<void(std::uint64_t, const typename S::Function&)>& observer = {}) {
  if (n == 0) throw std::invalid_argument("trotter_iterate needs n >= 1");
  const double step = t / static_cast<double>(n);
  for (std::uint64_t i = 1; i <= n; ++i) {
    f = apply_semigroup(s, step, p.apply(f));
    if (observer) observer(i, f);
  }
  return f;
}

namespace detail {
/// z^k, through extended precision when |z| is within 10/n of 1.
Complex scalar_power(Complex z, std::uint64_t k, std::uint64_t n);
double scalar_power(double z, std::uint64_t k, std::uint64_t n);
}  // namespace detail

/// <f,u> <S(t/n)u, u>^(n-1) S(t/n) u, the closed form of trotter_iterate
/// when P is the orthogonal projection onto span{u}.
template <Semigroup S>
typename S::Function rank_one_reduction(const S& s, const typename S::Function& u, double t,
                                        std::uint64_t n, const typename S::Function& f) {
  if (n == 0) throw std::invalid_argument("rank_one_reduction needs n >= 1");
  if (std::abs(norm(u) - 1.0) > kUnitTolerance) {
    throw std::invalid_argument("rank_one_reduction needs a unit axis");
  }
  const auto v = apply_semigroup(s, t / static_cast<double>(n), u);
  const auto z = inner_product(v, u);
  const auto a = inner_product(f, u);
  return scaled(v, a * detail::scalar_power(z, n - 1, n));
}

// ---------------------------------------------------------------------------
// Convergence probe.

enum class ConvergenceKind { converged, oscillating, inconclusive };
std::string to_string(ConvergenceKind k);

struct CauchyRecord {
  std::uint64_t n = 0;
  std::uint64_t next_n = 0;
  double difference = 0.0;  // ||f_next - f_n||
};

struct SubsequenceWitness {
  std::string label;  // "2^m" or "3*2^m"
  std::uint64_t n = 0;
  double norm = 0.0;
};

struct ConvergenceVerdict {
  ConvergenceKind kind = ConvergenceKind::inconclusive;
  double threshold = 0.0;
  std::optional<double> limit_norm_estimate;  // converged only
  std::optional<SubsequenceWitness> witness_a;
  std::optional<SubsequenceWitness> witness_b;
  double separation = 0.0;
  std::vector<CauchyRecord> cauchy_table;
  std::vector<std::pair<std::uint64_t, double>> iterate_norms;
};

enum class IterationMode { reduction, literal };

/// "2^m", "3*2^m" or "" for n outside both subsequences.
std::string subsequence_label(std::uint64_t n);

/// Classifies a sequence of iterates, given as (n, iterate) in schedule order.
///   converged    -- the last three Cauchy differences are non-increasing and
///                   all below the threshold;
///   oscillating  -- the largest-n iterates of the 2^m and 3*2^m subsequences
///                   differ in norm by at least the threshold;
///   inconclusive -- otherwise, or for schedules that are not strictly
///                   increasing or have fewer than four entries.
/// Verdicts are numerical evidence, not proofs.
template <Carrier F>
ConvergenceVerdict classify_iterates(const std::vector<std::pair<std::uint64_t, F>>& iterates,
                                     double threshold) {
  ConvergenceVerdict v;
  v.threshold = threshold;
  if (iterates.size() < 4) return v;
  for (std::size_t i = 1; i < iterates.size(); ++i) {
    if (iterates[i].first <= iterates[i - 1].first) return v;
  }
  for (const auto& [n, f] : iterates) v.iterate_norms.emplace_back(n, norm(f));
  for (std::size_t i = 0; i + 1 < iterates.size(); ++i) {
    v.cauchy_table.push_back({iterates[i].first, iterates[i + 1].first,
                              norm(difference(iterates[i + 1].second, iterates[i].second))});
  }
  const std::size_t c = v.cauchy_table.size();
  bool converged = true;
  for (std::size_t i = c - 3; i < c; ++i) {
    if (!(v.cauchy_table[i].difference < threshold)) converged = false;
    if (i > c - 3 && v.cauchy_table[i].difference > v.cauchy_table[i - 1].difference) {
      converged = false;
    }
  }
  if (converged) {
    v.kind = ConvergenceKind::converged;
    v.limit_norm_estimate = v.iterate_norms.back().second;
    return v;
  }
  for (const auto& [n, value] : v.iterate_norms) {
    const std::string label = subsequence_label(n);
    if (label == "2^m") v.witness_a = SubsequenceWitness{label, n, value};
    if (label == "3*2^m") v.witness_b = SubsequenceWitness{label, n, value};
  }
  if (v.witness_a && v.witness_b) {
    v.separation = std::abs(v.witness_a->norm - v.witness_b->norm);
    if (v.separation >= threshold) v.kind = ConvergenceKind::oscillating;
  }
  return v;
}

template <Semigroup S>
ConvergenceVerdict convergence_probe(const S& s, const RankOneProjection<typename S::Function>& p,
                                     double t, const typename S::Function& f,
                                     const std::vector<std::uint64_t>& schedule, double threshold,
                                     IterationMode mode = IterationMode::reduction) {
  std::vector<std::pair<std::uint64_t, typename S::Function>> iterates;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] == 0 || (i > 0 && schedule[i] <= schedule[i - 1])) {
      ConvergenceVerdict v;
      v.threshold = threshold;
      return v;
    }
  }
  for (std::uint64_t n : schedule) {
    iterates.emplace_back(n, mode == IterationMode::reduction
                                 ? rank_one_reduction(s, p.axis(), t, n, f)
                                 : trotter_iterate(s, p, t, n, f));
  }
  return classify_iterates(iterates, threshold);
}

// ---------------------------------------------------------------------------
// Presets.

struct HilbertPreset {
  MultiplicationSemigroup semigroup;
  RankOneProjection<GridFunction> projection;
  GridFunction start;  // the constant function 1
};

/// Multiplication by exp(i t h) with P f = (integral of f) 1, on the uniform
/// grid (bands = false) or on the lacunary band partition (bands = true).
HilbertPreset hilbert_preset(int depth, bool bands);

struct TranslationPreset {
  TranslationSemigroup semigroup;
  RankOneProjection<FourierFunction> projection;
  FourierFunction start;  // g itself
};

TranslationPreset lp_preset(int k_max);

/// (1 + cos x + cos 2x) / (2 sqrt(pi)).
FourierFunction default_control_axis();

struct ScalarRecord {
  std::uint64_t n = 0;
  ext::ExtReal value;  // <S(t/n)u, u>^n
};

struct PositiveControl {
  double q = 0.0;               // sum_w w^2 |u_w|^2 (Parseval weights)
  ext::ExtReal expected_limit;  // exp(-t q)
  ext::ExtReal limit_estimate;  // last scalar in the schedule
  std::vector<ScalarRecord> sequence;
  ConvergenceVerdict verdict;
};

std::vector<std::uint64_t> default_control_schedule();

/// Diffusion semigroup with the projection onto span{u}: the convergent
/// regime.  The scalar sequence <S(t/n)u,u>^n is tracked in extended
/// precision and compared against exp(-t q).
PositiveControl positive_control(double t, const std::vector<std::uint64_t>& schedule,
                                 double threshold = 1e-6,
                                 const FourierFunction& axis = default_control_axis());

}  // namespace trotter::opsim
