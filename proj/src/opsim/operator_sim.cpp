#include "trotter/operator_sim.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <set>

namespace trotter::opsim {

namespace {

constexpr double kPi = std::numbers::pi;

// exp(i pi x) with x reduced modulo 2 first.
Complex unit_phase_pi(double x) {
  x -= 2.0 * std::floor(x / 2.0);
  return std::polar(1.0, kPi * x);
}

}  // namespace

Partition Partition::uniform(int depth) { return {Layout::uniform, depth}; }
Partition Partition::bands(int depth) { return {Layout::lacunary_bands, depth}; }

std::size_t Partition::size() const {
  return layout == Layout::uniform ? std::size_t{1} << depth : static_cast<std::size_t>(depth) + 1;
}

double Partition::width(std::size_t cell) const {
  if (layout == Layout::uniform) return std::ldexp(1.0, -depth);
  // Band cells are stored k = 1..depth first, then the residual cell.
  return cell < static_cast<std::size_t>(depth) ? std::ldexp(1.0, -static_cast<int>(cell + 1))
                                                : std::ldexp(1.0, -depth);
}

int Partition::band(std::size_t cell) const {
  if (layout == Layout::lacunary_bands) {
    return cell < static_cast<std::size_t>(depth) ? static_cast<int>(cell + 1) : 0;
  }
  if (cell == 0) return 0;
  // Cell [j 2^-D, (j+1) 2^-D) lies in band k = D - floor(log2 j).
  return depth - static_cast<int>(std::bit_width(cell)) + 1;
}

GridFunction::GridFunction(Partition partition, std::vector<Complex> values)
    : partition_(partition), values_(std::move(values)) {
  if (values_.size() != partition_.size()) {
    throw std::invalid_argument("grid function size does not match its partition");
  }
}

GridFunction GridFunction::constant(Partition partition, Complex value) {
  return {partition, std::vector<Complex>(partition.size(), value)};
}

double FourierFunction::evaluate(double x) const {
  CompensatedSum<double> s;
  s.add(constant_term);
  for (const auto& [w, a] : cos_coeffs) s.add(a * std::cos(static_cast<double>(w) * x));
  for (const auto& [w, b] : sin_coeffs) s.add(b * std::sin(static_cast<double>(w) * x));
  return s.value();
}

Complex inner_product(const GridFunction& f, const GridFunction& g) {
  if (!(f.partition() == g.partition())) {
    throw std::invalid_argument("inner product of grid functions on different partitions");
  }
  const Partition& p = f.partition();
  CompensatedSum<Complex> s;
  if (p.layout == Layout::uniform) {
    for (std::size_t j = 0; j < f.size(); ++j) s.add(f.values()[j] * std::conj(g.values()[j]));
    return s.value() * p.width(0);
  }
  for (std::size_t j = 0; j < f.size(); ++j) {
    s.add(p.width(j) * f.values()[j] * std::conj(g.values()[j]));
  }
  return s.value();
}

double inner_product(const FourierFunction& f, const FourierFunction& g) {
  CompensatedSum<double> s;
  s.add(2.0 * kPi * f.constant_term * g.constant_term);
  auto modes = [&s](const std::map<std::uint64_t, double>& a, const std::map<std::uint64_t, double>& b) {
    for (const auto& [w, x] : a) {
      if (auto it = b.find(w); it != b.end()) s.add(kPi * x * it->second);
    }
  };
  modes(f.cos_coeffs, g.cos_coeffs);
  modes(f.sin_coeffs, g.sin_coeffs);
  return s.value();
}

double norm(const GridFunction& f) { return std::sqrt(inner_product(f, f).real()); }
double norm(const FourierFunction& f) { return std::sqrt(inner_product(f, f)); }

GridFunction scaled(const GridFunction& f, Complex a) {
  GridFunction out = f;
  for (auto& v : out.values()) v *= a;
  return out;
}

FourierFunction scaled(const FourierFunction& f, double a) {
  FourierFunction out = f;
  out.constant_term *= a;
  for (auto& [w, c] : out.cos_coeffs) c *= a;
  for (auto& [w, c] : out.sin_coeffs) c *= a;
  return out;
}

GridFunction difference(const GridFunction& f, const GridFunction& g) {
  if (!(f.partition() == g.partition())) {
    throw std::invalid_argument("difference of grid functions on different partitions");
  }
  GridFunction out = f;
  for (std::size_t j = 0; j < out.size(); ++j) out.values()[j] -= g.values()[j];
  return out;
}

FourierFunction difference(const FourierFunction& f, const FourierFunction& g) {
  FourierFunction out = f;
  out.constant_term -= g.constant_term;
  for (const auto& [w, c] : g.cos_coeffs) out.cos_coeffs[w] -= c;
  for (const auto& [w, c] : g.sin_coeffs) out.sin_coeffs[w] -= c;
  return out;
}

double MultiplicationSemigroup::h(std::size_t cell) const {
  return kPi * band_h_over_pi[static_cast<std::size_t>(partition.band(cell))];
}

GridFunction MultiplicationSemigroup::apply(double t, const GridFunction& f) const {
  if (!(f.partition() == partition)) {
    throw std::invalid_argument("multiplication semigroup applied on a different partition");
  }
  std::vector<Complex> phase(band_h_over_pi.size());
  for (std::size_t k = 0; k < phase.size(); ++k) phase[k] = unit_phase_pi(t * band_h_over_pi[k]);
  GridFunction out = f;
  for (std::size_t j = 0; j < out.size(); ++j) {
    out.values()[j] *= phase[static_cast<std::size_t>(partition.band(j))];
  }
  return out;
}

namespace {

MultiplicationSemigroup make_h(Partition p) {
  MultiplicationSemigroup s{p, std::vector<double>(static_cast<std::size_t>(p.depth) + 1, 0.0)};
  for (int k = 1; k <= p.depth; ++k) s.band_h_over_pi[static_cast<std::size_t>(k)] = std::ldexp(1.0, k);
  return s;
}

}  // namespace

MultiplicationSemigroup build_h(int depth) {
  if (depth < 4 || depth > 24) throw std::invalid_argument("grid depth must lie in [4, 24]");
  return make_h(Partition::uniform(depth));
}

MultiplicationSemigroup build_h_bands(int depth) {
  if (depth < 4 || depth > 1000) throw std::invalid_argument("band depth must lie in [4, 1000]");
  return make_h(Partition::bands(depth));
}

FourierFunction TranslationSemigroup::apply(double t, const FourierFunction& f) const {
  FourierFunction out;
  out.constant_term = f.constant_term;
  std::set<std::uint64_t> freqs;
  for (const auto& [w, c] : f.cos_coeffs) freqs.insert(w);
  for (const auto& [w, c] : f.sin_coeffs) freqs.insert(w);
  for (std::uint64_t w : freqs) {
    const auto ci = f.cos_coeffs.find(w);
    const auto si = f.sin_coeffs.find(w);
    const double a = ci == f.cos_coeffs.end() ? 0.0 : ci->second;
    const double b = si == f.sin_coeffs.end() ? 0.0 : si->second;
    // Shift by 2 pi t rotates mode w by 2 pi (w t mod 1).
    const Complex rot = unit_phase_pi(2.0 * (static_cast<double>(w) * t - std::floor(static_cast<double>(w) * t)));
    out.cos_coeffs[w] = a * rot.real() + b * rot.imag();
    out.sin_coeffs[w] = b * rot.real() - a * rot.imag();
  }
  return out;
}

FourierFunction DiffusionSemigroup::apply(double t, const FourierFunction& f) const {
  FourierFunction out = f;
  for (auto& [w, c] : out.cos_coeffs) c *= std::exp(-t * static_cast<double>(w) * static_cast<double>(w));
  for (auto& [w, c] : out.sin_coeffs) c *= std::exp(-t * static_cast<double>(w) * static_cast<double>(w));
  return out;
}

double DiffusionSemigroup::overlap_deficit(double t, const FourierFunction& u) const {
  CompensatedSum<double> s;
  auto modes = [&](const std::map<std::uint64_t, double>& coeffs) {
    for (const auto& [w, c] : coeffs) {
      const double w2 = static_cast<double>(w) * static_cast<double>(w);
      s.add(-kPi * c * c * std::expm1(-t * w2));
    }
  };
  modes(u.cos_coeffs);
  modes(u.sin_coeffs);
  return s.value();
}

FourierFunction build_g(int k_max) {
  if (k_max < 8 || k_max > 50) throw std::invalid_argument("k_max must lie in [8, 50]");
  const double scale = 1.0 / std::sqrt(34.0 * kPi);
  FourierFunction g;
  g.constant_term = 4.0 * scale;
  for (int k = 0; k <= k_max; ++k) {
    g.cos_coeffs[std::uint64_t{1} << k] = std::pow(2.0, -0.5 * k) * scale;
  }
  return g;
}

namespace detail {

Complex scalar_power(Complex z, std::uint64_t k, std::uint64_t n) {
  if (k == 0) return 1.0;
  if (z == Complex(0.0)) return 0.0;
  const double modulus = std::abs(z);
  const double phase = static_cast<double>(k) * std::arg(z);
  if (std::abs(1.0 - modulus) > 10.0 / static_cast<double>(n)) {
    return std::polar(std::pow(modulus, static_cast<double>(k)), phase);
  }
  // |z|^2 - 1 formed from d = 1 - z: -2 Re d + |d|^2.
  const ext::ExtReal dre = 1.0 - z.real();
  const ext::ExtReal dim = -z.imag();
  const ext::ExtReal arg = -2 * dre + (dre * dre + dim * dim);
  const ext::ExtReal log_mod = ext::ExtReal(k) / 2 * ext::log1p(arg);
  return std::polar(ext::exp(log_mod).to_double(), phase);
}

double scalar_power(double z, std::uint64_t k, std::uint64_t n) {
  if (k == 0) return 1.0;
  if (z == 0.0) return 0.0;
  const Complex p = scalar_power(Complex(z), k, n);
  return z < 0 && (k % 2 == 1) ? -std::abs(p) : std::abs(p);
}

}  // namespace detail

std::string to_string(ConvergenceKind k) {
  switch (k) {
    case ConvergenceKind::converged: return "converged";
    case ConvergenceKind::oscillating: return "oscillating";
    case ConvergenceKind::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string subsequence_label(std::uint64_t n) {
  if (n != 0 && std::has_single_bit(n)) return "2^m";
  if (n % 3 == 0 && std::has_single_bit(n / 3)) return "3*2^m";
  return "";
}

HilbertPreset hilbert_preset(int depth, bool bands) {
  MultiplicationSemigroup s = bands ? build_h_bands(depth) : build_h(depth);
  GridFunction one = GridFunction::constant(s.partition, 1.0);
  return {s, RankOneProjection<GridFunction>(one), one};
}

TranslationPreset lp_preset(int k_max) {
  FourierFunction g = build_g(k_max);
  return {TranslationSemigroup{}, RankOneProjection<FourierFunction>(g), g};
}

FourierFunction default_control_axis() {
  FourierFunction u;
  const double scale = 1.0 / (2.0 * std::sqrt(kPi));
  u.constant_term = scale;
  u.cos_coeffs[1] = scale;
  u.cos_coeffs[2] = scale;
  return u;
}

std::vector<std::uint64_t> default_control_schedule() {
  std::vector<std::uint64_t> s;
  for (int m = 10; m <= 30; ++m) s.push_back(std::uint64_t{1} << m);
  return s;
}

PositiveControl positive_control(double t, const std::vector<std::uint64_t>& schedule, double threshold,
                                 const FourierFunction& axis) {
  if (std::abs(norm(axis) - 1.0) > kUnitTolerance) {
    throw std::invalid_argument("positive control axis must have unit norm");
  }
  PositiveControl pc;
  CompensatedSum<double> q;
  for (const auto& [w, c] : axis.cos_coeffs) q.add(static_cast<double>(w) * static_cast<double>(w) * kPi * c * c);
  for (const auto& [w, c] : axis.sin_coeffs) q.add(static_cast<double>(w) * static_cast<double>(w) * kPi * c * c);
  pc.q = q.value();
  pc.expected_limit = ext::exp(-ext::ExtReal(t) * ext::ExtReal(pc.q));

  const DiffusionSemigroup s;
  pc.verdict.threshold = threshold;
  bool increasing = schedule.size() >= 4;
  for (std::size_t i = 1; i < schedule.size(); ++i) increasing = increasing && schedule[i] > schedule[i - 1];
  if (!increasing || schedule.front() == 0) return pc;

  for (std::uint64_t n : schedule) {
    const double deficit = s.overlap_deficit(t / static_cast<double>(n), axis);
    const ext::ExtReal trace = ext::ExtReal(n) * ext::log1p(-ext::ExtReal(deficit));
    pc.sequence.push_back({n, ext::exp(trace)});
    pc.verdict.iterate_norms.emplace_back(n, pc.sequence.back().value.to_double());
  }
  for (std::size_t i = 0; i + 1 < pc.sequence.size(); ++i) {
    const ext::ExtReal d = ext::abs(pc.sequence[i + 1].value - pc.sequence[i].value);
    pc.verdict.cauchy_table.push_back({pc.sequence[i].n, pc.sequence[i + 1].n, d.to_double()});
  }
  pc.limit_estimate = pc.sequence.back().value;

  const auto& table = pc.verdict.cauchy_table;
  const std::size_t c = table.size();
  bool converged = true;
  for (std::size_t i = c - 3; i < c; ++i) {
    if (!(table[i].difference < threshold)) converged = false;
    if (i > c - 3 && table[i].difference > table[i - 1].difference) converged = false;
  }
  if (converged) {
    pc.verdict.kind = ConvergenceKind::converged;
    pc.verdict.limit_norm_estimate = pc.limit_estimate.to_double();
  }
  return pc;
}

}  // namespace trotter::opsim
