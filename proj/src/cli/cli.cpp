#include "trotter/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "trotter/operator_sim.hpp"

namespace trotter::cli {

namespace {

using ext::ExtComplex;
using ext::ExtReal;
using lacunary::CnSample;
using lacunary::Model;
using opsim::Complex;

std::string dec(ExtReal x) { return ext::to_decimal(x, kDecimalDigits); }
std::string dec(double x) { return dec(ExtReal(x)); }

constexpr std::string_view kLpScalingNote =
    "L_p subsequence limits scale as exp(-C/17) with C the Hilbert deviation constants "
    "(1 - c_lp = (1 - Re c_hilbert)/17); divergence is certified from the computed gap, "
    "no doubled-exponent constants are asserted.";
constexpr std::string_view kTransientNote =
    "3*2^m powers exceed exp(-(6+pi^2/6-pi^4/4536)) by more than 1e-3 relative for m <= 18; "
    "the asserted per-m check is the explicit finite-m envelope, the asymptotic ratio is "
    "reported per m.";

CnSample sample_from_double(std::uint64_t n, Complex z) {
  const ExtComplex value{z.real(), z.imag()};
  return lacunary::make_sample(n, value, ExtComplex{ExtReal(1) - value.re, -value.im});
}

std::string csv_escape(std::string_view s) { return std::string(s); }

// Hilbert or L_p simulator against the closed forms at t = 1.
struct SimulationResult {
  Model model = Model::hilbert;
  int resolution = 0;  // grid depth or k_max
  std::uint64_t n = 0;
  CnSample simulated;
  CnSample closed;
  double delta = 0.0;
  double bound = 0.0;
  std::optional<double> iteration_delta;
  bool pass = false;
};

SimulationResult simulate_hilbert(int depth, std::uint64_t n) {
  const auto preset = opsim::hilbert_preset(depth, false);
  const auto v = opsim::apply_semigroup(preset.semigroup, 1.0 / static_cast<double>(n), preset.start);
  const Complex z = opsim::inner_product(v, preset.start);
  SimulationResult r;
  r.model = Model::hilbert;
  r.resolution = depth;
  r.n = n;
  r.simulated = sample_from_double(n, z);
  r.closed = lacunary::cn_hilbert(n);
  r.delta = std::abs(z - Complex(r.closed.value.re.to_double(), r.closed.value.im.to_double()));
  r.bound = 2.5 * std::ldexp(1.0, -depth);
  if (n * preset.start.size() <= (std::uint64_t{1} << 27)) {
    const auto literal = opsim::trotter_iterate(preset.semigroup, preset.projection, 1.0, n, preset.start);
    const auto reduced = opsim::rank_one_reduction(preset.semigroup, preset.projection.axis(), 1.0, n, preset.start);
    r.iteration_delta = opsim::norm(opsim::difference(literal, reduced));
  }
  r.pass = r.delta <= r.bound && (!r.iteration_delta || *r.iteration_delta <= 1e-12);
  return r;
}

SimulationResult simulate_lp(int k_max, std::uint64_t n) {
  const auto preset = opsim::lp_preset(k_max);
  const auto v = opsim::apply_semigroup(preset.semigroup, 1.0 / static_cast<double>(n), preset.start);
  const double z = opsim::inner_product(preset.start, v);
  SimulationResult r;
  r.model = Model::lp;
  r.resolution = k_max;
  r.n = n;
  r.simulated = sample_from_double(n, Complex(z, 0.0));
  r.closed = lacunary::cn_lp(n);
  r.delta = std::abs(z - r.closed.value.re.to_double());
  r.bound = 1e-11;
  if (n <= (std::uint64_t{1} << 16)) {
    const auto literal = opsim::trotter_iterate(preset.semigroup, preset.projection, 1.0, n, preset.start);
    const auto reduced = opsim::rank_one_reduction(preset.semigroup, preset.projection.axis(), 1.0, n, preset.start);
    r.iteration_delta = opsim::norm(opsim::difference(literal, reduced));
  }
  r.pass = r.delta <= r.bound && (!r.iteration_delta || *r.iteration_delta <= 1e-12);
  return r;
}

Json simulation_json(const SimulationResult& r) {
  Json j;
  j["kind"] = "simulation";
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["model"] = lacunary::to_string(r.model);
  j[r.model == Model::hilbert ? "depth" : "modes"] = r.resolution;
  j["n"] = r.n;
  j["t"] = dec(1.0);
  j["simulator"] = record_json(r.simulated, r.model, Source::simulator);
  j["closed"] = record_json(r.closed, r.model, Source::cycle_exact);
  j["delta"] = dec(r.delta);
  j["bound"] = dec(r.bound);
  j["iteration_delta"] = r.iteration_delta ? Json(dec(*r.iteration_delta)) : Json(nullptr);
  j["pass"] = r.pass;
  return j;
}

std::string simulation_csv(const SimulationResult& r) {
  std::ostringstream os;
  os << "model,n,simulated_re,simulated_im,closed_re,closed_im,delta,bound,pass\n";
  os << lacunary::to_string(r.model) << ',' << r.n << ',' << dec(r.simulated.value.re) << ','
     << dec(r.simulated.value.im) << ',' << dec(r.closed.value.re) << ',' << dec(r.closed.value.im) << ','
     << dec(r.delta) << ',' << dec(r.bound) << ',' << (r.pass ? "true" : "false") << '\n';
  return os.str();
}

std::vector<std::uint64_t> control_schedule(std::uint64_t n) {
  return {n / 8, n / 4, n / 2, n};
}

Json control_json(const opsim::PositiveControl& pc, double t, std::uint64_t n) {
  Json j;
  j["kind"] = "control";
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["model"] = "control";
  j["n"] = n;
  j["t"] = dec(t);
  j["verdict"] = opsim::to_string(pc.verdict.kind);
  j["threshold"] = dec(pc.verdict.threshold);
  j["q"] = dec(pc.q);
  j["expected_limit"] = dec(pc.expected_limit);
  j["limit_estimate"] = dec(pc.limit_estimate);
  j["limit_delta"] = dec(ext::abs(pc.limit_estimate - pc.expected_limit));
  Json table = Json::array();
  for (const auto& c : pc.verdict.cauchy_table) {
    table.push_back({{"n", c.n}, {"next_n", c.next_n}, {"difference", dec(c.difference)}});
  }
  j["cauchy_table"] = table;
  j["final_cauchy_difference"] =
      pc.verdict.cauchy_table.empty() ? Json(nullptr) : Json(dec(pc.verdict.cauchy_table.back().difference));
  return j;
}

Json bound_constants_json(const lacunary::BoundConstants& b) {
  return {{"lower_exponent", dec(b.lower_exponent)},
          {"upper_exponent", dec(b.upper_exponent)},
          {"lower_bound", dec(b.lower_bound)},
          {"upper_bound", dec(b.upper_bound)}};
}

class OutputSink {
 public:
  OutputSink(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty()) file_.emplace(path, std::ios::binary);
  }
  bool ok() const { return !file_ || file_->good(); }
  std::ostream& stream() { return file_ ? static_cast<std::ostream&>(*file_) : fallback_; }

 private:
  std::ostream& fallback_;
  std::optional<std::ofstream> file_;
};

void emit_json(std::ostream& os, const Json& j) { os << j.dump(2) << '\n'; }

}  // namespace

std::string_view to_string(Source s) {
  switch (s) {
    case Source::closed_form: return "closed_form";
    case Source::cycle_exact: return "cycle_exact";
    case Source::simulator: return "simulator";
  }
  return "simulator";
}

Json record_json(const CnSample& s, Model model, Source source) {
  Json j;
  j["n"] = s.n;
  j["re"] = dec(s.value.re);
  j["im"] = dec(s.value.im);
  j["abs"] = dec(ext::abs(s.value));
  j["trace"] = dec(s.trace);
  j["power"] = dec(s.power);
  j["model"] = lacunary::to_string(model);
  j["source"] = to_string(source);
  return j;
}

std::string record_csv_header() { return "n,re,im,abs,trace,power,model,source"; }

std::string record_csv_row(const CnSample& s, Model model, Source source) {
  std::ostringstream os;
  os << s.n << ',' << dec(s.value.re) << ',' << dec(s.value.im) << ',' << dec(ext::abs(s.value)) << ','
     << dec(s.trace) << ',' << dec(s.power) << ',' << lacunary::to_string(model) << ','
     << csv_escape(to_string(source));
  return os.str();
}

Json certificate_json(const lacunary::DivergenceCertificate& cert) {
  Json j;
  j["kind"] = "certificate";
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["parameters"] = {{"model", lacunary::to_string(cert.model)},
                     {"m_lo", cert.m_lo},
                     {"m_hi", cert.m_hi},
                     {"margin", dec(cert.margin)}};
  j["model"] = lacunary::to_string(cert.model);
  j["m_range"] = {cert.m_lo, cert.m_hi};
  j["liminf_estimate"] = dec(cert.liminf_estimate);
  j["limsup_estimate"] = dec(cert.limsup_estimate);
  j["gap"] = dec(cert.gap);
  j["pow2_spread"] = dec(cert.pow2_spread);
  j["three_pow2_spread"] = dec(cert.three_pow2_spread);
  j["verdict"] = lacunary::to_string(cert.verdict);
  j["bound_constants"] = bound_constants_json(lacunary::bound_constants());
  Json pow2 = Json::array();
  for (const auto& s : cert.pow2) pow2.push_back(record_json(s, cert.model, Source::closed_form));
  Json three = Json::array();
  for (const auto& s : cert.three_pow2) three.push_back(record_json(s, cert.model, Source::closed_form));
  j["pow2_samples"] = pow2;
  j["three_pow2_samples"] = three;
  Json checks = Json::array();
  for (const auto& c : cert.bound_checks) {
    checks.push_back({{"m", c.m},
                      {"asserted", c.asserted},
                      {"lower_pass", c.lower_pass},
                      {"lower_slack", dec(c.lower_slack)},
                      {"envelope_pass", c.envelope_pass},
                      {"envelope", dec(c.envelope)},
                      {"asymptotic_pass", c.asymptotic_pass},
                      {"asymptotic_ratio", dec(c.asymptotic_ratio)}});
  }
  j["bound_checks"] = checks;
  j["notes"] = cert.model == Model::lp ? Json::array({kLpScalingNote}) : Json::array({kTransientNote});
  return j;
}

std::string certificate_csv(const lacunary::DivergenceCertificate& cert) {
  std::ostringstream os;
  os << "m,pow2_power,three_pow2_power,asserted,lower_pass,envelope,envelope_pass,asymptotic_ratio,"
        "asymptotic_pass\n";
  for (std::size_t i = 0; i < cert.pow2.size(); ++i) {
    os << cert.m_lo + static_cast<int>(i) << ',' << dec(cert.pow2[i].power) << ','
       << dec(cert.three_pow2[i].power);
    if (i < cert.bound_checks.size()) {
      const auto& c = cert.bound_checks[i];
      os << ',' << (c.asserted ? "true" : "false") << ',' << (c.lower_pass ? "true" : "false") << ','
         << dec(c.envelope) << ',' << (c.envelope_pass ? "true" : "false") << ',' << dec(c.asymptotic_ratio)
         << ',' << (c.asymptotic_pass ? "true" : "false");
    } else {
      os << ",,,,,,";
    }
    os << '\n';
  }
  return os.str();
}

bool parse_m_range(std::string_view text, int& lo, int& hi) {
  auto parse_int = [](std::string_view s, int& v) {
    if (s.empty()) return false;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    return ec == std::errc() && ptr == end;
  };
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) {
    if (!parse_int(text, lo)) return false;
    hi = lo;
    return true;
  }
  return parse_int(text.substr(0, dots), lo) && parse_int(text.substr(dots + 2), hi);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lacunary Trotter-projection counterexamples: exact c_n, divergence certificates, simulators",
               std::string(kToolName)};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::string model_text = "hilbert";
  std::string format = "json";
  std::string out_path;
  std::uint64_t n = 0;
  std::string subseq_text;
  std::string m_text = "10..40";
  std::optional<std::string> margin;
  int depth = 16;
  int modes = 40;
  double t = 1.0;
  std::optional<double> threshold;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", out_path, "Write output to FILE instead of standard output");
  };

  auto* cn = app.add_subcommand("cn", "Evaluate c_n exactly");
  cn->add_option("--model", model_text, "hilbert or lp")->required()->check(CLI::IsMember({"hilbert", "lp"}));
  cn->add_option("--n", n, "Trotter step count")->required()->check(CLI::Range(std::uint64_t{1}, lacunary::kMaxN));
  add_common(cn);

  auto* scan = app.add_subcommand("scan", "Scan the 2^m or 3*2^m subsequence");
  scan->add_option("--model", model_text, "hilbert or lp")->required()->check(CLI::IsMember({"hilbert", "lp"}));
  scan->add_option("--subseq", subseq_text, "pow2 or 3pow2")->required()->check(CLI::IsMember({"pow2", "3pow2"}));
  scan->add_option("--m", m_text, "Range LO..HI with 1 <= LO <= HI <= 50")->required();
  add_common(scan);

  auto* certify = app.add_subcommand("certify", "Certify divergence of |c_n|^n");
  certify->add_option("--model", model_text, "hilbert or lp")->check(CLI::IsMember({"hilbert", "lp"}));
  certify->add_option("--m", m_text, "Range LO..HI (default 10..40)");
  certify->add_option("--margin", margin, "Required gap (default 5e-4 hilbert, 0.04 lp)")
      ->check(CLI::PositiveNumber);
  add_common(certify);

  auto* simulate = app.add_subcommand("simulate", "Simulate the Trotter-projection iteration");
  simulate->add_option("--model", model_text, "hilbert, lp or control")
      ->check(CLI::IsMember({"hilbert", "lp", "control"}));
  simulate->add_option("--depth", depth, "Grid depth D (hilbert)")->check(CLI::Range(4, 24));
  simulate->add_option("--modes", modes, "Highest lacunary mode k_max (lp)")->check(CLI::Range(8, 50));
  simulate->add_option("--n", n, "Trotter step count")->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 40));
  simulate->add_option("--t", t, "Time (control only; hilbert and lp use t = 1)")->check(CLI::NonNegativeNumber);
  simulate->add_option("--threshold", threshold, "Cauchy threshold for the control verdict (default 1e-2)")
      ->check(CLI::PositiveNumber);
  add_common(simulate);

  auto* report = app.add_subcommand("report", "Full reproduction report (json)");
  report->add_option("--out", out_path, "Write output to FILE instead of standard output");

  std::vector<const char*> argv;
  argv.push_back(kToolName.data());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  auto usage = [&](const std::string& message, CLI::App* sub) {
    err << message << "\n\n" << sub->help();
    return kExitUsage;
  };

  OutputSink sink(out_path, out);
  if (!sink.ok()) {
    err << "cannot open output file " << out_path << '\n';
    return kExitUsage;
  }
  std::ostream& os = sink.stream();
  const Model model = lacunary::parse_model(model_text).value_or(Model::hilbert);

  try {
    if (cn->parsed()) {
      const CnSample s = model == Model::hilbert ? lacunary::cn_hilbert(n) : lacunary::cn_lp(n);
      if (format == "csv") {
        os << record_csv_header() << '\n' << record_csv_row(s, model, Source::cycle_exact) << '\n';
      } else {
        os << record_json(s, model, Source::cycle_exact).dump() << '\n';
      }
      return kExitOk;
    }

    if (scan->parsed()) {
      int lo = 0;
      int hi = 0;
      if (!parse_m_range(m_text, lo, hi) || lo < 1 || hi > lacunary::kMaxM || lo > hi) {
        return usage("invalid --m range: " + m_text, scan);
      }
      const auto subseq = *lacunary::parse_subsequence(subseq_text);
      const auto samples = lacunary::subsequence_scan(model, subseq, lo, hi);
      if (format == "csv") os << record_csv_header() << '\n';
      for (const auto& s : samples) {
        if (format == "csv") {
          os << record_csv_row(s, model, Source::closed_form) << '\n';
        } else {
          os << record_json(s, model, Source::closed_form).dump() << '\n';
        }
      }
      return kExitOk;
    }

    if (certify->parsed()) {
      int lo = 0;
      int hi = 0;
      if (!parse_m_range(m_text, lo, hi) || lo < 1 || hi > lacunary::kMaxM || lo > hi) {
        return usage("invalid --m range: " + m_text, certify);
      }
      const ExtReal m = ext::from_decimal(margin.value_or(model == Model::hilbert ? "5e-4" : "0.04"));
      const auto cert = lacunary::certify_divergence(model, lo, hi, m);
      if (format == "csv") {
        os << certificate_csv(cert);
      } else {
        emit_json(os, certificate_json(cert));
      }
      return cert.verdict == lacunary::Verdict::diverges ? kExitOk : kExitCheckFailed;
    }

    if (simulate->parsed()) {
      if (model_text == "control") {
        const std::uint64_t steps = n == 0 ? 1024 : n;
        if (steps < 8 || steps % 8 != 0) return usage("control needs --n divisible by 8", simulate);
        const auto pc = opsim::positive_control(t, control_schedule(steps), threshold.value_or(1e-2));
        if (format == "csv") {
          os << "model,n,t,verdict,expected_limit,limit_estimate\n"
             << "control," << steps << ',' << dec(t) << ',' << opsim::to_string(pc.verdict.kind) << ','
             << dec(pc.expected_limit) << ',' << dec(pc.limit_estimate) << '\n';
        } else {
          emit_json(os, control_json(pc, t, steps));
        }
        return pc.verdict.kind == opsim::ConvergenceKind::converged ? kExitOk : kExitCheckFailed;
      }
      if (t != 1.0) return usage("hilbert and lp simulations run at t = 1", simulate);
      const std::uint64_t steps = n == 0 ? 64 : n;
      if (steps > lacunary::kMaxN) return usage("--n out of range", simulate);
      const SimulationResult r = model == Model::hilbert ? simulate_hilbert(depth, steps) : simulate_lp(modes, steps);
      if (format == "csv") {
        os << simulation_csv(r);
      } else {
        emit_json(os, simulation_json(r));
      }
      return r.pass ? kExitOk : kExitCheckFailed;
    }

    if (report->parsed()) {
      bool all_pass = true;
      Json j;
      j["kind"] = "report";
      j["tool"] = kToolName;
      j["version"] = kToolVersion;
      j["bound_constants"] = bound_constants_json(lacunary::bound_constants());
      Json certs = Json::array();
      for (const auto& [mdl, mg] : {std::pair{Model::hilbert, "5e-4"}, std::pair{Model::lp, "0.04"}}) {
        const auto cert = lacunary::certify_divergence(mdl, 10, 40, ext::from_decimal(mg));
        all_pass = all_pass && cert.verdict == lacunary::Verdict::diverges;
        certs.push_back({{"model", lacunary::to_string(mdl)},
                         {"m_range", {10, 40}},
                         {"margin", dec(cert.margin)},
                         {"liminf_estimate", dec(cert.liminf_estimate)},
                         {"limsup_estimate", dec(cert.limsup_estimate)},
                         {"gap", dec(cert.gap)},
                         {"pow2_spread", dec(cert.pow2_spread)},
                         {"three_pow2_spread", dec(cert.three_pow2_spread)},
                         {"verdict", lacunary::to_string(cert.verdict)}});
      }
      j["certificates"] = certs;
      Json sims = Json::array();
      for (std::uint64_t steps : {2, 3, 4, 64, 256, 1024}) {
        for (const auto& r : {simulate_hilbert(16, steps), simulate_lp(40, steps)}) {
          all_pass = all_pass && r.pass;
          sims.push_back({{"model", lacunary::to_string(r.model)},
                          {"n", r.n},
                          {"delta", dec(r.delta)},
                          {"bound", dec(r.bound)},
                          {"pass", r.pass}});
        }
      }
      j["simulations"] = sims;
      const auto pc = opsim::positive_control(1.0, opsim::default_control_schedule());
      all_pass = all_pass && pc.verdict.kind == opsim::ConvergenceKind::converged;
      j["positive_control"] = control_json(pc, 1.0, opsim::default_control_schedule().back());
      j["notes"] = Json::array({kLpScalingNote, kTransientNote});
      j["pass"] = all_pass;
      emit_json(os, j);
      return all_pass ? kExitOk : kExitCheckFailed;
    }
  } catch (const std::invalid_argument& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace trotter::cli
