#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "trotter/cli.hpp"

using trotter::cli::Json;
namespace ext = trotter::ext;
namespace lac = trotter::lacunary;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  Result r;
  r.code = trotter::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<Json> json_lines(const std::string& text) {
  std::vector<Json> docs;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) docs.push_back(Json::parse(line));
  }
  return docs;
}

double num(const Json& j) { return ext::from_decimal(j.get<std::string>()).to_double(); }

}  // namespace

TEST_CASE("cn examples") {
  const Result c4 = run({"cn", "--model", "hilbert", "--n", "4"});
  CHECK(c4.code == 0);
  const Json j = Json::parse(c4.out);
  CHECK(j["n"] == 4);
  CHECK(std::abs(num(j["re"])) < 1e-30);
  CHECK(num(j["im"]) == 0.5);
  CHECK(j["model"] == "hilbert");
  CHECK(j["source"] == "cycle_exact");

  const Result lp1 = run({"cn", "--model", "lp", "--n", "1"});
  CHECK(lp1.code == 0);
  CHECK(num(Json::parse(lp1.out)["re"]) == 1.0);

  const Result csv = run({"cn", "--model", "hilbert", "--n", "4", "--format", "csv"});
  CHECK(csv.code == 0);
  CHECK(csv.out.rfind(trotter::cli::record_csv_header() + "\n4,", 0) == 0);
}

TEST_CASE("usage errors exit 2 with usage text") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"cn", "--model", "hilbert", "--n", "0"},
           {"cn", "--model", "hilbert", "--n", "1125899906842625"},
           {"cn", "--model", "hilbert"},
           {"cn", "--model", "banach", "--n", "3"},
           {"cn", "--model", "hilbert", "--n", "3", "--format", "xml"},
           {"scan", "--model", "hilbert", "--subseq", "pow2", "--m", "0..3"},
           {"scan", "--model", "hilbert", "--subseq", "pow2", "--m", "5..4"},
           {"scan", "--model", "hilbert", "--subseq", "pow2", "--m", "1..51"},
           {"scan", "--model", "hilbert", "--subseq", "pow3", "--m", "1..2"},
           {"certify", "--margin", "-1"},
           {"certify", "--m", "x..y"},
           {"simulate", "--model", "hilbert", "--depth", "3"},
           {"simulate", "--model", "lp", "--modes", "60"},
           {"simulate", "--model", "control", "--n", "100"},
           {"simulate", "--model", "hilbert", "--t", "2"},
           {"frobnicate"},
           {},
       }) {
    const Result r = run(args);
    CAPTURE(args.size());
    CHECK(r.code == 2);
    CHECK(r.out.empty());
    CHECK(r.err.find("Usage") != std::string::npos);
  }
}

TEST_CASE("help and version") {
  CHECK(run({"--help"}).code == 0);
  const Result v = run({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out == "1.0.0\n");
}

TEST_CASE("scan examples") {
  const Result pow2 = run({"scan", "--model", "hilbert", "--subseq", "pow2", "--m", "10..20"});
  CHECK(pow2.code == 0);
  const auto docs = json_lines(pow2.out);
  REQUIRE(docs.size() == 11);
  std::uint64_t previous = 0;
  for (const auto& d : docs) {
    CHECK(num(d["power"]) > 0.00154);
    CHECK(num(d["power"]) < 1.0);
    CHECK(d["source"] == "closed_form");
    CHECK(d["n"].get<std::uint64_t>() > previous);
    previous = d["n"].get<std::uint64_t>();
  }

  const Result three = run({"scan", "--model", "hilbert", "--subseq", "3pow2", "--m", "10..20"});
  CHECK(three.code == 0);
  const auto tdocs = json_lines(three.out);
  REQUIRE(tdocs.size() == 11);
  const double upper = lac::bound_constants().upper_bound.to_double();
  for (std::size_t i = 0; i < tdocs.size(); ++i) {
    // Powers decrease towards exp(-7.6234594) = 4.888e-4 from above.
    CHECK(num(tdocs[i]["power"]) > upper);
    CHECK(num(tdocs[i]["power"]) < 5.72e-4);
    if (i > 0) CHECK(num(tdocs[i]["power"]) < num(tdocs[i - 1]["power"]));
  }

  const Result single = run({"scan", "--model", "lp", "--subseq", "pow2", "--m", "1..1"});
  CHECK(json_lines(single.out).size() == 1);
  const Result one = run({"scan", "--model", "lp", "--subseq", "pow2", "--m", "7"});
  CHECK(json_lines(one.out).size() == 1);

  const Result csv = run({"scan", "--model", "lp", "--subseq", "3pow2", "--m", "1..4", "--format", "csv"});
  std::istringstream lines(csv.out);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "n,re,im,abs,trace,power,model,source");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  CHECK(rows == 4);
}

TEST_CASE("certify examples and exit codes") {
  const Result h = run({"certify", "--model", "hilbert", "--m", "10..40"});
  CHECK(h.code == 0);
  const Json hj = Json::parse(h.out);
  CHECK(hj["verdict"] == "diverges");
  CHECK(num(hj["gap"]) >= 5e-4);

  const Result defaults = run({"certify"});
  CHECK(defaults.code == 0);
  CHECK(defaults.out == h.out);

  const Result lp = run({"certify", "--model", "lp", "--m", "10..40", "--margin", "0.04"});
  CHECK(lp.code == 0);
  const Json lj = Json::parse(lp.out);
  CHECK(lj["verdict"] == "diverges");
  CHECK(lj["bound_checks"].empty());

  const Result small = run({"certify", "--model", "hilbert", "--m", "2..3", "--margin", "10"});
  CHECK(small.code == 1);
  CHECK(Json::parse(small.out)["verdict"] == "inconclusive");

  const Result csv = run({"certify", "--format", "csv"});
  CHECK(csv.code == 0);
  CHECK(csv.out.rfind("m,pow2_power,three_pow2_power,", 0) == 0);
}

TEST_CASE("certificate verdict recomputes from the embedded samples") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"certify", "--model", "hilbert"},
           {"certify", "--model", "lp", "--margin", "0.04"},
           {"certify", "--model", "hilbert", "--m", "2..3", "--margin", "10"},
           {"certify", "--model", "lp", "--m", "1..5", "--margin", "0.5"},
       }) {
    const Json j = Json::parse(run(args).out);
    const ext::ExtReal margin = ext::from_decimal(j["parameters"]["margin"].get<std::string>());
    ext::ExtReal liminf(1e9);
    for (const auto& s : j["pow2_samples"]) {
      liminf = std::min(liminf, ext::from_decimal(s["power"].get<std::string>()));
    }
    ext::ExtReal limsup(-1);
    for (const auto& s : j["three_pow2_samples"]) {
      limsup = std::max(limsup, ext::from_decimal(s["power"].get<std::string>()));
    }
    bool checks = true;
    for (const auto& c : j["bound_checks"]) {
      if (c["asserted"] && !(c["lower_pass"] && c["envelope_pass"])) checks = false;
    }
    const bool diverges = liminf - limsup >= margin && checks;
    CHECK(j["verdict"] == (diverges ? "diverges" : "inconclusive"));
    CHECK(std::abs((ext::from_decimal(j["gap"].get<std::string>()) - (liminf - limsup)).to_double()) < 1e-29);
  }
}

TEST_CASE("simulate examples") {
  const Result h = run({"simulate", "--model", "hilbert", "--depth", "16", "--n", "64"});
  CHECK(h.code == 0);
  const Json hj = Json::parse(h.out);
  CHECK(num(hj["delta"]) <= 2.5 * std::ldexp(1.0, -16));
  CHECK(hj["simulator"]["source"] == "simulator");
  CHECK(hj["pass"] == true);

  const Result lp = run({"simulate", "--model", "lp", "--modes", "40", "--n", "256"});
  CHECK(lp.code == 0);
  CHECK(num(Json::parse(lp.out)["delta"]) <= 1e-11);

  const Result control = run({"simulate", "--model", "control", "--n", "1024"});
  CHECK(control.code == 0);
  const Json cj = Json::parse(control.out);
  CHECK(cj["verdict"] == "converged");
  CHECK(cj["cauchy_table"].size() == 3);

  const Result strict = run({"simulate", "--model", "control", "--n", "1024", "--threshold", "1e-9"});
  CHECK(strict.code == 1);
  CHECK(Json::parse(strict.out)["verdict"] == "inconclusive");

  const Result csv = run({"simulate", "--model", "lp", "--n", "3", "--format", "csv"});
  CHECK(csv.code == 0);
  CHECK(csv.out.rfind("model,n,simulated_re,", 0) == 0);
}

TEST_CASE("decimal fields round-trip within 1e-27") {
  const Json j = Json::parse(run({"cn", "--model", "hilbert", "--n", "1000003"}).out);
  const auto s = lac::cn_hilbert(1000003);
  CHECK(std::abs((ext::from_decimal(j["re"].get<std::string>()) - s.value.re).to_double()) < 1e-27);
  CHECK(std::abs((ext::from_decimal(j["im"].get<std::string>()) - s.value.im).to_double()) < 1e-27);
  CHECK(std::abs((ext::from_decimal(j["power"].get<std::string>()) / s.power - 1).to_double()) < 1e-27);
}

TEST_CASE("repeated runs are byte-identical") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"scan", "--model", "hilbert", "--subseq", "3pow2", "--m", "1..45"},
           {"certify", "--model", "lp"},
           {"simulate", "--model", "hilbert", "--n", "3"},
       }) {
    CHECK(run(args).out == run(args).out);
  }
}

TEST_CASE("--out writes the document to a file") {
  const auto path = std::filesystem::temp_directory_path() / "trotter_cli_out_test.json";
  std::filesystem::remove(path);
  const Result r = run({"cn", "--model", "lp", "--n", "6", "--out", path.string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::stringstream body;
  body << in.rdbuf();
  CHECK(Json::parse(body.str())["n"] == 6);
  std::filesystem::remove(path);
  const Result bad = run({"cn", "--model", "lp", "--n", "6", "--out", "/nonexistent-dir/x.json"});
  CHECK(bad.code == 2);
}

TEST_CASE("m range parsing") {
  int lo = 0;
  int hi = 0;
  CHECK(trotter::cli::parse_m_range("10..40", lo, hi));
  CHECK(lo == 10);
  CHECK(hi == 40);
  CHECK(trotter::cli::parse_m_range("7", lo, hi));
  CHECK(lo == 7);
  CHECK(hi == 7);
  CHECK(!trotter::cli::parse_m_range("10..", lo, hi));
  CHECK(!trotter::cli::parse_m_range("a..b", lo, hi));
  CHECK(!trotter::cli::parse_m_range("", lo, hi));
}
