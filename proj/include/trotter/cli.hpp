#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "trotter/lacunary.hpp"
#include "json.hpp"

namespace trotter::cli {

inline constexpr std::string_view kToolName = "trotter-probe";
inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr int kDecimalDigits = 30;

// Exit-code contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

using Json = nlohmann::ordered_json;

enum class Source { closed_form, cycle_exact, simulator };
std::string_view to_string(Source s);

/// One serialized c_n sample; every number is a decimal string.
Json record_json(const lacunary::CnSample& s, lacunary::Model model, Source source);
std::string record_csv_header();
std::string record_csv_row(const lacunary::CnSample& s, lacunary::Model model, Source source);

Json certificate_json(const lacunary::DivergenceCertificate& cert);
std::string certificate_csv(const lacunary::DivergenceCertificate& cert);

/// Parses "lo..hi" (or a single integer) into an inclusive range.
bool parse_m_range(std::string_view text, int& lo, int& hi);

/// Runs the tool; returns the process exit code.  Output goes to `out`
/// unless --out names a file; diagnostics and usage go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace trotter::cli
