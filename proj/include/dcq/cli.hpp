#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "dcq/report_json.hpp"

namespace dcq {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitInconclusive = 3;

/// lo:hi:count, log-spaced; lo and hi accept "e^x" for exp(x).
struct GridSpec {
  std::string text;
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
};

GridSpec parse_grid(const std::string& text);

struct RunConfig {
  std::string subcommand;
  std::string weight;
  std::string family;
  std::optional<double> t0;
  GridSpec grid;
  std::string format;
  std::string out;
  std::uint64_t seed = 0;
  /// reproduce target, or the file read by summarize
  std::string target;
};

Json to_json(const RunConfig& c);

/// One-line digest of a report document; recomputed from the document alone,
/// so `summarize` on a saved report prints the line the run printed.
std::string summary_line(const Json& document);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dcq
