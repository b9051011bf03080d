#pragma once

// Scenario files and the command-line driver. Reports are built as JSON
// documents; the text rendering is produced from the same document.

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "oddgeo/darboux.hpp"
#include "oddgeo/spacetime.hpp"

namespace oddgeo::cli {

inline constexpr const char* kToolName = "oddgeo";
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kScenarioVersion = 1;

using Json = nlohmann::ordered_json;

struct CovariantInput {
  KForm omega;
  KForm Omega;
};
struct ContravariantInput {
  KVector E;
  KVector Lambda;
  std::optional<KForm> omega;
};

struct Scenario {
  Chart chart;
  Box box;
  std::optional<ScalarField> constraint;
  std::variant<CovariantInput, ContravariantInput, DarbouxSpec, GalileiInput, EinsteinInput> data;

  std::string kind() const;
  /// The configured sampler; spacetime scenarios use the phase-space samplers.
  Sampler sampler(std::uint64_t seed, int count) const;
};

/// Throws InputError whose message starts with the JSON path of the problem.
Scenario parse_scenario(const Json& doc);
Scenario load_scenario(const std::string& path);

/// Runs one command line (without the program name). Returns the exit code:
/// 0 success, 1 input or evaluation error, 2 check failed or --expect mismatch.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Text rendering of a report document.
std::string render_text(const Json& report);

}  // namespace oddgeo::cli
