#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "topocheck/report.hpp"

namespace topocheck {

inline constexpr const char* kScenarioSchema = "topocheck-scenario/1";

/// Malformed scenario: bad JSON, unknown check, parameter out of range,
/// unparsable expression. Maps to exit status 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

struct CheckSpec {
  std::string type;
  Json params;  // object; absent keys take documented defaults
};

struct Scenario {
  std::string name;
  std::string description;
  int n = 0;
  int m = 0;
  std::string field;
  std::string feedback;  // empty when absent
  std::string lyapunov;  // empty when absent
  std::uint64_t seed = 1;
  std::vector<CheckSpec> checks;
};

/// Check type names accepted in scenario files.
const std::vector<std::string>& check_types();

/// Validates schema tag, dimensions, expressions and every check's parameters.
Scenario parse_scenario(const Json& doc);
Scenario load_scenario_file(const std::string& path);
Json scenario_to_json(const Scenario& s);

std::vector<std::string> builtin_scenario_names();
/// Throws ValidationError for unknown names.
Scenario builtin_scenario(const std::string& name);
/// A built-in name, or else a path to a scenario file.
Scenario resolve_scenario(const std::string& name_or_path);

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the scenario seed
  int refinement = 0;                 // extra refinement for built meshes
};

/// Runs every check in order. Library errors raised inside a check become
/// an undecided verdict whose note carries the message.
RunReport run_scenario(const Scenario& s, const RunOptions& options = {});

}  // namespace topocheck
