#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "topocheck/conditions.hpp"
#include "topocheck/degree.hpp"
#include "topocheck/homology.hpp"

namespace topocheck {

using Json = nlohmann::ordered_json;

struct RunReport {
  std::string scenario;
  std::string version;
  std::uint64_t seed = 0;
  std::vector<ConditionReport> checks;

  /// violated > undecided > degenerate > pass, over all checks.
  Verdict aggregate() const;
};

/// Schema: {condition, verdict, expected, observed, tolerance, relation,
/// seed, evidence: [{label, values[]}], runtime_ms, note}. Non-finite
/// numbers become null.
Json to_json(const ConditionReport& r);
Json to_json(const RunReport& r);
Json to_json(const DegreeResult& d);
Json to_json(const HomologyGroup& h);

/// Copy of the JSON report with every runtime_ms removed (for comparing runs).
Json strip_runtimes(Json report);

/// One row per check: scenario,condition,verdict,expected,observed,tolerance,relation,seed,runtime_ms
std::string checks_csv(const RunReport& r);
/// One row per evidence value: scenario,check,condition,label,position,value
std::string evidence_csv(const RunReport& r);

/// Process exit status for a finished run: 0 when every check passed, else 1.
int exit_code(const RunReport& r);

}  // namespace topocheck
