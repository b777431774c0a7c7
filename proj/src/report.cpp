#include "topocheck/report.hpp"

#include <cmath>
#include <sstream>

namespace topocheck {

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

int severity(Verdict v) {
  switch (v) {
    case Verdict::Pass: return 0;
    case Verdict::Degenerate: return 1;
    case Verdict::Undecided: return 2;
    case Verdict::Violated: return 3;
  }
  return 3;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_number(double v) {
  if (!std::isfinite(v)) return "";
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

Verdict RunReport::aggregate() const {
  Verdict worst = Verdict::Pass;
  for (const auto& c : checks)
    if (severity(c.verdict) > severity(worst)) worst = c.verdict;
  return worst;
}

Json to_json(const ConditionReport& r) {
  Json evidence = Json::array();
  for (const Evidence& e : r.evidence) {
    Json values = Json::array();
    for (double v : e.values) values.push_back(number(v));
    evidence.push_back(Json{{"label", e.label}, {"values", values}});
  }
  return Json{{"condition", r.condition},
              {"verdict", verdict_name(r.verdict)},
              {"expected", number(r.expected)},
              {"observed", number(r.observed)},
              {"tolerance", number(r.tolerance)},
              {"relation", relation_name(r.relation)},
              {"seed", r.seed},
              {"evidence", evidence},
              {"runtime_ms", number(r.runtime_ms)},
              {"note", r.note}};
}

Json to_json(const RunReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  return Json{{"scenario", r.scenario},
              {"version", r.version},
              {"seed", r.seed},
              {"aggregate", verdict_name(r.aggregate())},
              {"checks", checks}};
}

Json to_json(const DegreeResult& d) {
  Json rv = Json::array();
  for (Eigen::Index i = 0; i < d.regular_value.size(); ++i) rv.push_back(d.regular_value[i]);
  return Json{{"degree", d.degree},          {"raw", number(d.raw)},       {"residual", number(d.residual)},
              {"depth", d.depth},            {"method", method_name(d.method)}, {"regular_value", rv},
              {"seed", d.seed},              {"simplices", d.simplices}};
}

Json to_json(const HomologyGroup& h) {
  Json torsion = Json::array();
  for (const BigInt& t : h.torsion) torsion.push_back(t.str());
  return Json{{"dimension", h.dimension}, {"betti", h.betti}, {"torsion", torsion}};
}

Json strip_runtimes(Json report) {
  if (report.is_object()) {
    report.erase("runtime_ms");
    for (auto& [key, value] : report.items()) value = strip_runtimes(value);
  } else if (report.is_array()) {
    for (auto& value : report) value = strip_runtimes(value);
  }
  return report;
}

std::string checks_csv(const RunReport& r) {
  std::ostringstream out;
  out << "scenario,condition,verdict,expected,observed,tolerance,relation,seed,runtime_ms\n";
  for (const auto& c : r.checks)
    out << csv_field(r.scenario) << ',' << csv_field(c.condition) << ',' << verdict_name(c.verdict) << ','
        << csv_number(c.expected) << ',' << csv_number(c.observed) << ',' << csv_number(c.tolerance) << ','
        << relation_name(c.relation) << ',' << c.seed << ',' << csv_number(c.runtime_ms) << '\n';
  return out.str();
}

std::string evidence_csv(const RunReport& r) {
  std::ostringstream out;
  out << "scenario,check,condition,label,position,value\n";
  for (std::size_t k = 0; k < r.checks.size(); ++k)
    for (const Evidence& e : r.checks[k].evidence)
      for (std::size_t i = 0; i < e.values.size(); ++i)
        out << csv_field(r.scenario) << ',' << k << ',' << csv_field(r.checks[k].condition) << ',' << csv_field(e.label)
            << ',' << i << ',' << csv_number(e.values[i]) << '\n';
  return out.str();
}

int exit_code(const RunReport& r) { return r.aggregate() == Verdict::Pass ? 0 : 1; }

}  // namespace topocheck
