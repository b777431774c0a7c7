#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "topocheck/render.hpp"
#include "topocheck/scenario.hpp"

using namespace topocheck;

namespace {

Json minimal(const std::string& field, Json checks) {
  return Json{{"schema", kScenarioSchema}, {"name", "t"}, {"n", 2}, {"field", field}, {"checks", std::move(checks)}};
}

Scenario rescaled(Scenario s) {
  const FieldSpec f = parse_field(s.field, s.n, s.m);
  s.field = rescale(f, parse_expression_list("1 + 0.5*sin(x1)", s.n, 0)[0]).to_string();
  return s;
}

const ConditionReport* find(const RunReport& r, const std::string& condition) {
  for (const ConditionReport& c : r.checks)
    if (c.condition == condition) return &c;
  return nullptr;
}

}  // namespace

TEST_CASE("built-in scenarios parse and survive a JSON round trip") {
  const auto names = builtin_scenario_names();
  CHECK(names.size() >= 30);
  for (const std::string& name : names) {
    const Scenario s = builtin_scenario(name);
    CHECK(s.name == name);
    const Json doc = scenario_to_json(s);
    const Scenario back = parse_scenario(doc);
    CHECK_MESSAGE(scenario_to_json(back) == doc, name);
  }
  CHECK_THROWS_AS(builtin_scenario("no-such-scenario"), ValidationError);
}

TEST_CASE("built-in verdicts") {
  for (const std::string& name : builtin_scenario_names()) {
    const RunReport r = run_scenario(builtin_scenario(name));
    const Verdict expected = name == "brockett-integrator" ? Verdict::Violated : Verdict::Pass;
    CHECK_MESSAGE(r.aggregate() == expected, name);
    CHECK(exit_code(r) == (expected == Verdict::Pass ? 0 : 1));
    for (const ConditionReport& c : r.checks) 
      CHECK_MESSAGE(c.verdict != Verdict::Undecided, (name + " " + c.condition + " " + c.note));
  }
  const RunReport a3 = run_scenario(builtin_scenario("linear-attractor-3d"));
  const ConditionReport* index = find(a3, "index");
  REQUIRE(index != nullptr);
  CHECK(index->observed == -1);
  CHECK(index->expected == -1);
}

TEST_CASE("malformed scenarios are rejected") {
  const Json good = minimal("-x1, -x2", Json::array({{{"type", "index"}}}));
  CHECK_NOTHROW(parse_scenario(good));

  Json unknown = good;
  unknown["checks"] = Json::array({{{"type", "winding-wobble"}}});
  CHECK_THROWS_WITH_AS(parse_scenario(unknown), doctest::Contains("unknown check 'winding-wobble'"), ValidationError);

  Json radius = good;
  radius["checks"] = Json::array({{{"type", "index"}, {"radius", -1}}});
  CHECK_THROWS_WITH_AS(parse_scenario(radius), doctest::Contains("out of range"), ValidationError);

  Json extra = good;
  extra["checks"] = Json::array({{{"type", "index"}, {"radius", 0.5}, {"radious", 0.5}}});
  CHECK_THROWS_AS(parse_scenario(extra), ValidationError);

  CHECK_THROWS_WITH_AS(parse_scenario(minimal("-x1, * x2", good["checks"])), doctest::Contains("offset"),
                       ValidationError);
  CHECK_THROWS_AS(parse_scenario(minimal("-x1", good["checks"])), ValidationError);  // wrong component count

  Json schema = good;
  schema["schema"] = "topocheck-scenario/0";
  CHECK_THROWS_AS(parse_scenario(schema), ValidationError);

  Json feedback = good;
  feedback["feedback"] = "x1";
  CHECK_THROWS_AS(parse_scenario(feedback), ValidationError);  // m = 0

  Json no_feedback = good;
  no_feedback["checks"] = Json::array({{{"type", "closed-loop-index"}}});
  CHECK_THROWS_AS(parse_scenario(no_feedback), ValidationError);

  Json seed = good;
  seed["seed"] = -4;
  CHECK_THROWS_AS(parse_scenario(seed), ValidationError);

  CHECK_THROWS_AS(load_scenario_file("/nonexistent/scenario.json"), ValidationError);
}

TEST_CASE("library failures inside a check become undecided") {
  // the sphere passes through the equilibrium at (1, 0)
  const Scenario s = parse_scenario(minimal("x1 - 1, x2", Json::array({{{"type", "degree"}, {"radius", 1.0}}})));
  const RunReport r = run_scenario(s);
  REQUIRE(r.checks.size() == 1);
  CHECK(r.checks[0].verdict == Verdict::Undecided);
  CHECK_FALSE(r.checks[0].note.empty());
  CHECK(exit_code(r) == 1);
}

TEST_CASE("runs are deterministic") {
  for (const char* name : {"two-attractors-one-saddle", "brockett-integrator", "linear-saddle-4d", "van-der-pol"}) {
    const Scenario s = builtin_scenario(name);
    CHECK_MESSAGE(strip_runtimes(to_json(run_scenario(s))) == strip_runtimes(to_json(run_scenario(s))), name);
  }
  RunOptions other;
  other.seed = 99;
  const RunReport r = run_scenario(builtin_scenario("brockett-integrator"), other);
  CHECK(r.seed == 99);
  CHECK(r.aggregate() == Verdict::Violated);
}

TEST_CASE("verdicts do not change under positive rescaling of the field") {
  for (const std::string& name : builtin_scenario_names()) {
    const RunReport a = run_scenario(builtin_scenario(name));
    const RunReport b = run_scenario(rescaled(builtin_scenario(name)));
    REQUIRE(a.checks.size() == b.checks.size());
    for (std::size_t i = 0; i < a.checks.size(); ++i) {
      CHECK_MESSAGE(a.checks[i].verdict == b.checks[i].verdict, (name + " " + a.checks[i].condition));
      // Brockett residuals are metric, not topological
      const std::string& c = a.checks[i].condition;
      const double x = a.checks[i].observed, y = b.checks[i].observed;
      if (c != "brockett-surjectivity")
        CHECK_MESSAGE((x == y || (std::isnan(x) && std::isnan(y))), (name + " " + c));
    }
  }
}

TEST_CASE("refinement keeps verdicts") {
  for (const char* name : {"zk-2", "linear-attractor-3d", "van-der-pol", "klein-bottle"}) {
    RunOptions finer;
    finer.refinement = 1;
    const RunReport a = run_scenario(builtin_scenario(name));
    const RunReport b = run_scenario(builtin_scenario(name), finer);
    REQUIRE(a.checks.size() == b.checks.size());
    for (std::size_t i = 0; i < a.checks.size(); ++i) {
      CHECK_MESSAGE(a.checks[i].verdict == b.checks[i].verdict, name);
      CHECK_MESSAGE(a.checks[i].observed == b.checks[i].observed, name);
    }
  }
  RunOptions bad;
  bad.refinement = 5;
  CHECK_THROWS_AS(run_scenario(builtin_scenario("zk-2"), bad), ValidationError);
}

TEST_CASE("report formats") {
  const RunReport r = run_scenario(builtin_scenario("zk-2"));
  const Json j = to_json(r);
  CHECK(j["scenario"] == "zk-2");
  REQUIRE(j["checks"].is_array());
  for (const auto& c : j["checks"])
    for (const char* key : {"condition", "verdict", "expected", "observed", "tolerance", "seed", "evidence", "runtime_ms"})
      CHECK_MESSAGE(c.contains(key), key);
  const std::string csv = checks_csv(r);
  CHECK(csv.rfind("scenario,condition,verdict,expected,observed,tolerance,relation,seed,runtime_ms\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(r.checks.size()) + 1);
  CHECK(evidence_csv(r).rfind("scenario,check,condition,label,position,value\n", 0) == 0);
  CHECK(gauss_image_csv(r).rfind("scenario,check,condition,sample,g1,g2\n", 0) == 0);
}

TEST_CASE("rendering") {
  const RunReport zk2 = run_scenario(builtin_scenario("zk-2"));
  REQUIRE(has_gauss_images(zk2));
  const std::string svg = render_svg(zk2, 2);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("winding 2.00") != std::string::npos);
  for (const ConditionReport& c : zk2.checks)
    if (!c.gauss_image.empty()) CHECK(sampled_winding(c.gauss_image) == doctest::Approx(2.0).epsilon(1e-9));

  const RunReport b = run_scenario(builtin_scenario("brockett-integrator"));
  CHECK_FALSE(has_gauss_images(b));
  CHECK_THROWS_AS(render_svg(b, 3), PreconditionError);
  CHECK_THROWS_AS(render_svg(zk2, 4), PreconditionError);

  const RunReport vdp = run_scenario(builtin_scenario("van-der-pol"));
  CHECK(render_svg(vdp, 2).find("<circle") != std::string::npos);
}
