#include "topocheck/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "topocheck/conditions.hpp"
#include "topocheck/directions.hpp"
#include "topocheck/geometry.hpp"
#include "topocheck/homology.hpp"

namespace topocheck {

const std::vector<std::string>& check_types() {
  static const std::vector<std::string> types = {
      "degree",      "index",     "equilibria", "poincare-hopf", "poincare-hopf-torus", "brockett",
      "closed-loop-index", "hemisphere", "isotopy", "preimage-count", "homotopy-class", "homology"};
  return types;
}

namespace {

// ---------------------------------------------------------------------------
// parameter access with validation
// ---------------------------------------------------------------------------

class Params {
 public:
  Params(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) fail("expected an object");
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ValidationError(where_ + ": " + msg); }

  bool has(const std::string& key) {
    used_.insert(key);
    return j_.contains(key);
  }

  double number(const std::string& key, std::optional<double> def, double lo, double hi) {
    if (!has(key)) {
      if (!def) fail("missing parameter '" + key + "'");
      return *def;
    }
    const Json& v = j_.at(key);
    if (!v.is_number()) fail("parameter '" + key + "' must be a number");
    const double x = v.get<double>();
    if (!(x >= lo && x <= hi)) fail("parameter '" + key + "' out of range [" + fmt(lo) + ", " + fmt(hi) + "]");
    return x;
  }

  int integer(const std::string& key, std::optional<int> def, int lo, int hi) {
    if (!has(key)) {
      if (!def) fail("missing parameter '" + key + "'");
      return *def;
    }
    const Json& v = j_.at(key);
    if (!v.is_number_integer()) fail("parameter '" + key + "' must be an integer");
    const auto x = v.get<long long>();
    if (x < lo || x > hi) fail("parameter '" + key + "' out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(x);
  }

  std::optional<int> optional_integer(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return integer(key, std::nullopt, -1000000, 1000000);
  }

  bool boolean(const std::string& key, bool def) {
    if (!has(key)) return def;
    if (!j_.at(key).is_boolean()) fail("parameter '" + key + "' must be true or false");
    return j_.at(key).get<bool>();
  }

  std::string string(const std::string& key, std::optional<std::string> def, const std::vector<std::string>& allowed) {
    if (!has(key)) {
      if (!def) fail("missing parameter '" + key + "'");
      return *def;
    }
    if (!j_.at(key).is_string()) fail("parameter '" + key + "' must be a string");
    std::string s = j_.at(key).get<std::string>();
    if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      fail("parameter '" + key + "' must be one of: " + list);
    }
    return s;
  }

  Vec vector(const std::string& key, int dim, std::optional<Vec> def) {
    if (!has(key)) {
      if (!def) fail("missing parameter '" + key + "'");
      return *def;
    }
    return as_vector(j_.at(key), dim, key);
  }

  Box box(const std::string& key, int dim, std::optional<Box> def) {
    if (!has(key)) {
      if (!def) fail("missing parameter '" + key + "'");
      return *def;
    }
    const Json& b = j_.at(key);
    if (!b.is_object()) fail("parameter '" + key + "' must be an object");
    Box out;
    if (b.contains("half_width")) {
      const Vec c = b.contains("center") ? as_vector(b.at("center"), dim, key + ".center") : Vec::Zero(dim);
      if (!b.at("half_width").is_number() || !(b.at("half_width").get<double>() > 0)) fail(key + ".half_width must be positive");
      out = Box::cube(c, b.at("half_width").get<double>());
    } else {
      if (!b.contains("lower") || !b.contains("upper")) fail("parameter '" + key + "' needs lower/upper or half_width");
      out = Box{as_vector(b.at("lower"), dim, key + ".lower"), as_vector(b.at("upper"), dim, key + ".upper")};
    }
    for (int i = 0; i < dim; ++i)
      if (!(out.upper[i] > out.lower[i])) fail("parameter '" + key + "' is an empty box");
    return out;
  }

  const Json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  /// Every key must have been consumed.
  void done() const {
    for (const auto& [key, value] : j_.items())
      if (key != "type" && !used_.contains(key)) fail("unknown parameter '" + key + "'");
  }

  const std::string& where() const { return where_; }

 private:
  static std::string fmt(double v) {
    std::ostringstream o;
    o << v;
    return o.str();
  }

  Vec as_vector(const Json& v, int dim, const std::string& key) const {
    if (!v.is_array() || static_cast<int>(v.size()) != dim)
      fail("parameter '" + key + "' must be an array of " + std::to_string(dim) + " numbers");
    Vec out(dim);
    for (int i = 0; i < dim; ++i) {
      if (!v[static_cast<std::size_t>(i)].is_number()) fail("parameter '" + key + "' must contain numbers");
      out[i] = v[static_cast<std::size_t>(i)].get<double>();
    }
    return out;
  }

  const Json& j_;
  std::string where_;
  std::set<std::string> used_;
};

int default_sphere_refinement(int n) { return n == 2 ? 3 : n == 3 ? 2 : 0; }

// ---------------------------------------------------------------------------
// surfaces shared by homotopy-class and homology checks
// ---------------------------------------------------------------------------

const std::vector<std::string> kSurfaces = {"sphere",          "limit-cycle-tube", "klein-bottle", "projective-plane",
                                            "level-set",       "flat-torus"};

struct Context {
  const Scenario& s;
  const RunOptions& opt;
  std::uint64_t seed;
  FieldSpec field;
  std::optional<ScalarSpec> lyapunov;
  std::optional<FeedbackLaw> feedback;
  bool dry_run;  // validation only

  DegreeConfig degree_config() const {
    DegreeConfig c;
    c.seed = seed;
    return c;
  }
};

SimplicialMesh build_surface(Params& p, Context& ctx, bool need_hypersurface) {
  const std::string kind = p.string("surface", std::nullopt, kSurfaces);
  const int n = ctx.s.n;
  if (kind == "sphere") {
    const Vec c = p.vector("center", n, Vec::Zero(n));
    const double r = p.number("radius", 1.0, 1e-9, 1e9);
    const int ref = p.integer("refinement", default_sphere_refinement(n), 0, 8);
    if (n < 2) p.fail("sphere surfaces need n >= 2");
    if (ctx.dry_run) return {};
    return build_sphere_mesh(n, c, r, ref + ctx.opt.refinement);
  }
  if (kind == "limit-cycle-tube") {
    if (n != 2 && n != 3) p.fail("limit-cycle-tube needs n = 2 or 3");
    const Vec seed = p.vector("seed_point", n, std::nullopt);
    const double r = p.number("radius", 0.2, 1e-9, 1e9);
    const int res = p.integer("resolution", 8, 3, 256);
    if (ctx.dry_run) return {};
    ClosedCurve c = locate_limit_cycle(ctx.field, seed);
    if (n == 2) c = c.embedded_in_3d();
    return tubular_neighborhood_mesh(c.closed_points(), r, res + 4 * ctx.opt.refinement);
  }
  if (kind == "klein-bottle") {
    const int rings = p.integer("rings", 12, 4, 512);
    const int segments = p.integer("segments", 8, 4, 512);
    if (ctx.dry_run) return {};
    return klein_bottle_mesh(rings << ctx.opt.refinement, segments << ctx.opt.refinement);
  }
  if (kind == "projective-plane") {
    if (ctx.dry_run) return {};
    SimplicialMesh m = projective_plane_mesh();
    for (int i = 0; i < ctx.opt.refinement; ++i) m = refine_uniform(m);
    return m;
  }
  if (kind == "level-set") {
    if (!ctx.lyapunov) p.fail("level-set surface needs a lyapunov expression");
    if (n != 2 && n != 3) p.fail("level-set surface needs n = 2 or 3");
    const double level = p.number("level", std::nullopt, -1e12, 1e12);
    const Box box = p.box("box", n, std::nullopt);
    const int res = p.integer("resolution", 32, 8, 512);
    if (ctx.dry_run) return {};
    return extract_level_set(*ctx.lyapunov, level, box, res << ctx.opt.refinement);
  }
  // flat torus: periodic square, not a hypersurface
  if (need_hypersurface) p.fail("flat-torus is not a hypersurface; use it for homology only");
  const double period = p.number("period", 2.0 * M_PI, 1e-9, 1e9);
  const int cells = p.integer("cells", 6, 3, 256);
  if (ctx.dry_run) return {};
  return flat_torus_mesh(period, cells << ctx.opt.refinement);
}

// ---------------------------------------------------------------------------
// individual checks
// ---------------------------------------------------------------------------

ConditionReport expected_or_informational(ConditionReport r, std::optional<int> expected) {
  if (expected) {
    r.expected = *expected;
    r.verdict = r.compare();
  } else {
    r.expected = r.observed;
    r.verdict = Verdict::Pass;
  }
  return r;
}

void require_closed(const Params& p, const Context& ctx) {
  if (ctx.s.m != 0) p.fail("this check needs closed dynamics (m = 0)");
}

std::vector<Vec> circle_images(const FieldSpec& f, const Vec& center, double radius, int samples) {
  std::vector<Vec> out;
  for (int i = 0; i < samples; ++i) {
    const double a = 2.0 * M_PI * i / samples;
    Vec x = center;
    x[0] += radius * std::cos(a);
    x[1] += radius * std::sin(a);
    out.push_back(gauss_map(f, x));
  }
  return out;
}

ConditionReport run_degree(Params& p, Context& ctx) {
  const int n = ctx.s.n;
  if (n < 2) p.fail("degree needs n >= 2 (use index for n = 1)");
  require_closed(p, ctx);
  const Vec c = p.vector("center", n, Vec::Zero(n));
  const double r = p.number("radius", 1.0, 1e-9, 1e9);
  const int ref = p.integer("refinement", default_sphere_refinement(n), 0, 8);
  const auto expected = p.optional_integer("expected");
  p.done();
  if (ctx.dry_run) return {};
  const auto mesh = build_sphere_mesh(n, c, r, ref + ctx.opt.refinement);
  const DegreeResult d = degree(ctx.field, mesh, ctx.degree_config());
  ConditionReport rep;
  rep.condition = "degree";
  rep.seed = ctx.seed;
  rep.observed = d.degree;
  rep.add("degree", {static_cast<double>(d.degree), d.raw, d.residual, static_cast<double>(d.depth), static_cast<double>(d.simplices)});
  if (d.regular_value.size() > 0) rep.add("regular-value", to_values(d.regular_value));
  rep.note = "method " + method_name(d.method);
  if (n == 2) {
    rep.gauss_image = circle_images(ctx.field, c, r, 720);
  } else {
    for (const Vec& v : mesh.vertices()) rep.gauss_image.push_back(gauss_map(ctx.field, v));
  }
  return expected_or_informational(std::move(rep), expected);
}

ConditionReport run_index(Params& p, Context& ctx) {
  require_closed(p, ctx);
  const Vec e = p.vector("point", ctx.s.n, Vec::Zero(ctx.s.n));
  const double r = p.number("radius", 0.5, 1e-9, 1e9);
  const auto expected = p.optional_integer("expected");
  p.done();
  if (ctx.dry_run) return {};
  const DegreeResult d = topological_index(ctx.field, e, r, ctx.degree_config());
  ConditionReport rep;
  rep.condition = "index";
  rep.seed = ctx.seed;
  rep.observed = d.degree;
  rep.add("index", {static_cast<double>(d.degree), d.raw, d.residual, static_cast<double>(d.depth)});
  rep.add("point", to_values(e));
  rep.note = "method " + method_name(d.method);
  return expected_or_informational(std::move(rep), expected);
}

ConditionReport run_equilibria(Params& p, Context& ctx) {
  require_closed(p, ctx);
  const int n = ctx.s.n;
  const Box box = p.box("box", n, Box::cube(Vec::Zero(n), 1.0));
  EquilibriumSearch search;
  search.grid = p.integer("grid", n <= 3 ? 9 : 5, 1, 64);
  search.tol = p.number("tol", 1e-6, 1e-14, 1e-1);
  const auto expected = p.optional_integer("expected_count");
  p.done();
  if (ctx.dry_run) return {};
  search.degree = ctx.degree_config();
  ConditionReport rep;
  rep.condition = "equilibria";
  rep.seed = ctx.seed;
  const auto eqs = find_equilibria(ctx.field, box, search);
  for (const Equilibrium& e : eqs) {
    std::vector<double> rec = to_values(e.location);
    rec.push_back(e.index ? *e.index : std::nan(""));
    rec.push_back(e.stable);
    rec.push_back(e.unstable);
    rec.push_back(e.central);
    rep.add("equilibrium", std::move(rec));
  }
  rep.observed = static_cast<double>(eqs.size());
  rep.note = "equilibrium records: coordinates, index, stable, unstable, central";
  return expected_or_informational(std::move(rep), expected);
}

ConditionReport run_poincare_hopf(Params& p, Context& ctx) {
  require_closed(p, ctx);
  const int n = ctx.s.n;
  if (n < 2) p.fail("poincare-hopf needs n >= 2");
  if (!p.has("boundary") || !p.raw("boundary").is_array() || p.raw("boundary").empty())
    p.fail("parameter 'boundary' must be a non-empty array of spheres");
  std::vector<SimplicialMesh> boundary;
  std::vector<std::pair<Vec, double>> spheres;
  int k = 0;
  for (const Json& b : p.raw("boundary")) {
    Params bp(b, p.where() + ".boundary[" + std::to_string(k++) + "]");
    const Vec c = bp.vector("center", n, Vec::Zero(n));
    const double r = bp.number("radius", std::nullopt, 1e-9, 1e9);
    bp.done();
    spheres.emplace_back(c, r);
  }
  const Box region = p.box("region", n, std::nullopt);
  const int ref = p.integer("refinement", default_sphere_refinement(n), 0, 8);
  BalanceConfig cfg;
  cfg.search.grid = p.integer("grid", n <= 3 ? 13 : 5, 1, 64);
  p.done();
  if (ctx.dry_run) return {};
  for (const auto& [c, r] : spheres) boundary.push_back(build_sphere_mesh(n, c, r, ref + ctx.opt.refinement));
  cfg.degree = ctx.degree_config();
  cfg.search.degree = cfg.degree;
  ConditionReport rep = poincare_hopf_check(ctx.field, boundary, region, cfg);
  if (n == 2) rep.gauss_image = circle_images(ctx.field, spheres.front().first, spheres.front().second, 720);
  return rep;
}

ConditionReport run_torus(Params& p, Context& ctx) {
  require_closed(p, ctx);
  if (ctx.s.n != 2) p.fail("poincare-hopf-torus needs n = 2");
  const double period = p.number("period", 2.0 * M_PI, 1e-9, 1e9);
  BalanceConfig cfg;
  cfg.search.grid = p.integer("grid", 13, 2, 64);
  p.done();
  if (ctx.dry_run) return {};
  cfg.degree = ctx.degree_config();
  cfg.search.degree = cfg.degree;
  return poincare_hopf_torus_check(ctx.field, period, cfg);
}

ConditionReport run_brockett(Params& p, Context& ctx) {
  if (ctx.s.m < 1) p.fail("brockett needs a control system (m >= 1)");
  ControlNeighborhood nb;
  nb.state_radius = p.number("state_radius", nb.state_radius, 1e-9, 1e6);
  nb.control_radius = p.number("control_radius", nb.control_radius, 1e-9, 1e6);
  nb.epsilon = p.number("epsilon", nb.epsilon, 1e-9, 1e6);
  nb.directions = p.integer("directions", nb.directions, 1, 4096);
  nb.starts = p.integer("starts", nb.starts, 1, 1024);
  nb.evaluations = p.integer("evaluations", nb.evaluations, 10, 1000000);
  nb.threshold = p.number("threshold", nb.threshold, 1e-9, 1.0);
  p.done();
  if (ctx.dry_run) return {};
  return brockett_surjectivity_check(ctx.field, nb, ctx.seed);
}

ConditionReport run_closed_loop(Params& p, Context& ctx) {
  if (!ctx.feedback) p.fail("closed-loop-index needs a feedback expression");
  const int n = ctx.s.n;
  const Vec e = p.vector("point", n, Vec::Zero(n));
  const double r = p.number("radius", 0.5, 1e-9, 1e9);
  const int k = p.integer("expected_k", 0, 0, n);
  p.done();
  if (ctx.dry_run) return {};
  return closed_loop_index_check(ctx.field, *ctx.feedback, e, r, k, ctx.degree_config());
}

ConditionReport run_hemisphere(Params& p, Context& ctx) {
  require_closed(p, ctx);
  const int n = ctx.s.n;
  if (n != 2 && n != 3) p.fail("hemisphere needs n = 2 or 3");
  const Vec seed = p.vector("seed_point", n, std::nullopt);
  const int normals = p.integer("normals", 64, 1, 100000);
  IntegrationConfig ic;
  ic.step = p.number("step", ic.step, 1e-6, 1.0);
  ic.transient = p.number("transient", ic.transient, 0.0, 1e6);
  ic.max_time = p.number("max_time", ic.max_time, 1e-3, 1e7);
  p.done();
  if (ctx.dry_run) return {};
  const ClosedCurve cycle = locate_limit_cycle(ctx.field, seed, ic);
  ConditionReport rep = hemisphere_test(ctx.field, cycle, normals);
  double max_x1 = 0.0;
  for (const Vec& q : cycle.points) max_x1 = std::max(max_x1, std::abs(q[0]));
  rep.add("limit-cycle", {cycle.period, cycle.closure_residual, static_cast<double>(cycle.points.size()), max_x1});
  for (const Vec& q : cycle.points) rep.gauss_image.push_back(gauss_map(ctx.field, q));
  return rep;
}

ConditionReport run_isotopy(Params& p, Context& ctx) {
  require_closed(p, ctx);
  if (!ctx.lyapunov) p.fail("isotopy needs a lyapunov expression");
  const int n = ctx.s.n;
  if (n != 2 && n != 3) p.fail("isotopy needs n = 2 or 3");
  const double level = p.number("level", std::nullopt, -1e12, 1e12);
  const Box box = p.box("box", n, std::nullopt);
  const int res = p.integer("resolution", n == 2 ? 32 : 16, 8, 512);
  const int t_grid = p.integer("t_grid", 32, 2, 100000);
  p.done();
  if (ctx.dry_run) return {};
  const auto mesh = extract_level_set(*ctx.lyapunov, level, box, res << ctx.opt.refinement);
  ConditionReport rep = isotopy_check(ctx.field, *ctx.lyapunov, mesh, t_grid, ctx.degree_config());
  for (const Vec& v : mesh.vertices()) rep.gauss_image.push_back(gauss_map(ctx.field, v));
  return rep;
}

ConditionReport run_preimage(Params& p, Context& ctx) {
  if (!ctx.lyapunov) p.fail("preimage-count needs a lyapunov expression");
  if (ctx.s.n != 3) p.fail("preimage-count needs n = 3");
  const double level = p.number("level", std::nullopt, -1e12, 1e12);
  const Box box = p.box("box", 3, std::nullopt);
  const int res = p.integer("resolution", 32, 8, 512);
  const int dirs = p.integer("directions", 128, 1, 100000);
  const bool refine = p.boolean("refine", false);
  p.done();
  if (ctx.dry_run) return {};
  SimplicialMesh mesh = extract_level_set(*ctx.lyapunov, level, box, res);
  const ScalarSpec& v = *ctx.lyapunov;
  for (int i = 0; i < (refine ? 1 : 0) + ctx.opt.refinement; ++i)
    mesh = refine_uniform(mesh, [&](const Vec& x) { return project_to_level(v, level, x); });
  ConditionReport rep = preimage_count_check(v, mesh, dirs);
  rep.add("triangles", {static_cast<double>(mesh.simplex_count())});
  return rep;
}

ConditionReport run_homotopy_class(Params& p, Context& ctx) {
  const auto expected = p.optional_integer("expected");
  SimplicialMesh mesh = build_surface(p, ctx, true);
  p.done();
  if (ctx.dry_run) return {};
  if (ctx.s.m != 0) throw PreconditionError("homotopy-class needs closed dynamics (m = 0)");
  const int n = ctx.s.n;
  VectorFieldFn f = ctx.field.as_function();
  if (mesh.ambient_dim() == 3 && n == 2) {
    // planar dynamics extended to R^3 with a damped third component
    f = [g = ctx.field.as_function()](const Vec& x) {
      Vec out(3);
      out.head(2) = g(x.head(2));
      out[2] = -x[2];
      return out;
    };
  } else if (mesh.ambient_dim() != n) {
    throw PreconditionError("homotopy-class: surface lives in R^" + std::to_string(mesh.ambient_dim()) +
                            " but the field has n = " + std::to_string(n));
  }
  return classify_homotopy_class(mesh, f, expected, ctx.degree_config());
}

ConditionReport run_homology(Params& p, Context& ctx) {
  std::optional<std::vector<long long>> betti;
  std::optional<std::vector<std::vector<long long>>> torsion;
  try {
    if (p.has("expected_betti")) betti = p.raw("expected_betti").get<std::vector<long long>>();
    if (p.has("expected_torsion")) torsion = p.raw("expected_torsion").get<std::vector<std::vector<long long>>>();
  } catch (const nlohmann::json::exception&) {
    p.fail("expected_betti must be an integer array and expected_torsion an array of integer arrays");
  }
  SimplicialMesh mesh = build_surface(p, ctx, false);
  p.done();
  if (ctx.dry_run) return {};
  const auto groups = homology_groups(chain_complex_of(mesh));
  ConditionReport rep;
  rep.condition = "homology";
  rep.seed = ctx.seed;
  int mismatches = 0;
  std::vector<double> b;
  for (const auto& g : groups) {
    b.push_back(static_cast<double>(g.betti));
    std::vector<double> t;
    for (const BigInt& x : g.torsion) t.push_back(x.convert_to<double>());
    rep.add("torsion-H" + std::to_string(g.dimension), t);
    if (torsion) {
      const auto d = static_cast<std::size_t>(g.dimension);
      std::vector<long long> want = d < torsion->size() ? (*torsion)[d] : std::vector<long long>{};
      std::vector<long long> got;
      for (const BigInt& x : g.torsion) got.push_back(x.convert_to<long long>());
      if (want != got) ++mismatches;
    }
  }
  rep.evidence.insert(rep.evidence.begin(), Evidence{"betti", b});
  if (betti) {
    std::vector<long long> got;
    for (const auto& g : groups) got.push_back(g.betti);
    if (*betti != got) ++mismatches;
  }
  const Index chi_simplices = euler_characteristic(mesh);
  const Index chi_betti = euler_characteristic(groups);
  rep.add("euler-characteristic", {static_cast<double>(chi_simplices), static_cast<double>(chi_betti)});
  if (chi_simplices != chi_betti) ++mismatches;
  rep.note = "observed counts mismatches against expected Betti numbers, torsion and Euler characteristic";
  rep.expected = 0;
  rep.observed = mismatches;
  rep.verdict = rep.compare();
  return rep;
}

using Runner = ConditionReport (*)(Params&, Context&);

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table = {
      {"degree", run_degree},
      {"index", run_index},
      {"equilibria", run_equilibria},
      {"poincare-hopf", run_poincare_hopf},
      {"poincare-hopf-torus", run_torus},
      {"brockett", run_brockett},
      {"closed-loop-index", run_closed_loop},
      {"hemisphere", run_hemisphere},
      {"isotopy", run_isotopy},
      {"preimage-count", run_preimage},
      {"homotopy-class", run_homotopy_class},
      {"homology", run_homology},
  };
  return table;
}

Context make_context(const Scenario& s, const RunOptions& opt, bool dry_run) {
  auto wrap = [&](const char* what, auto&& fn) {
    try {
      return fn();
    } catch (const ParseError& e) {
      throw ValidationError(std::string(what) + ": " + e.message() + " at offset " + std::to_string(e.offset()));
    }
  };
  Context ctx{s, opt, opt.seed.value_or(s.seed), wrap("field", [&] { return parse_field(s.field, s.n, s.m); }),
              std::nullopt, std::nullopt, dry_run};
  if (!s.lyapunov.empty()) ctx.lyapunov = wrap("lyapunov", [&] { return parse_scalar(s.lyapunov, s.n); });
  if (!s.feedback.empty()) {
    if (s.m < 1) throw ValidationError("feedback given but the system has no controls (m = 0)");
    ctx.feedback = wrap("feedback", [&] { return parse_feedback(s.feedback, s.n, s.m); });
  }
  return ctx;
}

}  // namespace

// ---------------------------------------------------------------------------
// scenario documents
// ---------------------------------------------------------------------------

Scenario parse_scenario(const Json& doc) {
  Params top(doc, "scenario");
  Scenario s;
  const std::string schema = top.string("schema", std::nullopt, {});
  if (schema != kScenarioSchema) top.fail("unsupported schema '" + schema + "' (expected " + kScenarioSchema + ")");
  s.name = top.string("name", std::nullopt, {});
  if (s.name.empty()) top.fail("name must not be empty");
  s.description = top.string("description", "", {});
  s.n = top.integer("n", std::nullopt, 1, 16);
  s.m = top.integer("m", 0, 0, 16);
  s.field = top.string("field", std::nullopt, {});
  s.feedback = top.string("feedback", "", {});
  s.lyapunov = top.string("lyapunov", "", {});
  if (top.has("seed")) {
    if (!top.raw("seed").is_number_integer() || top.raw("seed").get<long long>() < 0) top.fail("seed must be a non-negative integer");
    s.seed = top.raw("seed").get<std::uint64_t>();
  }
  if (!top.has("checks") || !top.raw("checks").is_array()) top.fail("'checks' must be an array");
  int k = 0;
  for (const Json& c : top.raw("checks")) {
    const std::string where = "check " + std::to_string(k++);
    if (!c.is_object() || !c.contains("type") || !c.at("type").is_string()) throw ValidationError(where + ": missing 'type'");
    CheckSpec spec{c.at("type").get<std::string>(), c};
    spec.params.erase("type");
    if (!runners().contains(spec.type)) throw ValidationError(where + ": unknown check '" + spec.type + "'");
    s.checks.push_back(std::move(spec));
  }
  top.done();

  // dry run: parse expressions and every check's parameters
  const RunOptions none;
  Context ctx = make_context(s, none, true);
  for (std::size_t i = 0; i < s.checks.size(); ++i) {
    Params p(s.checks[i].params, "check " + std::to_string(i) + " (" + s.checks[i].type + ")");
    runners().at(s.checks[i].type)(p, ctx);
  }
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("scenario file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_scenario(doc);
}

Json scenario_to_json(const Scenario& s) {
  Json checks = Json::array();
  for (const CheckSpec& c : s.checks) {
    Json j{{"type", c.type}};
    for (const auto& [k, v] : c.params.items()) j[k] = v;
    checks.push_back(j);
  }
  Json out{{"schema", kScenarioSchema}, {"name", s.name}};
  if (!s.description.empty()) out["description"] = s.description;
  out["n"] = s.n;
  out["m"] = s.m;
  out["field"] = s.field;
  if (!s.feedback.empty()) out["feedback"] = s.feedback;
  if (!s.lyapunov.empty()) out["lyapunov"] = s.lyapunov;
  out["seed"] = s.seed;
  out["checks"] = checks;
  return out;
}

// ---------------------------------------------------------------------------
// built-in library
// ---------------------------------------------------------------------------

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : ", ") + p;
  return out;
}

std::string var(int i) { return "x" + std::to_string(i); }

std::string half_square_norm(int n) {
  std::vector<std::string> terms;
  for (int i = 1; i <= n; ++i) terms.push_back(var(i) + "^2");
  std::string s;
  for (const auto& t : terms) s += (s.empty() ? "" : " + ") + t;
  return "(" + s + ")/2";
}

Json zeros(int n) { return Json(std::vector<double>(static_cast<std::size_t>(n), 0.0)); }

/// Real and imaginary parts of (x1 + i s x2)^k, s = +1 or -1, expanded.
std::pair<std::string, std::string> complex_power(int k, int s) {
  std::vector<std::string> re, im;
  long long binom = 1;
  for (int j = 0; j <= k; ++j) {
    if (j > 0) binom = binom * (k - j + 1) / j;
    // i^j s^j
    const int sign_re = (j % 4 == 0) ? 1 : (j % 4 == 2) ? -1 : 0;
    const int sign_im = (j % 4 == 1) ? 1 : (j % 4 == 3) ? -1 : 0;
    const int sj = (j % 2 == 1) ? s : 1;
    std::string mono;
    if (binom != 1) mono = std::to_string(binom);
    auto add_factor = [&](const std::string& f, int e) {
      if (e == 0) return;
      if (!mono.empty()) mono += "*";
      mono += e == 1 ? f : f + "^" + std::to_string(e);
    };
    add_factor("x1", k - j);
    add_factor("x2", j);
    if (mono.empty()) mono = "1";
    if (sign_re != 0) re.push_back((sign_re * sj > 0 ? "+ " : "- ") + mono);
    if (sign_im != 0) im.push_back((sign_im * sj > 0 ? "+ " : "- ") + mono);
  }
  auto render = [](const std::vector<std::string>& terms) {
    std::string out;
    for (const auto& t : terms) {
      if (out.empty())
        out = t[0] == '-' ? "-" + t.substr(2) : t.substr(2);
      else
        out += " " + t;
    }
    return out;
  };
  return {render(re), render(im)};
}

Json base(const std::string& name, const std::string& description, int n, int m, const std::string& field) {
  return Json{{"schema", kScenarioSchema}, {"name", name}, {"description", description}, {"n", n}, {"m", m},
              {"field", field},          {"seed", 1},      {"checks", Json::array()}};
}

Json circle(double r, int n = 2) { return Json{{"center", zeros(n)}, {"radius", r}}; }

Json cube(double h) { return Json{{"half_width", h}}; }

std::map<std::string, Json> build_library() {
  std::map<std::string, Json> lib;

  for (int n = 1; n <= 4; ++n) {
    const std::string d = std::to_string(n) + "d";
    for (const std::string kind : {"attractor", "repeller", "saddle"}) {
      std::vector<std::string> comps;
      int unstable = 0;
      for (int i = 1; i <= n; ++i) {
        const bool up = kind == "repeller" || (kind == "saddle" && i == n);
        unstable += up;
        comps.push_back(up ? var(i) : "-" + var(i));
      }
      const int idx = parity_sign(n - unstable);
      Json s = base("linear-" + kind + "-" + d, "linear " + kind + " in R^" + std::to_string(n) +
                                                    (kind == "saddle" ? " with one unstable direction" : ""),
                    n, 0, join(comps));
      s["checks"].push_back(Json{{"type", "index"}, {"point", zeros(n)}, {"radius", 0.5}, {"expected", idx}});
      s["checks"].push_back(Json{{"type", "equilibria"}, {"box", cube(1.0)}, {"grid", n <= 3 ? 5 : 3}, {"expected_count", 1}});
      if (n >= 2)
        s["checks"].push_back(Json{{"type", "poincare-hopf"}, {"boundary", Json::array({circle(1.0, n)})}, {"region", cube(1.5)},
                                   {"grid", n <= 3 ? 7 : 3}});
      if (kind == "attractor" && (n == 2 || n == 3)) {
        s["lyapunov"] = half_square_norm(n);
        s["checks"].push_back(Json{{"type", "isotopy"}, {"level", 0.5}, {"box", cube(2.0)}});
        s["checks"].push_back(Json{{"type", "homotopy-class"}, {"surface", "sphere"}, {"expected", idx}});
      }
      lib[s["name"]] = s;
    }
  }

  for (int k = 1; k <= 4; ++k) {
    for (int conj = 0; conj <= 1; ++conj) {
      const auto [re, im] = complex_power(k, conj ? -1 : 1);
      const std::string name = std::string(conj ? "zk-conj-" : "zk-") + std::to_string(k);
      const int deg = conj ? -k : k;
      Json s = base(name, std::string("real form of ") + (conj ? "conj(z)^" : "z^") + std::to_string(k), 2, 0, re + ", " + im);
      s["checks"].push_back(Json{{"type", "degree"}, {"center", zeros(2)}, {"radius", 1.0}, {"expected", deg}});
      s["checks"].push_back(Json{{"type", "index"}, {"point", zeros(2)}, {"radius", 0.5}, {"expected", deg}});
      s["checks"].push_back(Json{{"type", "poincare-hopf"}, {"boundary", Json::array({circle(1.0)})}, {"region", cube(1.5)}});
      lib[name] = s;
    }
  }

  {
    Json s = base("two-attractors-one-saddle", "cubic field with attractors at (+-1, 0) and a saddle at the origin", 2, 0,
                  "x1 - x1^3, -x2");
    s["checks"].push_back(Json{{"type", "equilibria"}, {"box", cube(2.0)}, {"expected_count", 3}});
    s["checks"].push_back(Json{{"type", "poincare-hopf"}, {"boundary", Json::array({circle(2.0)})}, {"region", cube(2.5)}});
    s["checks"].push_back(Json{{"type", "degree"}, {"radius", 2.0}, {"expected", 1}});
    lib[s["name"]] = s;
  }
  {
    Json s = base("flat-torus", "periodic field on the flat torus [0, 2pi]^2", 2, 0, "sin(x1), sin(x2)");
    s["checks"].push_back(Json{{"type", "poincare-hopf-torus"}, {"period", 2.0 * M_PI}});
    s["checks"].push_back(Json{{"type", "homology"}, {"surface", "flat-torus"}, {"expected_betti", {1, 2, 1}},
                               {"expected_torsion", Json::array({Json::array(), Json::array(), Json::array()})}});
    lib[s["name"]] = s;
  }
  {
    Json s = base("van-der-pol", "van der Pol oscillator, mu = 1", 2, 0, "x2, (1 - x1^2)*x2 - x1");
    s["checks"].push_back(Json{{"type", "poincare-hopf"}, {"boundary", Json::array({circle(0.5), circle(4.0)})}, {"region", cube(4.5)}});
    s["checks"].push_back(Json{{"type", "hemisphere"}, {"seed_point", {2.0, 0.0}}, {"normals", 64}});
    s["checks"].push_back(Json{{"type", "homotopy-class"}, {"surface", "limit-cycle-tube"}, {"seed_point", {2.0, 0.0}},
                               {"radius", 0.2}, {"expected", 0}});
    lib[s["name"]] = s;
  }
  {
    Json s = base("circle-normal-form", "r' = r(1 - r^2), theta' = 1 in Cartesian form", 2, 0,
                  "x1*(1 - x1^2 - x2^2) - x2, x2*(1 - x1^2 - x2^2) + x1");
    s["checks"].push_back(Json{{"type", "hemisphere"}, {"seed_point", {0.2, 0.0}}, {"normals", 64}});
    s["checks"].push_back(Json{{"type", "poincare-hopf"}, {"boundary", Json::array({circle(0.5), circle(2.0)})}, {"region", cube(2.5)}});
    s["checks"].push_back(Json{{"type", "index"}, {"radius", 0.25}, {"expected", 1}});
    lib[s["name"]] = s;
  }
  {
    Json s = base("brockett-integrator", "nonholonomic integrator", 3, 2, "u1, u2, x1*u2 - x2*u1");
    s["feedback"] = "-x1, -x2";
    s["checks"].push_back(Json{{"type", "brockett"}, {"epsilon", 0.1}, {"directions", 32}});
    s["checks"].push_back(Json{{"type", "closed-loop-index"}, {"radius", 0.5}, {"expected_k", 0}});
    lib[s["name"]] = s;
  }
  {
    Json s = base("fully-actuated-integrator", "x' = u in R^3", 3, 3, "u1, u2, u3");
    s["feedback"] = "-x1, -x2, -x3";
    s["checks"].push_back(Json{{"type", "brockett"}, {"epsilon", 0.1}, {"directions", 32}});
    s["checks"].push_back(Json{{"type", "closed-loop-index"}, {"radius", 0.5}, {"expected_k", 0}});
    lib[s["name"]] = s;
  }
  {
    Json s = base("double-integrator", "x1' = x2, x2' = u", 2, 1, "x2, u1");
    s["feedback"] = "-x1 - x2";
    s["checks"].push_back(Json{{"type", "brockett"}, {"epsilon", 0.1}, {"directions", 32}});
    s["checks"].push_back(Json{{"type", "closed-loop-index"}, {"radius", 0.5}, {"expected_k", 0}});
    lib[s["name"]] = s;
  }
  for (int n = 2; n <= 3; ++n) {
    std::vector<std::string> comps, zero;
    for (int i = 1; i <= n; ++i) {
      comps.push_back("-" + var(i) + " + u" + std::to_string(i));
      zero.push_back("0");
    }
    Json s = base("stabilized-linear-" + std::to_string(n) + "d", "x' = -x + u with u = 0", n, n, join(comps));
    s["feedback"] = join(zero);
    s["checks"].push_back(Json{{"type", "closed-loop-index"}, {"radius", 0.5}, {"expected_k", 0}});
    lib[s["name"]] = s;
  }
  {
    Json s = base("saddle-target", "closed loop with one unstable direction", 2, 1, "-x1 + u1, x2");
    s["feedback"] = "0";
    s["checks"].push_back(Json{{"type", "closed-loop-index"}, {"radius", 0.5}, {"expected_k", 1}});
    lib[s["name"]] = s;
  }
  {
    Json s = base("rotating-attractor", "spiral sink", 2, 0, "-x1 + x2, -x2 - x1");
    s["lyapunov"] = half_square_norm(2);
    s["checks"].push_back(Json{{"type", "isotopy"}, {"level", 0.5}, {"box", cube(2.0)}});
    s["checks"].push_back(Json{{"type", "index"}, {"radius", 0.5}, {"expected", 1}});
    lib[s["name"]] = s;
  }
  {
    const std::string rho = "sqrt(x1^2 + x2^2)";
    Json s = base("torus-lyapunov", "gradient flow of a torus-shaped potential", 3, 0,
                  "-2*(" + rho + " - 1)*x1/" + rho + ", -2*(" + rho + " - 1)*x2/" + rho + ", -2*x3");
    s["lyapunov"] = "(" + rho + " - 1)^2 + x3^2";
    s["checks"].push_back(Json{{"type", "preimage-count"}, {"level", 0.04}, {"box", cube(1.6)}, {"directions", 128}});
    s["checks"].push_back(Json{{"type", "homology"}, {"surface", "level-set"}, {"level", 0.04}, {"box", cube(1.6)},
                               {"expected_betti", {1, 2, 1}}});
    s["checks"].push_back(Json{{"type", "isotopy"}, {"level", 0.04}, {"box", cube(1.6)}, {"resolution", 32}});
    lib[s["name"]] = s;
  }
  {
    Json s = base("klein-bottle", "radial map from a point inside one lobe of the Klein bottle", 3, 0, "x1 - 2.5, x2, x3");
    s["checks"].push_back(Json{{"type", "homotopy-class"}, {"surface", "klein-bottle"}, {"expected", 1}});
    s["checks"].push_back(Json{{"type", "homology"}, {"surface", "klein-bottle"}, {"expected_betti", {1, 1, 0}},
                               {"expected_torsion", Json::array({Json::array(), Json::array({2}), Json::array()})}});
    lib[s["name"]] = s;
  }
  {
    Json s = base("projective-plane", "homology of the six-vertex projective plane", 3, 0, "-x1, -x2, -x3");
    s["checks"].push_back(Json{{"type", "homology"}, {"surface", "projective-plane"}, {"expected_betti", {1, 0, 0}},
                               {"expected_torsion", Json::array({Json::array(), Json::array({2}), Json::array()})}});
    lib[s["name"]] = s;
  }
  return lib;
}

const std::map<std::string, Json>& library() {
  static const std::map<std::string, Json> lib = build_library();
  return lib;
}

}  // namespace

std::vector<std::string> builtin_scenario_names() {
  std::vector<std::string> out;
  for (const auto& [name, doc] : library()) out.push_back(name);
  return out;
}

Scenario builtin_scenario(const std::string& name) {
  const auto it = library().find(name);
  if (it == library().end()) throw ValidationError("unknown built-in scenario '" + name + "'");
  return parse_scenario(it->second);
}

Scenario resolve_scenario(const std::string& name_or_path) {
  if (library().contains(name_or_path)) return builtin_scenario(name_or_path);
  return load_scenario_file(name_or_path);
}

// ---------------------------------------------------------------------------
// running
// ---------------------------------------------------------------------------

RunReport run_scenario(const Scenario& s, const RunOptions& options) {
  if (options.refinement < 0 || options.refinement > 4) throw ValidationError("refinement must lie in 0..4");
  Context ctx = make_context(s, options, false);
  RunReport report;
  report.scenario = s.name;
  report.version = TOPOCHECK_VERSION;
  report.seed = ctx.seed;
  for (std::size_t i = 0; i < s.checks.size(); ++i) {
    const CheckSpec& c = s.checks[i];
    Params p(c.params, "check " + std::to_string(i) + " (" + c.type + ")");
    const auto start = std::chrono::steady_clock::now();
    ConditionReport r;
    try {
      r = runners().at(c.type)(p, ctx);
    } catch (const ValidationError&) {
      throw;
    } catch (const Error& e) {
      r = ConditionReport{};
      r.condition = c.type;
      r.seed = ctx.seed;
      r.verdict = Verdict::Undecided;
      r.expected = r.observed = std::nan("");
      r.note = e.what();
      if (const auto* h = dynamic_cast<const HypothesisViolation*>(&e)) {
        r.note = std::string("hypothesis violated: ") + e.what();
        r.add("witness", to_values(h->witness()));
      } else if (const auto* v = dynamic_cast<const VanishingFieldError*>(&e)) {
        r.add("vanishing-at", to_values(v->point()));
      }
    }
    r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    report.checks.push_back(std::move(r));
  }
  return report;
}

}  // namespace topocheck
