#include "topocheck/conditions.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "topocheck/directions.hpp"
#include "topocheck/geometry.hpp"
#include "topocheck/homology.hpp"

namespace topocheck {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Violated: return "violated";
    case Verdict::Degenerate: return "degenerate";
    case Verdict::Undecided: return "undecided";
  }
  return "undecided";
}

std::string relation_name(Relation r) { return r == Relation::Equal ? "equal" : "at-least"; }

Verdict ConditionReport::compare() const {
  const bool ok = relation == Relation::Equal ? std::abs(observed - expected) <= tolerance
                                              : observed >= expected - tolerance;
  return ok ? Verdict::Pass : Verdict::Violated;
}

std::vector<double> to_values(const Vec& v) { return {v.data(), v.data() + v.size()}; }

namespace {

class Stopwatch {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace

// ---------------------------------------------------------------------------
// Poincare-Hopf
// ---------------------------------------------------------------------------

ConditionReport poincare_hopf_check(const FieldSpec& f, const std::vector<SimplicialMesh>& boundary, const Box& region,
                                    const BalanceConfig& config) {
  Stopwatch clock;
  const int n = f.state_dim();
  if (boundary.empty()) throw PreconditionError("poincare_hopf_check: at least one boundary component required");
  if (region.dim() != n) throw PreconditionError("poincare_hopf_check: region dimension mismatch");
  for (const SimplicialMesh& c : boundary)
    if (c.ambient_dim() != n || c.dim() != n - 1) throw PreconditionError("poincare_hopf_check: boundary must be hypersurfaces in R^n");

  ConditionReport r;
  r.condition = "poincare-hopf";
  r.seed = config.degree.seed;

  auto nesting = [&](const Vec& p, std::size_t skip) {
    int depth = 0;
    for (std::size_t j = 0; j < boundary.size(); ++j)
      if (j != skip && inside_closed_mesh(boundary[j], p)) ++depth;
    return depth;
  };

  int boundary_sum = 0;
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    const int orientation = nesting(boundary[i].vertex(0), i) % 2 == 0 ? 1 : -1;
    const DegreeResult d = degree(f, boundary[i], config.degree);
    boundary_sum += orientation * d.degree;
    r.add("component", {static_cast<double>(i), static_cast<double>(orientation), static_cast<double>(d.degree), d.raw});
  }

  if (f.control_dim() != 0) throw PreconditionError("poincare_hopf_check: closed dynamics (m = 0) required");
  int index_sum = 0;
  bool undetermined = false;
  for (const Equilibrium& e : find_equilibria(f, region, config.search)) {
    if (nesting(e.location, boundary.size()) % 2 == 0) continue;  // outside W
    std::vector<double> rec = to_values(e.location);
    if (e.index) {
      index_sum += *e.index;
      rec.push_back(*e.index);
    } else {
      undetermined = true;
      rec.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    r.add("equilibrium", std::move(rec));
  }
  r.expected = index_sum;
  r.observed = boundary_sum;
  r.tolerance = 0.0;
  if (undetermined) {
    r.verdict = Verdict::Degenerate;
    r.note = "an enclosed equilibrium has no decidable index";
  } else {
    r.verdict = r.compare();
  }
  r.runtime_ms = clock.ms();
  return r;
}

ConditionReport poincare_hopf_torus_check(const FieldSpec& f, double period, const BalanceConfig& config) {
  Stopwatch clock;
  const int n = f.state_dim();
  if (n != 2) throw PreconditionError("poincare_hopf_torus_check: only the 2-torus is supported");
  if (f.control_dim() != 0) throw PreconditionError("poincare_hopf_torus_check: closed dynamics (m = 0) required");
  if (!(period > 0.0)) throw PreconditionError("poincare_hopf_torus_check: period must be positive");

  ConditionReport r;
  r.condition = "poincare-hopf-torus";
  r.seed = config.degree.seed;

  // the field must descend to the torus
  double mismatch = 0.0;
  Vec witness;
  for (int i = 0; i <= 64; ++i) {
    const double s = period * i / 64.0;
    for (int axis = 0; axis < 2; ++axis) {
      Vec a(2), b(2);
      a[axis] = 0.0;
      b[axis] = period;
      a[1 - axis] = b[1 - axis] = s;
      const double d = (f.evaluate(a) - f.evaluate(b)).norm();
      if (d > mismatch) {
        mismatch = d;
        witness = a;
      }
    }
  }
  r.add("periodicity-mismatch", {mismatch});
  if (mismatch >= 1e-9) throw HypothesisViolation("field is not periodic on the fundamental domain", witness);

  const double pad = 0.05 * period;
  const Box search_box{Vec::Constant(2, -pad), Vec::Constant(2, period + pad)};
  std::vector<Equilibrium> roots;
  for (Equilibrium e : find_equilibria(f, search_box, config.search)) {
    for (int i = 0; i < 2; ++i) {
      e.location[i] = std::fmod(e.location[i], period);
      if (e.location[i] < 0) e.location[i] += period;
      if (period - e.location[i] < 10.0 * config.search.tol) e.location[i] = 0.0;
    }
    const bool seen = std::any_of(roots.begin(), roots.end(), [&](const Equilibrium& q) {
      return (q.location - e.location).norm() < 10.0 * config.search.tol;
    });
    if (!seen) roots.push_back(std::move(e));
  }

  int index_sum = 0;
  bool undetermined = false;
  for (const Equilibrium& e : roots) {
    std::vector<double> rec = to_values(e.location);
    rec.push_back(e.index ? *e.index : std::numeric_limits<double>::quiet_NaN());
    if (e.index)
      index_sum += *e.index;
    else
      undetermined = true;
    r.add("equilibrium", std::move(rec));
  }

  const auto groups = homology_groups(chain_complex_of(flat_torus_mesh(period, 6)));
  const Index chi = euler_characteristic(groups);
  std::vector<double> betti;
  for (const auto& g : groups) betti.push_back(static_cast<double>(g.betti));
  r.add("torus-betti", betti);
  r.add("euler-characteristic", {static_cast<double>(chi)});

  r.expected = parity_sign(n) * static_cast<double>(chi);
  r.observed = index_sum;
  if (undetermined) {
    r.verdict = Verdict::Degenerate;
    r.note = "an equilibrium has no decidable index";
  } else {
    r.verdict = r.compare();
  }
  r.runtime_ms = clock.ms();
  return r;
}

// ---------------------------------------------------------------------------
// Brockett surjectivity
// ---------------------------------------------------------------------------

namespace {

/// Keep the state and control parts inside their balls.
Vec clamp_to_balls(Vec z, int n, double rx, double ru) {
  auto clamp = [](auto seg, double radius) {
    const double norm = seg.norm();
    if (norm > radius) seg *= radius / norm;
  };
  clamp(z.head(n), rx);
  clamp(z.tail(z.size() - n), ru);
  return z;
}

/// Nelder-Mead on the projected objective; returns the best value found.
double nelder_mead(const std::function<double(const Vec&)>& objective, const std::function<Vec(Vec)>& project,
                   const Vec& start, double scale, int budget, double good_enough) {
  const auto dim = start.size();
  std::vector<Vec> pts;
  std::vector<double> vals;
  int evals = 0;
  auto eval = [&](const Vec& p) {
    ++evals;
    return objective(p);
  };
  pts.push_back(project(start));
  for (Eigen::Index k = 0; k < dim; ++k) {
    Vec p = start;
    p[k] += scale;
    pts.push_back(project(p));
  }
  for (const Vec& p : pts) vals.push_back(eval(p));

  std::vector<std::size_t> order(pts.size());
  while (evals < budget) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];
    if (vals[best] < good_enough) break;
    double spread = 0.0;
    for (const Vec& p : pts) spread = std::max(spread, (p - pts[best]).norm());
    if (spread < 1e-12) break;

    Vec centroid = Vec::Zero(dim);
    for (std::size_t i : order)
      if (i != worst) centroid += pts[i];
    centroid /= static_cast<double>(dim);

    const Vec refl = project(centroid + (centroid - pts[worst]));
    const double fr = eval(refl);
    if (fr < vals[best]) {
      const Vec exp = project(centroid + 2.0 * (centroid - pts[worst]));
      const double fe = eval(exp);
      if (fe < fr) {
        pts[worst] = exp;
        vals[worst] = fe;
      } else {
        pts[worst] = refl;
        vals[worst] = fr;
      }
    } else if (fr < vals[second]) {
      pts[worst] = refl;
      vals[worst] = fr;
    } else {
      const bool outside = fr < vals[worst];
      const Vec con = project(outside ? centroid + 0.5 * (refl - centroid) : centroid + 0.5 * (pts[worst] - centroid));
      const double fc = eval(con);
      if (fc < std::min(fr, vals[worst])) {
        pts[worst] = con;
        vals[worst] = fc;
      } else {
        for (std::size_t i = 0; i < pts.size(); ++i) {
          if (i == best) continue;
          pts[i] = project(pts[best] + 0.5 * (pts[i] - pts[best]));
          vals[i] = eval(pts[i]);
        }
      }
    }
  }
  return *std::min_element(vals.begin(), vals.end());
}

}  // namespace

ConditionReport brockett_surjectivity_check(const FieldSpec& f, const ControlNeighborhood& nb, std::uint64_t seed) {
  Stopwatch clock;
  const int n = f.state_dim(), m = f.control_dim();
  if (m < 1) throw PreconditionError("brockett_surjectivity_check: control dimension must be positive");
  if (!(nb.state_radius > 0 && nb.control_radius > 0 && nb.epsilon > 0 && nb.threshold > 0))
    throw PreconditionError("brockett_surjectivity_check: radii, epsilon and threshold must be positive");
  if (nb.directions < 1 || nb.starts < 1 || nb.evaluations < 1)
    throw PreconditionError("brockett_surjectivity_check: grid, starts and budget must be positive");
  const double at_origin = f.evaluate(Vec::Zero(n), Vec::Zero(m)).norm();
  if (at_origin > 1e-9) throw PreconditionError("brockett_surjectivity_check: f(0, 0) must vanish");

  ConditionReport r;
  r.condition = "brockett-surjectivity";
  r.seed = seed;
  const double limit = nb.threshold * nb.epsilon;
  r.tolerance = limit;
  r.expected = 0.0;

  auto project = [&](Vec z) { return clamp_to_balls(std::move(z), n, nb.state_radius, nb.control_radius); };
  const auto dirs = direction_grid(n, nb.directions);
  std::vector<double> residuals;
  int resolved = 0;
  for (std::size_t di = 0; di < dirs.size(); ++di) {
    const Vec target = nb.epsilon * dirs[di];
    auto objective = [&](const Vec& z) {
      try {
        return (f.evaluate(z.head(n), z.tail(m)) - target).squaredNorm();
      } catch (const DomainError&) {
        return std::numeric_limits<double>::infinity();
      }
    };
    Rng rng(seed * 0x9E3779B97F4A7C15ULL + di);
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < nb.starts && best >= limit * limit * 1e-4; ++s) {
      Vec z(n + m);
      if (s == 0) {
        z.setZero();
      } else {
        z.head(n) = rng.in_ball(n, nb.state_radius);
        z.tail(m) = rng.in_ball(m, nb.control_radius);
      }
      const double scale = 0.25 * std::min(nb.state_radius, nb.control_radius);
      best = std::min(best, nelder_mead(objective, project, z, scale, nb.evaluations, limit * limit * 1e-4));
    }
    const double residual = std::sqrt(best);
    residuals.push_back(residual);
    if (residual < limit) {
      ++resolved;
    } else {
      std::vector<double> rec = to_values(dirs[di]);
      rec.push_back(residual);
      r.add("violated-direction", std::move(rec));
    }
  }
  r.add("best-residuals", residuals);
  r.observed = *std::max_element(residuals.begin(), residuals.end());
  if (resolved == 0) {
    r.verdict = Verdict::Undecided;
    r.note = "no direction reached the residual threshold within the optimizer budget";
  } else {
    r.verdict = resolved == static_cast<int>(dirs.size()) ? Verdict::Pass : Verdict::Violated;
  }
  r.runtime_ms = clock.ms();
  return r;
}

// ---------------------------------------------------------------------------
// Closed-loop index
// ---------------------------------------------------------------------------

ConditionReport closed_loop_index_check(const FieldSpec& f, const FeedbackLaw& feedback, const Vec& e, double radius,
                                        int expected_k, const DegreeConfig& config) {
  Stopwatch clock;
  const int n = f.state_dim();
  if (expected_k < 0 || expected_k > n) throw PreconditionError("closed_loop_index_check: expected_k must lie in 0..n");
  const FieldSpec closed = close_loop(f, feedback);
  if (closed.evaluate(e).norm() > 1e-8) throw PreconditionError("closed_loop_index_check: e is not an equilibrium of the closed loop");

  ConditionReport r;
  r.condition = "closed-loop-index";
  r.seed = config.seed;
  r.expected = parity_sign(n - expected_k);
  r.note = "closed loop: " + closed.to_string();

  EquilibriumSearch search;
  search.grid = n <= 3 ? 9 : 5;
  search.tol = std::min(1e-6, 1e-4 * radius);
  search.degenerate_index = false;
  std::vector<Equilibrium> near;
  for (Equilibrium& q : find_equilibria(closed, Box::cube(e, 2.0 * radius), search))
    if ((q.location - e).norm() <= 2.0 * radius) near.push_back(std::move(q));
  const bool singular = std::any_of(near.begin(), near.end(), [](const Equilibrium& q) { return !q.hyperbolic; });
  if (near.size() > 1) {
    for (const Equilibrium& q : near) r.add("equilibrium", to_values(q.location));
    r.verdict = Verdict::Degenerate;
    r.note = (singular ? "non-isolated equilibria near e; " : "other equilibria inside the test ball; ") + r.note;
    r.observed = std::numeric_limits<double>::quiet_NaN();
    r.runtime_ms = clock.ms();
    return r;
  }

  const DegreeResult idx = topological_index(closed, e, radius, config);
  r.observed = idx.degree;
  r.add("index", {static_cast<double>(idx.degree), idx.raw, idx.residual});
  r.verdict = r.compare();
  r.runtime_ms = clock.ms();
  return r;
}

// ---------------------------------------------------------------------------
// Limit cycles
// ---------------------------------------------------------------------------

ConditionReport hemisphere_test(const FieldSpec& f, const ClosedCurve& cycle, int normals) {
  Stopwatch clock;
  const int n = f.state_dim();
  if (cycle.points.size() < 3) throw PreconditionError("hemisphere_test: cycle needs at least three samples");
  std::vector<Vec> images;
  for (const Vec& p : cycle.points) {
    if (p.size() != n) throw PreconditionError("hemisphere_test: cycle dimension mismatch");
    images.push_back(gauss_map(f, p));
  }

  ConditionReport r;
  r.condition = "hemisphere";
  r.expected = 0.0;
  r.tolerance = 0.0;
  std::vector<double> counts, generic_flags;
  int bad = 0;
  for (const Vec& a : direction_grid(n, normals)) {
    bool generic = true;
    int crossings = 0, first = 0, last = 0;
    for (const Vec& g : images) {
      const double s = a.dot(g);
      if (std::abs(s) < 1e-6) {
        generic = false;
        continue;
      }
      const int sg = s > 0 ? 1 : -1;
      if (first == 0) first = sg;
      if (last != 0 && sg != last) ++crossings;
      last = sg;
    }
    if (first != 0 && last != first) ++crossings;  // close the loop
    counts.push_back(crossings);
    generic_flags.push_back(generic ? 1.0 : 0.0);
    if (crossings == 0 || (generic && crossings % 2 != 0)) {
      ++bad;
      std::vector<double> rec = to_values(a);
      rec.push_back(crossings);
      r.add(crossings == 0 ? "uncovered-normal" : "odd-normal", std::move(rec));
    }
  }
  r.add("crossings", counts);
  r.add("generic", generic_flags);
  r.observed = bad;
  r.verdict = r.compare();
  r.runtime_ms = clock.ms();
  return r;
}

// ---------------------------------------------------------------------------
// Lyapunov level sets
// ---------------------------------------------------------------------------

ConditionReport isotopy_check(const FieldSpec& f, const ScalarSpec& v, const SimplicialMesh& level, int t_grid,
                              const DegreeConfig& config) {
  Stopwatch clock;
  const int n = f.state_dim();
  if (v.dim() != n || level.ambient_dim() != n) throw PreconditionError("isotopy_check: dimension mismatch");
  if (t_grid < 2) throw PreconditionError("isotopy_check: t grid needs at least two points");

  double min_y = std::numeric_limits<double>::infinity();
  Vec min_at;
  for (const Vec& x : level.vertices()) {
    const Vec g = v.gradient(x);
    const Vec fx = f.evaluate(x);
    if (!(g.dot(fx) < 0.0)) throw HypothesisViolation("V does not decrease along X at a level-set vertex", x);
    const Vec normal_part = (fx.dot(g) / g.squaredNorm()) * g;
    for (int i = 0; i < t_grid; ++i) {
      const double t = static_cast<double>(i) / (t_grid - 1);
      const double y = ((1.0 - t) * normal_part + t * fx).norm();
      if (y < min_y) {
        min_y = y;
        min_at = x;
      }
    }
  }

  ConditionReport r;
  r.condition = "isotopy";
  r.seed = config.seed;
  r.add("min-|Y_t|", {min_y});
  r.add("t-grid", {static_cast<double>(t_grid)});
  const auto minus_grad = [&v](const Vec& x) -> Vec { return -v.gradient(x); };
  const DegreeResult dv = degree(minus_grad, level, config);
  r.expected = dv.degree;
  if (!(min_y > 1e-9)) {
    r.add("vanishing-Y_t", to_values(min_at));
    r.observed = std::numeric_limits<double>::quiet_NaN();
    r.verdict = Verdict::Violated;
    r.runtime_ms = clock.ms();
    return r;
  }
  const DegreeResult dx = degree(f, level, config);
  r.observed = dx.degree;
  r.add("degrees", {static_cast<double>(dx.degree), static_cast<double>(dv.degree)});
  r.verdict = r.compare();
  r.runtime_ms = clock.ms();
  return r;
}

ConditionReport preimage_count_check(const ScalarSpec& v, const SimplicialMesh& torus, int directions) {
  Stopwatch clock;
  if (torus.ambient_dim() != 3 || torus.dim() != 2) throw PreconditionError("preimage_count_check: surface in R^3 required");
  if (!torus.is_closed()) throw PreconditionError("preimage_count_check: surface must be closed");
  const Index chi = euler_characteristic(torus);
  if (chi != 0) throw PreconditionError("preimage_count_check: Euler characteristic is " + std::to_string(chi) + ", a torus needs 0");
  if (!orient_mesh(torus).orientable) throw PreconditionError("preimage_count_check: surface must be orientable");

  std::vector<Vec> images;
  images.reserve(torus.vertex_count());
  const auto minus_grad = [&v](const Vec& x) -> Vec { return -v.gradient(x); };
  for (const Vec& x : torus.vertices()) images.push_back(gauss_map(minus_grad, x));

  ConditionReport r;
  r.condition = "preimage-count";
  r.relation = Relation::AtLeast;
  r.expected = 2.0;
  r.tolerance = 0.0;
  std::vector<double> counts;
  int excluded = 0;
  int minimum = std::numeric_limits<int>::max();
  Vec arg_min;
  for (const Vec& d : offset_direction_grid(3, directions)) {
    const PreimageCount c = count_preimages(images, torus, d);
    if (c.near_boundary) {
      ++excluded;
      counts.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    counts.push_back(c.unsigned_count);
    if (c.unsigned_count < minimum) {
      minimum = c.unsigned_count;
      arg_min = d;
    }
  }
  r.add("counts", counts);
  r.add("excluded-directions", {static_cast<double>(excluded)});
  if (minimum == std::numeric_limits<int>::max()) {
    r.verdict = Verdict::Undecided;
    r.note = "no generic direction in the grid";
    r.runtime_ms = clock.ms();
    return r;
  }
  r.add("minimum-direction", to_values(arg_min));
  r.observed = minimum;
  r.verdict = r.compare();
  r.runtime_ms = clock.ms();
  return r;
}

ConditionReport classify_homotopy_class(const SimplicialMesh& mesh, const VectorFieldFn& f, std::optional<int> expected,
                                        const DegreeConfig& config) {
  Stopwatch clock;
  if (!mesh.is_closed()) throw PreconditionError("classify_homotopy_class: mesh must be closed");
  const OrientationReport o = orient_mesh(mesh);

  ConditionReport r;
  r.condition = "homotopy-class";
  r.seed = config.seed;
  r.add("orientable", {o.orientable ? 1.0 : 0.0});
  int cls = 0;
  if (o.orientable) {
    const DegreeResult d = degree(f, mesh.with_signs(o.apply(mesh)), config);
    cls = d.degree;
    r.add("degree", {static_cast<double>(d.degree), d.raw, d.residual});
    r.note = "class is the integer degree";
  } else {
    const DegreeResult d = mod2_degree(f, mesh, config);
    cls = d.degree;
    r.add("mod2-degree", {static_cast<double>(d.degree)});
    std::vector<double> cycle(o.odd_cycle.begin(), o.odd_cycle.end());
    r.add("odd-cycle", cycle);
    r.note = "class is the mod-2 degree";
  }
  r.observed = cls;
  if (expected) {
    r.expected = *expected;
    r.verdict = r.compare();
  } else {
    r.expected = cls;
    r.verdict = Verdict::Pass;
  }
  r.runtime_ms = clock.ms();
  return r;
}

ConditionReport classify_homotopy_class(const SimplicialMesh& mesh, const FieldSpec& f, std::optional<int> expected,
                                        const DegreeConfig& config) {
  return classify_homotopy_class(mesh, f.as_function(), expected, config);
}

}  // namespace topocheck
