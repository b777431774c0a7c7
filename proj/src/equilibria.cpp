#include "topocheck/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "topocheck/geometry.hpp"

namespace topocheck {

int hyperbolic_index(const Mat& j) {
  if (j.rows() != j.cols() || j.rows() == 0) throw PreconditionError("hyperbolic_index: square matrix required");
  const Eigen::EigenSolver<Mat> es(j, false);
  for (Eigen::Index i = 0; i < j.rows(); ++i)
    if (std::abs(es.eigenvalues()[i].real()) < kHyperbolicMargin)
      throw NonHyperbolicError("Jacobian has an eigenvalue on the imaginary axis");
  return sign_of(j.determinant());
}

int index_sphere_refinement(int n) { return n == 2 ? 2 : n == 3 ? 1 : 0; }

namespace {

std::vector<double> linspace(double lo, double hi, int count) {
  if (count == 1) return {0.5 * (lo + hi)};
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
  return out;
}

/// Newton with a pseudo-inverse step. Each step also tries integer multiples
/// of the Newton correction and keeps the best, which restores fast
/// convergence at roots of multiplicity up to 4.
std::optional<Vec> newton(const FieldSpec& f, Vec x, const EquilibriumSearch& s) {
  try {
    Vec fx = f.evaluate(x);
    for (int it = 0; it < s.max_iterations; ++it) {
      const Mat j = f.jacobian(x);
      const Vec step = j.completeOrthogonalDecomposition().solve(fx);
      if (!step.allFinite()) return std::nullopt;
      Vec best_x = x - step;
      Vec best_f = f.evaluate(best_x);
      for (int mult = 2; mult <= 4; ++mult) {
        const Vec cand = x - mult * step;
        Vec fc;
        try {
          fc = f.evaluate(cand);
        } catch (const DomainError&) {
          continue;
        }
        if (fc.norm() < best_f.norm()) {
          best_x = cand;
          best_f = fc;
        }
      }
      const double moved = (best_x - x).norm();
      x = best_x;
      fx = best_f;
      if (fx.norm() == 0.0 || (moved < 0.1 * s.tol && fx.norm() < 1e-8)) return x;
    }
    if (fx.norm() < 1e-10) return x;
  } catch (const DomainError&) {
  }
  return std::nullopt;
}

}  // namespace

std::vector<Equilibrium> find_equilibria(const FieldSpec& f, const Box& box, const EquilibriumSearch& search) {
  const int n = f.state_dim();
  if (f.control_dim() != 0) throw PreconditionError("find_equilibria: closed dynamics (m = 0) required");
  if (box.dim() != n) throw PreconditionError("find_equilibria: box dimension mismatch");
  if (search.grid < 1 || search.tol <= 0.0) throw PreconditionError("find_equilibria: grid >= 1 and tol > 0 required");

  std::vector<std::vector<double>> axes;
  for (int i = 0; i < n; ++i) axes.push_back(linspace(box.lower[i], box.upper[i], search.grid));

  std::vector<Vec> roots;
  std::vector<int> digit(static_cast<std::size_t>(n), 0);
  while (true) {
    Vec seed(n);
    for (int i = 0; i < n; ++i) seed[i] = axes[static_cast<std::size_t>(i)][static_cast<std::size_t>(digit[static_cast<std::size_t>(i)])];
    if (auto r = newton(f, seed, search); r && box.contains(*r, search.tol)) {
      const bool seen = std::any_of(roots.begin(), roots.end(), [&](const Vec& q) { return (q - *r).norm() < 10.0 * search.tol; });
      if (!seen) roots.push_back(*r);
    }
    int k = 0;
    while (k < n && ++digit[static_cast<std::size_t>(k)] == search.grid) digit[static_cast<std::size_t>(k++)] = 0;
    if (k == n) break;
  }
  // deterministic order independent of seed traversal
  std::sort(roots.begin(), roots.end(), [](const Vec& a, const Vec& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });

  double half_width = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) half_width = std::min(half_width, 0.5 * (box.upper[i] - box.lower[i]));

  std::vector<Equilibrium> out;
  for (std::size_t r = 0; r < roots.size(); ++r) {
    Equilibrium e;
    e.location = roots[r];
    e.residual = f.evaluate(e.location).norm();
    e.jacobian = f.jacobian(e.location);
    const Eigen::EigenSolver<Mat> es(e.jacobian, false);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double re = es.eigenvalues()[i].real();
      if (std::abs(re) < kHyperbolicMargin)
        ++e.central;
      else
        ++(re < 0 ? e.stable : e.unstable);
    }
    e.hyperbolic = e.central == 0;
    if (e.hyperbolic) {
      e.index = sign_of(e.jacobian.determinant());
    } else if (search.degenerate_index) {
      double nearest = half_width > 0 ? half_width : 1.0;
      for (std::size_t q = 0; q < roots.size(); ++q)
        if (q != r) nearest = std::min(nearest, (roots[q] - roots[r]).norm());
      const double rho = 0.25 * nearest;
      try {
        if (n == 1) {
          const int hi = sign_of(f.evaluate(e.location + Vec::Constant(1, rho))[0]);
          const int lo = sign_of(f.evaluate(e.location - Vec::Constant(1, rho))[0]);
          if (hi != 0 && lo != 0) e.index = (hi - lo) / 2;
        } else {
          DegreeConfig cfg = search.degree;
          cfg.max_simplices = std::min<std::size_t>(cfg.max_simplices, 50000);
          e.index = degree(f, build_sphere_mesh(n, e.location, rho, index_sphere_refinement(n)), cfg).degree;
        }
      } catch (const Error&) {
        e.index.reset();
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<Equilibrium> find_equilibria(const FieldSpec& f, const Box& box, int grid, double tol) {
  EquilibriumSearch s;
  s.grid = grid;
  s.tol = tol;
  return find_equilibria(f, box, s);
}

namespace {

DegreeResult index_at(const FieldSpec& f, const Vec& e, double radius, const DegreeConfig& config) {
  const int n = f.state_dim();
  if (n == 1) {
    const double hi = f.evaluate(e + Vec::Constant(1, radius))[0];
    const double lo = f.evaluate(e - Vec::Constant(1, radius))[0];
    if (std::abs(hi) <= kVanishingNorm) throw VanishingFieldError("field vanishes on the index sphere", e + Vec::Constant(1, radius));
    if (std::abs(lo) <= kVanishingNorm) throw VanishingFieldError("field vanishes on the index sphere", e - Vec::Constant(1, radius));
    DegreeResult r;
    r.degree = (sign_of(hi) - sign_of(lo)) / 2;
    r.raw = r.degree;
    r.method = DegreeMethod::Sign;
    r.seed = config.seed;
    r.simplices = 2;
    return r;
  }
  return degree(f, build_sphere_mesh(n, e, radius, index_sphere_refinement(n)), config);
}

}  // namespace

DegreeResult topological_index(const FieldSpec& f, const Vec& e, double radius, const DegreeConfig& config) {
  const int n = f.state_dim();
  if (f.control_dim() != 0) throw PreconditionError("topological_index: closed dynamics (m = 0) required");
  if (e.size() != n) throw PreconditionError("topological_index: point dimension mismatch");
  if (!(radius > 0.0)) throw PreconditionError("topological_index: radius must be positive");

  EquilibriumSearch search;
  search.grid = n <= 3 ? 9 : 5;
  search.tol = std::min(1e-6, 1e-4 * radius);
  search.degenerate_index = false;
  const double same = std::max(10.0 * search.tol, 1e-3 * radius);
  for (const Equilibrium& q : find_equilibria(f, Box::cube(e, 2.0 * radius), search)) {
    const double d = (q.location - e).norm();
    if (d > same && d <= 2.0 * radius) throw IsolationError("second equilibrium inside the index ball", q.location);
  }

  DegreeResult full = index_at(f, e, radius, config);
  const DegreeResult half = index_at(f, e, 0.5 * radius, config);
  if (half.degree != full.degree)
    throw DegreeUndecidedError("index differs between radius " + std::to_string(radius) + " and half of it", full.raw);
  return full;
}

}  // namespace topocheck
