#include "topocheck/limit_cycle.hpp"

#include <cmath>
#include <optional>

namespace topocheck {

std::vector<Vec> ClosedCurve::closed_points() const {
  std::vector<Vec> out = points;
  if (!out.empty()) out.push_back(out.front());
  return out;
}

ClosedCurve ClosedCurve::embedded_in_3d() const {
  ClosedCurve out = *this;
  for (Vec& p : out.points) {
    if (p.size() > 3) throw PreconditionError("embedded_in_3d: curve dimension exceeds 3");
    Vec q = Vec::Zero(3);
    q.head(p.size()) = p;
    p = q;
  }
  return out;
}

double ClosedCurve::max_step() const {
  double m = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) m = std::max(m, (points[(i + 1) % points.size()] - points[i]).norm());
  return m;
}

Vec rk4_step(const VectorFieldFn& f, const Vec& x, double h) {
  const Vec k1 = f(x);
  const Vec k2 = f(x + 0.5 * h * k1);
  const Vec k3 = f(x + 0.5 * h * k2);
  const Vec k4 = f(x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace {

struct Section {
  Vec origin;
  Vec normal;
  double operator()(const Vec& x) const { return normal.dot(x - origin); }
};

struct Return {
  Vec point;
  double time;
  double reach;  // largest distance from the section origin along the way
};

// Hénon's trick: one RK4 step with the section coordinate as the independent
// variable lands on the section directly.
std::pair<Vec, double> henon_step(const VectorFieldFn& f, const Section& sec, const Vec& x) {
  const int n = static_cast<int>(x.size());
  auto g = [&](const Vec& y) {
    const Vec fx = f(y.head(n));
    const double rate = sec.normal.dot(fx);
    Vec out(n + 1);
    out.head(n) = fx / rate;
    out[n] = 1.0 / rate;
    return out;
  };
  Vec y(n + 1);
  y.head(n) = x;
  y[n] = 0.0;
  const Vec landed = rk4_step(g, y, -sec(x));
  return {landed.head(n), landed[n]};
}

std::optional<Return> first_return(const VectorFieldFn& f, const Section& sec, const Vec& start, double h,
                                   double budget) {
  Vec x = start;
  double t = 0.0, reach = 0.0;
  while (t < budget) {
    const Vec next = rk4_step(f, x, h);
    if (!next.allFinite() || next.norm() > 1e8) return std::nullopt;
    reach = std::max(reach, (next - sec.origin).norm());
    if (t > 0.0 && sec(x) < 0.0 && sec(next) >= 0.0) {
      auto [p, dt] = henon_step(f, sec, x);
      // crossings far from the origin belong to another branch of the orbit
      if ((p - sec.origin).norm() < 0.3 * reach) return Return{p, t + dt, reach};
    }
    x = next;
    t += h;
  }
  return std::nullopt;
}

}  // namespace

ClosedCurve locate_limit_cycle(const FieldSpec& spec, const Vec& seed, const IntegrationConfig& cfg) {
  const int n = spec.state_dim();
  if (n != 2 && n != 3) throw PreconditionError("locate_limit_cycle: n must be 2 or 3");
  if (seed.size() != n) throw PreconditionError("locate_limit_cycle: seed dimension mismatch");
  if (!(cfg.step > 0.0)) throw PreconditionError("locate_limit_cycle: step must be positive");
  const VectorFieldFn f = spec.as_function();
  const double h = cfg.step;

  Vec x = seed;
  for (double t = 0.0; t < cfg.transient; t += h) x = rk4_step(f, x, h);
  if (!x.allFinite() || x.norm() > 1e8) throw NoReturnError("trajectory diverged during the transient");
  const Vec fx = f(x);
  if (fx.norm() < 1e-8) throw NoReturnError("trajectory settled at an equilibrium");

  const Section sec{x, fx.normalized()};
  Vec p = x;
  double used = 0.0;
  std::optional<Return> ret;
  while (true) {
    ret = first_return(f, sec, p, h, cfg.max_time - used);
    if (!ret) throw NoReturnError("no return to the section within the time budget");
    used += ret->time;
    const double moved = (ret->point - p).norm();
    p = ret->point;
    if (moved < cfg.return_tolerance) break;
    if (used >= cfg.max_time) throw NoReturnError("returns did not settle within the time budget");
  }
  const double period = ret->time;

  // contraction of the return map, probed along every direction in the section
  Mat basis = Mat::Identity(n, n);
  basis.col(0) = sec.normal;
  const Eigen::HouseholderQR<Mat> qr(basis);
  const Mat q = qr.householderQ();
  const double delta = cfg.perturbation * ret->reach;
  double multiplier = 0.0;
  for (int k = 1; k < n; ++k) {
    const auto probe = first_return(f, sec, p + delta * q.col(k), h, 4.0 * period + 10.0 * h);
    if (!probe) throw NonContractingError("perturbed orbit did not return", INFINITY);
    multiplier = std::max(multiplier, (probe->point - p).norm() / delta);
  }
  if (!(multiplier < 1.0 - 1e-3)) throw NonContractingError("return map is not contracting", multiplier);

  // equal time sampling over one period, fine enough in space
  double vmax = 0.0;
  {
    Vec y = p;
    for (double t = 0.0; t < period; t += h) {
      vmax = std::max(vmax, f(y).norm());
      y = rk4_step(f, y, h);
    }
  }
  auto samples = static_cast<std::size_t>(std::ceil(std::max(period / h, 1.25 * vmax * period / cfg.max_sample_gap)));
  for (int attempt = 0; attempt < 4; ++attempt, samples *= 2) {
    ClosedCurve curve;
    curve.period = period;
    const double dt = period / static_cast<double>(samples);
    Vec y = p;
    for (std::size_t i = 0; i < samples; ++i) {
      curve.points.push_back(y);
      y = rk4_step(f, y, dt);
    }
    curve.closure_residual = (y - p).norm();
    if (curve.max_step() >= cfg.max_sample_gap) continue;
    if (curve.closure_residual >= 1e-6) throw LimitCycleError("sampled orbit does not close (residual " + std::to_string(curve.closure_residual) + ")");
    return curve;
  }
  throw LimitCycleError("could not sample the orbit finely enough");
}

}  // namespace topocheck
