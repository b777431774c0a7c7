#pragma once

#include <vector>

#include "topocheck/common.hpp"
#include "topocheck/field.hpp"

namespace topocheck {

/// Periodic orbit sampled at equal time steps (the first point is not repeated).
struct ClosedCurve {
  std::vector<Vec> points;
  double period = 0.0;
  double closure_residual = 0.0;

  /// Samples with the first point appended at the end.
  std::vector<Vec> closed_points() const;
  /// Same curve lifted into R^3 by appending zero coordinates (n = 2 only).
  ClosedCurve embedded_in_3d() const;
  double max_step() const;
};

class LimitCycleError : public Error {
 public:
  using Error::Error;
};

/// The trajectory never came back to the section within the time budget.
class NoReturnError : public LimitCycleError {
 public:
  using LimitCycleError::LimitCycleError;
};

/// Returns settled but the return map does not contract (a center, or a
/// cycle that is not attracting from this seed).
class NonContractingError : public LimitCycleError {
 public:
  NonContractingError(const std::string& what, double multiplier) : LimitCycleError(what), multiplier_(multiplier) {}
  double multiplier() const { return multiplier_; }

 private:
  double multiplier_;
};

struct IntegrationConfig {
  double step = 0.01;
  double transient = 50.0;       // time integrated before the section is placed
  double max_time = 2000.0;      // total budget after the transient
  double return_tolerance = 1e-6;
  double max_sample_gap = 0.05;  // spatial gap between output samples
  double perturbation = 1e-3;    // contraction probe size, relative to cycle diameter
};

/// One classical Runge-Kutta step.
Vec rk4_step(const VectorFieldFn& f, const Vec& x, double h);

/// Attracting periodic orbit reached from `seed` (n = 2 or 3), found by
/// iterating the first-return map of a fixed section through the
/// post-transient point (normal along the flow).
ClosedCurve locate_limit_cycle(const FieldSpec& f, const Vec& seed, const IntegrationConfig& config = {});

}  // namespace topocheck
