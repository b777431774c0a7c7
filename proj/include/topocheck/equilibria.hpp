#pragma once

#include <optional>
#include <vector>

#include "topocheck/common.hpp"
#include "topocheck/degree.hpp"
#include "topocheck/field.hpp"

namespace topocheck {

/// Real parts closer to zero than this make an equilibrium non-hyperbolic.
inline constexpr double kHyperbolicMargin = 1e-7;

class NonHyperbolicError : public Error {
 public:
  using Error::Error;
};

/// Another equilibrium sits inside the ball where an index was requested.
class IsolationError : public Error {
 public:
  IsolationError(const std::string& what, Vec other) : Error(what), other_(std::move(other)) {}
  const Vec& other() const { return other_; }

 private:
  Vec other_;
};

struct Equilibrium {
  Vec location;
  Mat jacobian;
  bool hyperbolic = false;
  int stable = 0;    // eigenvalues with negative real part
  int unstable = 0;  // positive real part
  int central = 0;   // real part within kHyperbolicMargin of zero
  /// sign det J when hyperbolic, else the degree on a small sphere; empty
  /// when that fallback could not be decided (e.g. non-isolated zeros).
  std::optional<int> index;
  double residual = 0.0;  // |X(location)|
};

/// sign det J; throws NonHyperbolicError when an eigenvalue has real part
/// within 1e-7 of zero. Equals (-1)^(number of stable directions).
int hyperbolic_index(const Mat& j);

struct EquilibriumSearch {
  int grid = 9;           // seeds per axis, endpoints included
  double tol = 1e-6;      // position tolerance; roots merge within 10 * tol
  int max_iterations = 40;
  bool degenerate_index = true;  // run the degree fallback for singular J
  DegreeConfig degree;
};

/// Newton from a uniform grid of seeds over `box`; converged roots inside
/// the box are deduplicated and classified. Requires m = 0.
std::vector<Equilibrium> find_equilibria(const FieldSpec& f, const Box& box, const EquilibriumSearch& search = {});
std::vector<Equilibrium> find_equilibria(const FieldSpec& f, const Box& box, int grid, double tol);

/// Degree of the Gauss map on a sphere of the given radius around e (sign
/// change of f across e when n = 1). Checks that no other equilibrium lies
/// within 2 * radius and that radius / 2 gives the same value.
DegreeResult topological_index(const FieldSpec& f, const Vec& e, double radius, const DegreeConfig& config = {});

/// Default sphere refinement used for index spheres in dimension n.
int index_sphere_refinement(int n);

}  // namespace topocheck
