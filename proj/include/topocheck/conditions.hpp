#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "topocheck/common.hpp"
#include "topocheck/degree.hpp"
#include "topocheck/equilibria.hpp"
#include "topocheck/field.hpp"
#include "topocheck/limit_cycle.hpp"
#include "topocheck/mesh.hpp"

namespace topocheck {

enum class Verdict { Pass, Violated, Degenerate, Undecided };
std::string verdict_name(Verdict v);

/// How `observed` is compared with `expected`.
enum class Relation { Equal, AtLeast };
std::string relation_name(Relation r);

struct Evidence {
  std::string label;
  std::vector<double> values;
};

struct ConditionReport {
  std::string condition;
  Verdict verdict = Verdict::Undecided;
  double expected = 0.0;
  double observed = 0.0;
  double tolerance = 0.0;
  Relation relation = Relation::Equal;
  std::uint64_t seed = 0;
  std::vector<Evidence> evidence;
  double runtime_ms = 0.0;
  std::string note;
  /// Gauss-image samples kept for plotting (not serialized).
  std::vector<Vec> gauss_image;

  bool passed() const { return verdict == Verdict::Pass; }
  /// Pass or Violated from the stored comparison.
  Verdict compare() const;
  void add(std::string label, std::vector<double> values) { evidence.push_back({std::move(label), std::move(values)}); }
};

std::vector<double> to_values(const Vec& v);

// ---------------------------------------------------------------------------
// Poincare-Hopf balance
// ---------------------------------------------------------------------------

struct BalanceConfig {
  EquilibriumSearch search;
  DegreeConfig degree;
};

/// Sum of boundary-component degrees (components nested an odd number of
/// times are inner and count reversed) against the index sum of equilibria
/// in the enclosed region. `region` must contain the boundary.
ConditionReport poincare_hopf_check(const FieldSpec& f, const std::vector<SimplicialMesh>& boundary, const Box& region,
                                    const BalanceConfig& config = {});

/// Closed-manifold form on the flat torus [0, period]^2: checks periodicity
/// of f (mismatch < 1e-9 on opposite edges), then compares the index sum over
/// one fundamental domain with (-1)^n times the Euler characteristic obtained
/// from the homology of a periodic triangulation.
ConditionReport poincare_hopf_torus_check(const FieldSpec& f, double period, const BalanceConfig& config = {});

// ---------------------------------------------------------------------------
// Brockett surjectivity
// ---------------------------------------------------------------------------

struct ControlNeighborhood {
  double state_radius = 0.2;
  double control_radius = 1.0;
  double epsilon = 0.1;
  int directions = 32;
  int starts = 16;
  int evaluations = 600;  // Nelder-Mead budget per start
  double threshold = 0.05;  // residual must fall below threshold * epsilon
};

ConditionReport brockett_surjectivity_check(const FieldSpec& f, const ControlNeighborhood& nbhd = {},
                                            std::uint64_t seed = 1);

// ---------------------------------------------------------------------------
// Closed-loop index
// ---------------------------------------------------------------------------

/// Index of the closed loop f(x, k(x)) at e against (-1)^(n - expected_k);
/// expected_k counts unstable directions (0 for stabilization).
ConditionReport closed_loop_index_check(const FieldSpec& f, const FeedbackLaw& feedback, const Vec& e, double radius,
                                        int expected_k, const DegreeConfig& config = {});

// ---------------------------------------------------------------------------
// Limit cycles, Lyapunov level sets
// ---------------------------------------------------------------------------

/// For each normal a of the grid, the sign of a . G_X along the cycle must
/// change; generic normals (no sample within 1e-6 of zero) must see an even
/// number of changes.
ConditionReport hemisphere_test(const FieldSpec& f, const ClosedCurve& cycle, int normals = 64);

/// Straight-line homotopy Y_t = (1 - t) X_n + t X between the normal part of
/// X and X on the level mesh, then degree(G_X) against degree(G_{-grad V}).
/// Throws HypothesisViolation when grad V . X >= 0 at some vertex.
ConditionReport isotopy_check(const FieldSpec& f, const ScalarSpec& v, const SimplicialMesh& level, int t_grid = 32,
                              const DegreeConfig& config = {});

/// Minimum, over generic grid directions, of the number of triangles whose
/// G_{-grad V} image contains the direction. Requires a closed connected
/// orientable surface with chi = 0.
ConditionReport preimage_count_check(const ScalarSpec& v, const SimplicialMesh& torus, int directions = 128);

/// Homotopy class of the Gauss map: integer degree on orientable meshes,
/// mod-2 degree otherwise. With `expected`, the verdict compares against it.
ConditionReport classify_homotopy_class(const SimplicialMesh& mesh, const VectorFieldFn& f,
                                        std::optional<int> expected = std::nullopt, const DegreeConfig& config = {});
ConditionReport classify_homotopy_class(const SimplicialMesh& mesh, const FieldSpec& f,
                                        std::optional<int> expected = std::nullopt, const DegreeConfig& config = {});

}  // namespace topocheck
