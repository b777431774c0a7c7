#pragma once

#include <vector>

#include "topocheck/common.hpp"
#include "topocheck/field.hpp"
#include "topocheck/mesh.hpp"

namespace topocheck {

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

/// Closed, outward-oriented (n-1)-sphere of the given radius:
///   n = 2   regular polygon with 8 * 2^refinement edges,
///   n = 3   icosphere (10 * 4^refinement + 2 vertices),
///   n >= 4  boundary of the cross-polytope, edgewise-refined `refinement` times.
/// Every vertex lies on the sphere.
SimplicialMesh build_sphere_mesh(int n, const Vec& center, double radius, int refinement);

/// Number of polygon segments build_sphere_mesh uses for n = 2.
int circle_segments(int refinement);

/// Torus around a closed space curve, built from a rotation-minimizing frame.
/// `curve` must repeat its first point at the end (within 1e-9).
/// `resolution` is the number of vertices per cross-section ring.
SimplicialMesh tubular_neighborhood_mesh(const std::vector<Vec>& curve, double radius, int resolution);

/// Figure-eight immersion of the Klein bottle in R^3 (ring radius 2),
/// triangulated on a rings x segments grid with the twisted identification.
SimplicialMesh klein_bottle_mesh(int rings = 12, int segments = 8);

/// Six-vertex real projective plane (antipodal quotient of the icosahedron),
/// placed in R^3 through the Roman-surface map.
SimplicialMesh projective_plane_mesh();

/// Periodic triangulation of the flat torus [0, period]^2 (ambient = dim = 2).
SimplicialMesh flat_torus_mesh(double period, int cells);

// ---------------------------------------------------------------------------
// Level sets
// ---------------------------------------------------------------------------

/// Some extracted vertex sits where grad V is (numerically) zero.
class RegularityError : public Error {
 public:
  RegularityError(const std::string& what, Vec point) : Error(what), point_(std::move(point)) {}
  const Vec& point() const { return point_; }

 private:
  Vec point_;
};

/// Mesh of {V = level} inside `box` for n = 2 (segments) or n = 3 (triangles).
/// The grid has `resolution` cells per axis; each cell is split into Kuhn
/// simplices and crossed linearly. Orientation: outward normal along +grad V.
/// Vertices receive one Newton step back onto the level.
SimplicialMesh extract_level_set(const ScalarSpec& v, double level, const Box& box, int resolution);

/// One Newton step x <- x - (V(x) - level) grad V / |grad V|^2.
Vec project_to_level(const ScalarSpec& v, double level, const Vec& x);

// ---------------------------------------------------------------------------
// Orientation
// ---------------------------------------------------------------------------

struct OrientationReport {
  bool orientable = false;
  /// Per-simplex factor (+1 keep, -1 flip) making the mesh coherent; empty
  /// when not orientable. The first simplex of each component is kept.
  std::vector<int> flips;
  /// Closed walk of adjacent simplices whose orientation constraints are
  /// inconsistent; empty when orientable.
  std::vector<std::size_t> odd_cycle;

  /// Mesh signs after applying `flips`.
  std::vector<int> apply(const SimplicialMesh& mesh) const;
};

/// Propagate orientations across shared faces. Throws MeshError on a face
/// shared by more than two simplices.
OrientationReport orient_mesh(const SimplicialMesh& mesh);

/// Orientation constraint product around a closed walk of simplices (+1 means
/// consistent). Used to validate witness cycles.
int cycle_orientation_parity(const SimplicialMesh& mesh, const std::vector<std::size_t>& cycle);

}  // namespace topocheck
