#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "topocheck/common.hpp"
#include "topocheck/field.hpp"
#include "topocheck/mesh.hpp"

namespace topocheck {

/// Norm below which a field counts as vanishing for the Gauss map.
inline constexpr double kVanishingNorm = 1e-10;

/// X(x) / |X(x)|; throws VanishingFieldError when |X(x)| <= 1e-10.
Vec gauss_map(const VectorFieldFn& f, const Vec& x);
Vec gauss_map(const FieldSpec& f, const Vec& x);

enum class DegreeMethod { Sign, Winding, SolidAngle, RegularValue };
std::string method_name(DegreeMethod m);

struct DegreeConfig {
  /// Simplices whose image has an edge longer than this (radians) get split.
  double max_image_angle = 0.5;
  int max_depth = 40;
  std::size_t max_simplices = 400000;
  /// Raw values within this distance of an integer are snapped.
  double snap_tolerance = 0.25;
  std::uint64_t seed = 1;
  /// Regular values averaged for n >= 4 (and for mod-2 counts).
  int regular_values = 3;
};

struct DegreeResult {
  int degree = 0;
  double raw = 0.0;
  double residual = 0.0;
  int depth = 0;  // refinement rounds
  DegreeMethod method = DegreeMethod::Winding;
  Vec regular_value;  // empty unless a regular value was counted
  std::uint64_t seed = 0;
  std::size_t simplices = 0;  // simplex count after refinement
};

/// Degree of the Gauss map of f on a closed, oriented hypersurface mesh:
/// winding number (n = 2), signed solid angle (n = 3), or signed count of
/// preimages of random regular values (n >= 4). The mesh is bisected along
/// edges whose image is longer than `max_image_angle` until the estimate is
/// within `snap_tolerance` of an integer.
DegreeResult degree(const VectorFieldFn& f, const SimplicialMesh& mesh, const DegreeConfig& config = {});
DegreeResult degree(const FieldSpec& f, const SimplicialMesh& mesh, const DegreeConfig& config = {});

/// Parity of the number of image simplices covering a regular value, for
/// vertex images given directly (one unit n-vector per mesh vertex). Works
/// on non-orientable meshes. No refinement is possible, so the images must
/// already resolve the map.
int mod2_degree(const std::vector<Vec>& images, const SimplicialMesh& mesh, std::uint64_t seed = 1,
                int regular_values = 3);

/// Same, for the Gauss map of a field, with adaptive refinement.
DegreeResult mod2_degree(const VectorFieldFn& f, const SimplicialMesh& mesh, const DegreeConfig& config = {});

/// Signed (orientation-weighted) and unsigned preimage counts of `value`
/// under the piecewise-linear spherical map given by vertex images.
struct PreimageCount {
  int signed_count = 0;
  int unsigned_count = 0;
  bool near_boundary = false;  // value within 1e-6 of some image simplex boundary
};
PreimageCount count_preimages(const std::vector<Vec>& images, const SimplicialMesh& mesh, const Vec& value);

}  // namespace topocheck
