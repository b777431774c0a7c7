#pragma once

#include <cstdint>
#include <vector>

#include "topocheck/common.hpp"
#include "topocheck/mesh.hpp"

namespace topocheck {

/// Deterministic, roughly uniform directions on S^{n-1}:
///   n = 1  {+1, -1}
///   n = 2  count equally spaced angles starting at 0
///   n = 3  Fibonacci spiral whose first and last points are the poles +-e3
///   n >= 4 normalized Gaussian samples from a fixed seed
std::vector<Vec> direction_grid(int n, int count);

/// Fibonacci spiral with half-step offsets (no pole, no symmetric pairs);
/// used where directions should avoid coordinate-aligned degeneracies.
/// Other dimensions fall back to direction_grid rotated off the axes.
std::vector<Vec> offset_direction_grid(int n, int count);

/// Point containment for a closed hypersurface mesh by ray-crossing parity.
/// The ray direction is resampled when it passes within 1e-9 of a face
/// boundary.
bool inside_closed_mesh(const SimplicialMesh& mesh, const Vec& point, std::uint64_t seed = 7);

}  // namespace topocheck
