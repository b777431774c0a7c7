#pragma once

#include <string>

#include "topocheck/report.hpp"

namespace topocheck {

/// True when some check kept Gauss-image samples.
bool has_gauss_images(const RunReport& r);

/// SVG of the Gauss images of a run. For n = 2 each curve is drawn as a
/// spiral (radius grows with the sample index) annotated with its winding
/// number; hemisphere checks also mark hyperplane crossings per grid
/// normal. For n = 3 the samples are shown in the three coordinate-plane
/// projections. Throws PreconditionError for other n or when no check kept
/// samples.
std::string render_svg(const RunReport& r, int n);

/// scenario,check,condition,sample,g1..gn rows for any n.
std::string gauss_image_csv(const RunReport& r);

/// Winding number of a closed sampled planar curve around the origin.
double sampled_winding(const std::vector<Vec>& curve);

}  // namespace topocheck
