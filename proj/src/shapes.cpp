#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "topocheck/geometry.hpp"

namespace topocheck {

namespace {

/// det[normal, v1 - v0, ..., v_d - v0] for a hypersurface simplex.
double outward_determinant(const std::vector<Vec>& verts, const Simplex& s, const Vec& normal) {
  const auto n = normal.size();
  Mat m(n, n);
  m.col(0) = normal;
  for (std::size_t k = 1; k < s.size(); ++k)
    m.col(static_cast<Eigen::Index>(k)) = verts[static_cast<std::size_t>(s[k])] - verts[static_cast<std::size_t>(s[0])];
  return m.determinant();
}

void orient_about_center(const std::vector<Vec>& verts, std::vector<Simplex>& simplices, const Vec& center) {
  for (Simplex& s : simplices) {
    Vec centroid = Vec::Zero(center.size());
    for (Index v : s) centroid += verts[static_cast<std::size_t>(v)];
    centroid /= static_cast<double>(s.size());
    if (outward_determinant(verts, s, centroid - center) < 0) std::swap(s[0], s[1]);
  }
}

SimplicialMesh unit_icosahedron() {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec> verts;
  for (double a : {-1.0, 1.0})
    for (double b : {-phi, phi}) {
      verts.push_back(Eigen::Vector3d(0, a, b));
      verts.push_back(Eigen::Vector3d(a, b, 0));
      verts.push_back(Eigen::Vector3d(b, 0, a));
    }
  std::vector<Simplex> faces;
  const auto nv = static_cast<Index>(verts.size());
  auto adjacent = [&](Index a, Index b) {
    return std::abs((verts[static_cast<std::size_t>(a)] - verts[static_cast<std::size_t>(b)]).norm() - 2.0) < 1e-9;
  };
  for (Index a = 0; a < nv; ++a)
    for (Index b = a + 1; b < nv; ++b)
      for (Index c = b + 1; c < nv; ++c)
        if (adjacent(a, b) && adjacent(b, c) && adjacent(a, c)) faces.push_back({a, b, c});
  for (Vec& v : verts) v.normalize();
  orient_about_center(verts, faces, Vec::Zero(3));
  return SimplicialMesh(3, 2, std::move(verts), std::move(faces));
}

SimplicialMesh unit_cross_polytope(int n) {
  std::vector<Vec> verts;
  for (int i = 0; i < n; ++i) {
    verts.push_back(Vec::Unit(n, i));
    verts.push_back(-Vec::Unit(n, i));
  }
  std::vector<Simplex> facets;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    Simplex s;
    for (int i = 0; i < n; ++i) s.push_back(2 * i + static_cast<Index>((mask >> i) & 1u));
    facets.push_back(std::move(s));
  }
  orient_about_center(verts, facets, Vec::Zero(n));
  return SimplicialMesh(n, n - 1, std::move(verts), std::move(facets));
}

}  // namespace

int circle_segments(int refinement) { return 8 << refinement; }

SimplicialMesh build_sphere_mesh(int n, const Vec& center, double radius, int refinement) {
  if (n < 2) throw PreconditionError("build_sphere_mesh: n must be >= 2");
  if (refinement < 0) throw PreconditionError("build_sphere_mesh: refinement must be >= 0");
  if (!(radius > 0.0)) throw PreconditionError("build_sphere_mesh: radius must be positive");
  if (center.size() != n) throw PreconditionError("build_sphere_mesh: center has wrong dimension");

  SimplicialMesh unit;
  if (n == 2) {
    const int segs = circle_segments(refinement);
    std::vector<Vec> verts;
    std::vector<Simplex> edges;
    for (int k = 0; k < segs; ++k) {
      const double t = 2.0 * M_PI * k / segs;
      verts.push_back(Eigen::Vector2d(std::cos(t), std::sin(t)));
      edges.push_back({k, (k + 1) % segs});
    }
    unit = SimplicialMesh(2, 1, std::move(verts), std::move(edges));
  } else {
    unit = (n == 3) ? unit_icosahedron() : unit_cross_polytope(n);
    const auto to_sphere = [](const Vec& p) -> Vec { return p.normalized(); };
    for (int r = 0; r < refinement; ++r) unit = refine_uniform(unit, to_sphere);
  }

  std::vector<Vec> verts;
  verts.reserve(unit.vertex_count());
  for (const Vec& u : unit.vertices()) verts.push_back(center + radius * u.normalized());
  return SimplicialMesh(n, n - 1, std::move(verts), unit.simplices(), unit.signs());
}

SimplicialMesh tubular_neighborhood_mesh(const std::vector<Vec>& curve, double radius, int resolution) {
  if (!(radius > 0.0)) throw PreconditionError("tube: radius must be positive");
  if (resolution < 3) throw PreconditionError("tube: resolution must be >= 3");
  if (curve.size() < 4) throw PreconditionError("tube: curve needs at least 3 distinct samples");
  for (const Vec& p : curve)
    if (p.size() != 3) throw PreconditionError("tube: curve must live in R^3");
  if ((curve.front() - curve.back()).norm() > 1e-9) throw PreconditionError("tube: curve is not closed");

  const std::vector<Vec> pts(curve.begin(), curve.end() - 1);
  const auto k = pts.size();

  // arc length positions
  std::vector<double> arc(k + 1, 0.0);
  for (std::size_t i = 0; i < k; ++i) arc[i + 1] = arc[i] + (pts[(i + 1) % k] - pts[i]).norm();
  const double length = arc[k];

  // Samples far apart along the curve (more than half a turn of the tube
  // cross-section) must stay at least a diameter apart.
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      const double along = std::min(arc[j] - arc[i], length - (arc[j] - arc[i]));
      if (along > M_PI * radius) min_gap = std::min(min_gap, (pts[i] - pts[j]).norm());
    }
  if (radius > 0.5 * min_gap)
    throw PreconditionError("tube: radius " + std::to_string(radius) + " exceeds half the minimum gap " +
                            std::to_string(min_gap) + " between distant curve samples");

  std::vector<Eigen::Vector3d> tangent(k);
  for (std::size_t i = 0; i < k; ++i) {
    Eigen::Vector3d t = pts[(i + 1) % k] - pts[(i + k - 1) % k];
    if (t.norm() < 1e-14) throw PreconditionError("tube: repeated curve samples");
    tangent[i] = t.normalized();
  }

  // rotation-minimizing frame by double reflection
  std::vector<Eigen::Vector3d> normal(k + 1);
  {
    Eigen::Vector3d seed = std::abs(tangent[0].x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
    normal[0] = (seed - seed.dot(tangent[0]) * tangent[0]).normalized();
  }
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = (i + 1) % k;
    const Eigen::Vector3d v1 = pts[j] - pts[i];
    const double c1 = v1.dot(v1);
    const Eigen::Vector3d r_l = normal[i] - (2.0 / c1) * v1.dot(normal[i]) * v1;
    const Eigen::Vector3d t_l = tangent[i] - (2.0 / c1) * v1.dot(tangent[i]) * v1;
    const Eigen::Vector3d v2 = tangent[j] - t_l;
    const double c2 = v2.dot(v2);
    Eigen::Vector3d r = (c2 < 1e-30) ? r_l : Eigen::Vector3d(r_l - (2.0 / c2) * v2.dot(r_l) * v2);
    normal[i + 1] = (r - r.dot(tangent[j]) * tangent[j]).normalized();
  }
  // close the frame: spread the holonomy angle along the curve
  const Eigen::Vector3d b0 = tangent[0].cross(normal[0]);
  const double holonomy = std::atan2(normal[k].dot(b0), normal[k].dot(normal[0]));

  std::vector<Vec> verts;
  verts.reserve(k * static_cast<std::size_t>(resolution));
  for (std::size_t i = 0; i < k; ++i) {
    const double correction = -holonomy * arc[i] / length;
    const Eigen::Vector3d b = tangent[i].cross(normal[i]);
    const Eigen::Vector3d nrm = std::cos(correction) * normal[i] + std::sin(correction) * b;
    const Eigen::Vector3d bin = tangent[i].cross(nrm);
    for (int r = 0; r < resolution; ++r) {
      const double th = 2.0 * M_PI * r / resolution;
      verts.push_back(pts[i] + radius * (std::cos(th) * nrm + std::sin(th) * bin));
    }
  }

  const auto res = static_cast<Index>(resolution);
  auto id = [&](std::size_t i, Index r) { return static_cast<Index>(i % k) * res + (r % res); };
  std::vector<Simplex> tris;
  for (std::size_t i = 0; i < k; ++i) {
    const Vec axis_mid = 0.5 * (pts[i] + pts[(i + 1) % k]);
    for (Index r = 0; r < res; ++r) {
      Simplex t1{id(i, r), id(i + 1, r), id(i + 1, r + 1)};
      Simplex t2{id(i, r), id(i + 1, r + 1), id(i, r + 1)};
      for (Simplex* t : {&t1, &t2}) {
        const Vec centroid = (verts[static_cast<std::size_t>((*t)[0])] + verts[static_cast<std::size_t>((*t)[1])] +
                              verts[static_cast<std::size_t>((*t)[2])]) /
                             3.0;
        if (outward_determinant(verts, *t, centroid - axis_mid) < 0) std::swap((*t)[0], (*t)[1]);
        tris.push_back(*t);
      }
    }
  }
  return SimplicialMesh(3, 2, std::move(verts), std::move(tris));
}

SimplicialMesh klein_bottle_mesh(int rings, int segments) {
  if (rings < 3 || segments < 4) throw PreconditionError("klein bottle: grid too coarse");
  const double ring_radius = 2.0;
  std::vector<Vec> verts;
  for (int i = 0; i < rings; ++i) {
    const double u = 2.0 * M_PI * i / rings;
    for (int j = 0; j < segments; ++j) {
      const double v = 2.0 * M_PI * j / segments;
      const double rho = std::cos(u / 2) * std::sin(v) - std::sin(u / 2) * std::sin(2 * v);
      const double z = std::sin(u / 2) * std::sin(v) + std::cos(u / 2) * std::sin(2 * v);
      verts.push_back(Eigen::Vector3d((ring_radius + rho) * std::cos(u), (ring_radius + rho) * std::sin(u), z));
    }
  }
  // Crossing u = 2 pi lands on (0, -v).
  auto id = [&](int i, int j) -> Index {
    j = ((j % segments) + segments) % segments;
    if (i == rings) {
      i = 0;
      j = (segments - j) % segments;
    }
    return static_cast<Index>(i) * segments + j;
  };
  std::vector<Simplex> tris;
  for (int i = 0; i < rings; ++i)
    for (int j = 0; j < segments; ++j) {
      const Index a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      tris.push_back({a, b, c});
      tris.push_back({a, c, d});
    }
  return SimplicialMesh(3, 2, std::move(verts), std::move(tris));
}

SimplicialMesh projective_plane_mesh() {
  const SimplicialMesh ico = unit_icosahedron();
  const auto& iv = ico.vertices();
  // pair antipodal vertices into classes
  std::vector<Index> cls(iv.size(), -1);
  std::vector<Vec> reps;
  for (std::size_t a = 0; a < iv.size(); ++a) {
    if (cls[a] >= 0) continue;
    cls[a] = static_cast<Index>(reps.size());
    for (std::size_t b = 0; b < iv.size(); ++b)
      if ((iv[a] + iv[b]).norm() < 1e-9) cls[b] = cls[a];
    reps.push_back(iv[a]);
  }
  std::map<Simplex, bool> seen;
  std::vector<Simplex> tris;
  for (const Simplex& f : ico.simplices()) {
    Simplex q{cls[static_cast<std::size_t>(f[0])], cls[static_cast<std::size_t>(f[1])],
              cls[static_cast<std::size_t>(f[2])]};
    Simplex key = q;
    std::sort(key.begin(), key.end());
    if (seen.emplace(key, true).second) tris.push_back(q);
  }
  std::vector<Vec> verts;
  for (const Vec& p : reps) verts.push_back(Eigen::Vector3d(p[0] * p[1], p[1] * p[2], p[2] * p[0]));
  return SimplicialMesh(3, 2, std::move(verts), std::move(tris));
}

SimplicialMesh flat_torus_mesh(double period, int cells) {
  if (cells < 3) throw PreconditionError("flat torus: need at least 3 cells per side");
  std::vector<Vec> verts;
  for (int i = 0; i < cells; ++i)
    for (int j = 0; j < cells; ++j) verts.push_back(Eigen::Vector2d(period * i / cells, period * j / cells));
  auto id = [&](int i, int j) -> Index { return static_cast<Index>(i % cells) * cells + (j % cells); };
  std::vector<Simplex> tris;
  for (int i = 0; i < cells; ++i)
    for (int j = 0; j < cells; ++j) {
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return SimplicialMesh(2, 2, std::move(verts), std::move(tris));
}

}  // namespace topocheck
