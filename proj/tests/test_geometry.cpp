#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "topocheck/directions.hpp"
#include "topocheck/geometry.hpp"
#include "topocheck/limit_cycle.hpp"

using namespace topocheck;

namespace {

/// Signed volume enclosed by an oriented closed hypersurface: sum of
/// det[v0 - c, ..., v_{n-1} - c] / n! over oriented simplices.
double enclosed_volume(const SimplicialMesh& m, const Vec& c) {
  const int n = m.ambient_dim();
  double total = 0.0, fact = 1.0;
  for (int i = 2; i <= n; ++i) fact *= i;
  for (std::size_t s = 0; s < m.simplex_count(); ++s) {
    const Simplex simp = m.oriented_simplex(s);
    Mat a(n, n);
    for (int k = 0; k < n; ++k) a.col(k) = m.vertex(simp[static_cast<std::size_t>(k)]) - c;
    total += a.determinant() / fact;
  }
  return total;
}

}  // namespace

TEST_CASE("sphere meshes are closed, outward and on the sphere") {
  for (int n = 2; n <= 4; ++n)
    for (int r = 0; r <= 2; ++r) {
      const Vec c = Vec::Constant(n, 0.3);
      const auto m = build_sphere_mesh(n, c, 2.0, r);
      CHECK(m.is_closed());
      for (const Vec& v : m.vertices()) CHECK((v - c).norm() == doctest::Approx(2.0));
      CHECK(enclosed_volume(m, c) > 0.0);
      CHECK(orient_mesh(m).orientable);
    }
  CHECK(build_sphere_mesh(3, Vec::Zero(3), 1, 2).vertex_count() == 162);
  CHECK(build_sphere_mesh(3, Vec::Zero(3), 1, 2).simplex_count() == 320);
  CHECK(build_sphere_mesh(2, Vec::Zero(2), 1, 3).simplex_count() == static_cast<std::size_t>(circle_segments(3)));
  // enclosed area of the 64-gon against the exact polygon area
  const double area = enclosed_volume(build_sphere_mesh(2, Vec::Zero(2), 1, 3), Vec::Zero(2));
  CHECK(area == doctest::Approx(0.5 * 64 * std::sin(2 * M_PI / 64)));
}

TEST_CASE("reversed meshes flip orientation") {
  const auto m = build_sphere_mesh(3, Vec::Zero(3), 1, 1);
  CHECK(enclosed_volume(m.reversed(), Vec::Zero(3)) == doctest::Approx(-enclosed_volume(m, Vec::Zero(3))));
}

TEST_CASE("Euler characteristic by direct counting") {
  CHECK(oracle::euler_by_counting(build_sphere_mesh(3, Vec::Zero(3), 1, 1)) == 2);
  CHECK(oracle::euler_by_counting(klein_bottle_mesh()) == 0);
  CHECK(oracle::euler_by_counting(projective_plane_mesh()) == 1);
  CHECK(oracle::euler_by_counting(flat_torus_mesh(1.0, 5)) == 0);
}

TEST_CASE("Klein bottle and projective plane are not orientable") {
  for (const auto& m : {klein_bottle_mesh(), projective_plane_mesh()}) {
    CHECK(m.is_closed());
    const auto rep = orient_mesh(m);
    CHECK_FALSE(rep.orientable);
    REQUIRE_FALSE(rep.odd_cycle.empty());
    CHECK(cycle_orientation_parity(m, rep.odd_cycle) == -1);
  }
}

TEST_CASE("level sets") {
  SUBCASE("circle") {
    const ScalarSpec v = parse_scalar("(x1^2 + x2^2)/2", 2);
    const auto m = extract_level_set(v, 0.5, Box::cube(Vec::Zero(2), 2.0), 32);
    CHECK(m.is_closed());
    CHECK(m.dim() == 1);
    for (const Vec& p : m.vertices()) CHECK(p.norm() == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(enclosed_volume(m, Vec::Zero(2)) > 0.0);  // outward along +grad V
  }
  SUBCASE("torus") {
    const ScalarSpec v = parse_scalar("(sqrt(x1^2 + x2^2) - 1)^2 + x3^2", 3);
    const auto m = extract_level_set(v, 0.04, Box::cube(Vec::Zero(3), 1.6), 32);
    CHECK(m.is_closed());
    CHECK(orient_mesh(m).orientable);
    CHECK(oracle::euler_by_counting(m) == 0);
    for (const Vec& p : m.vertices()) CHECK(v.evaluate(p) == doctest::Approx(0.04).epsilon(1e-3));
  }
  SUBCASE("critical level") {
    const ScalarSpec v = parse_scalar("x1^2 - x2^2", 2);
    CHECK_THROWS(extract_level_set(v, 0.0, Box::cube(Vec::Zero(2), 1.0), 16));
  }
}

TEST_CASE("tubular neighbourhood of a circle") {
  std::vector<Vec> curve;
  for (int i = 0; i <= 64; ++i) {
    const double a = 2 * M_PI * (i % 64) / 64;
    curve.push_back(Vec{{2 * std::cos(a), 2 * std::sin(a), 0.0}});
  }
  const auto tube = tubular_neighborhood_mesh(curve, 0.3, 8);
  CHECK(tube.is_closed());
  CHECK(orient_mesh(tube).orientable);
  CHECK(oracle::euler_by_counting(tube) == 0);
  // volume of the torus 2 pi R * pi r^2, approximated by polygons
  CHECK(enclosed_volume(tube, Vec::Zero(3)) == doctest::Approx(2 * M_PI * 2 * M_PI * 0.09).epsilon(0.1));
}

TEST_CASE("edgewise refinement") {
  const auto m = build_sphere_mesh(3, Vec::Zero(3), 1, 0);
  const auto r = refine_uniform(m, [](const Vec& x) { return Vec(x / x.norm()); });
  CHECK(r.simplex_count() == 4 * m.simplex_count());
  CHECK(r.is_closed());
  CHECK(enclosed_volume(r, Vec::Zero(3)) > enclosed_volume(m, Vec::Zero(3)));
  const auto s4 = build_sphere_mesh(4, Vec::Zero(4), 1, 0);
  CHECK(refine_uniform(s4).simplex_count() == 8 * s4.simplex_count());
  CHECK(refine_uniform(s4).is_closed());
}

TEST_CASE("mesh text format round-trips") {
  const auto m = klein_bottle_mesh(6, 5);
  std::stringstream io;
  write_mesh(io, m);
  const auto back = read_mesh(io);
  REQUIRE(back.vertex_count() == m.vertex_count());
  REQUIRE(back.simplex_count() == m.simplex_count());
  for (std::size_t i = 0; i < m.vertex_count(); ++i) CHECK((back.vertices()[i] - m.vertices()[i]).norm() == 0.0);
  CHECK(back.simplices() == m.simplices());
  CHECK(back.signs() == m.signs());
  std::stringstream bad("topocheck-mesh 1\nambient 3 dim 2\nvertices 1\n0 0 0\nsimplices 1\n1 0 0 5\n");
  CHECK_THROWS_AS(read_mesh(bad), MeshError);
}

TEST_CASE("direction grids") {
  for (int n = 1; n <= 5; ++n) {
    const auto dirs = direction_grid(n, 32);
    CHECK(dirs.size() == (n == 1 ? 2u : 32u));
    for (const Vec& d : dirs) CHECK(d.norm() == doctest::Approx(1.0));
  }
  const auto d3 = direction_grid(3, 32);
  CHECK((d3.front() - Vec{{0.0, 0.0, 1.0}}).norm() < 1e-12);
  CHECK((d3.back() - Vec{{0.0, 0.0, -1.0}}).norm() < 1e-12);
  for (const Vec& d : offset_direction_grid(3, 128)) {
    CHECK(d.norm() == doctest::Approx(1.0));
    CHECK(std::abs(d[2]) < 1.0 - 1e-6);
  }
}

TEST_CASE("ray-parity containment") {
  const auto sphere = build_sphere_mesh(3, Vec::Zero(3), 1, 2);
  CHECK(inside_closed_mesh(sphere, Vec::Zero(3)));
  CHECK(inside_closed_mesh(sphere, Vec{{0.5, 0.3, -0.2}}));
  CHECK_FALSE(inside_closed_mesh(sphere, Vec{{1.5, 0.0, 0.0}}));
  const auto circle = build_sphere_mesh(2, Vec::Zero(2), 1, 3);
  CHECK(inside_closed_mesh(circle, Vec{{0.2, 0.1}}));
  CHECK_FALSE(inside_closed_mesh(circle, Vec{{-2.0, 0.1}}));
}
