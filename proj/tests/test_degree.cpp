#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "topocheck/degree.hpp"
#include "topocheck/geometry.hpp"

using namespace topocheck;

namespace {

std::string zk_field(int k, bool conj) {
  // (x1 + i x2)^k by repeated complex multiplication in the expression language
  std::string re = "x1", im = conj ? "(0 - x2)" : "x2";
  const std::string a = re, b = im;
  for (int i = 1; i < k; ++i) {
    const std::string nre = "(" + re + ")*" + a + " - (" + im + ")*" + b;
    const std::string nim = "(" + re + ")*" + b + " + (" + im + ")*" + a;
    re = nre;
    im = nim;
  }
  return re + ", " + im;
}

SimplicialMesh sphere(int n, int refinement, double radius = 1.0) {
  return build_sphere_mesh(n, Vec::Zero(n), radius, refinement);
}

VectorFieldFn scaled(const FieldSpec& f) {
  return [f](const Vec& x) { return Vec((1.0 + 0.5 * std::sin(x[0])) * f.evaluate(x)); };
}

}  // namespace

TEST_CASE("degree of z^k and its conjugate against direct winding") {
  for (int k = 1; k <= 4; ++k)
    for (bool conj : {false, true}) {
      const FieldSpec f = parse_field(zk_field(k, conj), 2, 0);
      const double oracle = oracle::winding(f.as_function(), Vec::Zero(2), 1.0, 4096);
      CHECK(std::abs(oracle - (conj ? -k : k)) < 1e-9);
      const DegreeResult d = degree(f, sphere(2, 3));
      CHECK(d.degree == static_cast<int>(std::lround(oracle)));
      CHECK(d.residual < 0.25);
      CHECK(d.method == DegreeMethod::Winding);
    }
}

TEST_CASE("degree in three dimensions against the Kronecker integral") {
  const char* fields[] = {"x1, x2, x3", "-x1, -x2, -x3", "x1, x2, -x3", "x1^2 - x2^2, 2*x1*x2, x3",
                          "x1^3 - 3*x1*x2^2, 3*x1^2*x2 - x2^3, -x3", "x1 + 0.3*x2*x3, x2 - 0.2, x3 + 0.4*x1"};
  for (const char* src : fields) {
    const FieldSpec f = parse_field(src, 3, 0);
    const double oracle = oracle::kronecker_degree3(f.as_function(), Vec::Zero(3), 1.0);
    const long expected = std::lround(oracle);
    CHECK_MESSAGE(std::abs(oracle - static_cast<double>(expected)) < 0.02, src);
    const DegreeResult d = degree(f, sphere(3, 1));
    CHECK_MESSAGE(d.degree == expected, src);
    CHECK(d.method == DegreeMethod::SolidAngle);
  }
}

TEST_CASE("degree in four and five dimensions by regular values") {
  CHECK(degree(parse_field("-x1, -x2, -x3, -x4", 4, 0), sphere(4, 0)).degree == 1);
  CHECK(degree(parse_field("x1, x2, x3, -x4", 4, 0), sphere(4, 0)).degree == -1);
  CHECK(degree(parse_field("x1^2 - x2^2, 2*x1*x2, x3, x4", 4, 0), sphere(4, 0)).degree == 2);
  const DegreeResult d5 = degree(parse_field("-x1, -x2, -x3, -x4, -x5", 5, 0), sphere(5, 0));
  CHECK(d5.degree == -1);
  CHECK(d5.method == DegreeMethod::RegularValue);
  CHECK(d5.regular_value.size() == 5);
}

TEST_CASE("degree is invariant under mesh refinement") {
  const char* planar[] = {"x1^2 - x2^2, 2*x1*x2", "x1 - x1^3, -x2", "x2, (1 - x1^2)*x2 - x1", "x1 + 2, x2"};
  for (const char* src : planar) {
    const FieldSpec f = parse_field(src, 2, 0);
    const int base = degree(f, sphere(2, 0, 1.5)).degree;
    for (int r = 1; r <= 4; ++r) CHECK_MESSAGE(degree(f, sphere(2, r, 1.5)).degree == base, src);
  }
  const char* spatial[] = {"x1^2 - x2^2, 2*x1*x2, x3", "-x1, x2 + x1*x3, x3", "x1 - 3, x2, x3"};
  for (const char* src : spatial) {
    const FieldSpec f = parse_field(src, 3, 0);
    const int base = degree(f, sphere(3, 0)).degree;
    for (int r = 1; r <= 3; ++r) CHECK_MESSAGE(degree(f, sphere(3, r)).degree == base, src);
  }
  const FieldSpec f4 = parse_field("x1, -x2, x3 + x4^2, x4", 4, 0);
  CHECK(degree(f4, sphere(4, 0)).degree == degree(f4, sphere(4, 1)).degree);
}

TEST_CASE("homotopic fields have equal degree") {
  struct Pair {
    int n;
    const char* f0;
    const char* f1;
  };
  const Pair pairs[] = {{2, "x1^2 - x2^2, 2*x1*x2", "x1^2 - x2^2 + 0.3*x1, 2*x1*x2 - 0.2"},
                        {2, "-x1, -x2", "-x1 + x2, -x2 - x1"},
                        {3, "x1, x2, x3", "x1 + 0.4*x2^2, x2, x3 + 0.3*x1*x2"},
                        {4, "-x1, -x2, -x3, -x4", "-x1 + 0.3*x2, -x2, -x3 - 0.2*x4^2, -x4"}};
  for (const Pair& p : pairs) {
    const FieldSpec a = parse_field(p.f0, p.n, 0), b = parse_field(p.f1, p.n, 0);
    const auto mesh = sphere(p.n, p.n == 2 ? 3 : p.n == 3 ? 1 : 0);
    double smallest = 1e300;  // straight-line homotopy stays nonvanishing on the mesh
    for (int k = 0; k < 32; ++k) {
      const double t = k / 31.0;
      for (const Vec& v : mesh.vertices())
        smallest = std::min(smallest, ((1 - t) * a.evaluate(v) + t * b.evaluate(v)).norm());
    }
    REQUIRE(smallest > 1e-3);
    CHECK_MESSAGE(degree(a, mesh).degree == degree(b, mesh).degree, p.f1);
  }
}

TEST_CASE("degree is invariant under positive rescaling") {
  const char* fields2[] = {"x1^3 - 3*x1*x2^2, 3*x1^2*x2 - x2^3", "x1 - x1^3, -x2", "-x2, x1"};
  for (const char* src : fields2) {
    const FieldSpec f = parse_field(src, 2, 0);
    CHECK(degree(scaled(f), sphere(2, 3, 1.7)).degree == degree(f, sphere(2, 3, 1.7)).degree);
  }
  const FieldSpec f3 = parse_field("x1^2 - x2^2, 2*x1*x2, -x3", 3, 0);
  CHECK(degree(scaled(f3), sphere(3, 1)).degree == degree(f3, sphere(3, 1)).degree);
}

TEST_CASE("mod-2 degree is the parity of the integer degree") {
  struct Case {
    int n;
    const char* src;
  };
  const Case cases[] = {{2, "x1^2 - x2^2, 2*x1*x2"}, {2, "x1^3 - 3*x1*x2^2, 3*x1^2*x2 - x2^3"}, {2, "x1 - 3, x2"},
                        {3, "-x1, -x2, -x3"},        {3, "x1^2 - x2^2, 2*x1*x2, x3"},               {3, "x1, x2 - 2, x3"}};
  for (const Case& c : cases) {
    const FieldSpec f = parse_field(c.src, c.n, 0);
    const auto mesh = sphere(c.n, c.n == 2 ? 3 : 1);
    CHECK_MESSAGE(mod2_degree(f.as_function(), mesh).degree == std::abs(degree(f, mesh).degree) % 2, c.src);
  }
}

TEST_CASE("mod-2 degree on the Klein bottle against ray parity") {
  const auto klein = klein_bottle_mesh();
  Rng rng(3);
  for (const Vec& p : {Vec{{2.5, 0.0, 0.0}}, Vec{{0.0, 0.0, 0.0}}, Vec{{9.0, 1.0, 1.0}}, Vec{{-2.0, 0.1, 0.05}}}) {
    int parity = -1;
    for (int trial = 0; trial < 3; ++trial) {
      const Eigen::Vector3d dir = rng.unit_vector(3);
      const int hits = oracle::ray_hits(klein, p, dir) % 2;
      if (parity >= 0) CHECK(hits == parity);
      parity = hits;
    }
    const VectorFieldFn f = [p](const Vec& x) { return Vec(x - p); };
    CHECK(mod2_degree(f, klein).degree == parity);
  }
}

TEST_CASE("preimage counts of piecewise-linear maps") {
  const auto mesh = sphere(3, 2);
  std::vector<Vec> id, neg;
  for (const Vec& v : mesh.vertices()) {
    id.push_back(v);
    neg.push_back(-v);
  }
  const Vec value = Vec{{0.3, -0.5, 0.81}}.normalized();
  const PreimageCount a = count_preimages(id, mesh, value);
  CHECK(a.signed_count == 1);
  CHECK(a.unsigned_count == 1);
  CHECK(count_preimages(neg, mesh, value).signed_count == -1);
  CHECK(mod2_degree(id, mesh) == 1);
}

TEST_CASE("failures are reported, not guessed") {
  const FieldSpec zero_inside = parse_field("x1 - 1, x2", 2, 0);
  CHECK_THROWS_AS(degree(zero_inside, sphere(2, 3)), VanishingFieldError);

  const auto full = sphere(3, 0);
  std::vector<Simplex> part(full.simplices().begin(), full.simplices().end() - 1);
  const SimplicialMesh open(3, 2, full.vertices(), part, {});
  CHECK_THROWS_AS(degree(parse_field("x1, x2, x3", 3, 0), open), PreconditionError);

  DegreeConfig tight;
  tight.max_simplices = 10;
  const FieldSpec z4 = parse_field(zk_field(4, false), 2, 0);
  CHECK_THROWS_AS(degree(z4, sphere(2, 0), tight), DegreeUndecidedError);
}

TEST_CASE("fixed seeds give identical results") {
  const FieldSpec f = parse_field("x1, x2, x3 + x1*x2, -x4", 4, 0);
  DegreeConfig c;
  c.seed = 42;
  const DegreeResult a = degree(f, sphere(4, 0), c);
  const DegreeResult b = degree(f, sphere(4, 0), c);
  CHECK(a.degree == b.degree);
  CHECK(a.raw == b.raw);
  CHECK(a.regular_value == b.regular_value);
  CHECK(a.simplices == b.simplices);
  c.seed = 43;
  CHECK(degree(f, sphere(4, 0), c).degree == a.degree);
}
