#include <doctest.h>

#include <cmath>
#include <sstream>

#include "topocheck/equilibria.hpp"
#include "topocheck/geometry.hpp"

using namespace topocheck;

namespace {

std::string linear_field(const Mat& a) {
  std::ostringstream out;
  out.precision(17);
  for (Index i = 0; i < a.rows(); ++i) {
    if (i) out << ", ";
    for (Index j = 0; j < a.cols(); ++j) out << (j ? " + " : "") << "(" << a(i, j) << ")*x" << j + 1;
  }
  return out.str();
}

std::string negated(int n) {
  std::string s;
  for (int i = 1; i <= n; ++i) s += (i > 1 ? ", -x" : "-x") + std::to_string(i);
  return s;
}

}  // namespace

TEST_CASE("index of -x is (-1)^n") {
  for (int n = 1; n <= 4; ++n) {
    const FieldSpec f = parse_field(negated(n), n, 0);
    const DegreeResult d = topological_index(f, Vec::Zero(n), 0.5);
    CHECK(d.degree == parity_sign(n));
    CHECK(d.residual < 0.25);
    CHECK(d.method == (n == 1 ? DegreeMethod::Sign : n == 2 ? DegreeMethod::Winding
                       : n == 3 ? DegreeMethod::SolidAngle : DegreeMethod::RegularValue));
  }
}

TEST_CASE("index equals sign det for random hyperbolic linear fields") {
  Rng rng(99);
  int tested = 0;
  while (tested < 50) {
    const int n = 2 + tested % 2;
    Mat a(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) a(i, j) = rng.uniform(-2, 2);
    const Eigen::VectorXcd ev = a.eigenvalues();
    bool hyperbolic = true;
    for (Index i = 0; i < n; ++i) hyperbolic = hyperbolic && std::abs(ev[i].real()) > 0.05;
    if (!hyperbolic || std::abs(a.determinant()) < 0.05) continue;
    const FieldSpec f = parse_field(linear_field(a), n, 0);
    const int expected = a.determinant() > 0 ? 1 : -1;
    CHECK(topological_index(f, Vec::Zero(n), 0.5).degree == expected);
    CHECK(hyperbolic_index(a) == expected);
    // (-1)^(stable directions)
    int stable = 0;
    for (Index i = 0; i < n; ++i) stable += ev[i].real() < 0;
    CHECK(expected == parity_sign(stable));
    ++tested;
  }
}

TEST_CASE("index does not depend on the sphere radius") {
  const char* fields[] = {"x1 - x1^3, -x2", "x1^2 - x2^2, 2*x1*x2", "x2, -x1 + 0.3*x2"};
  for (const char* src : fields) {
    const FieldSpec f = parse_field(src, 2, 0);
    const auto r1 = degree(f, build_sphere_mesh(2, Vec::Zero(2), 0.4, 3)).degree;
    const auto r2 = degree(f, build_sphere_mesh(2, Vec::Zero(2), 0.2, 3)).degree;
    CHECK_MESSAGE(r1 == r2, src);
    CHECK(topological_index(f, Vec::Zero(2), 0.4).degree == r1);
  }
}

TEST_CASE("equilibria of the two-attractor cubic") {
  const FieldSpec f = parse_field("x1 - x1^3, -x2", 2, 0);
  const auto eqs = find_equilibria(f, Box::cube(Vec::Zero(2), 2.0));
  REQUIRE(eqs.size() == 3);
  const double xs[] = {-1, 0, 1};
  const int idx[] = {1, -1, 1};
  for (int i = 0; i < 3; ++i) {
    CHECK(eqs[static_cast<std::size_t>(i)].location[0] == doctest::Approx(xs[i]).epsilon(1e-8));
    CHECK(std::abs(eqs[static_cast<std::size_t>(i)].location[1]) < 1e-8);
    CHECK(eqs[static_cast<std::size_t>(i)].hyperbolic);
    REQUIRE(eqs[static_cast<std::size_t>(i)].index.has_value());
    CHECK(*eqs[static_cast<std::size_t>(i)].index == idx[i]);
  }
  CHECK(eqs[1].stable == 1);
  CHECK(eqs[1].unstable == 1);
  CHECK(eqs[0].stable == 2);
}

TEST_CASE("degenerate equilibria use the degree fallback") {
  const FieldSpec z3 = parse_field("x1^3 - 3*x1*x2^2, 3*x1^2*x2 - x2^3", 2, 0);
  const auto eqs = find_equilibria(z3, Box::cube(Vec::Zero(2), 1.0));
  REQUIRE(eqs.size() == 1);
  CHECK_FALSE(eqs[0].hyperbolic);
  CHECK(eqs[0].central == 2);
  REQUIRE(eqs[0].index.has_value());
  CHECK(*eqs[0].index == 3);
  CHECK(topological_index(z3, Vec::Zero(2), 0.5).degree == 3);
}

TEST_CASE("hyperbolicity and isolation are enforced") {
  Mat center(2, 2);
  center << 0, 1, -1, 0;
  CHECK_THROWS_AS(hyperbolic_index(center), NonHyperbolicError);
  const FieldSpec f = parse_field("x1 - x1^3, -x2", 2, 0);
  CHECK_THROWS_AS(topological_index(f, Vec::Zero(2), 0.8), IsolationError);
  CHECK(topological_index(f, Vec{{0.3, 0.0}}, 0.1).degree == 0);  // regular point
}

TEST_CASE("small reference cases") {
  const auto sink = find_equilibria(parse_field("-x1, -x2", 2, 0), Box::cube(Vec::Zero(2), 1.0), 5, 1e-6);
  REQUIRE(sink.size() == 1);
  CHECK(sink[0].location.norm() < 1e-9);
  CHECK(*sink[0].index == 1);
  CHECK(find_equilibria(parse_field("1", 1, 0), Box::cube(Vec::Zero(1), 1.0)).empty());
  CHECK(topological_index(parse_field("-x1, x2", 2, 0), Vec::Zero(2), 0.5).degree == -1);
  CHECK(hyperbolic_index(Mat::Identity(2, 2)) == 1);
  CHECK(hyperbolic_index(-Mat::Identity(2, 2)) == 1);
}

TEST_CASE("roots outside the box are discarded") {
  const FieldSpec f = parse_field("x1 - 3, x2", 2, 0);
  CHECK(find_equilibria(f, Box::cube(Vec::Zero(2), 1.0)).empty());
  CHECK(find_equilibria(f, Box::cube(Vec::Zero(2), 4.0)).size() == 1);
}

TEST_CASE("one-dimensional index by signs") {
  CHECK(topological_index(parse_field("x1", 1, 0), Vec::Zero(1), 0.3).degree == 1);
  CHECK(topological_index(parse_field("-x1", 1, 0), Vec::Zero(1), 0.3).degree == -1);
  CHECK(topological_index(parse_field("x1^2", 1, 0), Vec::Zero(1), 0.3).degree == 0);
}
