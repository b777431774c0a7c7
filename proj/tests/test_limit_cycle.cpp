#include <doctest.h>

#include <cmath>

#include "topocheck/geometry.hpp"
#include "topocheck/limit_cycle.hpp"

using namespace topocheck;

TEST_CASE("classical Runge-Kutta is fourth order") {
  const VectorFieldFn grow = [](const Vec& x) { return x; };
  const Vec one = Vec::Ones(1);
  const double e1 = std::abs(rk4_step(grow, one, 0.1)[0] - std::exp(0.1));
  const double e2 = std::abs(rk4_step(grow, one, 0.05)[0] - std::exp(0.05));
  CHECK(e1 / e2 == doctest::Approx(32.0).epsilon(0.05));  // local error O(h^5)
}

TEST_CASE("circle normal form has the unit circle with period 2 pi") {
  const FieldSpec f = parse_field("x1*(1 - x1^2 - x2^2) - x2, x2*(1 - x1^2 - x2^2) + x1", 2, 0);
  const ClosedCurve c = locate_limit_cycle(f, Vec{{0.2, 0.0}});
  CHECK(c.period == doctest::Approx(2 * M_PI).epsilon(1e-4));
  CHECK(c.closure_residual < 1e-6);
  for (const Vec& p : c.points) CHECK(p.norm() == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(c.max_step() <= 0.05 + 1e-9);
  // seeds on either side converge to the same cycle
  const ClosedCurve outside = locate_limit_cycle(f, Vec{{2.0, 1.0}});
  CHECK(outside.period == doctest::Approx(c.period).epsilon(1e-6));
}

TEST_CASE("van der Pol cycle") {
  const FieldSpec f = parse_field("x2, (1 - x1^2)*x2 - x1", 2, 0);
  const ClosedCurve c = locate_limit_cycle(f, Vec{{2.0, 0.0}});
  // reference period and amplitude for mu = 1
  CHECK(c.period == doctest::Approx(6.6633).epsilon(1e-3));
  double amplitude = 0.0;
  for (const Vec& p : c.points) amplitude = std::max(amplitude, std::abs(p[0]));
  CHECK(amplitude == doctest::Approx(2.0086).epsilon(1e-3));
  const auto closed = c.closed_points();
  CHECK(closed.size() == c.points.size() + 1);
  CHECK((closed.front() - closed.back()).norm() == 0.0);

  const ClosedCurve lifted = c.embedded_in_3d();
  CHECK(lifted.points.front().size() == 3);
  const auto tube = tubular_neighborhood_mesh(lifted.closed_points(), 0.2, 8);
  CHECK(tube.is_closed());
}

TEST_CASE("centres and sinks are rejected") {
  const FieldSpec centre = parse_field("x2, -x1", 2, 0);
  try {
    locate_limit_cycle(centre, Vec{{1.0, 0.0}});
    FAIL("a centre has no attracting cycle");
  } catch (const NonContractingError& e) {
    CHECK(e.multiplier() == doctest::Approx(1.0).epsilon(1e-2));
  }
  CHECK_THROWS_AS(locate_limit_cycle(parse_field("-x1 + x2, -x2 - x1", 2, 0), Vec{{1.0, 1.0}}), NoReturnError);
  CHECK_THROWS_AS(locate_limit_cycle(parse_field("-x1", 1, 0), Vec{{1.0}}), PreconditionError);
}

TEST_CASE("three-dimensional cycle") {
  const FieldSpec f = parse_field("x1*(1 - x1^2 - x2^2) - x2, x2*(1 - x1^2 - x2^2) + x1, -x3", 3, 0);
  const ClosedCurve c = locate_limit_cycle(f, Vec{{0.5, 0.0, 0.7}});
  CHECK(c.period == doctest::Approx(2 * M_PI).epsilon(1e-4));
  for (const Vec& p : c.points) CHECK(std::abs(p[2]) < 1e-6);
}
