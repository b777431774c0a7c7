#include <doctest.h>

#include <cmath>

#include "topocheck/field.hpp"
#include "topocheck/scenario.hpp"

using namespace topocheck;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// central differences written out here rather than borrowed from the library
Mat fd_jacobian(const FieldSpec& f, const Vec& x, const Vec& u) {
  const int n = f.state_dim();
  Mat j(n, n);
  for (int c = 0; c < n; ++c) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[c]));
    Vec a = x, b = x;
    a[c] += h;
    b[c] -= h;
    j.col(c) = (f.evaluate(a, u) - f.evaluate(b, u)) / (2 * h);
  }
  return j;
}

Expr random_expr(Rng& rng, int depth, int n) {
  if (depth == 0 || rng.uniform() < 0.2) {
    if (rng.uniform() < 0.5) return Expr::state(static_cast<int>(rng.uniform() * n));
    return Expr::constant(std::round(rng.uniform(-5, 5) * 100) / 100);
  }
  const double r = rng.uniform();
  if (r < 0.15) return Expr::raw_negate(random_expr(rng, depth - 1, n));
  if (r < 0.3) return Expr::power(random_expr(rng, depth - 1, n), 1 + static_cast<int>(rng.uniform() * 3));
  if (r < 0.45) {
    static const Func fs[] = {Func::Sin, Func::Cos, Func::Tanh, Func::Abs};
    return Expr::call(fs[static_cast<int>(rng.uniform() * 4)], random_expr(rng, depth - 1, n));
  }
  static const NodeKind ks[] = {NodeKind::Add, NodeKind::Sub, NodeKind::Mul};
  return Expr::raw_binary(ks[static_cast<int>(rng.uniform() * 3)], random_expr(rng, depth - 1, n),
                          random_expr(rng, depth - 1, n));
}

}  // namespace

TEST_CASE("hand-evaluated expressions") {
  const FieldSpec f = parse_field("x1^2 + 3*x2, x1*x2 - 4/x2", 2, 0);
  const Vec y = f.evaluate(vec({2, 1}));
  CHECK(y[0] == doctest::Approx(7));
  CHECK(y[1] == doctest::Approx(-2));

  const FieldSpec g = parse_field("sin(x1) + cos(x2), exp(x1) * tanh(x2) - sqrt(abs(x1))", 2, 0);
  const Vec z = g.evaluate(vec({0.3, -0.7}));
  CHECK(z[0] == doctest::Approx(std::sin(0.3) + std::cos(-0.7)));
  CHECK(z[1] == doctest::Approx(std::exp(0.3) * std::tanh(-0.7) - std::sqrt(0.3)));
}

TEST_CASE("precedence follows the grammar") {
  const Vec x = vec({3, 2});
  // unary minus is part of the base, so it binds tighter than ^
  CHECK(parse_field("-x1^2, 0", 2, 0).evaluate(x)[0] == doctest::Approx(9));
  CHECK(parse_field("0 - x1^2, 0", 2, 0).evaluate(x)[0] == doctest::Approx(-9));
  CHECK(parse_field("2 + 3*x1^2, 0", 2, 0).evaluate(x)[0] == doctest::Approx(29));
  CHECK(parse_field("x1 - x2 - 1, 0", 2, 0).evaluate(x)[0] == doctest::Approx(0));
  CHECK(parse_field("x1 / x2 / 2, 0", 2, 0).evaluate(x)[0] == doctest::Approx(0.75));
  CHECK(parse_field("1.5e1 + .5, 0", 2, 0).evaluate(x)[0] == doctest::Approx(15.5));
}

TEST_CASE("controls and feedback") {
  const FieldSpec f = parse_field("u1, u2, x1*u2 - x2*u1", 3, 2);
  CHECK(f.control_dim() == 2);
  const Vec y = f.evaluate(vec({1, 2, 3}), vec({0.5, -1}));
  CHECK(y[2] == doctest::Approx(1 * -1 - 2 * 0.5));
  const FieldSpec closed = close_loop(f, parse_feedback("-x1, -x2", 3, 2));
  CHECK(closed.control_dim() == 0);
  CHECK((closed.evaluate(vec({1, 2, 3})) - vec({-1, -2, 0})).norm() < 1e-12);
  CHECK_THROWS_AS(close_loop(f, parse_feedback("-x1", 3, 1)), PreconditionError);
}

TEST_CASE("parse errors carry offsets") {
  try {
    parse_field("x1 + * x2, x1", 2, 0);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 5);
  }
  try {
    parse_field("x1, x3", 2, 0);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4);
    CHECK(std::string(e.what()).find("x3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_field("x1", 2, 0), ParseError);
  CHECK_THROWS_AS(parse_field("u1, x1", 2, 0), ParseError);
  CHECK_THROWS_AS(parse_field("x1^-2, x1", 2, 0), ParseError);
  CHECK_THROWS_AS(parse_field("foo(x1), x1", 2, 0), ParseError);
  CHECK_THROWS_AS(parse_field("(x1, x2", 2, 0), ParseError);
  CHECK_THROWS_AS(parse_scalar("x1 x2", 2), ParseError);
}

TEST_CASE("domain errors name the component") {
  const FieldSpec f = parse_field("x1, sqrt(x1)", 2, 0);
  try {
    f.evaluate(vec({-1, 0}));
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(e.component() == 1);
  }
  CHECK_THROWS_AS(parse_field("1/x1, 0", 2, 0).evaluate(vec({0, 0})), DomainError);
}

TEST_CASE("canonical printing round-trips") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Expr e = random_expr(rng, 5, 3);
    const std::string text = e.to_string();
    const auto back = parse_expression_list(text, 3, 0);
    REQUIRE(back.size() == 1);
    CHECK_MESSAGE(back[0].structurally_equal(e), text);
    CHECK(back[0].to_string() == text);
  }
  for (const auto& name : builtin_scenario_names()) {
    const Scenario s = builtin_scenario(name);
    const FieldSpec f = parse_field(s.field, s.n, s.m);
    const FieldSpec g = parse_field(f.to_string(), s.n, s.m);
    CHECK_MESSAGE(g.to_string() == f.to_string(), name);
  }
}

TEST_CASE("symbolic derivatives of each function") {
  const char* sources[] = {"sin(x1)", "cos(x1)", "exp(x1)", "tanh(x1)", "sqrt(x1)", "abs(x1)", "x1^5", "1/x1"};
  for (const char* src : sources) {
    const ScalarSpec v = parse_scalar(src, 1);
    for (double x : {0.3, 1.7, 2.9}) {
      const double h = 1e-6;
      const double fd = (v.evaluate(vec({x + h})) - v.evaluate(vec({x - h}))) / (2 * h);
      CHECK_MESSAGE(v.gradient(vec({x}))[0] == doctest::Approx(fd).epsilon(1e-6), src);
    }
  }
}

TEST_CASE("symbolic Jacobian agrees with finite differences on every built-in scenario") {
  Rng rng(2024);
  for (const auto& name : builtin_scenario_names()) {
    const Scenario s = builtin_scenario(name);
    const FieldSpec f = parse_field(s.field, s.n, s.m);
    int checked = 0;
    while (checked < 100) {
      const Vec x = rng.in_ball(s.n, 1.5);
      const Vec u = rng.in_ball(s.m, 1.0);
      if (s.n >= 2 && std::hypot(x[0], x[1]) < 0.1) continue;  // sqrt(x1^2 + x2^2) is not smooth at the axis
      const Mat sym = f.jacobian(x, u);
      const Mat fd = fd_jacobian(f, x, u);
      CHECK_MESSAGE((sym - fd).cwiseAbs().maxCoeff() <= 1e-6 * std::max(1.0, sym.cwiseAbs().maxCoeff()), name);
      ++checked;
    }
  }
}

TEST_CASE("rescaling and gradient fields") {
  const FieldSpec f = parse_field("x2, -x1", 2, 0);
  const FieldSpec g = rescale(f, parse_expression_list("1 + 0.5*sin(x1)", 2, 0)[0]);
  const Vec x = vec({0.4, -1.2});
  CHECK((g.evaluate(x) - (1 + 0.5 * std::sin(0.4)) * f.evaluate(x)).norm() < 1e-12);

  const ScalarSpec v = parse_scalar("x1^2 + x1*x2 + 2*x2^2", 2);
  const FieldSpec ng = negative_gradient_field(v);
  CHECK((ng.evaluate(x) - vec({-(2 * 0.4 - 1.2), -(0.4 + 4 * -1.2)})).norm() < 1e-12);
}
