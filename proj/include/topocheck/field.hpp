#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "topocheck/common.hpp"
#include "topocheck/expr.hpp"

namespace topocheck {

/// State-only map R^n -> R^n used by the degree and equilibrium machinery.
using VectorFieldFn = std::function<Vec(const Vec&)>;

/// A vector field X (m = 0) or control system f(x, u) (m > 0) on R^n.
/// Immutable; the symbolic state Jacobian is built once at construction.
class FieldSpec {
 public:
  FieldSpec(int n, int m, std::vector<Expr> components);

  int state_dim() const { return n_; }
  int control_dim() const { return m_; }
  const std::vector<Expr>& components() const { return components_; }
  const Expr& jacobian_entry(int row, int col) const { return jacobian_[row * n_ + col]; }

  /// Throws DomainError carrying the failing component index.
  Vec evaluate(const Vec& x, const Vec& u) const;
  Vec evaluate(const Vec& x) const { return evaluate(x, Vec::Zero(m_)); }

  /// Partial derivatives with respect to the state variables only.
  Mat jacobian(const Vec& x, const Vec& u) const;
  Mat jacobian(const Vec& x) const { return jacobian(x, Vec::Zero(m_)); }

  /// Closed dynamics view (controls fixed at zero when m > 0).
  VectorFieldFn as_function() const;

  /// Canonical text, components separated by ", ".
  std::string to_string() const;

 private:
  int n_;
  int m_;
  std::vector<Expr> components_;
  std::vector<Expr> jacobian_;
};

/// Scalar function V on R^n (Lyapunov functions, level-set sources).
class ScalarSpec {
 public:
  ScalarSpec(int n, Expr expr);

  int dim() const { return n_; }
  const Expr& expr() const { return expr_; }
  const std::vector<Expr>& gradient_exprs() const { return gradient_; }

  double evaluate(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  std::string to_string() const { return expr_.to_string(); }

 private:
  int n_;
  Expr expr_;
  std::vector<Expr> gradient_;
};

/// State feedback u = k(x) with m components over x1..xn.
class FeedbackLaw {
 public:
  FeedbackLaw(int n, int m, std::vector<Expr> components);
  int state_dim() const { return n_; }
  int control_dim() const { return m_; }
  const std::vector<Expr>& components() const { return components_; }
  Vec evaluate(const Vec& x) const;

 private:
  int n_;
  int m_;
  std::vector<Expr> components_;
};

FieldSpec parse_field(std::string_view source, int n, int m);
ScalarSpec parse_scalar(std::string_view source, int n);
FeedbackLaw parse_feedback(std::string_view source, int n, int m);

/// Evaluate f at x with controls u (free-function form of FieldSpec::evaluate).
Vec evaluate_field(const FieldSpec& f, const Vec& x, const Vec& u);
Mat jacobian(const FieldSpec& f, const Vec& x, const Vec& u);

/// X + U: substitute u = k(x) into f, giving closed dynamics (m = 0).
FieldSpec close_loop(const FieldSpec& f, const FeedbackLaw& k);

/// -grad V as a field with m = 0.
FieldSpec negative_gradient_field(const ScalarSpec& v);

/// c(x) * f(x, u) for a positive scalar factor c.
FieldSpec rescale(const FieldSpec& f, const Expr& factor);

/// Central finite-difference state Jacobian (test oracle / diagnostics).
Mat finite_difference_jacobian(const FieldSpec& f, const Vec& x, const Vec& u, double step = 1e-5);

}  // namespace topocheck
