#include "topocheck/field.hpp"

namespace topocheck {

namespace {

std::span<const double> as_span(const Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

void check_references(const Expr& e, int n, int m, const char* what) {
  if (e.max_index(VarKind::State) >= n)
    throw PreconditionError(std::string(what) + " references a state variable beyond x" + std::to_string(n));
  if (e.max_index(VarKind::Control) >= m)
    throw PreconditionError(std::string(what) + " references a control variable beyond u" + std::to_string(m));
}

}  // namespace

FieldSpec::FieldSpec(int n, int m, std::vector<Expr> components)
    : n_(n), m_(m), components_(std::move(components)) {
  if (n_ < 1) throw PreconditionError("field dimension must be >= 1");
  if (m_ < 0) throw PreconditionError("control dimension must be >= 0");
  if (static_cast<int>(components_.size()) != n_)
    throw PreconditionError("field has " + std::to_string(components_.size()) + " components, expected " +
                            std::to_string(n_));
  for (const Expr& c : components_) check_references(c, n_, m_, "field component");
  jacobian_.reserve(static_cast<std::size_t>(n_) * n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) jacobian_.push_back(components_[i].derivative(VarKind::State, j));
}

Vec FieldSpec::evaluate(const Vec& x, const Vec& u) const {
  if (x.size() != n_ || u.size() != m_) throw PreconditionError("evaluate: vector length mismatch");
  Vec out(n_);
  for (int i = 0; i < n_; ++i) {
    try {
      out[i] = components_[i].evaluate(as_span(x), as_span(u));
    } catch (const DomainError& e) {
      throw DomainError(e.what(), i);
    }
  }
  return out;
}

Mat FieldSpec::jacobian(const Vec& x, const Vec& u) const {
  if (x.size() != n_ || u.size() != m_) throw PreconditionError("jacobian: vector length mismatch");
  Mat J(n_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      try {
        J(i, j) = jacobian_[i * n_ + j].evaluate(as_span(x), as_span(u));
      } catch (const DomainError& e) {
        throw DomainError(e.what(), i);
      }
    }
  }
  return J;
}

VectorFieldFn FieldSpec::as_function() const {
  FieldSpec copy = *this;
  return [copy](const Vec& x) { return copy.evaluate(x); };
}

std::string FieldSpec::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (i) out += ", ";
    out += components_[i].to_string();
  }
  return out;
}

ScalarSpec::ScalarSpec(int n, Expr expr) : n_(n), expr_(std::move(expr)) {
  if (n_ < 1) throw PreconditionError("scalar dimension must be >= 1");
  check_references(expr_, n_, 0, "scalar function");
  for (int j = 0; j < n_; ++j) gradient_.push_back(expr_.derivative(VarKind::State, j));
}

double ScalarSpec::evaluate(const Vec& x) const {
  if (x.size() != n_) throw PreconditionError("scalar evaluate: vector length mismatch");
  return expr_.evaluate(as_span(x), {});
}

Vec ScalarSpec::gradient(const Vec& x) const {
  if (x.size() != n_) throw PreconditionError("gradient: vector length mismatch");
  Vec g(n_);
  for (int j = 0; j < n_; ++j) g[j] = gradient_[j].evaluate(as_span(x), {});
  return g;
}

FeedbackLaw::FeedbackLaw(int n, int m, std::vector<Expr> components)
    : n_(n), m_(m), components_(std::move(components)) {
  if (static_cast<int>(components_.size()) != m_)
    throw PreconditionError("feedback has " + std::to_string(components_.size()) + " components, expected " +
                            std::to_string(m_));
  for (const Expr& c : components_) check_references(c, n_, 0, "feedback component");
}

Vec FeedbackLaw::evaluate(const Vec& x) const {
  Vec out(m_);
  for (int i = 0; i < m_; ++i) out[i] = components_[i].evaluate(as_span(x), {});
  return out;
}

namespace {

std::vector<Expr> parse_exact(std::string_view source, int n, int m, int count) {
  auto exprs = parse_expression_list(source, n, m);
  if (static_cast<int>(exprs.size()) != count)
    throw ParseError("component count mismatch: got " + std::to_string(exprs.size()) + ", expected " +
                         std::to_string(count),
                     source.size());
  return exprs;
}

}  // namespace

FieldSpec parse_field(std::string_view source, int n, int m) {
  if (n < 1 || m < 0) throw PreconditionError("parse_field: need n >= 1 and m >= 0");
  return FieldSpec(n, m, parse_exact(source, n, m, n));
}

ScalarSpec parse_scalar(std::string_view source, int n) {
  if (n < 1) throw PreconditionError("parse_scalar: need n >= 1");
  return ScalarSpec(n, parse_exact(source, n, 0, 1).front());
}

FeedbackLaw parse_feedback(std::string_view source, int n, int m) {
  if (n < 1 || m < 1) throw PreconditionError("parse_feedback: need n >= 1 and m >= 1");
  return FeedbackLaw(n, m, parse_exact(source, n, 0, m));
}

Vec evaluate_field(const FieldSpec& f, const Vec& x, const Vec& u) { return f.evaluate(x, u); }

Mat jacobian(const FieldSpec& f, const Vec& x, const Vec& u) { return f.jacobian(x, u); }

FieldSpec close_loop(const FieldSpec& f, const FeedbackLaw& k) {
  if (k.state_dim() != f.state_dim() || k.control_dim() != f.control_dim())
    throw PreconditionError("close_loop: feedback dimensions do not match the control system");
  std::vector<Expr> comps;
  for (const Expr& c : f.components()) comps.push_back(c.substitute_controls(k.components()));
  return FieldSpec(f.state_dim(), 0, std::move(comps));
}

FieldSpec negative_gradient_field(const ScalarSpec& v) {
  std::vector<Expr> comps;
  for (const Expr& g : v.gradient_exprs()) comps.push_back(-g);
  return FieldSpec(v.dim(), 0, std::move(comps));
}

FieldSpec rescale(const FieldSpec& f, const Expr& factor) {
  std::vector<Expr> comps;
  for (const Expr& c : f.components()) comps.push_back(Expr::raw_binary(NodeKind::Mul, factor, c));
  return FieldSpec(f.state_dim(), f.control_dim(), std::move(comps));
}

Mat finite_difference_jacobian(const FieldSpec& f, const Vec& x, const Vec& u, double step) {
  const int n = f.state_dim();
  Mat J(n, n);
  for (int j = 0; j < n; ++j) {
    Vec xp = x, xm = x;
    xp[j] += step;
    xm[j] -= step;
    J.col(j) = (f.evaluate(xp, u) - f.evaluate(xm, u)) / (2.0 * step);
  }
  return J;
}

}  // namespace topocheck
