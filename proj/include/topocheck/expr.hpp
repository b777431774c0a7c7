#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "topocheck/common.hpp"

namespace topocheck {

enum class NodeKind { Constant, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };
enum class Func { Sin, Cos, Exp, Tanh, Sqrt, Abs };
enum class VarKind { State, Control };

std::string_view func_name(Func f);

/// Syntax or name-resolution failure while parsing, with the byte offset
/// into the source text where the problem was detected.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset);
  std::size_t offset() const { return offset_; }
  const std::string& message() const { return message_; }

 private:
  std::string message_;
  std::size_t offset_;
};

/// Evaluation left the domain of an operation (sqrt of a negative number,
/// division by zero, non-finite result). `component` is -1 when unknown.
class DomainError : public Error {
 public:
  DomainError(const std::string& message, int component = -1);
  int component() const { return component_; }

 private:
  int component_;
};

/// Immutable expression tree. Copies share structure; every operation
/// returns a new tree.
class Expr {
 public:
  static Expr constant(double value);
  static Expr variable(VarKind kind, int index);  // index is zero-based
  static Expr state(int index) { return variable(VarKind::State, index); }
  static Expr control(int index) { return variable(VarKind::Control, index); }
  static Expr call(Func f, Expr arg);
  static Expr power(Expr base, int exponent);

  // Raw constructors: keep the tree exactly as written (used by the parser).
  static Expr raw_negate(Expr a);
  static Expr raw_binary(NodeKind kind, Expr a, Expr b);

  NodeKind kind() const;
  double value() const;         // Constant
  VarKind var_kind() const;     // Variable
  int var_index() const;        // Variable
  Func func() const;            // Call
  int exponent() const;         // Pow
  const Expr& lhs() const;      // unary/binary/Pow/Call operand
  const Expr& rhs() const;      // binary

  /// Throws DomainError on sqrt(<0), division by zero or a non-finite value.
  double evaluate(std::span<const double> x, std::span<const double> u) const;

  /// Symbolic partial derivative; constant folding only.
  Expr derivative(VarKind kind, int index) const;

  /// Replace every control variable u_j by replacements[j].
  Expr substitute_controls(const std::vector<Expr>& replacements) const;

  bool references(VarKind kind) const;
  int max_index(VarKind kind) const;  // -1 when absent

  /// Canonical, fully parenthesised text; parses back to the same tree.
  std::string to_string() const;

  bool structurally_equal(const Expr& other) const;

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
};

// Simplifying operators (constant folding, x+0, x*1, x*0, ...).
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

/// Parse a comma-separated list of expressions following the grammar
///   list   := expr ("," expr)*
///   expr   := term (("+"|"-") term)*
///   term   := factor (("*"|"/") factor)*
///   factor := base ("^" unsigned-integer)?
///   base   := number | ident | "(" expr ")" | "-" base | func "(" expr ")"
/// Identifiers x1..x<n_state>, u1..u<n_control>.
std::vector<Expr> parse_expression_list(std::string_view source, int n_state, int n_control);

}  // namespace topocheck
