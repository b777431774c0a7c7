#include "topocheck/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace topocheck {

struct Expr::Node {
  NodeKind kind = NodeKind::Constant;
  double value = 0.0;
  VarKind var_kind = VarKind::State;
  int index = 0;
  Func func = Func::Sin;
  int exponent = 0;
  std::vector<Expr> children;
};

std::string_view func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Exp: return "exp";
    case Func::Tanh: return "tanh";
    case Func::Sqrt: return "sqrt";
    case Func::Abs: return "abs";
  }
  return "?";
}

ParseError::ParseError(const std::string& message, std::size_t offset)
    : Error("parse error at offset " + std::to_string(offset) + ": " + message),
      message_(message),
      offset_(offset) {}

DomainError::DomainError(const std::string& message, int component)
    : Error(component >= 0 ? "domain error in component " + std::to_string(component + 1) + ": " + message
                           : "domain error: " + message),
      component_(component) {}

// ---------------------------------------------------------------------------
// construction
// ---------------------------------------------------------------------------

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Constant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable(VarKind kind, int index) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Variable;
  n->var_kind = kind;
  n->index = index;
  return Expr(std::move(n));
}

Expr Expr::call(Func f, Expr arg) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Call;
  n->func = f;
  n->children.push_back(std::move(arg));
  return Expr(std::move(n));
}

Expr Expr::power(Expr base, int exponent) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Pow;
  n->exponent = exponent;
  n->children.push_back(std::move(base));
  return Expr(std::move(n));
}

Expr Expr::raw_negate(Expr a) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Negate;
  n->children.push_back(std::move(a));
  return Expr(std::move(n));
}

Expr Expr::raw_binary(NodeKind kind, Expr a, Expr b) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->children.push_back(std::move(a));
  n->children.push_back(std::move(b));
  return Expr(std::move(n));
}

NodeKind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
VarKind Expr::var_kind() const { return node_->var_kind; }
int Expr::var_index() const { return node_->index; }
Func Expr::func() const { return node_->func; }
int Expr::exponent() const { return node_->exponent; }
const Expr& Expr::lhs() const { return node_->children.at(0); }
const Expr& Expr::rhs() const { return node_->children.at(1); }

namespace {

bool is_const(const Expr& e, double v) { return e.kind() == NodeKind::Constant && e.value() == v; }
bool is_const(const Expr& e) { return e.kind() == NodeKind::Constant; }

}  // namespace

Expr operator+(const Expr& a, const Expr& b) {
  if (is_const(a) && is_const(b)) return Expr::constant(a.value() + b.value());
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return Expr::raw_binary(NodeKind::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (is_const(a) && is_const(b)) return Expr::constant(a.value() - b.value());
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return -b;
  return Expr::raw_binary(NodeKind::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (is_const(a) && is_const(b)) return Expr::constant(a.value() * b.value());
  if (is_const(a, 0.0) || is_const(b, 0.0)) return Expr::constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (is_const(a, -1.0)) return -b;
  if (is_const(b, -1.0)) return -a;
  return Expr::raw_binary(NodeKind::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (is_const(a) && is_const(b) && b.value() != 0.0) return Expr::constant(a.value() / b.value());
  if (is_const(a, 0.0)) return Expr::constant(0.0);
  if (is_const(b, 1.0)) return a;
  return Expr::raw_binary(NodeKind::Div, a, b);
}

Expr operator-(const Expr& a) {
  if (is_const(a)) return Expr::constant(-a.value());
  if (a.kind() == NodeKind::Negate) return a.lhs();
  return Expr::raw_negate(a);
}

// ---------------------------------------------------------------------------
// evaluation
// ---------------------------------------------------------------------------

namespace {

double int_power(double base, int exponent) {
  double result = 1.0;
  double b = base;
  unsigned e = static_cast<unsigned>(exponent);
  while (e != 0) {
    if (e & 1u) result *= b;
    b *= b;
    e >>= 1u;
  }
  return result;
}

}  // namespace

double Expr::evaluate(std::span<const double> x, std::span<const double> u) const {
  const Node& n = *node_;
  double r = 0.0;
  switch (n.kind) {
    case NodeKind::Constant:
      return n.value;
    case NodeKind::Variable: {
      const auto& src = (n.var_kind == VarKind::State) ? x : u;
      if (static_cast<std::size_t>(n.index) >= src.size())
        throw DomainError("variable index out of range for supplied vector");
      return src[n.index];
    }
    case NodeKind::Negate:
      return -n.children[0].evaluate(x, u);
    case NodeKind::Add:
      r = n.children[0].evaluate(x, u) + n.children[1].evaluate(x, u);
      break;
    case NodeKind::Sub:
      r = n.children[0].evaluate(x, u) - n.children[1].evaluate(x, u);
      break;
    case NodeKind::Mul:
      r = n.children[0].evaluate(x, u) * n.children[1].evaluate(x, u);
      break;
    case NodeKind::Div: {
      const double num = n.children[0].evaluate(x, u);
      const double den = n.children[1].evaluate(x, u);
      if (den == 0.0) throw DomainError("division by zero");
      r = num / den;
      break;
    }
    case NodeKind::Pow:
      r = int_power(n.children[0].evaluate(x, u), n.exponent);
      break;
    case NodeKind::Call: {
      const double a = n.children[0].evaluate(x, u);
      switch (n.func) {
        case Func::Sin: r = std::sin(a); break;
        case Func::Cos: r = std::cos(a); break;
        case Func::Exp: r = std::exp(a); break;
        case Func::Tanh: r = std::tanh(a); break;
        case Func::Sqrt:
          if (a < 0.0) throw DomainError("sqrt of negative value");
          r = std::sqrt(a);
          break;
        case Func::Abs: r = std::fabs(a); break;
      }
      break;
    }
  }
  if (!std::isfinite(r)) throw DomainError("non-finite value");
  return r;
}

// ---------------------------------------------------------------------------
// differentiation and substitution
// ---------------------------------------------------------------------------

Expr Expr::derivative(VarKind kind, int index) const {
  const Node& n = *node_;
  switch (n.kind) {
    case NodeKind::Constant:
      return constant(0.0);
    case NodeKind::Variable:
      return constant((n.var_kind == kind && n.index == index) ? 1.0 : 0.0);
    case NodeKind::Negate:
      return -lhs().derivative(kind, index);
    case NodeKind::Add:
      return lhs().derivative(kind, index) + rhs().derivative(kind, index);
    case NodeKind::Sub:
      return lhs().derivative(kind, index) - rhs().derivative(kind, index);
    case NodeKind::Mul:
      return lhs().derivative(kind, index) * rhs() + lhs() * rhs().derivative(kind, index);
    case NodeKind::Div: {
      const Expr da = lhs().derivative(kind, index);
      const Expr db = rhs().derivative(kind, index);
      return da / rhs() - (lhs() * db) / power(rhs(), 2);
    }
    case NodeKind::Pow: {
      if (n.exponent == 0) return constant(0.0);
      const Expr da = lhs().derivative(kind, index);
      if (is_const(da, 0.0)) return da;
      const Expr reduced = (n.exponent == 1) ? constant(1.0)
                           : (n.exponent == 2) ? lhs()
                                               : power(lhs(), n.exponent - 1);
      return constant(static_cast<double>(n.exponent)) * reduced * da;
    }
    case NodeKind::Call: {
      const Expr& a = lhs();
      const Expr da = a.derivative(kind, index);
      if (is_const(da, 0.0)) return da;
      switch (n.func) {
        case Func::Sin: return call(Func::Cos, a) * da;
        case Func::Cos: return -(call(Func::Sin, a) * da);
        case Func::Exp: return *this * da;
        case Func::Tanh: return (constant(1.0) - power(*this, 2)) * da;
        // Both quotients divide by zero at the kink, which surfaces as a
        // DomainError instead of a guessed subgradient.
        case Func::Sqrt: return da / (constant(2.0) * *this);
        case Func::Abs: return (a / *this) * da;
      }
    }
  }
  return constant(0.0);
}

Expr Expr::substitute_controls(const std::vector<Expr>& replacements) const {
  const Node& n = *node_;
  switch (n.kind) {
    case NodeKind::Constant:
      return *this;
    case NodeKind::Variable:
      if (n.var_kind == VarKind::Control) {
        if (static_cast<std::size_t>(n.index) >= replacements.size())
          throw PreconditionError("control u" + std::to_string(n.index + 1) + " has no replacement");
        return replacements[n.index];
      }
      return *this;
    case NodeKind::Negate:
      return raw_negate(lhs().substitute_controls(replacements));
    case NodeKind::Add:
    case NodeKind::Sub:
    case NodeKind::Mul:
    case NodeKind::Div:
      return raw_binary(n.kind, lhs().substitute_controls(replacements), rhs().substitute_controls(replacements));
    case NodeKind::Pow:
      return power(lhs().substitute_controls(replacements), n.exponent);
    case NodeKind::Call:
      return call(n.func, lhs().substitute_controls(replacements));
  }
  return *this;
}

bool Expr::references(VarKind kind) const { return max_index(kind) >= 0; }

int Expr::max_index(VarKind kind) const {
  const Node& n = *node_;
  if (n.kind == NodeKind::Variable) return n.var_kind == kind ? n.index : -1;
  int best = -1;
  for (const Expr& c : n.children) best = std::max(best, c.max_index(kind));
  return best;
}

// ---------------------------------------------------------------------------
// printing
// ---------------------------------------------------------------------------

namespace {

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

char op_char(NodeKind k) {
  switch (k) {
    case NodeKind::Add: return '+';
    case NodeKind::Sub: return '-';
    case NodeKind::Mul: return '*';
    case NodeKind::Div: return '/';
    default: return '?';
  }
}

void print(const Expr& e, std::ostringstream& out) {
  switch (e.kind()) {
    case NodeKind::Constant:
      if (std::signbit(e.value()))
        out << "(-" << format_number(-e.value()) << ")";
      else
        out << format_number(e.value());
      return;
    case NodeKind::Variable:
      out << (e.var_kind() == VarKind::State ? 'x' : 'u') << (e.var_index() + 1);
      return;
    case NodeKind::Negate:
      out << "(-";
      if (e.lhs().kind() == NodeKind::Constant) {
        out << "(";
        print(e.lhs(), out);
        out << ")";
      } else {
        print(e.lhs(), out);
      }
      out << ")";
      return;
    case NodeKind::Add:
    case NodeKind::Sub:
    case NodeKind::Mul:
    case NodeKind::Div:
      out << "(";
      print(e.lhs(), out);
      out << ' ' << op_char(e.kind()) << ' ';
      print(e.rhs(), out);
      out << ")";
      return;
    case NodeKind::Pow:
      out << "(";
      print(e.lhs(), out);
      out << "^" << e.exponent() << ")";
      return;
    case NodeKind::Call:
      out << func_name(e.func()) << "(";
      print(e.lhs(), out);
      out << ")";
      return;
  }
}

}  // namespace

std::string Expr::to_string() const {
  std::ostringstream out;
  print(*this, out);
  return out.str();
}

bool Expr::structurally_equal(const Expr& other) const {
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::Constant:
      return a.value == b.value;
    case NodeKind::Variable:
      return a.var_kind == b.var_kind && a.index == b.index;
    case NodeKind::Pow:
      if (a.exponent != b.exponent) return false;
      break;
    case NodeKind::Call:
      if (a.func != b.func) return false;
      break;
    default:
      break;
  }
  if (a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!a.children[i].structurally_equal(b.children[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// parsing
// ---------------------------------------------------------------------------

namespace {

class Parser {
 public:
  Parser(std::string_view src, int n_state, int n_control)
      : src_(src), n_state_(n_state), n_control_(n_control) {}

  std::vector<Expr> parse_list() {
    std::vector<Expr> out;
    out.push_back(parse_expr());
    while (true) {
      skip_ws();
      if (at_end()) break;
      if (src_[pos_] != ',') fail("expected ',' or end of input");
      ++pos_;
      out.push_back(parse_expr());
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }
  [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const { throw ParseError(msg, at); }

  bool at_end() const { return pos_ >= src_.size(); }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (!at_end() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    while (true) {
      if (accept('+'))
        lhs = Expr::raw_binary(NodeKind::Add, lhs, parse_term());
      else if (accept('-'))
        lhs = Expr::raw_binary(NodeKind::Sub, lhs, parse_term());
      else
        return lhs;
    }
  }

  Expr parse_term() {
    Expr lhs = parse_factor();
    while (true) {
      if (accept('*'))
        lhs = Expr::raw_binary(NodeKind::Mul, lhs, parse_factor());
      else if (accept('/'))
        lhs = Expr::raw_binary(NodeKind::Div, lhs, parse_factor());
      else
        return lhs;
    }
  }

  Expr parse_factor() {
    Expr base = parse_base();
    if (accept('^')) {
      skip_ws();
      const std::size_t start = pos_;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      if (start == pos_) fail("expected unsigned integer exponent");
      int e = 0;
      auto res = std::from_chars(src_.data() + start, src_.data() + pos_, e);
      if (res.ec != std::errc()) fail_at("exponent out of range", start);
      return Expr::power(std::move(base), e);
    }
    return base;
  }

  Expr parse_base() {
    skip_ws();
    if (at_end()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = parse_expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (c == '-') {
      ++pos_;
      // "-2.5" directly before a literal is a negative constant
      if (!at_end() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
        return Expr::constant(-parse_number().value());
      return Expr::raw_negate(parse_base());
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t k = 0;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
        ++k;
      }
      return k;
    };
    std::size_t mantissa = digits();
    if (!at_end() && src_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) fail_at("malformed number", start);
    if (!at_end() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      ++pos_;
      if (!at_end() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) fail("malformed exponent");
    }
    double v = 0.0;
    auto res = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != src_.data() + pos_) fail_at("malformed number", start);
    return Expr::constant(v);
  }

  Expr parse_identifier() {
    const std::size_t start = pos_;
    while (!at_end() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::string_view letters = src_.substr(start, pos_ - start);
    const std::size_t digit_start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::string_view digits = src_.substr(digit_start, pos_ - digit_start);
    const std::string_view whole = src_.substr(start, pos_ - start);

    if ((letters == "x" || letters == "u") && !digits.empty()) {
      int idx = 0;
      auto res = std::from_chars(digits.data(), digits.data() + digits.size(), idx);
      const int limit = (letters == "x") ? n_state_ : n_control_;
      if (res.ec != std::errc() || idx < 1 || idx > limit)
        fail_at("unknown identifier '" + std::string(whole) + "'", start);
      return Expr::variable(letters == "x" ? VarKind::State : VarKind::Control, idx - 1);
    }
    if (digits.empty()) {
      static constexpr Func funcs[] = {Func::Sin, Func::Cos, Func::Exp, Func::Tanh, Func::Sqrt, Func::Abs};
      for (Func f : funcs) {
        if (letters == func_name(f)) {
          if (!accept('(')) fail("expected '(' after function name");
          Expr arg = parse_expr();
          if (!accept(')')) fail("expected ')'");
          return Expr::call(f, std::move(arg));
        }
      }
    }
    fail_at("unknown identifier '" + std::string(whole) + "'", start);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int n_state_;
  int n_control_;
};

}  // namespace

std::vector<Expr> parse_expression_list(std::string_view source, int n_state, int n_control) {
  return Parser(source, n_state, n_control).parse_list();
}

}  // namespace topocheck
