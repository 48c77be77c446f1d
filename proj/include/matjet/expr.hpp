#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "matjet/errors.hpp"

namespace matjet {

/// Node kinds of the expression language: smooth functions of n real
/// variables built from arithmetic, integer powers and the elementary
/// functions exp, log, sin, cos, sqrt.
enum class ExprOp {
  kConstant,
  kVariable,
  kNeg,
  kExp,
  kLog,
  kSin,
  kCos,
  kSqrt,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kPow,  // integer exponent >= 0
};

inline bool is_unary(ExprOp op) {
  switch (op) {
    case ExprOp::kNeg:
    case ExprOp::kExp:
    case ExprOp::kLog:
    case ExprOp::kSin:
    case ExprOp::kCos:
    case ExprOp::kSqrt:
      return true;
    default:
      return false;
  }
}

inline bool is_binary(ExprOp op) {
  switch (op) {
    case ExprOp::kAdd:
    case ExprOp::kSub:
    case ExprOp::kMul:
    case ExprOp::kDiv:
      return true;
    default:
      return false;
  }
}

inline const char* op_name(ExprOp op) {
  switch (op) {
    case ExprOp::kConstant: return "constant";
    case ExprOp::kVariable: return "variable";
    case ExprOp::kNeg: return "neg";
    case ExprOp::kExp: return "exp";
    case ExprOp::kLog: return "log";
    case ExprOp::kSin: return "sin";
    case ExprOp::kCos: return "cos";
    case ExprOp::kSqrt: return "sqrt";
    case ExprOp::kAdd: return "add";
    case ExprOp::kSub: return "sub";
    case ExprOp::kMul: return "mul";
    case ExprOp::kDiv: return "div";
    case ExprOp::kPow: return "pow";
  }
  return "?";
}

/// Immutable expression tree with value semantics; copying shares nodes.
/// Variable indices are 1-based (y1, y2, ...). An Expr does not carry an
/// arity of its own: parse() enforces the declared arity and evaluation
/// checks indices against the supplied point.
class Expr {
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

  struct Node {
    ExprOp op;
    double value = 0.0;  // kConstant
    int index = 0;       // kVariable (1-based)
    int exponent = 0;    // kPow
    NodePtr a;
    NodePtr b;
  };

  NodePtr node_;

  explicit Expr(NodePtr n) : node_(std::move(n)) {}

  static NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

 public:
  Expr() : Expr(constant(0.0)) {}

  static Expr constant(double v) {
    return Expr(make({.op = ExprOp::kConstant, .value = v}));
  }

  static Expr variable(int index) {
    if (index < 1) throw ShapeError("variable index must be >= 1");
    return Expr(make({.op = ExprOp::kVariable, .index = index}));
  }

  static Expr unary(ExprOp op, Expr operand) {
    if (!is_unary(op)) throw ShapeError("not a unary operator");
    // Fold negation of a literal; keeps parse/print round trips structural.
    if (op == ExprOp::kNeg && operand.op() == ExprOp::kConstant)
      return constant(-operand.constant_value());
    return Expr(make({.op = op, .a = operand.node_}));
  }

  static Expr binary(ExprOp op, Expr lhs, Expr rhs) {
    if (!is_binary(op)) throw ShapeError("not a binary operator");
    return Expr(make({.op = op, .a = lhs.node_, .b = rhs.node_}));
  }

  static Expr pow(Expr base, int exponent) {
    if (exponent < 0) throw ShapeError("integer power must be nonnegative");
    return Expr(make({.op = ExprOp::kPow, .exponent = exponent, .a = base.node_}));
  }

  ExprOp op() const { return node_->op; }
  double constant_value() const { return node_->value; }
  int variable_index() const { return node_->index; }
  int exponent() const { return node_->exponent; }
  Expr operand() const { return Expr(node_->a); }
  Expr lhs() const { return Expr(node_->a); }
  Expr rhs() const { return Expr(node_->b); }

  /// Highest variable index referenced (0 for constant expressions).
  int max_variable() const {
    const Node& n = *node_;
    switch (n.op) {
      case ExprOp::kConstant: return 0;
      case ExprOp::kVariable: return n.index;
      default: {
        int m = n.a ? Expr(n.a).max_variable() : 0;
        if (n.b) m = std::max(m, Expr(n.b).max_variable());
        return m;
      }
    }
  }

  /// Structural equality: same tree, constants compared exactly.
  friend bool operator==(const Expr& x, const Expr& y) {
    if (x.node_ == y.node_) return true;
    const Node& a = *x.node_;
    const Node& b = *y.node_;
    if (a.op != b.op) return false;
    switch (a.op) {
      case ExprOp::kConstant: return a.value == b.value;
      case ExprOp::kVariable: return a.index == b.index;
      case ExprOp::kPow:
        return a.exponent == b.exponent && Expr(a.a) == Expr(b.a);
      default:
        if (is_unary(a.op)) return Expr(a.a) == Expr(b.a);
        return Expr(a.a) == Expr(b.a) && Expr(a.b) == Expr(b.b);
    }
  }
};

// ---------------------------------------------------------------------------
// Folding constructors. These apply constant folding and unit/zero
// elimination only; no other simplification is attempted.
// ---------------------------------------------------------------------------

namespace expr_detail {
inline bool is_const(const Expr& e, double v) {
  return e.op() == ExprOp::kConstant && e.constant_value() == v;
}
inline bool is_const(const Expr& e) { return e.op() == ExprOp::kConstant; }
}  // namespace expr_detail

inline Expr operator+(const Expr& a, const Expr& b) {
  using namespace expr_detail;
  if (is_const(a) && is_const(b))
    return Expr::constant(a.constant_value() + b.constant_value());
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return Expr::binary(ExprOp::kAdd, a, b);
}

inline Expr operator-(const Expr& a, const Expr& b) {
  using namespace expr_detail;
  if (is_const(a) && is_const(b))
    return Expr::constant(a.constant_value() - b.constant_value());
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return Expr::unary(ExprOp::kNeg, b);
  return Expr::binary(ExprOp::kSub, a, b);
}

inline Expr operator-(const Expr& a) { return Expr::unary(ExprOp::kNeg, a); }

inline Expr operator*(const Expr& a, const Expr& b) {
  using namespace expr_detail;
  if (is_const(a) && is_const(b))
    return Expr::constant(a.constant_value() * b.constant_value());
  if (is_const(a, 0.0) || is_const(b, 0.0)) return Expr::constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  return Expr::binary(ExprOp::kMul, a, b);
}

inline Expr operator/(const Expr& a, const Expr& b) {
  using namespace expr_detail;
  if (is_const(a) && is_const(b) && b.constant_value() != 0.0)
    return Expr::constant(a.constant_value() / b.constant_value());
  if (is_const(b, 1.0)) return a;
  if (is_const(a, 0.0) && !is_const(b, 0.0)) return Expr::constant(0.0);
  return Expr::binary(ExprOp::kDiv, a, b);
}

inline Expr pow(const Expr& base, int exponent) {
  using namespace expr_detail;
  if (exponent < 0) throw ShapeError("integer power must be nonnegative");
  if (exponent == 0) return Expr::constant(1.0);
  if (exponent == 1) return base;
  if (is_const(base)) {
    double r = 1.0;
    for (int i = 0; i < exponent; ++i) r *= base.constant_value();
    return Expr::constant(r);
  }
  return Expr::pow(base, exponent);
}

inline Expr exp(const Expr& e) { return Expr::unary(ExprOp::kExp, e); }
inline Expr log(const Expr& e) { return Expr::unary(ExprOp::kLog, e); }
inline Expr sin(const Expr& e) { return Expr::unary(ExprOp::kSin, e); }
inline Expr cos(const Expr& e) { return Expr::unary(ExprOp::kCos, e); }
inline Expr sqrt(const Expr& e) { return Expr::unary(ExprOp::kSqrt, e); }

// ---------------------------------------------------------------------------
// Printing. parse(to_string(e)) reproduces e structurally for any tree a
// parser or the folding constructors can produce.
// ---------------------------------------------------------------------------

namespace expr_detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Precedence levels: 1 add/sub, 2 mul/div, 3 pow, 4 atoms. Neg is level 0
// and is parenthesized whenever it appears as an operand.
inline int precedence(ExprOp op) {
  switch (op) {
    case ExprOp::kAdd:
    case ExprOp::kSub: return 1;
    case ExprOp::kMul:
    case ExprOp::kDiv: return 2;
    case ExprOp::kPow: return 3;
    case ExprOp::kNeg: return 0;
    case ExprOp::kConstant:
    case ExprOp::kVariable:
    case ExprOp::kExp:
    case ExprOp::kLog:
    case ExprOp::kSin:
    case ExprOp::kCos:
    case ExprOp::kSqrt: return 4;
  }
  return 4;
}

inline void print_rec(const Expr& e, int min_prec, std::string& out) {
  int prec = precedence(e.op());
  // A negative literal is printed parenthesized so it re-parses as a
  // (folded) constant in any operand position.
  if (e.op() == ExprOp::kConstant && e.constant_value() < 0.0) {
    out += '(';
    out += format_double(e.constant_value());
    out += ')';
    return;
  }
  bool parens = prec < min_prec;
  if (parens) out += '(';
  switch (e.op()) {
    case ExprOp::kConstant:
      out += format_double(e.constant_value());
      break;
    case ExprOp::kVariable:
      out += 'y';
      out += std::to_string(e.variable_index());
      break;
    case ExprOp::kNeg:
      out += '-';
      print_rec(e.operand(), 2, out);
      break;
    case ExprOp::kExp:
    case ExprOp::kLog:
    case ExprOp::kSin:
    case ExprOp::kCos:
    case ExprOp::kSqrt:
      out += op_name(e.op());
      out += '(';
      print_rec(e.operand(), 1, out);
      out += ')';
      break;
    case ExprOp::kAdd:
      print_rec(e.lhs(), 1, out);
      out += '+';
      print_rec(e.rhs(), 2, out);
      break;
    case ExprOp::kSub:
      print_rec(e.lhs(), 1, out);
      out += '-';
      print_rec(e.rhs(), 2, out);
      break;
    case ExprOp::kMul:
      print_rec(e.lhs(), 2, out);
      out += '*';
      print_rec(e.rhs(), 3, out);
      break;
    case ExprOp::kDiv:
      print_rec(e.lhs(), 2, out);
      out += '/';
      print_rec(e.rhs(), 3, out);
      break;
    case ExprOp::kPow:
      print_rec(e.operand(), 4, out);
      out += '^';
      out += std::to_string(e.exponent());
      break;
  }
  if (parens) out += ')';
}

}  // namespace expr_detail

inline std::string to_string(const Expr& e) {
  std::string out;
  expr_detail::print_rec(e, 1, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parser. Grammar:
//   expr   := ('-')? term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' nonneg-int)?
//   base   := literal | ('y'|'x') index | func '(' expr ')' | '(' expr ')'
//   func   := 'exp' | 'log' | 'sin' | 'cos' | 'sqrt'
// 'x' is accepted as an alias variable prefix (used for matrix families
// over base coordinates); the canonical printed form is 'y'.
// ---------------------------------------------------------------------------

namespace expr_detail {

class Parser {
 public:
  Parser(std::string_view text, int arity) : text_(text), arity_(arity) {}

  Expr run() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size())
      throw ParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  std::string_view text_;
  int arity_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  Expr parse_expr() {
    bool leading_neg = eat('-');
    Expr e = parse_term();
    if (leading_neg) e = Expr::unary(ExprOp::kNeg, e);
    for (;;) {
      if (eat('+'))
        e = Expr::binary(ExprOp::kAdd, e, parse_term());
      else if (eat('-'))
        e = Expr::binary(ExprOp::kSub, e, parse_term());
      else
        return e;
    }
  }

  Expr parse_term() {
    Expr e = parse_factor();
    for (;;) {
      if (eat('*'))
        e = Expr::binary(ExprOp::kMul, e, parse_factor());
      else if (eat('/'))
        e = Expr::binary(ExprOp::kDiv, e, parse_factor());
      else
        return e;
    }
  }

  Expr parse_factor() {
    Expr base = parse_base();
    if (eat('^')) {
      skip_ws();
      std::size_t at = pos_;
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
        throw ParseError("expected a nonnegative integer exponent", at);
      long long v = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        v = v * 10 + (text_[pos_] - '0');
        if (v > 1000000) throw ParseError("exponent too large", at);
        ++pos_;
      }
      return Expr::pow(base, static_cast<int>(v));
    }
    return base;
  }

  Expr parse_base() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      if (!eat(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  Expr parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '.'))
      ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
          ++pos_;
      } else {
        pos_ = mark;  // 'e' was not an exponent; leave it for the identifier lexer
      }
    }
    double value = 0.0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_)
      throw ParseError("malformed number literal", start);
    return Expr::constant(value);
  }

  Expr parse_ident() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_]))))
      ++pos_;
    std::string_view ident = text_.substr(start, pos_ - start);
    if ((ident[0] == 'y' || ident[0] == 'x') && ident.size() > 1 &&
        std::isdigit(static_cast<unsigned char>(ident[1]))) {
      long long index = 0;
      for (std::size_t i = 1; i < ident.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(ident[i])))
          throw ParseError("malformed variable name", start);
        index = index * 10 + (ident[i] - '0');
        if (index > 1000000) throw ParseError("variable index too large", start);
      }
      if (index < 1 || index > arity_)
        throw ParseError("variable index out of range for arity " +
                             std::to_string(arity_),
                         start);
      return Expr::variable(static_cast<int>(index));
    }
    ExprOp op;
    if (ident == "exp") op = ExprOp::kExp;
    else if (ident == "log") op = ExprOp::kLog;
    else if (ident == "sin") op = ExprOp::kSin;
    else if (ident == "cos") op = ExprOp::kCos;
    else if (ident == "sqrt") op = ExprOp::kSqrt;
    else throw ParseError("unknown identifier '" + std::string(ident) + "'", start);
    if (!eat('(')) throw ParseError("expected '(' after function name", pos_);
    Expr arg = parse_expr();
    if (!eat(')')) throw ParseError("expected ')'", pos_);
    return Expr::unary(op, arg);
  }
};

}  // namespace expr_detail

/// Parse an expression of the declared arity. Throws ParseError with the
/// offending position on malformed input.
inline Expr parse_expr(std::string_view text, int arity) {
  if (arity < 0) throw ShapeError("arity must be nonnegative");
  return expr_detail::Parser(text, arity).run();
}

// ---------------------------------------------------------------------------
// Evaluation.
// ---------------------------------------------------------------------------

/// Evaluate at a real point. Domain errors name the offending node and the
/// evaluated argument; they are raised at evaluation time, not parse time.
inline double eval_real(const Expr& f, std::span<const double> p) {
  switch (f.op()) {
    case ExprOp::kConstant:
      return f.constant_value();
    case ExprOp::kVariable: {
      int i = f.variable_index();
      if (i > static_cast<int>(p.size()))
        throw ShapeError("variable y" + std::to_string(i) + " out of range for a " +
                         std::to_string(p.size()) + "-coordinate point");
      return p[i - 1];
    }
    case ExprOp::kNeg:
      return -eval_real(f.operand(), p);
    case ExprOp::kExp:
      return std::exp(eval_real(f.operand(), p));
    case ExprOp::kLog: {
      double v = eval_real(f.operand(), p);
      if (!(v > 0.0))
        throw DomainError("log of non-positive argument " +
                          expr_detail::format_double(v));
      return std::log(v);
    }
    case ExprOp::kSin:
      return std::sin(eval_real(f.operand(), p));
    case ExprOp::kCos:
      return std::cos(eval_real(f.operand(), p));
    case ExprOp::kSqrt: {
      double v = eval_real(f.operand(), p);
      if (v < 0.0)
        throw DomainError("sqrt of negative argument " +
                          expr_detail::format_double(v));
      return std::sqrt(v);
    }
    case ExprOp::kAdd:
      return eval_real(f.lhs(), p) + eval_real(f.rhs(), p);
    case ExprOp::kSub:
      return eval_real(f.lhs(), p) - eval_real(f.rhs(), p);
    case ExprOp::kMul:
      return eval_real(f.lhs(), p) * eval_real(f.rhs(), p);
    case ExprOp::kDiv: {
      double num = eval_real(f.lhs(), p);
      double den = eval_real(f.rhs(), p);
      if (den == 0.0) throw DomainError("division by zero");
      return num / den;
    }
    case ExprOp::kPow: {
      double base = eval_real(f.operand(), p);
      double r = 1.0;
      for (int i = 0; i < f.exponent(); ++i) r *= base;
      return r;
    }
  }
  throw ShapeError("corrupt expression node");
}

// ---------------------------------------------------------------------------
// Symbolic differentiation. Standard rules; results are folded by the
// construction helpers but otherwise unsimplified.
// ---------------------------------------------------------------------------

inline Expr diff(const Expr& f, int var) {
  if (var < 1) throw ShapeError("derivative variable index must be >= 1");
  switch (f.op()) {
    case ExprOp::kConstant:
      return Expr::constant(0.0);
    case ExprOp::kVariable:
      return Expr::constant(f.variable_index() == var ? 1.0 : 0.0);
    case ExprOp::kNeg:
      return Expr::constant(0.0) - diff(f.operand(), var);
    case ExprOp::kExp:
      return exp(f.operand()) * diff(f.operand(), var);
    case ExprOp::kLog:
      return diff(f.operand(), var) / f.operand();
    case ExprOp::kSin:
      return cos(f.operand()) * diff(f.operand(), var);
    case ExprOp::kCos:
      return (Expr::constant(0.0) - sin(f.operand())) * diff(f.operand(), var);
    case ExprOp::kSqrt:
      return diff(f.operand(), var) /
             (Expr::constant(2.0) * sqrt(f.operand()));
    case ExprOp::kAdd:
      return diff(f.lhs(), var) + diff(f.rhs(), var);
    case ExprOp::kSub:
      return diff(f.lhs(), var) - diff(f.rhs(), var);
    case ExprOp::kMul:
      return diff(f.lhs(), var) * f.rhs() + f.lhs() * diff(f.rhs(), var);
    case ExprOp::kDiv:
      return (diff(f.lhs(), var) * f.rhs() - f.lhs() * diff(f.rhs(), var)) /
             pow(f.rhs(), 2);
    case ExprOp::kPow:
      if (f.exponent() == 0) return Expr::constant(0.0);
      return Expr::constant(static_cast<double>(f.exponent())) *
             pow(f.operand(), f.exponent() - 1) * diff(f.operand(), var);
  }
  throw ShapeError("corrupt expression node");
}

/// Replace variable y_i by replacements[i-1] throughout.
inline Expr substitute(const Expr& f, std::span<const Expr> replacements) {
  switch (f.op()) {
    case ExprOp::kConstant:
      return f;
    case ExprOp::kVariable: {
      int i = f.variable_index();
      if (i > static_cast<int>(replacements.size()))
        throw ShapeError("substitution missing variable y" + std::to_string(i));
      return replacements[i - 1];
    }
    case ExprOp::kPow:
      return Expr::pow(substitute(f.operand(), replacements), f.exponent());
    default:
      if (is_unary(f.op()))
        return Expr::unary(f.op(), substitute(f.operand(), replacements));
      return Expr::binary(f.op(), substitute(f.lhs(), replacements),
                          substitute(f.rhs(), replacements));
  }
}

/// True when the expression is a polynomial in its variables (no division
/// or elementary function nodes anywhere).
inline bool is_polynomial(const Expr& f) {
  switch (f.op()) {
    case ExprOp::kConstant:
    case ExprOp::kVariable:
      return true;
    case ExprOp::kNeg:
      return is_polynomial(f.operand());
    case ExprOp::kPow:
      return is_polynomial(f.operand());
    case ExprOp::kAdd:
    case ExprOp::kSub:
    case ExprOp::kMul:
      return is_polynomial(f.lhs()) && is_polynomial(f.rhs());
    default:
      return false;
  }
}

}  // namespace matjet
