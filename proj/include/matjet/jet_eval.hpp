#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "matjet/expr.hpp"
#include "matjet/jet.hpp"

namespace matjet {

namespace jet_detail {

// Taylor coefficient sequences F^(j)(b)/j!, j = 0..k, of the elementary
// functions, used to compose with a jet through its nilpotent part.

inline std::vector<double> exp_series(double b, int k) {
  std::vector<double> s(k + 1);
  s[0] = std::exp(b);
  for (int j = 1; j <= k; ++j) s[j] = s[j - 1] / j;
  return s;
}

inline std::vector<double> log_series(double b, int k) {
  if (!(b > 0.0))
    throw DomainError("log of non-positive argument " +
                      expr_detail::format_double(b));
  std::vector<double> s(k + 1);
  s[0] = std::log(b);
  double sign_pow = 1.0;  // (-1)^(j-1) * b^(-j) accumulated
  for (int j = 1; j <= k; ++j) {
    sign_pow /= (j == 1 ? b : -b);
    s[j] = sign_pow / j;
  }
  return s;
}

inline std::vector<double> sin_series(double b, int k) {
  std::vector<double> s(k + 1);
  const double sb = std::sin(b), cb = std::cos(b);
  const double cycle[4] = {sb, cb, -sb, -cb};
  double fact = 1.0;
  for (int j = 0; j <= k; ++j) {
    if (j > 0) fact *= j;
    s[j] = cycle[j % 4] / fact;
  }
  return s;
}

inline std::vector<double> cos_series(double b, int k) {
  std::vector<double> s(k + 1);
  const double sb = std::sin(b), cb = std::cos(b);
  const double cycle[4] = {cb, -sb, -cb, sb};
  double fact = 1.0;
  for (int j = 0; j <= k; ++j) {
    if (j > 0) fact *= j;
    s[j] = cycle[j % 4] / fact;
  }
  return s;
}

inline std::vector<double> sqrt_series(double b, int k) {
  if (b < 0.0)
    throw DomainError("sqrt of negative argument " +
                      expr_detail::format_double(b));
  if (b == 0.0 && k >= 1)
    throw DomainError("sqrt is not differentiable at 0");
  std::vector<double> s(k + 1);
  s[0] = std::sqrt(b);
  for (int j = 1; j <= k; ++j) s[j] = s[j - 1] * (1.5 - j) / (j * b);
  return s;
}

}  // namespace jet_detail

/// Evaluate an expression with its variables bound to jets: the forward
/// propagation of truncated Taylor coefficients through the tree. All
/// supplied jets must share (generators, order); domain errors mirror
/// eval_real and additionally reject expansion points where a needed
/// derivative does not exist (sqrt at 0, division by a zero-body jet).
inline Jet eval_jet(const Expr& f, std::span<const Jet> vars) {
  if (vars.empty()) throw ShapeError("eval_jet needs at least one variable jet");
  const int gens = vars.front().gens();
  const int order = vars.front().order();
  switch (f.op()) {
    case ExprOp::kConstant:
      return Jet::constant(gens, order, f.constant_value());
    case ExprOp::kVariable: {
      int i = f.variable_index();
      if (i > static_cast<int>(vars.size()))
        throw ShapeError("variable y" + std::to_string(i) +
                         " out of range for " + std::to_string(vars.size()) +
                         " jet arguments");
      return vars[i - 1];
    }
    case ExprOp::kNeg:
      return -eval_jet(f.operand(), vars);
    case ExprOp::kExp: {
      Jet g = eval_jet(f.operand(), vars);
      return jet_compose(jet_detail::exp_series(g.body(), order), g);
    }
    case ExprOp::kLog: {
      Jet g = eval_jet(f.operand(), vars);
      return jet_compose(jet_detail::log_series(g.body(), order), g);
    }
    case ExprOp::kSin: {
      Jet g = eval_jet(f.operand(), vars);
      return jet_compose(jet_detail::sin_series(g.body(), order), g);
    }
    case ExprOp::kCos: {
      Jet g = eval_jet(f.operand(), vars);
      return jet_compose(jet_detail::cos_series(g.body(), order), g);
    }
    case ExprOp::kSqrt: {
      Jet g = eval_jet(f.operand(), vars);
      return jet_compose(jet_detail::sqrt_series(g.body(), order), g);
    }
    case ExprOp::kAdd:
      return eval_jet(f.lhs(), vars) + eval_jet(f.rhs(), vars);
    case ExprOp::kSub:
      return eval_jet(f.lhs(), vars) - eval_jet(f.rhs(), vars);
    case ExprOp::kMul:
      return eval_jet(f.lhs(), vars) * eval_jet(f.rhs(), vars);
    case ExprOp::kDiv: {
      Jet num = eval_jet(f.lhs(), vars);
      Jet den = eval_jet(f.rhs(), vars);
      return jet_div(num, den);
    }
    case ExprOp::kPow:
      return eval_jet(f.operand(), vars).pow(f.exponent());
  }
  throw ShapeError("corrupt expression node");
}

/// Truncated Taylor expansion of f around q: a jet in q.size() generators
/// whose coefficient at multi-index d equals (d^|d| f / dy^d)(q) / d!. The
/// degree-0 coefficient equals eval_real(f, q).
inline Jet taylor_jet(const Expr& f, std::span<const double> q, int order) {
  if (q.empty()) throw ShapeError("taylor_jet needs a nonempty point");
  if (order < 0) throw ShapeError("taylor order must be nonnegative");
  const int gens = static_cast<int>(q.size());
  std::vector<Jet> seeds;
  seeds.reserve(q.size());
  for (int i = 1; i <= gens; ++i)
    seeds.push_back(Jet::seed(gens, order, i, q[i - 1]));
  return eval_jet(f, seeds);
}

/// Canonical evaluation of an expression at a tuple of truncated-algebra
/// elements: split each a_i = b_i + c_i into scalar and nilpotent parts,
/// expand h around the scalar point b, and substitute the nilpotent parts
///
///   h(a) = sum_d  (d^|d| h / dy^d)(b) / d!  *  c_1^(d_1) ... c_n^(d_n),
///
/// all products truncated at the shared order. The degree-0 coefficient
/// equals eval_real(h, b); substituting a coordinate returns its argument
/// unchanged.
inline Jet eval_on_weil(const Expr& h, const WeilTuple& a) {
  const int n = a.size();
  if (h.max_variable() > n)
    throw ShapeError("expression references variable y" +
                     std::to_string(h.max_variable()) + " but the tuple has " +
                     std::to_string(n) + " elements");
  const int k = a.order();
  std::vector<double> body(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) body[i] = a[i].body();

  Jet coeffs = taylor_jet(h, body, k);  // jet in n generators

  // Powers of each nilpotent part, memoized up to the order.
  std::vector<std::vector<Jet>> soul_pow(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    soul_pow[i].reserve(k + 1);
    soul_pow[i].push_back(Jet::constant(a.gens(), k, 1.0));
    Jet s = a[i].soul();
    for (int p = 1; p <= k; ++p)
      soul_pow[i].push_back(soul_pow[i].back() * s);
  }

  Jet result(a.gens(), k);
  const MultiIndexSet& set = coeffs.indices();
  for (int pos = 0; pos < coeffs.size(); ++pos) {
    double c = coeffs.coeff(pos);
    if (c == 0.0) continue;
    auto d = set.at(pos);
    Jet term = Jet::constant(a.gens(), k, c);
    for (int i = 0; i < n; ++i)
      if (d[i] > 0) term = term * soul_pow[i][d[i]];
    result += term;
  }
  return result;
}

}  // namespace matjet
