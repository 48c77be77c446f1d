#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "matjet/calculus.hpp"
#include "matjet/expr.hpp"
#include "matjet/jet_eval.hpp"

namespace matjet {

// ---------------------------------------------------------------------------
// Poly: sparse multivariate polynomial over R^n (univariate when vars == 1).
// ---------------------------------------------------------------------------

class Poly {
 public:
  explicit Poly(int vars) : vars_(vars) {
    if (vars < 1) throw ShapeError("polynomial needs at least one variable");
  }

  static Poly constant(int vars, double c) {
    Poly p(vars);
    if (c != 0.0) p.terms_[std::vector<int>(static_cast<std::size_t>(vars), 0)] = c;
    return p;
  }

  static Poly monomial(int vars, std::span<const int> d, double c) {
    Poly p(vars);
    p.add_term(d, c);
    return p;
  }

  /// Univariate polynomial from ascending coefficients.
  static Poly from_univariate(std::span<const double> ascending) {
    Poly p(1);
    for (std::size_t j = 0; j < ascending.size(); ++j) {
      int d[1] = {static_cast<int>(j)};
      p.add_term(d, ascending[j]);
    }
    return p;
  }

  int vars() const { return vars_; }
  const std::map<std::vector<int>, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(std::span<const int> d, double c) {
    if (static_cast<int>(d.size()) != vars_)
      throw ShapeError("term multi-index length does not match variable count");
    for (int v : d)
      if (v < 0) throw ShapeError("term exponents must be nonnegative");
    if (c == 0.0) return;
    std::vector<int> key(d.begin(), d.end());
    double& slot = terms_[key];
    slot += c;
    if (slot == 0.0) terms_.erase(key);
  }

  int total_degree() const {
    int deg = 0;
    for (const auto& [d, c] : terms_) {
      int t = 0;
      for (int v : d) t += v;
      deg = std::max(deg, t);
    }
    return deg;
  }

  int degree_in(int axis) const {
    int deg = 0;
    for (const auto& [d, c] : terms_) deg = std::max(deg, d[axis]);
    return deg;
  }

  double coeff(std::span<const int> d) const {
    auto it = terms_.find(std::vector<int>(d.begin(), d.end()));
    return it == terms_.end() ? 0.0 : it->second;
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [d, c] : terms_) m = std::max(m, std::abs(c));
    return m;
  }

  double eval(std::span<const double> p) const {
    if (static_cast<int>(p.size()) != vars_)
      throw ShapeError("evaluation point dimension mismatch");
    double acc = 0.0;
    for (const auto& [d, c] : terms_) {
      double term = c;
      for (int i = 0; i < vars_; ++i)
        for (int e = 0; e < d[i]; ++e) term *= p[i];
      acc += term;
    }
    return acc;
  }

  /// Dense ascending coefficients; requires vars == 1.
  std::vector<double> univariate_coeffs() const {
    if (vars_ != 1) throw ShapeError("not a univariate polynomial");
    std::vector<double> out(static_cast<std::size_t>(total_degree()) + 1, 0.0);
    for (const auto& [d, c] : terms_) out[d[0]] = c;
    return out;
  }

  Expr to_expr() const {
    Expr acc = Expr::constant(0.0);
    for (const auto& [d, c] : terms_) {
      Expr term = Expr::constant(c);
      for (int i = 0; i < vars_; ++i)
        if (d[i] > 0) term = term * pow(Expr::variable(i + 1), d[i]);
      acc = acc + term;
    }
    return acc;
  }

  Poly& operator+=(const Poly& o) {
    require_vars(o);
    for (const auto& [d, c] : o.terms_) add_term(d, c);
    return *this;
  }

  Poly& operator-=(const Poly& o) {
    require_vars(o);
    for (const auto& [d, c] : o.terms_) add_term(d, -c);
    return *this;
  }

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }

  friend Poly operator*(const Poly& a, const Poly& b) {
    a.require_vars(b);
    Poly out(a.vars_);
    std::vector<int> sum(static_cast<std::size_t>(a.vars_));
    for (const auto& [da, ca] : a.terms_) {
      for (const auto& [db, cb] : b.terms_) {
        for (int i = 0; i < a.vars_; ++i) sum[i] = da[i] + db[i];
        out.add_term(sum, ca * cb);
      }
    }
    return out;
  }

  friend Poly operator*(Poly a, double s) {
    if (s == 0.0) return Poly(a.vars_);
    Poly out(a.vars_);
    for (const auto& [d, c] : a.terms_) out.add_term(d, c * s);
    return out;
  }
  friend Poly operator*(double s, const Poly& a) { return a * s; }

 private:
  void require_vars(const Poly& o) const {
    if (vars_ != o.vars_) throw ShapeError("polynomial variable count mismatch");
  }

  int vars_;
  std::map<std::vector<int>, double> terms_;
};

// ---------------------------------------------------------------------------
// Hermite interpolation.
// ---------------------------------------------------------------------------

/// Interpolation nodes with per-axis jet orders d_{i,j} >= 1: the
/// interpolant must match all partials d with d_i < d_{i,j} at node j.
struct HermiteNode {
  std::vector<double> point;
  std::vector<int> orders;
};

struct HermiteSpec {
  std::vector<HermiteNode> nodes;

  int dim() const { return static_cast<int>(nodes.front().point.size()); }

  void validate() const {
    if (nodes.empty()) throw ShapeError("interpolation spec has no nodes");
    const std::size_t n = nodes.front().point.size();
    if (n == 0) throw ShapeError("interpolation nodes need at least one axis");
    for (const HermiteNode& node : nodes) {
      if (node.point.size() != n || node.orders.size() != n)
        throw ShapeError("inconsistent node dimensions in interpolation spec");
      for (int d : node.orders)
        if (d < 1) throw ShapeError("node orders must be >= 1");
    }
    for (std::size_t a = 0; a < nodes.size(); ++a)
      for (std::size_t b = a + 1; b < nodes.size(); ++b) {
        bool equal = true;
        for (std::size_t i = 0; i < n; ++i)
          if (nodes[a].point[i] != nodes[b].point[i]) equal = false;
        if (equal)
          throw ShapeError("underdetermined interpolation spec: duplicate nodes");
      }
  }
};

namespace hermite_detail {

/// Solve the univariate Hermite problem: find ascending coefficients of the
/// unique polynomial of degree < sum(orders) with prescribed derivative
/// values rhs[j][m] = P^(m)(t_j) for m < orders[j]. Confluent Vandermonde
/// solve; sizes here are small.
inline std::vector<double> univariate_hermite(
    const std::vector<double>& ts, const std::vector<int>& orders,
    const std::vector<std::vector<double>>& rhs) {
  int total = 0;
  for (int d : orders) total += d;
  Eigen::MatrixXd vand = Eigen::MatrixXd::Zero(total, total);
  Eigen::VectorXd b(total);
  int row = 0;
  for (std::size_t j = 0; j < ts.size(); ++j) {
    for (int m = 0; m < orders[j]; ++m) {
      for (int col = m; col < total; ++col) {
        // d^m/dt^m [t^col] at t_j
        double fall = 1.0;
        for (int q = 0; q < m; ++q) fall *= (col - q);
        vand(row, col) = fall * std::pow(ts[j], col - m);
      }
      b(row) = rhs[j][m];
      ++row;
    }
  }
  Eigen::VectorXd x = vand.fullPivLu().solve(b);
  return {x.data(), x.data() + total};
}

/// The polynomial (prod_i (y_i - q_i)^{d_i}) expanded over the monomial basis.
inline Poly shifted_monomial(int vars, std::span<const int> d,
                             std::span<const double> q) {
  Poly acc = Poly::constant(vars, 1.0);
  for (int i = 0; i < vars; ++i) {
    std::vector<int> e(static_cast<std::size_t>(vars), 0);
    e[i] = 1;
    Poly factor = Poly::monomial(vars, e, 1.0);
    std::vector<int> zero(static_cast<std::size_t>(vars), 0);
    factor.add_term(zero, -q[i]);
    for (int p = 0; p < d[i]; ++p) acc = acc * factor;
  }
  return acc;
}

}  // namespace hermite_detail

/// Polynomial matching the jets of f at every node of the spec: at node j
/// all partials d with d_i < d_{i,j} agree with f.
///
/// Univariate specs are solved exactly in the minimal space of degree
/// < sum_j d_j (so polynomials of smaller degree are reproduced
/// identically). Multivariate specs are assembled as local Taylor
/// polynomials glued by cardinal polynomials in a generic separating
/// direction; the glue reproduces polynomials lying inside every node's
/// degree box.
inline Poly hermite_interpolant(const Expr& f, const HermiteSpec& spec) {
  spec.validate();
  const int n = spec.dim();

  if (n == 1) {
    std::vector<double> ts;
    std::vector<int> orders;
    std::vector<std::vector<double>> rhs;
    for (const HermiteNode& node : spec.nodes) {
      ts.push_back(node.point[0]);
      orders.push_back(node.orders[0]);
      Jet jet = taylor_jet(f, node.point, node.orders[0] - 1);
      std::vector<double> values(static_cast<std::size_t>(node.orders[0]));
      double fact = 1.0;
      for (int m = 0; m < node.orders[0]; ++m) {
        if (m > 0) fact *= m;
        values[m] = jet.coeff(m) * fact;  // graded order: position m = degree m
      }
      rhs.push_back(std::move(values));
    }
    return Poly::from_univariate(
        hermite_detail::univariate_hermite(ts, orders, rhs));
  }

  // Generic separating direction L(y) = sum w_i y_i with distinct node
  // values t_j.
  const std::size_t s = spec.nodes.size();
  std::mt19937_64 rng(0x5eedc0de);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> w(static_cast<std::size_t>(n));
  std::vector<double> ts(s);
  bool separated = false;
  for (int attempt = 0; attempt < 64 && !separated; ++attempt) {
    double norm2 = 0.0;
    for (double& x : w) {
      x = normal(rng);
      norm2 += x * x;
    }
    if (norm2 <= 1e-12) continue;
    for (double& x : w) x /= std::sqrt(norm2);
    double tmax = 0.0;
    for (std::size_t j = 0; j < s; ++j) {
      ts[j] = 0.0;
      for (int i = 0; i < n; ++i) ts[j] += w[i] * spec.nodes[j].point[i];
      tmax = std::max(tmax, std::abs(ts[j]));
    }
    separated = true;
    for (std::size_t a = 0; a < s && separated; ++a)
      for (std::size_t b = a + 1; b < s; ++b)
        if (std::abs(ts[a] - ts[b]) <= 1e-8 * (1.0 + tmax)) separated = false;
  }
  if (!separated)
    throw NumericalError("could not separate interpolation nodes along a "
                         "generic direction");

  // Cardinal orders: D_j contacts are enough to absorb every mixed partial
  // in node j's degree box.
  std::vector<int> cardinal_orders(s);
  for (std::size_t j = 0; j < s; ++j) {
    int total = 0;
    for (int d : spec.nodes[j].orders) total += d;
    cardinal_orders[j] = total - n + 1;
  }

  Poly linear_form(n);
  for (int i = 0; i < n; ++i) {
    std::vector<int> e(static_cast<std::size_t>(n), 0);
    e[i] = 1;
    linear_form.add_term(e, w[i]);
  }

  Poly result(n);
  for (std::size_t j = 0; j < s; ++j) {
    // Univariate cardinal: value 1 at t_j, 0 at the others, flat to the
    // cardinal order everywhere.
    std::vector<std::vector<double>> rhs(s);
    for (std::size_t l = 0; l < s; ++l)
      rhs[l].assign(static_cast<std::size_t>(cardinal_orders[l]), 0.0);
    rhs[j][0] = 1.0;
    std::vector<double> cardinal =
        hermite_detail::univariate_hermite(ts, cardinal_orders, rhs);

    Poly glue = Poly::constant(n, 0.0);
    Poly lpow = Poly::constant(n, 1.0);
    for (std::size_t p = 0; p < cardinal.size(); ++p) {
      if (cardinal[p] != 0.0) glue += cardinal[p] * lpow;
      if (p + 1 < cardinal.size()) lpow = lpow * linear_form;
    }

    // Local Taylor polynomial over the node's degree box.
    const HermiteNode& node = spec.nodes[j];
    int box_total = 0;
    for (int d : node.orders) box_total += d - 1;
    Jet jet = taylor_jet(f, node.point, box_total);
    const MultiIndexSet& set = jet.indices();
    Poly taylor(n);
    for (int pos = 0; pos < set.size(); ++pos) {
      double c = jet.coeff(pos);
      if (c == 0.0) continue;
      auto d = set.at(pos);
      bool in_box = true;
      for (int i = 0; i < n; ++i)
        if (d[i] > node.orders[i] - 1) in_box = false;
      if (!in_box) continue;
      taylor += c * hermite_detail::shifted_monomial(n, d, node.point);
    }
    result += taylor * glue;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Univariate Euclidean division: f = g*h + remainder with deg(remainder)
// < deg(h), matching the shape f = g h + sum_{i=1..s} a_i y^(s-i).
// ---------------------------------------------------------------------------

struct DivisionResult {
  Poly quotient;
  Poly remainder;
  std::vector<double> taps;  // taps[i-1] = a_i = coefficient of y^(s-i)

  DivisionResult() : quotient(1), remainder(1) {}
};

inline DivisionResult poly_divide(const Poly& f, const Poly& h) {
  if (f.vars() != 1 || h.vars() != 1)
    throw ShapeError("polynomial division is univariate");
  if (h.is_zero()) throw DomainError("division by the zero polynomial");
  std::vector<double> fv = f.is_zero() ? std::vector<double>{0.0}
                                       : f.univariate_coeffs();
  std::vector<double> hv = h.univariate_coeffs();
  const int s = static_cast<int>(hv.size()) - 1;  // deg h
  const double lead = hv[s];

  std::vector<double> rem = fv;
  std::vector<double> quot;
  const int fdeg = static_cast<int>(fv.size()) - 1;
  if (fdeg >= s) {
    quot.assign(static_cast<std::size_t>(fdeg - s) + 1, 0.0);
    for (int k = fdeg - s; k >= 0; --k) {
      double c = rem[k + s] / lead;
      quot[k] = c;
      for (int j = 0; j <= s; ++j) rem[k + j] -= c * hv[j];
    }
  }
  rem.resize(static_cast<std::size_t>(s), 0.0);  // degree < s; empty when s == 0

  DivisionResult out;
  out.quotient = quot.empty() ? Poly(1) : Poly::from_univariate(quot);
  out.remainder = Poly::from_univariate(rem);
  out.taps.resize(static_cast<std::size_t>(s));
  for (int i = 1; i <= s; ++i) out.taps[i - 1] = rem[s - i];
  return out;
}

// ---------------------------------------------------------------------------
// Two-route check: replacing f by its spectrum-matched interpolant does not
// change the evaluated endomorphism.
// ---------------------------------------------------------------------------

struct RemainderEquivReport {
  double residual = 0.0;
  double scale = 1.0;
  double normalized = 0.0;
  bool pass = true;
  Poly interpolant;

  RemainderEquivReport() : interpolant(1) {}
};

inline RemainderEquivReport remainder_equiv_check(const Expr& f,
                                                  const AzumayaPoint& a,
                                                  double tol = kDefaultTol) {
  HermiteSpec spec;
  for (const SpectrumPoint& p : a.spectrum().points) {
    HermiteNode node;
    node.point = p.lambda;
    node.orders.assign(static_cast<std::size_t>(a.n()), p.nilpotency);
    spec.nodes.push_back(std::move(node));
  }
  RemainderEquivReport rep;
  rep.interpolant = hermite_interpolant(f, spec);
  ComplexMatrix direct = apply(f, a);
  ComplexMatrix via_poly = apply(rep.interpolant.to_expr(), a);
  rep.residual = (direct - via_poly).norm();
  rep.scale = 1.0 + direct.norm();
  rep.normalized = rep.residual / rep.scale;
  rep.pass = rep.normalized <= tol;
  return rep;
}

}  // namespace matjet
