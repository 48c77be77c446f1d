#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "matjet/expr.hpp"
#include "matjet/jet.hpp"
#include "matjet/jet_eval.hpp"
#include "matjet/matrix_tuple.hpp"

namespace matjet {

/// A commuting tuple together with its joint spectrum, prepared once for
/// repeated function evaluation. Per block j the truncation order is
/// nilpotency_j - 1: higher Taylor terms are annihilated by the nilpotent
/// parts, so no derivative beyond that order is ever requested.
class AzumayaPoint {
 public:
  explicit AzumayaPoint(MatrixTuple tuple, const DecomposeOptions& opts = {})
      : tuple_(std::move(tuple)), spectrum_(joint_decompose(tuple_, opts)) {
    basis_ = spectrum_.stacked();
    basis_inv_ = basis_.partialPivLu().inverse();
    const int n = tuple_.n();
    nilpotents_.resize(spectrum_.points.size());
    for (std::size_t j = 0; j < spectrum_.points.size(); ++j) {
      const SpectrumPoint& p = spectrum_.points[j];
      nilpotents_[j].reserve(n);
      for (int i = 0; i < n; ++i) {
        ComplexMatrix restricted =
            p.basis.adjoint() * tuple_.matrix(i) * p.basis;
        nilpotents_[j].push_back(
            restricted - p.lambda[i] * ComplexMatrix::Identity(p.rank, p.rank));
      }
    }
  }

  const MatrixTuple& tuple() const { return tuple_; }
  const JointSpectrum& spectrum() const { return spectrum_; }
  int n() const { return tuple_.n(); }
  int r() const { return tuple_.r(); }
  double tol() const { return tuple_.tol(); }

  int block_count() const { return static_cast<int>(spectrum_.points.size()); }
  int block_order(int j) const { return spectrum_.points[j].nilpotency - 1; }
  const ComplexMatrix& block_nilpotent(int j, int i) const {
    return nilpotents_[j][i];
  }

  const ComplexMatrix& stacked_basis() const { return basis_; }
  const ComplexMatrix& stacked_inverse() const { return basis_inv_; }
  double basis_condition() const { return spectrum_.basis_condition; }

  /// True when cond(B) exceeds the reporting threshold of 1e8; results are
  /// still produced but carry amplified rounding.
  bool ill_conditioned() const { return spectrum_.basis_condition > 1e8; }

 private:
  MatrixTuple tuple_;
  JointSpectrum spectrum_;
  ComplexMatrix basis_;
  ComplexMatrix basis_inv_;
  std::vector<std::vector<ComplexMatrix>> nilpotents_;  // [block][coordinate]
};

// ---------------------------------------------------------------------------
// apply: evaluate a smooth expression at the tuple.
//
// Per spectrum point q_j: expand f as a truncated Taylor jet at q_j (order
// nilpotency_j - 1), substitute the commuting nilpotent parts
// N_i = B_j^* m_i B_j - lambda_j^i I into the jet monomial by monomial,
// assemble the block diagonal, and conjugate back by the stacked basis.
// ---------------------------------------------------------------------------

inline ComplexMatrix apply(const Expr& f, const AzumayaPoint& a) {
  const int n = a.n();
  if (f.max_variable() > n)
    throw ShapeError("expression references variable y" +
                     std::to_string(f.max_variable()) +
                     " but the tuple has n = " + std::to_string(n));
  const int r = a.r();
  ComplexMatrix block_diag = ComplexMatrix::Zero(r, r);
  Eigen::Index col = 0;
  for (int j = 0; j < a.block_count(); ++j) {
    const SpectrumPoint& p = a.spectrum().points[j];
    const int order = a.block_order(j);
    Jet jet = taylor_jet(f, p.lambda, order);

    const int d = p.rank;
    // Monomials N_1^(d_1) ... N_n^(d_n), memoized in graded order.
    const MultiIndexSet& set = jet.indices();
    std::vector<ComplexMatrix> mono(set.size());
    mono[0] = ComplexMatrix::Identity(d, d);
    ComplexMatrix value = jet.coeff(0) * mono[0];
    for (int pos = 1; pos < set.size(); ++pos) {
      auto idx = set.at(pos);
      int axis = 0;
      while (idx[axis] == 0) ++axis;
      std::vector<int> prev(idx.begin(), idx.end());
      prev[axis] -= 1;
      mono[pos] = a.block_nilpotent(j, axis) * mono[set.find(prev)];
      if (jet.coeff(pos) != 0.0) value += jet.coeff(pos) * mono[pos];
    }
    block_diag.block(col, col, d, d) = value;
    col += d;
  }
  return a.stacked_basis() * block_diag * a.stacked_inverse();
}

/// Second, independent route for polynomial expressions: substitute the
/// matrices into the tree directly (constants become multiples of the
/// identity). Throws on any non-polynomial node.
inline ComplexMatrix polynomial_substitute(const Expr& f, const MatrixTuple& t) {
  const int r = t.r();
  switch (f.op()) {
    case ExprOp::kConstant:
      return f.constant_value() * ComplexMatrix::Identity(r, r);
    case ExprOp::kVariable: {
      int i = f.variable_index();
      if (i > t.n())
        throw ShapeError("variable y" + std::to_string(i) +
                         " out of range for n = " + std::to_string(t.n()));
      return t.matrix(i - 1);
    }
    case ExprOp::kNeg:
      return -polynomial_substitute(f.operand(), t);
    case ExprOp::kAdd:
      return polynomial_substitute(f.lhs(), t) + polynomial_substitute(f.rhs(), t);
    case ExprOp::kSub:
      return polynomial_substitute(f.lhs(), t) - polynomial_substitute(f.rhs(), t);
    case ExprOp::kMul:
      return polynomial_substitute(f.lhs(), t) * polynomial_substitute(f.rhs(), t);
    case ExprOp::kPow: {
      ComplexMatrix base = polynomial_substitute(f.operand(), t);
      ComplexMatrix acc = ComplexMatrix::Identity(r, r);
      for (int e = 0; e < f.exponent(); ++e) acc = acc * base;
      return acc;
    }
    default:
      throw DomainError(std::string("polynomial substitution hit a non-polynomial "
                                    "node: ") +
                        op_name(f.op()));
  }
}

// ---------------------------------------------------------------------------
// Ring-homomorphism law verification.
// ---------------------------------------------------------------------------

/// Normalized residuals of the ring-homomorphism laws on a list of
/// expressions: unit, additivity, R-linearity, multiplicativity,
/// commutativity of the image algebra, and commutation with the
/// generators (center condition).
struct RingHomReport {
  double unit = 0.0;
  double additivity = 0.0;
  double linearity = 0.0;
  double multiplicativity = 0.0;
  double image_commutativity = 0.0;
  double center = 0.0;

  double max_residual() const {
    return std::max({unit, additivity, linearity, multiplicativity,
                     image_commutativity, center});
  }
  bool pass(double tol) const { return max_residual() <= tol; }
};

inline RingHomReport verify_ring_hom(const AzumayaPoint& a,
                                     const std::vector<Expr>& fs,
                                     std::uint64_t seed = 0) {
  RingHomReport rep;
  const int r = a.r();
  const ComplexMatrix identity = ComplexMatrix::Identity(r, r);

  rep.unit = (apply(Expr::constant(1.0), a) - identity).norm() /
             (1.0 + identity.norm());

  std::vector<ComplexMatrix> images;
  images.reserve(fs.size());
  for (const Expr& f : fs) images.push_back(apply(f, a));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> scalar(-2.0, 2.0);

  for (std::size_t p = 0; p < fs.size(); ++p) {
    for (std::size_t q = p; q < fs.size(); ++q) {
      const Expr& f = fs[p];
      const Expr& g = fs[q];
      const ComplexMatrix& fa = images[p];
      const ComplexMatrix& ga = images[q];
      double pair_scale = 1.0 + fa.norm() + ga.norm();
      double prod_scale = 1.0 + fa.norm() * ga.norm();

      rep.additivity = std::max(
          rep.additivity,
          (apply(Expr::binary(ExprOp::kAdd, f, g), a) - fa - ga).norm() /
              pair_scale);

      double alpha = scalar(rng), beta = scalar(rng);
      Expr combo = Expr::binary(ExprOp::kAdd,
                                Expr::binary(ExprOp::kMul, Expr::constant(alpha), f),
                                Expr::binary(ExprOp::kMul, Expr::constant(beta), g));
      rep.linearity = std::max(
          rep.linearity,
          (apply(combo, a) - alpha * fa - beta * ga).norm() /
              (1.0 + std::abs(alpha) * fa.norm() + std::abs(beta) * ga.norm()));

      rep.multiplicativity = std::max(
          rep.multiplicativity,
          (apply(Expr::binary(ExprOp::kMul, f, g), a) - fa * ga).norm() /
              prod_scale);

      rep.image_commutativity = std::max(
          rep.image_commutativity, (fa * ga - ga * fa).norm() / prod_scale);
    }
    for (int i = 0; i < a.n(); ++i) {
      const ComplexMatrix& m = a.tuple().matrix(i);
      rep.center = std::max(
          rep.center, (images[p] * m - m * images[p]).norm() /
                          (1.0 + images[p].norm() * m.norm()));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Cayley-Hamilton annihilation.
// ---------------------------------------------------------------------------

/// Substitute each generator into its own characteristic polynomial by
/// Horner evaluation; the results should vanish at tolerance scale.
struct AnnihilationReport {
  std::vector<double> residuals;       // ||p_i(m_i)||_F per generator
  std::vector<double> normalized;      // residual / (1 + ||m_i||_F^r)
  double max_normalized = 0.0;
  bool pass = true;
};

inline AnnihilationReport annihilation_check(const AzumayaPoint& a,
                                             double tol = kDefaultTol) {
  AnnihilationReport rep;
  const int r = a.r();
  for (int i = 0; i < a.n(); ++i) {
    const ComplexMatrix& m = a.tuple().matrix(i);
    CharPolyResult cp = char_poly(m);
    ComplexMatrix acc =
        cp.coeffs.back() * ComplexMatrix::Identity(r, r);
    for (int j = r - 1; j >= 0; --j)
      acc = acc * m + cp.coeffs[j] * ComplexMatrix::Identity(r, r);
    double residual = acc.norm();
    double scale = 1.0 + std::pow(m.norm(), r);
    rep.residuals.push_back(residual);
    rep.normalized.push_back(residual / scale);
    rep.max_normalized = std::max(rep.max_normalized, residual / scale);
  }
  rep.pass = rep.max_normalized <= tol;
  return rep;
}

}  // namespace matjet
