#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "matjet/errors.hpp"
#include "matjet/jet.hpp"

namespace matjet {

using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kDefaultTol = 1e-8;

// ---------------------------------------------------------------------------
// Hypothesis reports.
// ---------------------------------------------------------------------------

/// Residuals of the pairwise commutators [m_i, m_j].
struct CommutatorReport {
  double max_commutator = 0.0;  // largest ||m_i m_j - m_j m_i||_F
  double max_normalized = 0.0;  // largest residual / (1 + ||m_i|| ||m_j||)
  int first = -1;               // offending pair (0-based), -1 if n < 2
  int second = -1;
  bool pass = true;
};

/// Largest imaginary part over all eigenvalues of all matrices.
struct SpectrumRealityReport {
  double max_imag = 0.0;
  double max_normalized = 0.0;  // |Im| / (1 + ||m_i||_F)
  int worst_matrix = -1;
  bool pass = true;
};

namespace matrix_detail {

constexpr double kEps = std::numeric_limits<double>::epsilon();

inline Eigen::VectorXcd eigenvalues(const ComplexMatrix& m) {
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw NumericalError("eigensolver failed to converge");
  return solver.eigenvalues();
}

/// Greedy union of eigenvalues lying within `radius` of each other
/// (transitive closure). Returns clusters as index lists.
inline std::vector<std::vector<int>> cluster_eigenvalues(const Eigen::VectorXcd& eigs,
                                                         double radius) {
  const int r = static_cast<int>(eigs.size());
  std::vector<int> parent(r);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j)
      if (std::abs(eigs[i] - eigs[j]) <= radius) parent[find(i)] = find(j);
  std::vector<std::vector<int>> clusters;
  std::vector<int> root_slot(r, -1);
  for (int i = 0; i < r; ++i) {
    int root = find(i);
    if (root_slot[root] < 0) {
      root_slot[root] = static_cast<int>(clusters.size());
      clusters.emplace_back();
    }
    clusters[root_slot[root]].push_back(i);
  }
  return clusters;
}

/// Scatter radius of computed eigenvalues of a (possibly defective) matrix:
/// a Jordan block of size l smears its eigenvalue over a polygon of radius
/// about (eps * scale)^(1/l). Sized for blocks up to order 4.
inline double eigenvalue_scatter(double scale) {
  return 10.0 * std::pow(kEps * (1.0 + scale), 0.25);
}

}  // namespace matrix_detail

inline CommutatorReport check_commuting(const std::vector<ComplexMatrix>& ms,
                                        double tol = kDefaultTol) {
  CommutatorReport rep;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    for (std::size_t j = i + 1; j < ms.size(); ++j) {
      double raw = (ms[i] * ms[j] - ms[j] * ms[i]).norm();
      double normalized = raw / (1.0 + ms[i].norm() * ms[j].norm());
      if (normalized > rep.max_normalized) {
        rep.max_normalized = normalized;
        rep.max_commutator = raw;
        rep.first = static_cast<int>(i);
        rep.second = static_cast<int>(j);
      }
    }
  }
  rep.pass = rep.max_normalized <= tol;
  return rep;
}

/// Computed eigenvalues of a defective real-spectrum matrix scatter in a
/// complex polygon of radius ~ (eps * scale)^(1/l), so the pass decision is
/// made on eigenvalue-cluster means (which are trace-stable); the raw
/// maximum imaginary part is still reported.
inline SpectrumRealityReport real_spectrum_check(const std::vector<ComplexMatrix>& ms,
                                                 double tol = kDefaultTol) {
  SpectrumRealityReport rep;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    Eigen::VectorXcd eigs = matrix_detail::eigenvalues(ms[i]);
    double scale = ms[i].norm();
    double raw = 0.0;
    for (Eigen::Index l = 0; l < eigs.size(); ++l)
      raw = std::max(raw, std::abs(eigs[l].imag()));
    double radius = std::max(tol * (1.0 + scale),
                             matrix_detail::eigenvalue_scatter(scale));
    double clustered = 0.0;
    for (const std::vector<int>& cluster :
         matrix_detail::cluster_eigenvalues(eigs, radius)) {
      std::complex<double> mean(0.0, 0.0);
      for (int idx : cluster) mean += eigs[idx];
      mean /= static_cast<double>(cluster.size());
      clustered = std::max(clustered, std::abs(mean.imag()));
    }
    double normalized = clustered / (1.0 + scale);
    if (normalized > rep.max_normalized || rep.worst_matrix < 0) {
      rep.max_normalized = normalized;
      rep.max_imag = raw;
      rep.worst_matrix = static_cast<int>(i);
    }
    if (normalized > tol) rep.pass = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// MatrixTuple: a validated tuple of pairwise-commuting r x r complex
// matrices with real spectrum. Construction rejects violations instead of
// repairing them.
// ---------------------------------------------------------------------------

class MatrixTuple {
 public:
  explicit MatrixTuple(std::vector<ComplexMatrix> ms, double tol = kDefaultTol)
      : matrices_(std::move(ms)), tol_(tol) {
    if (tol_ <= 0.0) throw ShapeError("tolerance must be positive");
    if (matrices_.empty()) throw ShapeError("tuple needs at least one matrix");
    const Eigen::Index r = matrices_.front().rows();
    if (r < 1) throw ShapeError("matrices must be at least 1x1");
    for (const ComplexMatrix& m : matrices_) {
      if (m.rows() != r || m.cols() != r)
        throw ShapeError("all matrices must be square of a shared size");
      if (!m.allFinite()) throw ShapeError("matrix entries must be finite");
    }
    CommutatorReport comm = check_commuting(matrices_, tol_);
    if (!comm.pass)
      throw HypothesisError(
          "matrices " + std::to_string(comm.first) + " and " +
          std::to_string(comm.second) + " do not commute (normalized residual " +
          std::to_string(comm.max_normalized) + ")");
    SpectrumRealityReport spec = real_spectrum_check(matrices_, tol_);
    if (!spec.pass)
      throw HypothesisError(
          "matrix " + std::to_string(spec.worst_matrix) +
          " has a non-real eigenvalue (|Im| = " + std::to_string(spec.max_imag) + ")");
  }

  int n() const { return static_cast<int>(matrices_.size()); }
  int r() const { return static_cast<int>(matrices_.front().rows()); }
  double tol() const { return tol_; }
  const ComplexMatrix& matrix(int i) const { return matrices_[i]; }
  const std::vector<ComplexMatrix>& matrices() const { return matrices_; }

  double max_norm() const {
    double s = 0.0;
    for (const ComplexMatrix& m : matrices_) s = std::max(s, m.norm());
    return s;
  }

 private:
  std::vector<ComplexMatrix> matrices_;
  double tol_;
};

// ---------------------------------------------------------------------------
// Joint spectrum.
// ---------------------------------------------------------------------------

/// One simultaneous eigenvalue q_j = (lambda^1_j, ..., lambda^n_j) with its
/// common invariant subspace.
struct SpectrumPoint {
  std::vector<double> lambda;  // point in R^n
  int rank = 0;                // dimension r_j of the invariant subspace
  ComplexMatrix basis;         // r x r_j, orthonormal columns spanning V_j
  int nilpotency = 1;          // least l with every degree-l product of the
                               // restricted nilpotent parts vanishing
  double imag_projection = 0.0;  // |Im| discarded when reading lambda off traces
};

struct JointSpectrum {
  std::vector<SpectrumPoint> points;
  double basis_condition = 1.0;  // condition number of the stacked basis
  double cluster_radius = 0.0;   // radius used to separate points

  int total_rank() const {
    int s = 0;
    for (const SpectrumPoint& p : points) s += p.rank;
    return s;
  }

  /// Stacked r x r basis [B_1 ... B_s].
  ComplexMatrix stacked() const {
    const Eigen::Index r = points.front().basis.rows();
    ComplexMatrix b(r, r);
    Eigen::Index col = 0;
    for (const SpectrumPoint& p : points) {
      b.middleCols(col, p.rank) = p.basis;
      col += p.rank;
    }
    return b;
  }

  double max_imag_projection() const {
    double m = 0.0;
    for (const SpectrumPoint& p : points) m = std::max(m, p.imag_projection);
    return m;
  }
};

struct DecomposeOptions {
  double cluster_radius = -1.0;  // <= 0: default 1e-7 * (1 + max ||m_i||_F)
  std::uint64_t seed = 0;
  int max_retries = 5;
};

// ---------------------------------------------------------------------------
// Decomposition internals.
// ---------------------------------------------------------------------------

namespace matrix_detail {

constexpr double kCertifyFactor = 1e-10;

struct RetryGenericity {
  std::string reason;
};

struct LocalPoint {
  std::vector<double> lambda;
  ComplexMatrix basis;  // parent-dimension x rank, orthonormal columns
  int nilpotency = 1;
  double imag_projection = 0.0;
};

/// Orthonormal basis of the kernel of powers of A, powering (at most
/// `target_dim` times, adaptively) until the kernel reaches target_dim.
/// Returns nullopt when the dimension cannot be matched.
inline std::optional<ComplexMatrix> generalized_kernel(const ComplexMatrix& a,
                                                       int target_dim,
                                                       double rank_tol) {
  const Eigen::Index r = a.rows();
  double sigma = a.norm();
  if (sigma == 0.0) {
    if (target_dim != r) return std::nullopt;
    return ComplexMatrix(ComplexMatrix::Identity(r, r));
  }
  ComplexMatrix base = a / sigma;
  ComplexMatrix power = base;
  for (int e = 1; e <= std::max(1, target_dim); ++e) {
    Eigen::JacobiSVD<ComplexMatrix> svd(power, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    double smax = s.size() > 0 ? s(0) : 0.0;
    int null_dim = 0;
    for (Eigen::Index l = 0; l < s.size(); ++l)
      if (s(l) <= rank_tol * std::max(smax, 1e-300)) ++null_dim;
    if (smax == 0.0) null_dim = static_cast<int>(r);
    if (null_dim == target_dim)
      return ComplexMatrix(svd.matrixV().rightCols(target_dim));
    if (null_dim > target_dim) return std::nullopt;
    power = power * base;
  }
  return std::nullopt;
}

/// Greedy union of eigenvalues lying within `radius` of each other
/// (transitive closure). Returns clusters as index lists.
inline std::vector<std::vector<int>> cluster_eigenvalues(const Eigen::VectorXcd& eigs,
                                                         double radius) {
  const int r = static_cast<int>(eigs.size());
  std::vector<int> parent(r);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j)
      if (std::abs(eigs[i] - eigs[j]) <= radius) parent[find(i)] = find(j);
  std::vector<std::vector<int>> clusters;
  std::vector<int> root_slot(r, -1);
  for (int i = 0; i < r; ++i) {
    int root = find(i);
    if (root_slot[root] < 0) {
      root_slot[root] = static_cast<int>(clusters.size());
      clusters.emplace_back();
    }
    clusters[root_slot[root]].push_back(i);
  }
  return clusters;
}

struct Certified {
  std::vector<double> lambda;
  int nilpotency = 1;
  double imag_projection = 0.0;
};

/// Try to read the given restricted tuple as a single joint point: take
/// lambda_i from the traces and certify that every monomial of some total
/// degree l <= dim in the shifted matrices vanishes.
inline std::optional<Certified> certify_single_point(
    const std::vector<ComplexMatrix>& ms) {
  const int n = static_cast<int>(ms.size());
  const Eigen::Index d = ms.front().rows();
  Certified out;
  out.lambda.resize(n);
  std::vector<ComplexMatrix> nil(n);
  double nu = 1.0;
  for (int i = 0; i < n; ++i) {
    std::complex<double> mean = ms[i].trace() / static_cast<double>(d);
    out.lambda[i] = mean.real();
    out.imag_projection = std::max(out.imag_projection, std::abs(mean.imag()));
    nil[i] = ms[i] - out.lambda[i] * ComplexMatrix::Identity(d, d);
    nu = std::max(nu, nil[i].norm());
  }
  if (d == 1) {
    out.nilpotency = 1;
    return out;
  }

  // Monomials N_1^(d_1) ... N_n^(d_n) by graded recursion.
  auto set = MultiIndexSet::get(n, static_cast<int>(d));
  std::vector<ComplexMatrix> mono(set->size());
  mono[0] = ComplexMatrix::Identity(d, d);
  std::vector<double> worst(static_cast<std::size_t>(d) + 1, 0.0);
  for (int pos = 1; pos < set->size(); ++pos) {
    auto idx = set->at(pos);
    int axis = 0;
    while (idx[axis] == 0) ++axis;
    std::vector<int> prev_idx(idx.begin(), idx.end());
    prev_idx[axis] -= 1;
    int prev = set->find(prev_idx);
    mono[pos] = nil[axis] * mono[prev];
    int deg = set->degree(pos);
    worst[deg] = std::max(worst[deg], mono[pos].norm());
  }
  double bound = 1.0;
  for (int l = 1; l <= static_cast<int>(d); ++l) {
    bound *= nu;
    if (worst[l] <= kCertifyFactor * bound) {
      out.nilpotency = l;
      return out;
    }
  }
  return std::nullopt;
}

class Resolver {
 public:
  Resolver(int n, double tol, double radius_floor, std::mt19937_64& rng)
      : n_(n), tol_(tol), radius_floor_(radius_floor), rng_(rng) {}

  std::vector<LocalPoint> resolve(const std::vector<ComplexMatrix>& ms, int depth) {
    const Eigen::Index r = ms.front().rows();
    if (depth > 3 * static_cast<int>(r) + 8)
      throw RetryGenericity{"recursion depth exceeded"};
    if (r == 1) {
      LocalPoint p;
      p.basis = ComplexMatrix::Identity(1, 1);
      p.lambda.resize(n_);
      for (int i = 0; i < n_; ++i) {
        p.lambda[i] = ms[i](0, 0).real();
        p.imag_projection = std::max(p.imag_projection, std::abs(ms[i](0, 0).imag()));
      }
      p.nilpotency = 1;
      return {p};
    }

    ComplexMatrix t = ComplexMatrix::Zero(r, r);
    std::vector<double> gamma = random_unit(n_);
    for (int i = 0; i < n_; ++i) t += gamma[i] * ms[i];
    Eigen::VectorXcd eigs = eigenvalues(t);

    // Pre-clustering radius: wide enough to absorb the eigenvalue scatter
    // of moderately defective blocks, refined below when a merged cluster
    // fails nilpotency certification.
    double delta = std::max(radius_floor_,
                            10.0 * std::pow(kEps * (1.0 + t.norm()), 0.25));
    for (;;) {
      auto clusters = cluster_eigenvalues(eigs, delta);
      if (clusters.size() == 1) {
        if (auto cert = certify_single_point(ms)) {
          LocalPoint p;
          p.lambda = cert->lambda;
          p.nilpotency = cert->nilpotency;
          p.imag_projection = cert->imag_projection;
          p.basis = ComplexMatrix::Identity(r, r);
          return {p};
        }
        if (delta <= radius_floor_ * (1.0 + 1e-9))
          throw RetryGenericity{"cluster is not a single point at the floor radius"};
        delta = std::max(delta / 16.0, radius_floor_);
        continue;
      }
      return split_clusters(ms, t, eigs, clusters, depth);
    }
  }

 private:
  std::vector<LocalPoint> split_clusters(const std::vector<ComplexMatrix>& ms,
                                         const ComplexMatrix& t,
                                         const Eigen::VectorXcd& eigs,
                                         const std::vector<std::vector<int>>& clusters,
                                         int depth) {
    const Eigen::Index r = ms.front().rows();
    std::vector<LocalPoint> points;
    for (const std::vector<int>& cluster : clusters) {
      std::complex<double> mu(0.0, 0.0);
      for (int idx : cluster) mu += eigs[idx];
      mu /= static_cast<double>(cluster.size());
      const int rc = static_cast<int>(cluster.size());

      ComplexMatrix shifted = t - mu * ComplexMatrix::Identity(r, r);
      auto kernel = generalized_kernel(shifted, rc, tol_);
      if (!kernel)
        throw RetryGenericity{"invariant subspace dimension mismatch"};
      const ComplexMatrix& basis = *kernel;

      std::vector<ComplexMatrix> restricted(ms.size());
      for (std::size_t i = 0; i < ms.size(); ++i) {
        restricted[i] = basis.adjoint() * ms[i] * basis;
        double defect = (ms[i] * basis - basis * restricted[i]).norm();
        if (defect > 1e3 * tol_ * (1.0 + ms[i].norm()))
          throw RetryGenericity{"invariant subspace defect too large"};
      }

      if (auto cert = certify_single_point(restricted)) {
        LocalPoint p;
        p.lambda = cert->lambda;
        p.nilpotency = cert->nilpotency;
        p.imag_projection = cert->imag_projection;
        p.basis = basis;
        points.push_back(std::move(p));
      } else {
        for (LocalPoint& sub : resolve(restricted, depth + 1)) {
          LocalPoint p;
          p.lambda = std::move(sub.lambda);
          p.nilpotency = sub.nilpotency;
          p.imag_projection = sub.imag_projection;
          p.basis = basis * sub.basis;
          points.push_back(std::move(p));
        }
      }
    }
    return points;
  }

  std::vector<double> random_unit(int n) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (;;) {
      std::vector<double> v(static_cast<std::size_t>(n));
      double norm2 = 0.0;
      for (double& x : v) {
        x = normal(rng_);
        norm2 += x * x;
      }
      if (norm2 > 1e-12) {
        double inv = 1.0 / std::sqrt(norm2);
        for (double& x : v) x *= inv;
        return v;
      }
    }
  }

  int n_;
  double tol_;
  double radius_floor_;
  std::mt19937_64& rng_;
};

}  // namespace matrix_detail

// ---------------------------------------------------------------------------
// joint_decompose: simultaneous eigenvalues, invariant subspaces and
// nilpotency orders of a commuting tuple, via the Schur-style analysis of a
// random real linear combination T = sum gamma_i m_i. Non-generic draws are
// detected through block-structure inconsistency and retried with fresh
// gamma.
// ---------------------------------------------------------------------------

inline JointSpectrum joint_decompose(const MatrixTuple& t,
                                     const DecomposeOptions& opts = {}) {
  const int r = t.r();
  const double radius = opts.cluster_radius > 0.0
                            ? opts.cluster_radius
                            : 1e-7 * (1.0 + t.max_norm());
  std::mt19937_64 rng(opts.seed);
  std::string last_reason = "unknown";
  for (int attempt = 0; attempt < std::max(1, opts.max_retries); ++attempt) {
    try {
      matrix_detail::Resolver resolver(t.n(), t.tol(), radius, rng);
      std::vector<matrix_detail::LocalPoint> locals =
          resolver.resolve(t.matrices(), 0);

      JointSpectrum spec;
      spec.cluster_radius = radius;
      for (matrix_detail::LocalPoint& lp : locals) {
        SpectrumPoint p;
        p.lambda = std::move(lp.lambda);
        p.rank = static_cast<int>(lp.basis.cols());
        p.basis = std::move(lp.basis);
        p.nilpotency = lp.nilpotency;
        p.imag_projection = lp.imag_projection;
        spec.points.push_back(std::move(p));
      }
      std::sort(spec.points.begin(), spec.points.end(),
                [](const SpectrumPoint& a, const SpectrumPoint& b) {
                  return a.lambda < b.lambda;
                });

      if (spec.total_rank() != r)
        throw matrix_detail::RetryGenericity{"block ranks do not sum to r"};
      for (std::size_t a = 0; a < spec.points.size(); ++a)
        for (std::size_t b = a + 1; b < spec.points.size(); ++b) {
          double dist = 0.0;
          for (int i = 0; i < t.n(); ++i)
            dist = std::max(dist, std::abs(spec.points[a].lambda[i] -
                                           spec.points[b].lambda[i]));
          if (dist <= radius)
            throw matrix_detail::RetryGenericity{
                "two joint points within the clustering radius"};
        }

      ComplexMatrix stacked = spec.stacked();
      Eigen::JacobiSVD<ComplexMatrix> svd(stacked);
      const auto& s = svd.singularValues();
      double smin = s(s.size() - 1), smax = s(0);
      if (!(smin > 1e-12 * smax))
        throw matrix_detail::RetryGenericity{
            "rank-deficient stacked basis: the block bases do not span"};
      spec.basis_condition = smax / smin;
      return spec;
    } catch (const matrix_detail::RetryGenericity& retry) {
      last_reason = retry.reason;
    }
  }
  throw NumericalError("clustering ambiguity: joint spectrum unresolved after " +
                       std::to_string(std::max(1, opts.max_retries)) +
                       " attempts (" + last_reason + ")");
}

// ---------------------------------------------------------------------------
// Per-matrix nilpotency and characteristic polynomial.
// ---------------------------------------------------------------------------

/// Size of the largest Jordan block of m at the eigenvalue lambda: the
/// kernel dimensions of ((m - lambda I))^e grow strictly until they
/// stabilize at the generalized eigenspace; the restriction there is
/// checked for the smallest vanishing power.
inline int nilpotency(const ComplexMatrix& m, double lambda,
                      double tol = kDefaultTol) {
  const Eigen::Index r = m.rows();
  const double scale = 1.0 + m.norm();
  Eigen::VectorXcd eigs = matrix_detail::eigenvalues(m);
  double closest = std::numeric_limits<double>::infinity();
  int multiplicity = 0;
  const double eig_radius =
      std::max(tol * scale, 10.0 * std::pow(matrix_detail::kEps * scale, 0.25));
  for (Eigen::Index l = 0; l < eigs.size(); ++l) {
    double dist = std::abs(eigs[l] - std::complex<double>(lambda, 0.0));
    closest = std::min(closest, dist);
    if (dist <= eig_radius) ++multiplicity;
  }
  if (multiplicity == 0)
    throw HypothesisError("lambda = " + std::to_string(lambda) +
                          " is not an eigenvalue (closest distance " +
                          std::to_string(closest) + ")");

  ComplexMatrix shifted = m - lambda * ComplexMatrix::Identity(r, r);
  auto kernel = matrix_detail::generalized_kernel(shifted, multiplicity, tol);
  if (!kernel)
    throw NumericalError("generalized eigenspace of lambda could not be separated");
  ComplexMatrix restricted = kernel->adjoint() * shifted * (*kernel);
  double nu = std::max(1.0, restricted.norm());
  ComplexMatrix power = ComplexMatrix::Identity(multiplicity, multiplicity);
  double bound = 1.0;
  for (int l = 1; l <= multiplicity; ++l) {
    power = power * restricted;
    bound *= nu;
    if (power.norm() <= tol * bound) return l;
  }
  return multiplicity;
}

/// Coefficients (ascending, monic) of det(y I - m), expanded from the
/// eigenvalues; the discarded imaginary residue is reported.
struct CharPolyResult {
  std::vector<double> coeffs;  // coeffs[j] multiplies y^j; coeffs[r] == 1
  double imag_residual = 0.0;
};

inline CharPolyResult char_poly(const ComplexMatrix& m) {
  Eigen::VectorXcd eigs = matrix_detail::eigenvalues(m);
  const int r = static_cast<int>(m.rows());
  std::vector<std::complex<double>> c(static_cast<std::size_t>(r) + 1,
                                      std::complex<double>(0.0, 0.0));
  c[0] = 1.0;  // ascending coefficients of the running product
  int deg = 0;
  for (int l = 0; l < r; ++l) {
    // multiply by (y - eigs[l])
    c[deg + 1] = c[deg];
    for (int j = deg; j >= 1; --j) c[j] = c[j - 1] - eigs[l] * c[j];
    c[0] = -eigs[l] * c[0];
    ++deg;
  }
  CharPolyResult out;
  out.coeffs.resize(static_cast<std::size_t>(r) + 1);
  for (int j = 0; j <= r; ++j) {
    out.coeffs[j] = c[j].real();
    out.imag_residual = std::max(out.imag_residual, std::abs(c[j].imag()));
  }
  return out;
}

}  // namespace matjet
