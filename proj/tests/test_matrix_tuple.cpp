#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "matjet/matrix_tuple.hpp"
#include "support/generators.hpp"

using namespace matjet;
using Catch::Matchers::WithinAbs;

namespace {

ComplexMatrix mat2(double a, double b, double c, double d) {
  ComplexMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST_CASE("commuting check reports residuals") {
  ComplexMatrix d1 = mat2(1, 0, 0, 2);
  ComplexMatrix d2 = mat2(3, 0, 0, 4);
  CommutatorReport ok = check_commuting({d1, d2});
  REQUIRE(ok.max_commutator == 0.0);
  REQUIRE(ok.pass);

  ComplexMatrix up = mat2(0, 1, 0, 0);
  ComplexMatrix down = mat2(0, 0, 1, 0);
  CommutatorReport bad = check_commuting({up, down});
  REQUIRE_THAT(bad.max_commutator, WithinAbs(std::sqrt(2.0), 1e-14));
  REQUIRE_FALSE(bad.pass);
  REQUIRE(bad.first == 0);
  REQUIRE(bad.second == 1);

  std::mt19937_64 rng(101);
  for (int i = 0; i < 10; ++i) {
    MatrixTuple t = testsupport::random_commuting_tuple(rng, {.r = 5, .n = 3});
    CommutatorReport rep = check_commuting(t.matrices());
    REQUIRE(rep.max_normalized <= 1e-10);
  }
}

TEST_CASE("real-spectrum check accepts real and rejects rotations") {
  double x = 0.5;
  SpectrumRealityReport ok = real_spectrum_check({mat2(x, 1, 0, -x)});
  REQUIRE(ok.pass);
  REQUIRE_THAT(ok.max_imag, WithinAbs(0.0, 1e-12));

  SpectrumRealityReport rot = real_spectrum_check({mat2(0, -1, 1, 0)});
  REQUIRE_FALSE(rot.pass);
  REQUIRE_THAT(rot.max_imag, WithinAbs(1.0, 1e-12));

  SpectrumRealityReport nil = real_spectrum_check({mat2(0, 1, 0, 0)});
  REQUIRE(nil.pass);
}

TEST_CASE("tuple construction rejects hypothesis violations") {
  REQUIRE_THROWS_AS(MatrixTuple({mat2(0, 1, 0, 0), mat2(0, 0, 1, 0)}),
                    HypothesisError);
  REQUIRE_THROWS_AS(MatrixTuple({mat2(0, -1, 1, 0)}), HypothesisError);
  ComplexMatrix rect(2, 3);
  REQUIRE_THROWS_AS(MatrixTuple({rect.setZero()}), ShapeError);
  REQUIRE_THROWS_AS(MatrixTuple({mat2(1, 0, 0, 1)}, -1.0), ShapeError);
  REQUIRE_NOTHROW(MatrixTuple({mat2(0.5, 1, 0, -0.5)}));
}

TEST_CASE("joint spectrum of the 2x2 family matrix at x = 1") {
  MatrixTuple t({mat2(1, 1, 0, -1)});
  JointSpectrum spec = joint_decompose(t);
  REQUIRE(spec.points.size() == 2);
  REQUIRE_THAT(spec.points[0].lambda[0], WithinAbs(-1.0, 1e-10));
  REQUIRE_THAT(spec.points[1].lambda[0], WithinAbs(1.0, 1e-10));
  for (const SpectrumPoint& p : spec.points) {
    REQUIRE(p.rank == 1);
    REQUIRE(p.nilpotency == 1);
  }
}

TEST_CASE("joint spectrum of a single nilpotent block") {
  MatrixTuple t({mat2(0, 1, 0, 0)});
  JointSpectrum spec = joint_decompose(t);
  REQUIRE(spec.points.size() == 1);
  REQUIRE_THAT(spec.points[0].lambda[0], WithinAbs(0.0, 1e-12));
  REQUIRE(spec.points[0].rank == 2);
  REQUIRE(spec.points[0].nilpotency == 2);
}

TEST_CASE("joint spectrum separates diagonal pairs") {
  ComplexMatrix m1(3, 3), m2(3, 3);
  m1.setZero();
  m2.setZero();
  m1.diagonal() << 1, 1, 2;
  m2.diagonal() << 3, 4, 4;
  MatrixTuple t({m1, m2});
  JointSpectrum spec = joint_decompose(t);
  REQUIRE(spec.points.size() == 3);
  std::vector<std::vector<double>> expected{{1, 3}, {1, 4}, {2, 4}};
  for (std::size_t j = 0; j < 3; ++j) {
    REQUIRE(spec.points[j].rank == 1);
    REQUIRE_THAT(spec.points[j].lambda[0], WithinAbs(expected[j][0], 1e-10));
    REQUIRE_THAT(spec.points[j].lambda[1], WithinAbs(expected[j][1], 1e-10));
  }
}

TEST_CASE("joint spectrum invariants hold on random commuting tuples") {
  std::mt19937_64 rng(9001);
  for (int trial = 0; trial < 25; ++trial) {
    int r = 2 + static_cast<int>(rng() % 7);
    int n = 1 + static_cast<int>(rng() % 3);
    MatrixTuple t = testsupport::random_commuting_tuple(
        rng, {.r = r, .n = n, .max_block = std::min(4, r)});
    JointSpectrum spec = joint_decompose(t);

    REQUIRE(spec.total_rank() == t.r());

    // distinct points separated beyond the clustering radius
    for (std::size_t a = 0; a < spec.points.size(); ++a)
      for (std::size_t b = a + 1; b < spec.points.size(); ++b) {
        double dist = 0.0;
        for (int i = 0; i < t.n(); ++i)
          dist = std::max(dist, std::abs(spec.points[a].lambda[i] -
                                         spec.points[b].lambda[i]));
        REQUIRE(dist > spec.cluster_radius);
      }

    // stacked basis invertible; restriction is lambda I + nilpotent
    ComplexMatrix stacked = spec.stacked();
    REQUIRE(spec.basis_condition < 1e8);
    double scale = 1.0 + t.max_norm();
    for (const SpectrumPoint& p : spec.points) {
      REQUIRE(p.nilpotency <= std::min(p.rank, t.r()));
      for (int i = 0; i < t.n(); ++i) {
        ComplexMatrix restricted =
            p.basis.adjoint() * t.matrix(i) * p.basis;
        ComplexMatrix nil =
            restricted - p.lambda[i] * ComplexMatrix::Identity(p.rank, p.rank);
        // invariance of the subspace
        REQUIRE((t.matrix(i) * p.basis - p.basis * restricted).norm() <=
                1e-8 * scale);
        // nilpotency at the reported order
        ComplexMatrix power = ComplexMatrix::Identity(p.rank, p.rank);
        for (int e = 0; e < p.nilpotency; ++e) power = power * nil;
        REQUIRE(power.norm() <= 1e-8 * std::pow(1.0 + nil.norm(), p.nilpotency));
      }
    }
  }
}

TEST_CASE("relabeling the tuple permutes joint-spectrum coordinates") {
  std::mt19937_64 rng(77);
  MatrixTuple t = testsupport::random_commuting_tuple(rng, {.r = 5, .n = 3});
  std::vector<ComplexMatrix> permuted{t.matrix(2), t.matrix(0), t.matrix(1)};
  MatrixTuple tp(permuted, t.tol());

  JointSpectrum s1 = joint_decompose(t);
  JointSpectrum s2 = joint_decompose(tp);
  REQUIRE(s1.points.size() == s2.points.size());

  // match each permuted point against the original set
  for (const SpectrumPoint& p2 : s2.points) {
    bool found = false;
    for (const SpectrumPoint& p1 : s1.points) {
      double dist = std::max({std::abs(p2.lambda[0] - p1.lambda[2]),
                              std::abs(p2.lambda[1] - p1.lambda[0]),
                              std::abs(p2.lambda[2] - p1.lambda[1])});
      if (dist < 1e-8 && p1.rank == p2.rank &&
          p1.nilpotency == p2.nilpotency) {
        found = true;
        break;
      }
    }
    REQUIRE(found);
  }
}

TEST_CASE("nilpotency measures the largest Jordan block") {
  REQUIRE(nilpotency(mat2(0, 1, 0, 0), 0.0) == 2);

  ComplexMatrix semisimple = mat2(5, 0, 0, 5);
  REQUIRE(nilpotency(semisimple, 5.0) == 1);

  // conjugated 3x3 Jordan block
  std::mt19937_64 rng(55);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    double lambda = normal(rng);
    Eigen::MatrixXd j = lambda * Eigen::MatrixXd::Identity(3, 3);
    j(0, 1) = j(1, 2) = 1.0;
    Eigen::MatrixXd g(3, 3);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) g(a, b) = normal(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    ComplexMatrix m = (q * j * q.transpose()).cast<std::complex<double>>();
    REQUIRE(nilpotency(m, lambda) == 3);
  }

  REQUIRE_THROWS_AS(nilpotency(mat2(1, 0, 0, 2), 7.0), HypothesisError);
}

TEST_CASE("characteristic polynomial from the spectrum") {
  CharPolyResult ex41 = char_poly(mat2(1, 1, 0, -1));
  REQUIRE(ex41.coeffs.size() == 3);
  REQUIRE_THAT(ex41.coeffs[0], WithinAbs(-1.0, 1e-12));  // y^2 - 1
  REQUIRE_THAT(ex41.coeffs[1], WithinAbs(0.0, 1e-12));
  REQUIRE_THAT(ex41.coeffs[2], WithinAbs(1.0, 1e-12));
  REQUIRE(ex41.imag_residual <= 1e-12);

  CharPolyResult zero = char_poly(ComplexMatrix::Zero(2, 2));
  REQUIRE_THAT(zero.coeffs[0], WithinAbs(0.0, 1e-14));
  REQUIRE_THAT(zero.coeffs[1], WithinAbs(0.0, 1e-14));
  REQUIRE_THAT(zero.coeffs[2], WithinAbs(1.0, 1e-14));

  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 10; ++trial) {
    MatrixTuple t = testsupport::random_commuting_tuple(rng, {.r = 4, .n = 2});
    for (int i = 0; i < t.n(); ++i) {
      CharPolyResult mine = char_poly(t.matrix(i));
      std::vector<double> oracle = testsupport::faddeev_leverrier(t.matrix(i));
      double scale = 1.0 + std::pow(t.matrix(i).norm(), t.r());
      for (std::size_t j = 0; j < oracle.size(); ++j)
        REQUIRE_THAT(mine.coeffs[j], WithinAbs(oracle[j], 1e-8 * scale));
    }
  }
}
