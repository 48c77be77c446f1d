#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "matjet/jet.hpp"
#include "matjet/jet_eval.hpp"
#include "support/generators.hpp"

using namespace matjet;

namespace {

Jet random_jet(std::mt19937_64& rng, int gens, int order, double scale = 1.0) {
  std::uniform_real_distribution<double> unit(-scale, scale);
  Jet j(gens, order);
  for (int pos = 0; pos < j.size(); ++pos) j.coeff(pos) = unit(rng);
  return j;
}

double max_coeff_diff(const Jet& a, const Jet& b) {
  REQUIRE(a.same_shape(b));
  double m = 0.0;
  for (int pos = 0; pos < a.size(); ++pos)
    m = std::max(m, std::abs(a.coeff(pos) - b.coeff(pos)));
  return m;
}

}  // namespace

TEST_CASE("truncated products drop terms beyond the order") {
  Jet t1 = Jet::generator(1, 1, 1);
  Jet sq = t1 * t1;
  REQUIRE(sq.max_abs() == 0.0);  // t^2 = 0 at order 1

  Jet a = Jet::constant(1, 2, 1.0) + Jet::generator(1, 2, 1);
  Jet b = Jet::constant(1, 2, 1.0) - Jet::generator(1, 2, 1);
  Jet prod = a * b;  // 1 - t^2
  REQUIRE(prod.coeff(0) == 1.0);
  REQUIRE(prod.coeff(1) == 0.0);
  REQUIRE(prod.coeff(2) == -1.0);
}

TEST_CASE("multiplication matches the convolution oracle") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    Jet a = random_jet(rng, 2, 3);
    Jet b = random_jet(rng, 2, 3);
    REQUIRE(max_coeff_diff(a * b, testsupport::convolution_product(a, b)) <=
            1e-14);
  }
}

TEST_CASE("split separates body and soul exactly") {
  Jet scalar = Jet::constant(1, 2, 5.0);
  auto [b1, s1] = scalar.split();
  REQUIRE(b1 == 5.0);
  REQUIRE(s1.max_abs() == 0.0);

  Jet mixed = Jet::constant(1, 2, 2.0) + 3.0 * Jet::generator(1, 2, 1);
  auto [b2, s2] = mixed.split();
  REQUIRE(b2 == 2.0);
  REQUIRE(s2.coeff(1) == 3.0);
  REQUIRE(s2.coeff(0) == 0.0);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    Jet j = random_jet(rng, 3, 3);
    auto [body, soul] = j.split();
    Jet recombined = soul + body;
    REQUIRE(max_coeff_diff(recombined, j) == 0.0);
  }
}

TEST_CASE("souls are nilpotent at order k+1 exactly") {
  std::mt19937_64 rng(5);
  for (int gens = 1; gens <= 3; ++gens) {
    for (int order = 0; order <= 3; ++order) {
      Jet j = random_jet(rng, gens, order);
      REQUIRE(j.soul().pow(order + 1).max_abs() == 0.0);
    }
  }
}

TEST_CASE("jet division inverts multiplication") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 30; ++i) {
    Jet a = random_jet(rng, 2, 3);
    Jet b = random_jet(rng, 2, 3);
    b.coeff(0) = 1.5;  // keep the body away from zero
    REQUIRE(max_coeff_diff(jet_div(a * b, b), a) <= 1e-12);
  }
  Jet zero_body = Jet::generator(1, 2, 1);
  REQUIRE_THROWS_AS(jet_div(Jet::constant(1, 2, 1.0), zero_body), DomainError);
}

TEST_CASE("taylor_jet reproduces classical series") {
  std::vector<double> origin{0.0};
  Jet e = taylor_jet(parse_expr("exp(y1)", 1), origin, 2);
  REQUIRE(e.coeff(0) == 1.0);
  REQUIRE(e.coeff(1) == 1.0);
  REQUIRE(e.coeff(2) == 0.5);

  std::vector<double> three{3.0};
  Jet affine = taylor_jet(parse_expr("y1", 1), three, 1);
  REQUIRE(affine.coeff(0) == 3.0);
  REQUIRE(affine.coeff(1) == 1.0);
}

TEST_CASE("taylor_jet degree-0 coefficient equals eval_real") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> q{unit(rng), unit(rng)};
    Expr f = testsupport::random_smooth_expr(rng, q);
    Jet jet = taylor_jet(f, q, 3);
    REQUIRE_THAT(jet.coeff(0),
                 Catch::Matchers::WithinAbs(eval_real(f, q), 1e-13));
  }
}

TEST_CASE("taylor_jet matches finite-difference stencils") {
  Expr f = parse_expr("sin(y1*y2)", 2);
  std::vector<double> q{1.0, 0.0};
  Jet jet = taylor_jet(f, q, 2);
  const MultiIndexSet& set = jet.indices();
  for (int pos = 0; pos < jet.size(); ++pos) {
    auto d = set.at(pos);
    std::vector<int> multi(d.begin(), d.end());
    double fact = 1.0;
    for (int v : multi)
      for (int k = 2; k <= v; ++k) fact *= k;
    double oracle = testsupport::fd_partial(f, q, multi, 1e-4) / fact;
    REQUIRE_THAT(jet.coeff(pos), Catch::Matchers::WithinAbs(oracle, 1e-6));
  }
}

TEST_CASE("taylor_jet is linear in the expression") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    std::vector<double> q{unit(rng), unit(rng)};
    Expr f = testsupport::random_smooth_expr(rng, q);
    Expr g = testsupport::random_smooth_expr(rng, q);
    double a = unit(rng), b = unit(rng);
    Expr combo = Expr::constant(a) * f + Expr::constant(b) * g;
    Jet lhs = taylor_jet(combo, q, 3);
    Jet rhs = a * taylor_jet(f, q, 3) + b * taylor_jet(g, q, 3);
    double scale = 1.0 + lhs.max_abs();
    REQUIRE(max_coeff_diff(lhs, rhs) <= 1e-12 * scale);
  }
}

TEST_CASE("taylor_jet of a product is the truncated product of jets") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    std::vector<double> q{unit(rng), unit(rng)};
    Expr f = testsupport::random_smooth_expr(rng, q);
    Expr g = testsupport::random_smooth_expr(rng, q);
    Jet lhs = taylor_jet(Expr::binary(ExprOp::kMul, f, g), q, 3);
    Jet rhs = taylor_jet(f, q, 3) * taylor_jet(g, q, 3);
    double scale = 1.0 + lhs.max_abs() + rhs.max_abs();
    REQUIRE(max_coeff_diff(lhs, rhs) <= 1e-9 * scale);
  }
}

TEST_CASE("taylor_jet raises domain errors from derivative evaluation") {
  std::vector<double> zero{0.0};
  REQUIRE_THROWS_AS(taylor_jet(parse_expr("sqrt(y1)", 1), zero, 2), DomainError);
  REQUIRE_NOTHROW(taylor_jet(parse_expr("sqrt(y1)", 1), zero, 0));
  std::vector<double> neg{-0.5};
  REQUIRE_THROWS_AS(taylor_jet(parse_expr("log(y1)", 1), neg, 1), DomainError);
}

TEST_CASE("eval_on_weil fixes coordinates and matches the classical series") {
  std::mt19937_64 rng(41);
  Jet j = random_jet(rng, 2, 3);
  WeilTuple single({j});
  Jet out = eval_on_weil(parse_expr("y1", 1), single);
  REQUIRE(max_coeff_diff(out, j) == 0.0);

  WeilTuple t({Jet::generator(1, 2, 1)});
  Jet e = eval_on_weil(parse_expr("exp(y1)", 1), t);
  REQUIRE(e.coeff(0) == 1.0);
  REQUIRE(e.coeff(1) == 1.0);
  REQUIRE(e.coeff(2) == 0.5);
}

TEST_CASE("eval_on_weil multiplies coordinates like jets") {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 20; ++i) {
    Jet j1 = random_jet(rng, 2, 3);
    Jet j2 = random_jet(rng, 2, 3);
    WeilTuple a({j1, j2});
    Jet lhs = eval_on_weil(parse_expr("y1*y2", 2), a);
    REQUIRE(max_coeff_diff(lhs, j1 * j2) <= 1e-10);
  }
}

TEST_CASE("eval_on_weil is a ring homomorphism in the expression") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> unit(-0.8, 0.8);
  for (int i = 0; i < 25; ++i) {
    Jet j1 = random_jet(rng, 2, 3, 0.7);
    Jet j2 = random_jet(rng, 2, 3, 0.7);
    WeilTuple a({j1, j2});
    std::vector<double> body{j1.body(), j2.body()};
    Expr h1 = testsupport::random_smooth_expr(rng, body);
    Expr h2 = testsupport::random_smooth_expr(rng, body);

    Jet sum_lhs = eval_on_weil(Expr::binary(ExprOp::kAdd, h1, h2), a);
    Jet sum_rhs = eval_on_weil(h1, a) + eval_on_weil(h2, a);
    double sscale = 1.0 + sum_lhs.max_abs();
    REQUIRE(max_coeff_diff(sum_lhs, sum_rhs) <= 1e-9 * sscale);

    Jet mul_lhs = eval_on_weil(Expr::binary(ExprOp::kMul, h1, h2), a);
    Jet mul_rhs = eval_on_weil(h1, a) * eval_on_weil(h2, a);
    double mscale = 1.0 + mul_lhs.max_abs() + mul_rhs.max_abs();
    REQUIRE(max_coeff_diff(mul_lhs, mul_rhs) <= 1e-9 * mscale);
  }
}

TEST_CASE("eval_on_weil respects polynomial composition") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> unit(-0.8, 0.8);
  for (int i = 0; i < 20; ++i) {
    Jet j1 = random_jet(rng, 2, 3, 0.7);
    Jet j2 = random_jet(rng, 2, 3, 0.7);
    WeilTuple a({j1, j2});
    std::vector<double> body{j1.body(), j2.body()};

    Expr f1 = testsupport::random_smooth_expr(rng, body);
    Expr f2 = testsupport::random_smooth_expr(rng, body);
    Expr outer = testsupport::random_polynomial(rng, 2, 3);
    std::vector<Expr> inner{f1, f2};
    Expr composed = substitute(outer, inner);

    Jet lhs = eval_on_weil(composed, a);
    // apply the outer polynomial to the evaluated jets with jet arithmetic
    WeilTuple images({eval_on_weil(f1, a), eval_on_weil(f2, a)});
    Jet rhs = eval_on_weil(outer, images);
    double scale = 1.0 + lhs.max_abs() + rhs.max_abs();
    REQUIRE(max_coeff_diff(lhs, rhs) <= 1e-9 * scale);
  }
}

TEST_CASE("shape mismatches are rejected") {
  Jet a(1, 2);
  Jet b(2, 2);
  REQUIRE_THROWS_AS(a + b, ShapeError);
  REQUIRE_THROWS_AS(a * b, ShapeError);
  REQUIRE_THROWS_AS(WeilTuple({a, b}), ShapeError);
  REQUIRE_THROWS_AS(Jet::generator(2, 1, 3), ShapeError);
}
