#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "matjet/expr.hpp"
#include "support/generators.hpp"

using namespace matjet;

TEST_CASE("parse builds the documented grammar") {
  Expr e = parse_expr("y1*y1 - 1", 1);
  REQUIRE(e.op() == ExprOp::kSub);
  REQUIRE(e.lhs().op() == ExprOp::kMul);
  REQUIRE(e.lhs().lhs().op() == ExprOp::kVariable);
  REQUIRE(e.rhs().constant_value() == 1.0);

  Expr call = parse_expr("exp(y1)", 1);
  REQUIRE(call.op() == ExprOp::kExp);
  REQUIRE(call.operand().op() == ExprOp::kVariable);

  Expr powe = parse_expr("y1^3", 1);
  REQUIRE(powe.op() == ExprOp::kPow);
  REQUIRE(powe.exponent() == 3);

  REQUIRE(parse_expr("x1 + x2", 2) == parse_expr("y1 + y2", 2));
}

TEST_CASE("parse rejects malformed input with positions") {
  REQUIRE_THROWS_AS(parse_expr("y1*y3", 2), ParseError);
  REQUIRE_THROWS_AS(parse_expr("y0", 1), ParseError);
  REQUIRE_THROWS_AS(parse_expr("foo(y1)", 1), ParseError);
  REQUIRE_THROWS_AS(parse_expr("y1*", 1), ParseError);
  REQUIRE_THROWS_AS(parse_expr("(y1", 1), ParseError);
  REQUIRE_THROWS_AS(parse_expr("y1^-2", 1), ParseError);
  REQUIRE_THROWS_AS(parse_expr("y1^y1", 1), ParseError);
  REQUIRE_THROWS_AS(parse_expr("2..5", 1), ParseError);
  REQUIRE_THROWS_AS(parse_expr("", 1), ParseError);

  try {
    parse_expr("y1 + foo(y1)", 1);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    REQUIRE(e.position() == 5);
  }
}

TEST_CASE("eval_real computes standard floating values") {
  std::vector<double> p2{2.0};
  REQUIRE(eval_real(parse_expr("y1*y1 - 1", 1), p2) == 3.0);
  std::vector<double> p0{0.0};
  REQUIRE(eval_real(parse_expr("exp(y1)", 1), p0) == 1.0);
  std::vector<double> pq{0.3, -1.2};
  Expr mixed = parse_expr("sin(y1)*cos(y2) + y2/y1", 2);
  REQUIRE_THAT(eval_real(mixed, pq),
               Catch::Matchers::WithinRel(
                   std::sin(0.3) * std::cos(-1.2) + (-1.2 / 0.3), 1e-15));
}

TEST_CASE("domain errors are evaluation-time and name the argument") {
  std::vector<double> neg{-1.0};
  Expr lg = parse_expr("log(y1)", 1);
  REQUIRE_THROWS_AS(eval_real(lg, neg), DomainError);
  REQUIRE_THROWS_WITH(eval_real(lg, neg),
                      Catch::Matchers::ContainsSubstring("log") &&
                          Catch::Matchers::ContainsSubstring("-1"));
  REQUIRE_THROWS_AS(eval_real(parse_expr("sqrt(y1)", 1), neg), DomainError);
  std::vector<double> zero{0.0};
  REQUIRE_THROWS_AS(eval_real(parse_expr("1/y1", 1), zero), DomainError);
  // parse does not reject the same expressions
  REQUIRE_NOTHROW(parse_expr("log(0-1)", 1));
}

TEST_CASE("diff follows the standard rules with constant folding") {
  REQUIRE(diff(parse_expr("y1*y2", 2), 1) == parse_expr("y2", 2));
  REQUIRE(diff(parse_expr("exp(y1)", 1), 1) == parse_expr("exp(y1)", 1));

  // second derivative of sin at 0 against a central finite difference
  Expr f = parse_expr("sin(y1)", 1);
  Expr f2 = diff(diff(f, 1), 1);
  std::vector<double> q{0.0};
  double h = 1e-4;
  double oracle = (eval_real(f, std::vector<double>{h}) - 2.0 * eval_real(f, q) +
                   eval_real(f, std::vector<double>{-h})) /
                  (h * h);
  REQUIRE_THAT(eval_real(f2, q), Catch::Matchers::WithinAbs(oracle, 1e-7));
  REQUIRE_THAT(eval_real(f2, q), Catch::Matchers::WithinAbs(0.0, 1e-12));

  REQUIRE(eval_real(diff(parse_expr("y1^0", 1), 1), q) == 0.0);
}

TEST_CASE("mixed partials commute at random points") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> p{unit(rng), unit(rng)};
    Expr f = testsupport::random_smooth_expr(rng, p);
    Expr d12 = diff(diff(f, 1), 2);
    Expr d21 = diff(diff(f, 2), 1);
    double a = eval_real(d12, p);
    double b = eval_real(d21, p);
    REQUIRE_THAT(a, Catch::Matchers::WithinAbs(b, 1e-10 * (1.0 + std::abs(a))));
  }
}

TEST_CASE("print/parse round trip is structurally idempotent") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> p{unit(rng), unit(rng), unit(rng)};
    Expr f = testsupport::random_smooth_expr(rng, p);
    Expr reparsed = parse_expr(to_string(f), 3);
    REQUIRE(reparsed == f);
    // and differentiation output round-trips too
    Expr df = diff(f, 1);
    REQUIRE(parse_expr(to_string(df), 3) == df);
  }
}

TEST_CASE("substitute composes expressions") {
  Expr h = parse_expr("y1*y2 + 1", 2);
  std::vector<Expr> inner{parse_expr("sin(y1)", 1), parse_expr("exp(y1)", 1)};
  Expr composed = substitute(h, inner);
  std::vector<double> p{0.7};
  REQUIRE_THAT(eval_real(composed, p),
               Catch::Matchers::WithinRel(
                   std::sin(0.7) * std::exp(0.7) + 1.0, 1e-15));
}

TEST_CASE("structural equality and max_variable") {
  REQUIRE(parse_expr("y1+y2", 2) == parse_expr("y1 + y2", 2));
  REQUIRE_FALSE(parse_expr("y1+y2", 2) == parse_expr("y2+y1", 2));
  REQUIRE(parse_expr("y2*sin(y4)", 5).max_variable() == 4);
  REQUIRE(Expr::constant(3.0).max_variable() == 0);
}
