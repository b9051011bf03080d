#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "oddgeo/error.hpp"
#include "oddgeo/expr.hpp"
#include "oddgeo/sampler.hpp"

using namespace oddgeo;
using testing_support::coords_chart;
using testing_support::cube_sampler;

TEST_CASE("parse and evaluate") {
  Chart c = coords_chart(3);
  ScalarField f = parse_expr("t + x1^2", c);
  CHECK(eval(f, Point(c, {1, 2, 0})) == 5.0);
  CHECK(eval(parse_expr(" ( t - -x2 ) * 3 / 2", c), Point(c, {1, 0, 1})) == 3.0);
  CHECK(eval(parse_expr("1.5e2 - 2E-1", c), Point(c, {0, 0, 0})) == doctest::Approx(149.8));
}

TEST_CASE("parser errors carry offsets and symbols") {
  Chart c = coords_chart(3);
  try {
    parse_expr("x1 +", c);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4);
  }
  try {
    parse_expr("x1 * y", c);
    FAIL("expected an unknown symbol");
  } catch (const UnknownSymbolError& e) {
    CHECK(std::string(e.what()).find("'y'") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_expr("x1^-2", c), ParseError);
  CHECK_THROWS_AS(parse_expr("(x1", c), ParseError);
  CHECK_THROWS_AS(parse_expr("x1 x2", c), ParseError);
}

TEST_CASE("constants resolve by name") {
  Chart c({"x0", "x1", "x10"}, {{"c", 2.0}});
  ScalarField a0 = parse_expr("1/sqrt(1 - x10^2)", c);
  CHECK(eval(a0, Point(c, {0, 0, 0.6})) == doctest::Approx(1.25));
  CHECK(eval(parse_expr("c*x1", c), Point(c, {0, 3, 0})) == 6.0);
  Chart c2 = c.with_constant("c", 5.0);
  CHECK(eval(parse_expr("c*x1", c2), Point(c2, {0, 3, 0})) == 15.0);
}

TEST_CASE("differentiation") {
  Chart c = coords_chart(3);
  ScalarField f = parse_expr("t*x1^2", c);
  Sampler s = cube_sampler(c);
  CHECK(field_equal(diff(f, "x1"), parse_expr("2*t*x1", c), s).equal);
  CHECK(eval(diff(parse_expr("sqrt(x1)", c), "x1"), Point(c, {0, 4, 0})) == doctest::Approx(0.25));
  CHECK(diff(parse_expr("x1", c), "t").expr().is_zero());
  CHECK(diff(parse_expr("c0", Chart({"t"}, {{"c0", 1.0}})), "t").expr().is_zero());
  CHECK_THROWS_AS(diff(f, "q"), UnknownSymbolError);
  // quotient rule
  CHECK(field_equal(diff(parse_expr("x1/(1+t^2)", c), "t"), parse_expr("-2*t*x1/(1+t^2)^2", c), s).equal);
}

TEST_CASE("domain errors carry the point") {
  Chart c = coords_chart(3);
  CHECK_THROWS_AS(eval(parse_expr("1/x1", c), Point(c, {0, 0, 0})), DomainError);
  Chart e({"x10"}, {});
  try {
    eval(parse_expr("sqrt(1-x10^2)", e), Point(e, {2.0}));
    FAIL("expected a domain error");
  } catch (const DomainError& err) {
    CHECK(err.point() == std::vector<double>{2.0});
  }
}

TEST_CASE("field_equal examples") {
  Chart c = coords_chart(3);
  Sampler s = cube_sampler(c);
  ScalarField x1 = parse_expr("x1", c);
  auto same = field_equal(x1, x1, s);
  CHECK(same.equal);
  CHECK(same.residual == 0.0);
  auto sq = field_equal(parse_expr("(x1+1)^2", c), parse_expr("x1^2+2*x1+1", c), s);
  CHECK(sq.equal);
  CHECK(sq.residual <= 1e-12);
  auto off = field_equal(x1, parse_expr("x1+1e-3", c), s, 1e-9);
  CHECK_FALSE(off.equal);
  CHECK(off.residual > 4e-4);
  CHECK(off.residual <= 1e-3);
  auto bad = field_equal(parse_expr("1/(x1-x1)", c), x1, s);
  CHECK_FALSE(bad.equal);
  CHECK(bad.diagnostic.has_value());
}

TEST_CASE("mixed partials commute") {
  std::mt19937_64 rng(7);
  Chart c = coords_chart(5);
  Sampler s = cube_sampler(c);
  for (int trial = 0; trial < 5; ++trial) {
    Expr f = random_polynomial(5, 4, rng);
    for (int a = 0; a < 5; ++a)
      for (int b = a + 1; b < 5; ++b) {
        auto r = field_equal(ScalarField(c, diff(diff(f, a), b)), ScalarField(c, diff(diff(f, b), a)), s, 1e-12);
        CHECK(r.equal);
      }
  }
}

TEST_CASE("print then parse round trip") {
  std::mt19937_64 rng(11);
  Chart c = coords_chart(3);
  Sampler s = cube_sampler(c);
  std::vector<Expr> cases;
  for (int i = 0; i < 5; ++i) cases.push_back(random_polynomial(3, 3, rng));
  Expr t = Expr::coord(0), x = Expr::coord(1), y = Expr::coord(2);
  cases.push_back(sqrt(Expr(2.0) + t * t) / (Expr(3.0) - x) - pow(-y, 3));
  cases.push_back(-(t - Expr(-0.5)) * pow(x + y, 2) / sqrt(Expr(4.0) + y));
  for (const Expr& e : cases) {
    ScalarField f(c, e);
    ScalarField g = parse_expr(f.print(), c);
    auto r = field_equal(f, g, s, 1e-15);
    CHECK_MESSAGE(r.equal, f.print());
  }
}

TEST_CASE("sampler determinism and constraints") {
  Chart c = coords_chart(3);
  Sampler a = cube_sampler(c, 99);
  Sampler b = cube_sampler(c, 99);
  REQUIRE(a.points().size() == 32);
  for (std::size_t i = 0; i < a.points().size(); ++i) CHECK(a.points()[i].values == b.points()[i].values);
  CHECK(a.reseeded(100).points()[0].values != a.points()[0].values);

  ScalarField inside = parse_expr("t^2 + x1^2 - 0.25", c);
  Sampler disk(c, Sampler::cube(3), inside, 5, 16);
  for (const auto& p : disk.points()) CHECK(inside.eval(p) < 0.0);
  CHECK_THROWS_AS(Sampler(c, Sampler::cube(3), parse_expr("1 + t^2", c), 5, 4), InputError);
}
