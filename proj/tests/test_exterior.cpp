#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "oddgeo/exterior.hpp"

using namespace oddgeo;
using namespace testing_support;

namespace {

// Right-hand side of the interior-product identity for the bracket, applied to
// a (p+q-1)-form beta. Independent of the coordinate formulas.
KForm bracket_identity_rhs(const KVector& p, const KVector& q, const KForm& beta) {
  const int a = p.degree();
  const int b = q.degree();
  const double s1 = (b * (a + 1)) % 2 == 0 ? 1.0 : -1.0;
  const double s2 = a % 2 == 0 ? 1.0 : -1.0;
  KForm r = Expr(s1) * interior(p, ext_d(interior(q, beta))) + Expr(s2) * interior(q, ext_d(interior(p, beta)));
  if (beta.degree() < beta.dim()) r -= interior(wedge(p, q), ext_d(beta));
  return r;
}

void check_zero(const KForm& f, const Sampler& s, double tol = 1e-9) {
  ResidualCheck c;
  c.add_zero(f);
  auto r = c.run(s, tol);
  CHECK_MESSAGE(r.equal, "residual " << r.residual);
}

template <Variance V>
void check_equal(const Antisym<V, Expr>& a, const Antisym<V, Expr>& b, const Sampler& s, double tol = 1e-9) {
  auto r = compare(a, b, s, tol);
  CHECK_MESSAGE(r.equal, "residual " << r.residual);
}

}  // namespace

TEST_CASE("sort sign") {
  std::vector<int> a{2, 0, 1};
  CHECK(sort_sign(a) == 1);
  CHECK(a == std::vector<int>{0, 1, 2});
  std::vector<int> b{1, 0};
  CHECK(sort_sign(b) == -1);
  std::vector<int> c{1, 1};
  CHECK(sort_sign(c) == 0);
}

TEST_CASE("wedge examples") {
  Chart c = coords_chart(3);
  Sampler s = cube_sampler(c);
  KForm w = wedge(dx(3, 1), dx(3, 2));
  CHECK(w.terms().size() == 1);
  CHECK(w.coeff({1, 2}).is_one());
  std::mt19937_64 rng(3);
  KForm om = random_form(3, 1, 2, rng);
  check_zero(wedge(om, om), s);
  KForm alpha = dx(3, 0) - Expr::coord(2) * dx(3, 1);
  KForm r = wedge(alpha, wedge(dx(3, 1), dx(3, 2)));
  CHECK(r.coeff({0, 1, 2}).is_one());
  CHECK_THROWS_AS(wedge(wedge(dx(3, 0), dx(3, 1)), wedge(dx(3, 1), dx(3, 2))), DegreeError);
}

TEST_CASE("wedge is graded commutative") {
  std::mt19937_64 rng(5);
  Chart c = coords_chart(5);
  Sampler s = cube_sampler(c);
  for (int p = 0; p <= 3; ++p)
    for (int q = 0; p + q <= 5; ++q) {
      KForm a = random_form(5, p, 2, rng);
      KForm b = random_form(5, q, 2, rng);
      double sign = (p * q) % 2 == 0 ? 1.0 : -1.0;
      check_equal(wedge(a, b), Expr(sign) * wedge(b, a), s);
    }
}

TEST_CASE("interior product examples") {
  KForm dtdx = wedge(dx(3, 0), dx(3, 1));
  KForm r = interior(vec(3, 0), dtdx);
  CHECK(r.coeff({1}).is_one());
  CHECK(r.terms().size() == 1);
  CHECK(interior(wedge(vec(3, 0), vec(3, 1)), dtdx).value().literal_value() == 1.0);
  CHECK(interior(vec(3, 1), dx(3, 0)).value().is_zero());

  KVector dv = interior(dx(3, 0), wedge(vec(3, 0), vec(3, 1)));
  CHECK(dv.coeff({1}).is_one());
  CHECK(interior(dx(3, 2), vec(3, 0)).value().is_zero());
  CHECK_THROWS_AS(interior(wedge(vec(3, 0), vec(3, 1)), dx(3, 0)), DegreeError);
}

TEST_CASE("interior product fills slots in order") {
  std::mt19937_64 rng(8);
  Chart c = coords_chart(5);
  Sampler s = cube_sampler(c);
  for (int trial = 0; trial < 4; ++trial) {
    KVector x = random_multivector(5, 1, 2, rng);
    KVector y = random_multivector(5, 1, 2, rng);
    KForm beta = random_form(5, 2, 2, rng);
    // beta(X, Y) by explicit double sum over components
    Expr explicit_value;
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) explicit_value += beta.component({i, j}) * x.coeff({i}) * y.coeff({j});
    KForm lhs = KForm::scalar(5, interior(wedge(x, y), beta).value());
    check_equal(lhs, KForm::scalar(5, explicit_value), s);
    check_equal(lhs, KForm::scalar(5, interior(y, interior(x, beta)).value()), s);
  }
}

TEST_CASE("exterior derivative") {
  Chart c = coords_chart(3);
  Sampler s = cube_sampler(c);
  Expr t = Expr::coord(0), x2 = Expr::coord(2);
  KForm r = ext_d(t * dx(3, 1));
  CHECK(r.coeff({0, 1}).is_one());
  CHECK(r.terms().size() == 1);
  KForm contact = ext_d(dx(3, 0) - x2 * dx(3, 1));
  check_equal(contact, wedge(dx(3, 1), dx(3, 2)), s);

  std::mt19937_64 rng(13);
  Chart c5 = coords_chart(5);
  Sampler s5 = cube_sampler(c5);
  for (int k = 0; k < 4; ++k) check_zero(ext_d(ext_d(random_form(5, k, 3, rng))), s5);
}

TEST_CASE("Leibniz rule for d") {
  std::mt19937_64 rng(17);
  Chart c = coords_chart(5);
  Sampler s = cube_sampler(c);
  for (int p = 0; p <= 2; ++p)
    for (int q = 0; q <= 2; ++q) {
      KForm a = random_form(5, p, 2, rng);
      KForm b = random_form(5, q, 2, rng);
      double sign = p % 2 == 0 ? 1.0 : -1.0;
      check_equal(ext_d(wedge(a, b)), wedge(ext_d(a), b) + Expr(sign) * wedge(a, ext_d(b)), s);
    }
}

TEST_CASE("Lie derivative") {
  Chart c = coords_chart(3);
  Sampler s = cube_sampler(c);
  CHECK(lie_derivative(vec(3, 0), dx(3, 0)).is_zero());
  KForm r = lie_derivative(vec(3, 0), Expr::coord(0) * dx(3, 1));
  check_equal(r, dx(3, 1), s);
}

TEST_CASE("sharp and flat") {
  Chart c = coords_chart(3);
  Sampler s = cube_sampler(c);
  KVector lam = wedge(vec(3, 2), vec(3, 1));
  check_equal(sharp(lam, dx(3, 1)), Expr(-1.0) * vec(3, 2), s);
  CHECK(sharp(lam, dx(3, 0)).is_zero());
  KForm om = wedge(dx(3, 1), dx(3, 2));
  check_equal(flat(om, vec(3, 1)), dx(3, 2), s);
  CHECK(flat(KForm(3, 2), vec(3, 1)).is_zero());

  std::mt19937_64 rng(19);
  Chart c5 = coords_chart(5);
  Sampler s5 = cube_sampler(c5);
  for (int trial = 0; trial < 3; ++trial) {
    KForm big = random_form(5, 2, 2, rng);
    KVector x = random_multivector(5, 1, 2, rng);
    KVector y = random_multivector(5, 1, 2, rng);
    check_equal(KForm::scalar(5, pairing(y, flat(big, x))), KForm::scalar(5, interior(wedge(x, y), big).value()),
                s5);
    KVector bl = random_multivector(5, 2, 2, rng);
    KForm a = random_form(5, 1, 2, rng);
    KForm b = random_form(5, 1, 2, rng);
    check_equal(KForm::scalar(5, pairing(b, sharp(bl, a))), KForm::scalar(5, interior(wedge(a, b), bl).value()),
                s5);
  }
}

TEST_CASE("Schouten examples") {
  Chart c = coords_chart(3);
  Sampler s = cube_sampler(c);
  CHECK(schouten(vec(3, 0), wedge(vec(3, 1), vec(3, 2))).is_zero());

  // E = d_t: [E, Lambda] has components d_t Lambda^{ij}.
  std::mt19937_64 rng(23);
  KVector lam = random_multivector(3, 2, 3, rng);
  KVector expect(3, 2);
  for (const auto& [idx, v] : lam.terms()) expect.add(idx, diff(v, 0));
  check_equal(schouten(vec(3, 0), lam), expect, s);

  // Lambda = d2^d1 - x2 d_t^d2: [Lambda, Lambda] = 2 d_t^d1^d2 by hand.
  KVector l = wedge(vec(3, 2), vec(3, 1)) - Expr::coord(2) * wedge(vec(3, 0), vec(3, 2));
  KVector ll = schouten(l, l);
  check_equal(ll, Expr(2.0) * KVector::basis(3, {0, 1, 2}), s);

  CHECK_THROWS_AS(schouten(wedge(vec(5, 0), wedge(vec(5, 1), vec(5, 2))), vec(5, 3)), DegreeError);
}

TEST_CASE("Schouten calibration against the interior-product identity") {
  std::mt19937_64 rng(29);
  for (int dim : {3, 5}) {
    Chart c = coords_chart(dim);
    Sampler s = cube_sampler(c);
    for (int trial = 0; trial < 3; ++trial) {
      KVector e = random_multivector(dim, 1, 2, rng);
      KVector lam = random_multivector(dim, 2, 2, rng);
      KVector x = random_multivector(dim, 1, 2, rng);

      std::vector<KForm> closed2{wedge(dx(dim, 0), dx(dim, 1)), ext_d(random_form(dim, 1, 3, rng))};
      for (const KForm& beta : closed2) {
        KForm lhs = KForm::scalar(dim, interior(schouten(e, lam), beta).value());
        KForm rhs = interior(e, ext_d(interior(lam, beta))) - interior(lam, ext_d(interior(e, beta)));
        check_equal(lhs, rhs, s);
        check_equal(lhs, bracket_identity_rhs(e, lam, beta), s);
        // (2,1) ordering
        check_equal(KForm::scalar(dim, interior(schouten(lam, e), beta).value()),
                    bracket_identity_rhs(lam, e, beta), s);
      }
      // Fixed graded-antisymmetry sign on (1,2)/(2,1).
      check_equal(schouten(lam, e), schouten(e, lam), s);

      std::vector<KForm> closed3{wedge(dx(dim, 0), wedge(dx(dim, 1), dx(dim, 2))),
                                 ext_d(random_form(dim, 2, 3, rng))};
      for (const KForm& beta : closed3) {
        KForm lhs = KForm::scalar(dim, interior(schouten(lam, lam), beta).value());
        check_equal(lhs, Expr(2.0) * interior(lam, ext_d(interior(lam, beta))), s);
        check_equal(lhs, bracket_identity_rhs(lam, lam, beta), s);
      }
      // Non-closed forms: the full identity including the i_{P^Q} d beta term.
      KVector lam2 = random_multivector(dim, 2, 2, rng);
      KForm beta3 = random_form(dim, 3, 2, rng);
      check_equal(KForm::scalar(dim, interior(schouten(lam, lam2), beta3).value()),
                  bracket_identity_rhs(lam, lam2, beta3), s);
      KForm beta2 = random_form(dim, 2, 2, rng);
      check_equal(KForm::scalar(dim, interior(schouten(e, lam), beta2).value()), bracket_identity_rhs(e, lam, beta2),
                  s);
      KForm beta1 = random_form(dim, 1, 2, rng);
      check_equal(KForm::scalar(dim, interior(schouten(e, x), beta1).value()), bracket_identity_rhs(e, x, beta1), s);
    }
  }
}

TEST_CASE("Frolicher-Nijenhuis insertion") {
  std::mt19937_64 rng(31);
  Chart c = coords_chart(5);
  Sampler s = cube_sampler(c);
  auto id = TangentValuedOneForm::identity(5);
  TangentValuedOneForm zero(5);
  for (int k = 1; k <= 2; ++k) {
    KForm beta = random_form(5, k, 2, rng);
    check_equal(fn_insert(id, beta), Expr(static_cast<double>(k)) * beta, s);
    CHECK(fn_insert(zero, beta).is_zero());
  }
  KForm tau = random_form(5, 1, 3, rng);
  check_equal(lie_tv(id, tau), ext_d(tau), s);
  CHECK(lie_tv(zero, tau).is_zero());
  CHECK_THROWS_AS(fn_insert(id, random_form(5, 3, 1, rng)), DegreeError);

  // Insertion is a derivation on decomposable 2-forms.
  TangentValuedOneForm a(5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) a.m[i][j] = random_polynomial(5, 1, rng);
  KForm u = random_form(5, 1, 2, rng);
  KForm v = random_form(5, 1, 2, rng);
  check_equal(fn_insert(a, wedge(u, v)), wedge(fn_insert(a, u), v) + wedge(u, fn_insert(a, v)), s);
}

TEST_CASE("rank") {
  Chart c3 = coords_chart(3);
  Sampler s3 = cube_sampler(c3);
  KForm om = wedge(dx(3, 1), dx(3, 2));
  CHECK(rank_at(om, s3.points()[0]) == 2);
  auto info = constant_rank(om, s3);
  CHECK(info.rank == 2);
  CHECK(info.constant);
  CHECK(constant_rank(KForm(3, 2), s3).rank == 0);

  Chart c5 = coords_chart(5);
  Sampler s5 = cube_sampler(c5);
  KForm d2 = wedge(dx(5, 1), dx(5, 3)) + wedge(dx(5, 2), dx(5, 4));
  auto i5 = constant_rank(d2, s5);
  CHECK(i5.rank == 4);
  CHECK(i5.constant);
  // rank drops on x1 = 0 only, so it is not constant on a grid through it
  KForm var = Expr::coord(1) * wedge(dx(3, 1), dx(3, 2));
  Sampler grid(c3, {{0, 0}, {-1, 1}, {0, 0}}, std::nullopt, 1, 8);
  CHECK(constant_rank(var, grid).constant);
  CHECK(rank_at(var, Point(c3, {0, 0, 0})) == 0);
}
