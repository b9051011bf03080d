#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "oddgeo/darboux.hpp"
#include "oddgeo/structures.hpp"

using namespace oddgeo;
using testing_support::coords_chart;
using testing_support::cube_sampler;

namespace {

KForm dx(int dim, int i) { return KForm::basis(dim, {i}); }
KVector d(int dim, int i) { return KVector::basis(dim, {i}); }

template <Variance V>
double residual(const Antisym<V, Expr>& a, const Antisym<V, Expr>& b, const Sampler& s) {
  return compare(a, b, s).residual;
}

KForm scaled_random_form(int dim, int degree, double eps, std::mt19937_64& rng) {
  KForm f(dim, degree);
  for (const auto& idx : increasing_indices(dim, degree)) f.add(idx, Expr(eps) * random_polynomial(dim, 2, rng));
  return f;
}

enum class Family { Cosymplectic, Contact, AlmostCosymplecticContact, Generic };

// Regular covariant pairs near the Darboux normal form.
CovariantPair generate(Family fam, int n, std::mt19937_64& rng, const Sampler& s) {
  const int dim = 2 * n + 1;
  KForm base(dim, 2);
  for (int i = 1; i <= n; ++i) base.add({i, i + n}, Expr(1.0));
  KForm omega = dx(dim, 0);
  KForm Omega = base;
  switch (fam) {
    case Family::Cosymplectic:
      omega += Expr(0.2) * differential(random_polynomial(dim, 2, rng), dim);
      Omega += ext_d(scaled_random_form(dim, 1, 0.1, rng));
      break;
    case Family::Contact: {
      KForm w = dx(dim, 0);
      for (int i = 1; i <= n; ++i) w.add({i}, -Expr::coord(i + n));
      w += scaled_random_form(dim, 1, 0.1, rng);
      omega = w;
      Omega = ext_d(w);
      break;
    }
    case Family::AlmostCosymplecticContact:
      omega += scaled_random_form(dim, 1, 0.2, rng);
      Omega += ext_d(scaled_random_form(dim, 1, 0.1, rng));
      break;
    case Family::Generic:
      omega += scaled_random_form(dim, 1, 0.2, rng);
      Omega += scaled_random_form(dim, 2, 0.1, rng);
      break;
  }
  return make_covariant_pair(s.chart(), omega, Omega, s);
}

}  // namespace

TEST_CASE("covariant classification examples") {
  Chart c = coords_chart(3);
  Sampler s = cube_sampler(c);
  KForm area = wedge(dx(3, 1), dx(3, 2));
  auto cos = classify_covariant(make_covariant_pair(c, dx(3, 0), area, s), s);
  CHECK(cos.labels == std::vector<std::string>{"almost-cosymplectic-contact", "cosymplectic", "pre-cosymplectic"});
  auto con = classify_covariant(make_covariant_pair(c, dx(3, 0) - Expr::coord(2) * dx(3, 1), area, s), s);
  CHECK(con.labels == std::vector<std::string>{"almost-cosymplectic-contact", "contact", "pre-cosymplectic"});
  // omega = dt + x2 dx1: d omega = dx2 ^ dx1 = -Omega, so neither closed nor contact
  auto acc = classify_covariant(make_covariant_pair(c, dx(3, 0) + Expr::coord(2) * dx(3, 1), area, s), s);
  CHECK(acc.labels == std::vector<std::string>{"almost-cosymplectic-contact", "pre-cosymplectic"});
  CHECK(acc.residuals.at("d(omega)") > 0.1);
  CHECK(acc.rank == 1);
  // non-closed Omega
  auto none = classify_covariant(make_covariant_pair(c, dx(3, 0), (Expr(1.0) + Expr::coord(0)*Expr::coord(0)) * area, s), s);
  CHECK(none.labels == std::vector<std::string>{"pre-cosymplectic"});
  // non-regular pair: Omega = 0
  auto nr = make_covariant_pair(c, dx(3, 0), KForm(3, 2), s);
  CHECK(nr.r == 0);
  CHECK(classify_covariant(nr, s).labels.empty());
}

TEST_CASE("pair invariants are enforced") {
  Chart c = coords_chart(3);
  Sampler s = cube_sampler(c);
  KForm area = wedge(dx(3, 1), dx(3, 2));
  CHECK_THROWS_AS(make_covariant_pair(c, dx(3, 1), area, s), InvariantError);       // omega ^ Omega = 0
  // |x1| - x1 vanishes for x1 > 0 only, so the rank of Omega is not constant
  Expr x1 = Expr::coord(1);
  CHECK_THROWS_AS(make_covariant_pair(c, dx(3, 0), (sqrt(x1 * x1) - x1) * area, s), InvariantError);
  CHECK_THROWS_AS(make_contravariant_pair(c, KVector(3, 1), wedge(d(3, 2), d(3, 1)), s), InvariantError);
  CHECK_THROWS_AS(make_contravariant_pair(c, d(3, 0), KVector(3, 2), s), InvariantError);
  CHECK_THROWS_AS(make_covariant_pair(coords_chart(4), dx(4, 0), KForm(4, 2), cube_sampler(coords_chart(4))),
                  InputError);
}

TEST_CASE("contravariant classification examples") {
  Chart c = coords_chart(3);
  Sampler s = cube_sampler(c);
  KVector lam = wedge(d(3, 2), d(3, 1));
  auto cp = classify_contravariant(make_contravariant_pair(c, d(3, 0), lam, s), std::nullopt, s);
  CHECK(cp.has(label::kCoPoisson));
  CHECK(cp.has(label::kPreCoPoisson));
  CHECK_FALSE(cp.has(label::kJacobi));

  KVector jl = lam - Expr::coord(2) * wedge(d(3, 0), d(3, 2));
  KForm w = dx(3, 0) - Expr::coord(2) * dx(3, 1);
  auto jac = classify_contravariant(make_contravariant_pair(c, d(3, 0), jl, s), w, s);
  CHECK(jac.labels == std::vector<std::string>{"Jacobi", "almost-coPoisson-Jacobi", "pre-coPoisson"});
  // it is the dual of the contact example
  auto dual = dual_of_covariant(make_covariant_pair(c, w, wedge(dx(3, 1), dx(3, 2)), s), s);
  CHECK(residual(dual.pair.E, d(3, 0), s) <= 1e-12);
  CHECK(residual(dual.pair.Lambda, jl, s) <= 1e-12);
}

TEST_CASE("duals of the flat example satisfy the axioms") {
  Chart c = coords_chart(3);
  Sampler s = cube_sampler(c);
  auto pair = make_covariant_pair(c, dx(3, 0), wedge(dx(3, 1), dx(3, 2)), s);
  auto dual = dual_of_covariant(pair, s);
  CHECK(dual.residuals.max() <= 1e-12);
  CHECK(residual(dual.pair.E, d(3, 0), s) <= 1e-12);
  // with this pairing convention Lambda = d2 ^ d1 = -d1 ^ d2
  CHECK(residual(dual.pair.Lambda, Expr(-1.0) * wedge(d(3, 1), d(3, 2)), s) <= 1e-12);

  auto numeric = numeric_dual_of_covariant(pair, s);
  auto res = duality_residuals(sample(pair.omega, s), sample(pair.Omega, s), numeric.E, numeric.Lambda);
  CHECK(res.max() <= 1e-12);

  CHECK_THROWS_AS(dual_of_covariant(make_covariant_pair(c, dx(3, 0), KForm(3, 2), s), s), InvariantError);
}

TEST_CASE("inverse duality and round trip") {
  Chart c = coords_chart(3);
  Sampler s = cube_sampler(c);
  KVector lam = Expr(2.0) * wedge(d(3, 2), d(3, 1)) + Expr(0.5) * wedge(d(3, 0), d(3, 1));
  auto pair = make_contravariant_pair(c, d(3, 0), lam, s);
  auto dual = dual_of_contravariant(pair, s);
  CHECK(dual.residuals.max() <= 1e-12);
  CHECK(residual(dual.pair.omega, fundamental_one_form(pair), s) <= 1e-12);

  std::mt19937_64 rng(4);
  auto contact = darboux_covariant(darboux_contact(1, 1), s);
  auto there = dual_of_covariant(contact, s);
  auto back = dual_of_contravariant(there.pair, s);
  CHECK(residual(back.pair.omega, contact.omega, s) <= 1e-8);
  CHECK(residual(back.pair.Omega, contact.Omega, s) <= 1e-8);

  // s < n refuses
  Chart c5 = coords_chart(5);
  Sampler s5 = cube_sampler(c5);
  auto low = make_contravariant_pair(c5, d(5, 0), wedge(d(5, 2), d(5, 1)), s5);
  CHECK_THROWS_AS(dual_of_contravariant(low, s5), InvariantError);
  CHECK_THROWS_AS(fundamental_one_form(low), InvariantError);
}

TEST_CASE("fundamental one-form") {
  Chart c = coords_chart(3);
  Sampler s = cube_sampler(c);
  auto cp = make_contravariant_pair(c, d(3, 0), wedge(d(3, 2), d(3, 1)), s);
  CHECK(residual(fundamental_one_form(cp), dx(3, 0), s) <= 1e-12);
  ACPJTriple jac = darboux_contravariant(darboux_contact(1, 1));
  auto jp = make_contravariant_pair(c, jac.E, jac.Lambda, s);
  CHECK(residual(fundamental_one_form(jp), dx(3, 0) - Expr::coord(2) * dx(3, 1), s) <= 1e-12);

  // i_omega(E ^ Lambda^n) = Lambda^n on random regular pairs
  std::mt19937_64 rng(12);
  for (int n : {1, 2}) {
    Chart cc = coords_chart(2 * n + 1);
    Sampler ss = cube_sampler(cc);
    auto cov = generate(Family::Generic, n, rng, ss);
    auto dual = dual_of_covariant(cov, ss);
    KForm w = fundamental_one_form(dual.pair);
    KVector ln = wedge_power(dual.pair.Lambda, n);
    CHECK(residual(interior(w, wedge(dual.pair.E, ln)), ln, ss) <= 1e-9);
    CHECK(residual(w, cov.omega, ss) <= 1e-9);
  }
}

TEST_CASE("symbolic adjugate") {
  std::mt19937_64 rng(2);
  Chart c = coords_chart(3);
  Sampler s = cube_sampler(c);
  for (int n : {1, 2, 3, 4}) {
    SymMatrix m(n, std::vector<Expr>(n));
    for (auto& row : m)
      for (auto& e : row) e = random_polynomial(3, 1, rng);
    Expr det = symbolic_det(m);
    SymMatrix adj = symbolic_adjugate(m);
    ResidualCheck check;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Expr sum;
        for (int k = 0; k < n; ++k) sum += m[i][k] * adj[k][j];
        check.add(sum, i == j ? det : Expr());
      }
    CHECK(check.run(s, 1e-12).equal);
  }
}

TEST_CASE("identities of dual pairs") {
  std::mt19937_64 rng(21);
  for (int n : {1, 2}) {
    Chart c = coords_chart(2 * n + 1);
    Sampler s = cube_sampler(c);
    for (Family fam : {Family::Cosymplectic, Family::Contact, Family::AlmostCosymplecticContact, Family::Generic}) {
      CovariantPair cov = generate(fam, n, rng, s);
      CovariantDual dual = dual_of_covariant(cov, s);
      ACPJTriple t{dual.pair.E, dual.pair.Lambda, cov.omega};
      CHECK(dual.residuals.max() <= 1e-9);
      CHECK(check_splittings(cov, t, s, rng) <= 1e-9);
      CHECK(check_musical_pushes(cov, t, s) <= 1e-9);
      CHECK(check_dOmega_decomposition(cov, t, s, rng) <= 1e-8);
      if (fam != Family::Generic) {
        CHECK(check_involutivity(t, s, rng) <= 1e-8);
        CHECK(check_involutivity(t, s, rng, 1, false) <= 1e-8);
      }
      // symbolic and pointwise duals agree
      auto numeric = numeric_dual_of_covariant(cov, s);
      auto ev = sample(dual.pair.E, s);
      auto lv = sample(dual.pair.Lambda, s);
      double worst = 0.0;
      for (std::size_t i = 0; i < ev.size(); ++i) {
        worst = std::max(worst, max_abs(ev[i] - numeric.E[i]));
        worst = std::max(worst, max_abs(lv[i] - numeric.Lambda[i]));
      }
      CHECK(worst <= 1e-9);
    }
  }
}

TEST_CASE("equivalence of dual classifications") {
  std::mt19937_64 rng(33);
  int seen_generic = 0;
  for (int n : {1, 2}) {
    Chart c = coords_chart(2 * n + 1);
    Sampler s = cube_sampler(c);
    for (Family fam : {Family::Cosymplectic, Family::Contact, Family::AlmostCosymplecticContact, Family::Generic}) {
      for (int trial = 0; trial < 2; ++trial) {
        CovariantPair cov = generate(fam, n, rng, s);
        auto rc = classify_covariant(cov, s);
        auto dual = dual_of_covariant(cov, s);
        auto rv = classify_contravariant(dual.pair, cov.omega, s);
        CHECK(rc.has(label::kAlmostCosymplecticContact) == rv.has(label::kAlmostCoPoissonJacobi));
        CHECK(rc.has(label::kCosymplectic) == rv.has(label::kCoPoisson));
        CHECK(rc.has(label::kContact) == rv.has(label::kJacobi));
        switch (fam) {
          case Family::Cosymplectic: CHECK(rc.has(label::kCosymplectic)); break;
          case Family::Contact: CHECK(rc.has(label::kContact)); break;
          case Family::AlmostCosymplecticContact:
            CHECK(rc.has(label::kAlmostCosymplecticContact));
            CHECK_FALSE(rc.has(label::kContact));
            CHECK_FALSE(rc.has(label::kCosymplectic));
            break;
          case Family::Generic:
            CHECK_FALSE(rc.has(label::kAlmostCosymplecticContact));
            ++seen_generic;
            break;
        }
      }
    }
  }
  CHECK(seen_generic == 4);
}
