#include "oddgeo/algebra.hpp"

#include <cmath>
#include <limits>

namespace oddgeo {

BracketContext make_context(const ContravariantPair& p, std::optional<KForm> omega) {
  return BracketContext{p, std::move(omega)};
}

BracketContext make_context(const ACPJTriple& t, const Sampler& s) {
  return BracketContext{make_contravariant_pair(s.chart(), t.E, t.Lambda, s), t.omega};
}

namespace {

int dim_of(const BracketContext& ctx) { return ctx.pair.chart.dim(); }

KForm d(const BracketContext& ctx, const Expr& f) { return differential(f, dim_of(ctx)); }

// Brackets of the pair are reused by every identity; computing them per call
// keeps the context a plain value.
struct PairBrackets {
  KVector EL;
  KVector LL;
};

PairBrackets brackets(const BracketContext& ctx) {
  return {schouten(ctx.pair.E, ctx.pair.Lambda), schouten(ctx.pair.Lambda, ctx.pair.Lambda)};
}

Expr i2(const KVector& p, const KForm& a, const KForm& b) { return pairing(p, wedge(a, b)); }
Expr i3(const KVector& p, const KForm& a, const KForm& b, const KForm& c) {
  return pairing(p, wedge(wedge(a, b), c));
}

Expr jacobiator_rhs_with(const BracketContext& ctx, const PairBrackets& br, BracketKind kind, const Expr& f,
                         const Expr& g, const Expr& h) {
  KForm df = d(ctx, f), dg = d(ctx, g), dh = d(ctx, h);
  Expr r = Expr(0.5) * i3(br.LL, df, dg, dh);
  if (kind == BracketKind::Poisson) return r;
  r += i3(wedge(ctx.pair.E, ctx.pair.Lambda), df, dg, dh);
  r += f * i2(br.EL, dg, dh) + g * i2(br.EL, dh, df) + h * i2(br.EL, df, dg);
  return r;
}

Expr lift_rhs_with(const BracketContext& ctx, const PairBrackets& br, const Expr& f, const Expr& g,
                   const Expr& h) {
  KForm df = d(ctx, f), dg = d(ctx, g), dh = d(ctx, h);
  Expr r = -(Expr(0.5) * i3(br.LL, df, dg, dh) + i3(wedge(ctx.pair.E, ctx.pair.Lambda), df, dg, dh));
  r -= f * i2(br.EL, dg, dh);
  r += g * i2(br.EL, df, dh);
  return r;
}

double worse(double a, double b) { return std::isnan(b) || b > a ? b : a; }

// Worst residual of check(lhs, rhs) pairs produced by `make` over trials.
template <class Make>
double run_trials(const BracketContext& ctx, const Sampler& s, std::mt19937_64& rng, int trials, Make make) {
  ResidualCheck c;
  for (int k = 0; k < trials; ++k) {
    Expr f = random_polynomial(dim_of(ctx), 2, rng);
    Expr g = random_polynomial(dim_of(ctx), 2, rng);
    Expr h = random_polynomial(dim_of(ctx), 2, rng);
    auto [lhs, rhs] = make(f, g, h);
    c.add(lhs, rhs);
  }
  return c.run(s).residual;
}

}  // namespace

Expr poisson_bracket(const BracketContext& ctx, const Expr& f, const Expr& g) {
  return i2(ctx.pair.Lambda, d(ctx, f), d(ctx, g));
}

KVector hamiltonian_lift(const BracketContext& ctx, const Expr& f) {
  return sharp(ctx.pair.Lambda, d(ctx, f)) - f * ctx.pair.E;
}

Expr jacobi_bracket(const BracketContext& ctx, const Expr& f, const Expr& g) {
  return poisson_bracket(ctx, f, g) - f * apply(ctx.pair.E, g) + g * apply(ctx.pair.E, f);
}

Expr jacobiator(const BracketContext& ctx, BracketKind kind, const Expr& f, const Expr& g, const Expr& h) {
  auto b = [&](const Expr& a, const Expr& c) {
    return kind == BracketKind::Poisson ? poisson_bracket(ctx, a, c) : jacobi_bracket(ctx, a, c);
  };
  return b(b(f, g), h) + b(b(g, h), f) + b(b(h, f), g);
}

Expr jacobiator_rhs(const BracketContext& ctx, BracketKind kind, const Expr& f, const Expr& g, const Expr& h) {
  return jacobiator_rhs_with(ctx, brackets(ctx), kind, f, g, h);
}

Expr lift_defect(const BracketContext& ctx, const Expr& f, const Expr& g, const Expr& h) {
  KVector xf = hamiltonian_lift(ctx, f);
  KVector xg = hamiltonian_lift(ctx, g);
  KVector xfg = hamiltonian_lift(ctx, jacobi_bracket(ctx, f, g));
  return apply(schouten(xf, xg) - xfg, h);
}

Expr lift_defect_rhs(const BracketContext& ctx, const Expr& f, const Expr& g, const Expr& h) {
  return lift_rhs_with(ctx, brackets(ctx), f, g, h);
}

double check_poisson_jacobiator_identity(const BracketContext& ctx, const Sampler& s, std::mt19937_64& rng,
                                         int trials) {
  PairBrackets br = brackets(ctx);
  return run_trials(ctx, s, rng, trials, [&](const Expr& f, const Expr& g, const Expr& h) {
    return std::pair{jacobiator(ctx, BracketKind::Poisson, f, g, h),
                     jacobiator_rhs_with(ctx, br, BracketKind::Poisson, f, g, h)};
  });
}

double check_jacobi_jacobiator_identity(const BracketContext& ctx, const Sampler& s, std::mt19937_64& rng,
                                        int trials) {
  PairBrackets br = brackets(ctx);
  return run_trials(ctx, s, rng, trials, [&](const Expr& f, const Expr& g, const Expr& h) {
    return std::pair{jacobiator(ctx, BracketKind::Jacobi, f, g, h),
                     jacobiator_rhs_with(ctx, br, BracketKind::Jacobi, f, g, h)};
  });
}

double check_jacobi_identity(const BracketContext& ctx, const Sampler& s, std::mt19937_64& rng, int trials) {
  return run_trials(ctx, s, rng, trials, [&](const Expr& f, const Expr& g, const Expr& h) {
    return std::pair{jacobiator(ctx, BracketKind::Jacobi, f, g, h), Expr()};
  });
}

double check_E_derivation(const BracketContext& ctx, const Sampler& s, std::mt19937_64& rng, int trials) {
  KVector el = schouten(ctx.pair.E, ctx.pair.Lambda);
  const KVector& e = ctx.pair.E;
  return run_trials(ctx, s, rng, trials, [&](const Expr& f, const Expr& g, const Expr&) {
    Expr lhs = apply(e, poisson_bracket(ctx, f, g));
    Expr rhs = poisson_bracket(ctx, apply(e, f), g) + poisson_bracket(ctx, f, apply(e, g)) +
               i2(el, d(ctx, f), d(ctx, g));
    return std::pair{lhs, rhs};
  });
}

double check_leibniz(const BracketContext& ctx, const Sampler& s, std::mt19937_64& rng, int trials) {
  return run_trials(ctx, s, rng, trials, [&](const Expr& f, const Expr& g, const Expr& h) {
    return std::pair{poisson_bracket(ctx, f, g * h),
                     poisson_bracket(ctx, f, g) * h + g * poisson_bracket(ctx, f, h)};
  });
}

LiftCheck check_lift_homomorphism(const BracketContext& ctx, const Sampler& s, std::mt19937_64& rng, double tol,
                                  int trials) {
  PairBrackets br = brackets(ctx);
  ResidualCheck identity, defect;
  for (int k = 0; k < trials; ++k) {
    Expr f = random_polynomial(dim_of(ctx), 2, rng);
    Expr g = random_polynomial(dim_of(ctx), 2, rng);
    Expr h = random_polynomial(dim_of(ctx), 2, rng);
    Expr lhs = lift_defect(ctx, f, g, h);
    identity.add(lhs, lift_rhs_with(ctx, br, f, g, h));
    defect.add(lhs, Expr());
  }
  LiftCheck out;
  out.identity_residual = identity.run(s, tol).residual;
  out.defect = defect.run(s, tol).residual;
  out.homomorphism = out.defect <= tol;
  return out;
}

Expr omega_defect(const BracketContext& ctx, const Expr& f, const Expr& g) {
  if (!ctx.omega) throw InputError("the {f,g} + d omega(X_f, X_g) check needs omega");
  KForm dw = ext_d(*ctx.omega);
  return poisson_bracket(ctx, f, g) + interior(hamiltonian_lift(ctx, g), interior(hamiltonian_lift(ctx, f), dw)).value();
}

double check_omega_defect(const BracketContext& ctx, const Sampler& s, std::mt19937_64& rng, int trials) {
  if (!ctx.omega) throw InputError("the {f,g} + d omega(X_f, X_g) check needs omega");
  return run_trials(ctx, s, rng, trials, [&](const Expr& f, const Expr& g, const Expr&) {
    return std::pair{omega_defect(ctx, f, g), Expr()};
  });
}

Witness witness(const BracketContext& ctx, const Expr& f, const Expr& g, const Expr& h, const Sampler& s) {
  Witness w{f, g, h};
  std::vector<Expr> roots{jacobiator(ctx, BracketKind::Jacobi, f, g, h), lift_defect(ctx, f, g, h)};
  w.min_abs_jacobiator = std::numeric_limits<double>::infinity();
  w.min_abs_lift_defect = std::numeric_limits<double>::infinity();
  for (const auto& row : sample_values(roots, s)) {
    w.min_abs_jacobiator = std::min(w.min_abs_jacobiator, std::abs(row[0]));
    w.max_abs_jacobiator = worse(w.max_abs_jacobiator, std::abs(row[0]));
    w.min_abs_lift_defect = std::min(w.min_abs_lift_defect, std::abs(row[1]));
  }
  return w;
}

}  // namespace oddgeo
