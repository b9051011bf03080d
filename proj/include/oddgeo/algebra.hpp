#pragma once

// Function algebras of a contravariant pair: Poisson and Jacobi brackets,
// Hamiltonian lifts and the identities relating them to the bracket of the pair.

#include <optional>
#include <random>
#include <string>

#include "oddgeo/structures.hpp"

namespace oddgeo {

struct BracketContext {
  ContravariantPair pair;
  std::optional<KForm> omega;  // needed only by check_omega_defect
};

BracketContext make_context(const ContravariantPair& p, std::optional<KForm> omega = std::nullopt);
BracketContext make_context(const ACPJTriple& t, const Sampler& s);

/// {f, g} = Lambda(df, dg).
Expr poisson_bracket(const BracketContext& ctx, const Expr& f, const Expr& g);

/// X_f = df# - f E.
KVector hamiltonian_lift(const BracketContext& ctx, const Expr& f);

/// [f, g] = {f, g} - f E.g + g E.f.
Expr jacobi_bracket(const BracketContext& ctx, const Expr& f, const Expr& g);

enum class BracketKind { Poisson, Jacobi };

/// Cyclic sum b(b(f,g),h) + b(b(g,h),f) + b(b(h,f),g), composed symbolically.
Expr jacobiator(const BracketContext& ctx, BracketKind kind, const Expr& f, const Expr& g, const Expr& h);

/// Right-hand sides of the jacobiator identities:
///   Poisson: 1/2 i_[L,L](df ^ dg ^ dh)
///   Jacobi:  (1/2 i_[L,L] + i_{E ^ L})(df ^ dg ^ dh)
///            + i_[E,L](f dg ^ dh + g dh ^ df + h df ^ dg)
Expr jacobiator_rhs(const BracketContext& ctx, BracketKind kind, const Expr& f, const Expr& g, const Expr& h);

/// ([X_f, X_g] - X_[f,g]).h
Expr lift_defect(const BracketContext& ctx, const Expr& f, const Expr& g, const Expr& h);

/// Closed form of lift_defect:
///   -(1/2 i_[L,L] + i_{E ^ L})(df ^ dg ^ dh) - f i_[E,L](dg ^ dh) + g i_[E,L](df ^ dh)
Expr lift_defect_rhs(const BracketContext& ctx, const Expr& f, const Expr& g, const Expr& h);

/// All check_* functions draw random polynomials of degree <= 2 with
/// coefficients in [-1, 1] and return the worst residual over trials and samples.
double check_poisson_jacobiator_identity(const BracketContext& ctx, const Sampler& s, std::mt19937_64& rng,
                                         int trials = 3);
double check_jacobi_jacobiator_identity(const BracketContext& ctx, const Sampler& s, std::mt19937_64& rng,
                                        int trials = 3);
/// The Jacobi-bracket jacobiator itself against zero.
double check_jacobi_identity(const BracketContext& ctx, const Sampler& s, std::mt19937_64& rng, int trials = 3);

/// E.{f,g} = {E.f, g} + {f, E.g} + i_[E,L](df ^ dg)
double check_E_derivation(const BracketContext& ctx, const Sampler& s, std::mt19937_64& rng, int trials = 3);

/// {f, gh} = {f,g} h + g {f,h}
double check_leibniz(const BracketContext& ctx, const Sampler& s, std::mt19937_64& rng, int trials = 3);

struct LiftCheck {
  double identity_residual = 0;  // lift_defect vs lift_defect_rhs
  double defect = 0;             // lift_defect vs 0
  bool homomorphism = false;     // defect <= tol
};
LiftCheck check_lift_homomorphism(const BracketContext& ctx, const Sampler& s, std::mt19937_64& rng,
                                  double tol = kDefaultTolerance, int trials = 3);

/// {f, g} + d omega(X_f, X_g) against zero. Throws InputError without omega.
double check_omega_defect(const BracketContext& ctx, const Sampler& s, std::mt19937_64& rng, int trials = 3);
Expr omega_defect(const BracketContext& ctx, const Expr& f, const Expr& g);

/// A fixed triple evaluated exactly at every sample.
struct Witness {
  Expr f, g, h;
  double min_abs_jacobiator = 0;  // Jacobi bracket, min over samples of |value|
  double max_abs_jacobiator = 0;
  double min_abs_lift_defect = 0;
};
Witness witness(const BracketContext& ctx, const Expr& f, const Expr& g, const Expr& h, const Sampler& s);

}  // namespace oddgeo
