#pragma once

// Darboux normal forms on the chart (t, x1, ..., x2n) and closed-form
// expressions of their brackets.

#include <vector>

#include "oddgeo/structures.hpp"

namespace oddgeo {

/// Chart (t, x1, ..., x2n).
Chart darboux_chart(int n);

struct DarbouxSpec {
  Chart chart;
  int n = 0;
  int s = 0;
  /// omega_funcs[k - 1] is omega^k for k = 1..2n.
  std::vector<Expr> omega_funcs;

  DarbouxSpec(int n, int s, std::vector<Expr> funcs);
  DarbouxSpec(Chart chart, int n, int s, std::vector<Expr> funcs);

  const Expr& w(int k) const { return omega_funcs.at(k - 1); }
};

/// omega = dt + sum_{i<=n} (w^i dx^i + w^{i+n} dx^{i+n}).
KForm darboux_omega(const DarbouxSpec& spec);

/// (omega, Omega = sum_{i<=n} dx^i ^ dx^{i+n}).
CovariantPair darboux_covariant(const DarbouxSpec& spec, const Sampler& s);

/// E = d_t, Lambda = sum_{i<=s} d_{i+n} ^ d_i - w^{i+n} d_t ^ d_i + w^i d_t ^ d_{i+n},
/// omega as above.
ACPJTriple darboux_contravariant(const DarbouxSpec& spec);

struct DarbouxBrackets {
  KVector ELam;    // [E, Lambda]
  KVector LamLam;  // [Lambda, Lambda]
};
DarbouxBrackets darboux_bracket_oracle(const DarbouxSpec& spec);

struct DarbouxImages {
  KVector sharpLEomega;  // Lambda#(L_E omega)
  KVector LLdomega;      // (Lambda# (x) Lambda#)(d omega)
};
DarbouxImages darboux_domega_images(const DarbouxSpec& spec);

/// Named instances: all w = 0 (cosymplectic / coPoisson) and
/// w^i = -x^{i+n}, w^{i+n} = 0 for i <= s (contact / Jacobi).
DarbouxSpec darboux_flat(int n, int s);
DarbouxSpec darboux_contact(int n, int s);

}  // namespace oddgeo
