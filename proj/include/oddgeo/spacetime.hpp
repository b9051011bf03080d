#pragma once

// Phase-space structures of Galilei and Einstein spacetimes on the chart
// (x0, x1, x2, x3, x10, x20, x30), built from a metric and a spacetime connection.

#include <array>
#include <map>
#include <string>
#include <vector>

#include "oddgeo/structures.hpp"

namespace oddgeo {

enum class SpacetimeKind { Galilei, Einstein };

std::string to_string(SpacetimeKind k);

inline constexpr int kPhaseDim = 7;
/// Chart index of the velocity coordinate x^i_0, i = 1..3.
constexpr int vel(int i) { return 3 + i; }

Chart phase_chart(std::vector<std::pair<std::string, double>> constants = {});

struct Scales {
  double m = 1.0;
  double hbar = 1.0;
  double c = 1.0;
};

/// Spatial metric g_ij (3x3, symmetric) and the 2-form phi_{0,lambda mu}
/// (4x4, antisymmetric), as expressions in the spacetime coordinates x0..x3.
struct GalileiInput {
  Chart chart = phase_chart();  // supplies named constants
  SymMatrix g;
  SymMatrix phi;
  Scales scales;
};

/// Lorentzian metric g_{lambda mu} (4x4, signature -+++).
struct EinsteinInput {
  Chart chart = phase_chart();
  SymMatrix g;
  Scales scales;
};

/// Spacetime coordinates in [-1, 1]; velocities in [-vmax, vmax]. For Einstein
/// inputs only points with g00 + 2 g0j v^j + gij v^i v^j + 0.05 < 0 are kept.
Sampler galilei_sampler(const Chart& chart, std::uint64_t seed = kDefaultSeed, int count = kDefaultSamples);
Sampler einstein_sampler(const Chart& chart, const EinsteinInput& in, std::uint64_t seed = kDefaultSeed,
                         int count = kDefaultSamples, double vmax = 0.9);
/// g00 + 2 g0j x^j_0 + gij x^i_0 x^j_0.
Expr timelike_form(const SymMatrix& g);

/// Symmetry and positivity (Galilei) or signature (Einstein) at the samples.
/// Throws InputError naming the first failing point.
void validate(const GalileiInput& in, const Sampler& s);
void validate(const EinsteinInput& in, const Sampler& s);

SymMatrix inverse(const SymMatrix& g);

/// K[nu][lambda][mu] = K_lambda^nu_mu, symmetric in (lambda, mu). The sign is
/// that of the horizontal lift d_lambda + K_lambda^nu_mu xdot^mu d/dxdot^nu,
/// so the Levi-Civita connection has K = -Christoffel.
struct LinearConnection {
  std::array<std::array<std::array<Expr, 4>, 4>, 4> K;
  const Expr& operator()(int nu, int lambda, int mu) const { return K[nu][lambda][mu]; }
};

LinearConnection galilei_connection(const GalileiInput& in);
LinearConnection levi_civita(const SymMatrix& g);

/// R^rho_{sigma mu nu} of the connection (Christoffel convention C = -K):
///   d_mu C^rho_{nu sigma} - d_nu C^rho_{mu sigma} + C^rho_{mu k} C^k_{nu sigma} - C^rho_{nu k} C^k_{mu sigma}
Expr curvature(const LinearConnection& k, int rho, int sigma, int mu, int nu);

struct ConnectionDiagnostics {
  double torsion = 0;
  double metric = 0;              // nabla g
  double time = 0;                // nabla dt (Galilei)
  double curvature_symmetry = 0;  // Galilei only
};
ConnectionDiagnostics connection_diagnostics(const LinearConnection& k, const SymMatrix& g, SpacetimeKind kind,
                                             const Sampler& s);

/// Gamma[i-1][lambda] = Gamma_lambda^i on the phase chart.
using PhaseConnection = std::array<std::array<Expr, 4>, 3>;
PhaseConnection phase_connection(const LinearConnection& k, SpacetimeKind kind);

/// Gamma as the tangent-valued 1-form d^lambda (x) (d_lambda + Gamma_lambda^i d^0_i).
TangentValuedOneForm phase_connection_form(const PhaseConnection& gamma);

struct ContactObjects {
  KVector dee{kPhaseDim, 1};  // u0 (d0 + x^i_0 d_i), or c alpha0 (d0 + x^i_0 d_i)
  KForm time{kPhaseDim, 1};   // dt, or tau
  SymMatrix theta;            // theta[nu][lambda] = delta - dee^nu time_lambda
  Expr alpha0;                // 1 for Galilei
};
ContactObjects contact_objects(const SymMatrix& g, SpacetimeKind kind, const Scales& sc);

/// gamma^i = Gamma_0^i + Gamma_j^i x^j_0 and the field scale (d0 + x^i_0 d_i + gamma^i d^0_i).
KVector dynamical_connection(const PhaseConnection& gamma, const Expr& scale);

struct PhaseStructures {
  SpacetimeKind kind = SpacetimeKind::Galilei;
  Chart chart = phase_chart();
  Scales scales;
  SymMatrix g;
  LinearConnection K;
  PhaseConnection Gamma;
  ContactObjects contact;
  KVector gamma{kPhaseDim, 1};   // scaled dynamical connection
  KForm Omega{kPhaseDim, 2};     // scaled
  KVector Lambda{kPhaseDim, 2};  // scaled
  // Unscaled pairs: omega = -(m c^2 / hbar) time, Omega = (m / hbar) Omega,
  // E = -(hbar / m c^2) gamma, Lambda = (hbar / m) Lambda.
  KForm omega_u{kPhaseDim, 1};
  KForm Omega_u{kPhaseDim, 2};
  KVector E_u{kPhaseDim, 1};
  KVector Lambda_u{kPhaseDim, 2};
};

PhaseStructures phase_structures(const GalileiInput& in);
PhaseStructures phase_structures(const EinsteinInput& in);

/// L_Gamma tau = i_Gamma d tau - d i_Gamma tau written out in components,
/// independently of the generic insertion code. Uses i_Gamma tau = tau.
KForm lie_gamma_tau_components(const PhaseStructures& p);

struct SpacetimeReport {
  SpacetimeKind kind = SpacetimeKind::Galilei;
  std::map<std::string, double> residuals;  // all expected to vanish
  double min_top_form = 0;                  // min |time ^ Omega^3| over samples
  std::vector<std::string> covariant_labels;
  std::vector<std::string> contravariant_labels;
  std::vector<std::string> notes;
  double tol = kDefaultTolerance;
  bool ok() const;
};

SpacetimeReport verify_theorems(const PhaseStructures& p, const Sampler& s, double tol = kDefaultTolerance);

/// Flat and Rindler-type inputs used by the CLI presets and tests.
GalileiInput galilei_flat(Scales sc = {});
EinsteinInput einstein_minkowski(Scales sc = {});
/// g00 = -(1 + x1/2)^2, spatial part delta.
EinsteinInput einstein_rindler(Scales sc = {});

}  // namespace oddgeo
