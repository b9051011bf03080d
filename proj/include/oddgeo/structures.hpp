#pragma once

// Covariant pairs (omega, Omega), contravariant pairs (E, Lambda), their
// classification, and duality between them.

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "oddgeo/exterior.hpp"

namespace oddgeo {

namespace label {
inline constexpr const char* kPreCosymplectic = "pre-cosymplectic";
inline constexpr const char* kCosymplectic = "cosymplectic";
inline constexpr const char* kContact = "contact";
inline constexpr const char* kAlmostCosymplecticContact = "almost-cosymplectic-contact";
inline constexpr const char* kPreCoPoisson = "pre-coPoisson";
inline constexpr const char* kCoPoisson = "coPoisson";
inline constexpr const char* kJacobi = "Jacobi";
inline constexpr const char* kAlmostCoPoissonJacobi = "almost-coPoisson-Jacobi";
inline constexpr const char* kTrivial = "trivial";
}  // namespace label

/// Half-dimension n of an odd chart, dim = 2n + 1.
int half_dimension(const Chart& chart);

struct CovariantPair {
  Chart chart;
  KForm omega;  // degree 1
  KForm Omega;  // degree 2
  int n = 0;
  int r = 0;  // half-rank of Omega
};

struct ContravariantPair {
  Chart chart;
  KVector E;       // degree 1
  KVector Lambda;  // degree 2
  int n = 0;
  int s = 0;  // half-rank of Lambda
};

struct ACPJTriple {
  KVector E;
  KVector Lambda;
  KForm omega;
};

/// Builds a covariant pair, detecting r and checking omega ^ Omega^r != 0 at
/// every sample. Throws InvariantError on non-constant rank or vanishing.
CovariantPair make_covariant_pair(const Chart& chart, KForm omega, KForm Omega, const Sampler& s,
                                  double tol = kDefaultTolerance);

/// Builds a contravariant pair; E == 0 and Lambda == 0 are rejected.
ContravariantPair make_contravariant_pair(const Chart& chart, KVector E, KVector Lambda, const Sampler& s,
                                          double tol = kDefaultTolerance);

inline bool is_regular(const CovariantPair& p) { return p.r == p.n; }
inline bool is_regular(const ContravariantPair& p) { return p.s == p.n; }

struct ClassificationReport {
  std::vector<std::string> labels;          // sorted
  std::map<std::string, double> residuals;  // identity name -> max residual
  std::string rank_name;                    // "r" or "s"
  int rank = 0;
  int n = 0;
  std::vector<std::string> notes;
  std::uint64_t seed = kDefaultSeed;
  int samples = kDefaultSamples;
  double tol = kDefaultTolerance;

  bool has(std::string_view l) const;
};

ClassificationReport classify_covariant(const CovariantPair& p, const Sampler& s, double tol = kDefaultTolerance);

/// `omega` is needed for the almost-coPoisson-Jacobi test; when absent and the
/// pair is regular the fundamental 1-form is used.
ClassificationReport classify_contravariant(const ContravariantPair& p, const std::optional<KForm>& omega,
                                            const Sampler& s, double tol = kDefaultTolerance);

// ---------------------------------------------------------------------------
// Symbolic linear algebra for small charts (Laplace expansion with memoized
// minors; fine up to dimension 7).

using SymMatrix = std::vector<std::vector<Expr>>;

Expr symbolic_det(const SymMatrix& m);
/// adj(m), so that m * adj(m) = det(m) * I.
SymMatrix symbolic_adjugate(const SymMatrix& m);

/// Coefficient matrices: M(i,j) = component(i,j).
SymMatrix sym_matrix(const KForm& b);
SymMatrix sym_matrix(const KVector& b);

// ---------------------------------------------------------------------------
// Duality

/// Residuals of the duality axioms at the samples.
struct DualityResiduals {
  double iE_Omega = 0;        // i_E Omega = 0
  double i_omega_Lambda = 0;  // i_omega Lambda = 0
  double iE_omega = 0;        // i_E omega = 1
  double sharp_flat = 0;      // Lambda# o Omega_b = id - omega (x) E
  double flat_sharp = 0;      // Omega_b o Lambda# = id - E (x) omega
  double max() const;
};

/// Pointwise dual objects at the sampler's points.
struct NumericContravariant {
  std::vector<NumVector> E;
  std::vector<NumVector> Lambda;
};
struct NumericCovariant {
  std::vector<NumForm> omega;
  std::vector<NumForm> Omega;
};

/// At each sample solve M X = alpha with M(X) = i_X Omega + omega(X) omega.
/// Throws InvariantError naming the sample when M is singular.
NumericContravariant numeric_dual_of_covariant(const CovariantPair& p, const Sampler& s);
/// Mirror with N(alpha) = i_alpha Lambda + alpha(E) E.
NumericCovariant numeric_dual_of_contravariant(const ContravariantPair& p, const Sampler& s);

/// Pointwise dual at a single point. Throws InvariantError when singular.
std::pair<NumVector, NumVector> dual_at(const NumForm& omega, const NumForm& Omega);
std::pair<NumForm, NumForm> dual_at(const NumVector& E, const NumVector& Lambda);

DualityResiduals duality_residuals(const NumForm& omega, const NumForm& Omega, const NumVector& E,
                                   const NumVector& Lambda);
/// Worst case over the samples.
DualityResiduals duality_residuals(const std::vector<NumForm>& omega, const std::vector<NumForm>& Omega,
                                   const std::vector<NumVector>& E, const std::vector<NumVector>& Lambda);

struct CovariantDual {
  ContravariantPair pair;  // symbolic (E, Lambda)
  KForm omega;             // the input omega, the fundamental 1-form of the result
  DualityResiduals residuals;
};
struct ContravariantDual {
  CovariantPair pair;
  DualityResiduals residuals;
};

/// Symbolic dual via the adjugate of M; certified by the numeric axioms.
/// Requires a regular pair.
CovariantDual dual_of_covariant(const CovariantPair& p, const Sampler& s, double tol = kDefaultTolerance);
ContravariantDual dual_of_contravariant(const ContravariantPair& p, const Sampler& s,
                                        double tol = kDefaultTolerance);

/// The unique omega with i_E omega = 1 and i_omega Lambda = 0 (regular pairs).
KForm fundamental_one_form(const ContravariantPair& p);

/// (Omega_b (x) Omega_b)(Lambda): the 2-form (X, Y) -> Lambda(X_b, Y_b).
KForm push_bivector(const KForm& Omega, const KVector& Lambda);

/// E ^ Lambda#(L_E omega) and E ^ (Lambda# (x) Lambda#)(d omega), the
/// right-hand sides of the almost-coPoisson-Jacobi bracket conditions.
KVector acpj_rhs_E_Lambda(const ACPJTriple& t);
KVector acpj_rhs_Lambda_Lambda(const ACPJTriple& t);

/// Max residual between dOmega(X,Y,Z) and its expression through the
/// brackets of the dual pair, over random closed alpha, beta, gamma and
/// random f, g, h.
double check_dOmega_decomposition(const CovariantPair& p, const ACPJTriple& dual, const Sampler& s,
                                  std::mt19937_64& rng, int trials = 2);

/// Splitting projections X = omega(X) E + Lambda#(Omega_b X) and the dual one,
/// for random X and alpha.
double check_splittings(const CovariantPair& p, const ACPJTriple& dual, const Sampler& s, std::mt19937_64& rng,
                        int trials = 2);

/// (Lambda# (x) Lambda#)(Omega) = -Lambda and (Omega_b (x) Omega_b)(Lambda) = -Omega.
double check_musical_pushes(const CovariantPair& p, const ACPJTriple& dual, const Sampler& s);

/// Brackets [E, alpha#] and [alpha#, beta#] against their closed expressions
///   [E, a#]  = (L_E a - a(E) L_E omega)# + Lambda(L_E omega, a) E
///   [a#, b#] = (d Lambda(a,b) + i_a# db - i_b# da + a(E) i_b# d omega - b(E) i_a# d omega)#
///              - d omega(a#, b#) E
/// for random alpha, beta (closed when `closed`). Both lie in <E> + im Lambda#.
double check_involutivity(const ACPJTriple& t, const Sampler& s, std::mt19937_64& rng, int trials = 2,
                          bool closed = true);

}  // namespace oddgeo
