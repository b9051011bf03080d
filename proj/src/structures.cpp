#include "oddgeo/structures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace oddgeo {

int half_dimension(const Chart& chart) {
  if (chart.dim() % 2 == 0)
    throw InputError("structures need an odd-dimensional chart, got dimension " + std::to_string(chart.dim()));
  return (chart.dim() - 1) / 2;
}

bool ClassificationReport::has(std::string_view l) const {
  return std::find(labels.begin(), labels.end(), l) != labels.end();
}

namespace {

template <Variance V>
void check_shape(const Antisym<V, Expr>& a, const Chart& chart, int degree, const char* what) {
  if (a.dim() != chart.dim() || a.degree() != degree)
    throw InputError(std::string(what) + " must have degree " + std::to_string(degree) + " on the chart");
}

// Smallest over the samples of the largest component of a ^ b^k.
template <Variance V>
double min_top_norm(const Antisym<V, Expr>& a, const Antisym<V, Expr>& b, int k, const Sampler& s,
                    const Point** worst) {
  auto av = sample(a, s);
  auto bv = sample(b, s);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < av.size(); ++i) {
    double v = max_abs(wedge(av[i], wedge_power(bv[i], k)));
    if (v < best) {
      best = v;
      if (worst) *worst = &s.points()[i];
    }
  }
  return best;
}

template <Variance V>
int detect_half_rank(const Antisym<V, Expr>& b, const Sampler& s, const char* name) {
  RankInfo info = constant_rank(b, s);
  if (!info.constant) {
    auto [lo, hi] = std::minmax_element(info.per_sample.begin(), info.per_sample.end());
    throw InvariantError(std::string("rank of ") + name + " is not constant over the samples (between " +
                         std::to_string(*lo) + " and " + std::to_string(*hi) + ")");
  }
  return info.rank / 2;
}

void add_label(ClassificationReport& rep, const char* l) {
  if (!rep.has(l)) rep.labels.emplace_back(l);
}

void finish(ClassificationReport& rep, const Sampler& s, double tol) {
  std::sort(rep.labels.begin(), rep.labels.end());
  rep.seed = s.seed();
  rep.samples = s.count();
  rep.tol = tol;
}

template <Variance V>
double zero_residual(const Antisym<V, Expr>& a, const Sampler& s, double tol) {
  ResidualCheck c;
  c.add_zero(a);
  return c.run(s, tol).residual;
}

template <Variance V>
double diff_residual(const Antisym<V, Expr>& a, const Antisym<V, Expr>& b, const Sampler& s, double tol) {
  return compare(a, b, s, tol).residual;
}

}  // namespace

CovariantPair make_covariant_pair(const Chart& chart, KForm omega, KForm Omega, const Sampler& s, double tol) {
  CovariantPair p{chart, std::move(omega), std::move(Omega), half_dimension(chart), 0};
  check_shape(p.omega, chart, 1, "omega");
  check_shape(p.Omega, chart, 2, "Omega");
  if (!(s.chart() == chart)) throw InputError("sampler lives on a different chart");
  p.r = detect_half_rank(p.Omega, s, "Omega");
  const Point* at = nullptr;
  double m = min_top_norm(p.omega, p.Omega, p.r, s, &at);
  if (!(m > tol))
    throw InvariantError("omega ^ Omega^" + std::to_string(p.r) + " vanishes at " + describe_point(*at));
  return p;
}

ContravariantPair make_contravariant_pair(const Chart& chart, KVector E, KVector Lambda, const Sampler& s,
                                          double tol) {
  ContravariantPair p{chart, std::move(E), std::move(Lambda), half_dimension(chart), 0};
  check_shape(p.E, chart, 1, "E");
  check_shape(p.Lambda, chart, 2, "Lambda");
  if (!(s.chart() == chart)) throw InputError("sampler lives on a different chart");
  if (p.E.is_zero()) throw InvariantError("E vanishes identically; E = 0 pairs are not accepted");
  if (p.Lambda.is_zero()) throw InvariantError("Lambda vanishes identically; Lambda = 0 pairs are not accepted");
  p.s = detect_half_rank(p.Lambda, s, "Lambda");
  const Point* at = nullptr;
  double m = min_top_norm(p.E, p.Lambda, p.s, s, &at);
  if (!(m > tol))
    throw InvariantError("E ^ Lambda^" + std::to_string(p.s) + " vanishes at " + describe_point(*at));
  return p;
}

ClassificationReport classify_covariant(const CovariantPair& p, const Sampler& s, double tol) {
  ClassificationReport rep;
  rep.rank_name = "r";
  rep.rank = p.r;
  rep.n = p.n;
  KForm domega = ext_d(p.omega);
  double dOmega = zero_residual(ext_d(p.Omega), s, tol);
  double dom = zero_residual(domega, s, tol);
  double contact = diff_residual(p.Omega, domega, s, tol);
  rep.residuals["d(Omega)"] = dOmega;
  rep.residuals["d(omega)"] = dom;
  rep.residuals["Omega - d(omega)"] = contact;
  rep.residuals["min |omega ^ Omega^r|"] = min_top_norm(p.omega, p.Omega, p.r, s, nullptr);
  if (is_regular(p)) {
    add_label(rep, label::kPreCosymplectic);
    if (dOmega <= tol) add_label(rep, label::kAlmostCosymplecticContact);
    if (dOmega <= tol && dom <= tol) add_label(rep, label::kCosymplectic);
    if (contact <= tol) add_label(rep, label::kContact);
    // contact and cosymplectic structures are almost-cosymplectic-contact
    if (rep.has(label::kContact) || rep.has(label::kCosymplectic)) add_label(rep, label::kAlmostCosymplecticContact);
  } else {
    rep.notes.push_back("pair is not regular (r = " + std::to_string(p.r) + " < n = " + std::to_string(p.n) +
                        "); no structure label applies");
  }
  finish(rep, s, tol);
  return rep;
}

KVector acpj_rhs_E_Lambda(const ACPJTriple& t) {
  return -wedge(t.E, sharp(t.Lambda, lie_derivative(t.E, t.omega)));
}

KVector acpj_rhs_Lambda_Lambda(const ACPJTriple& t) {
  if (t.E.dim() < 3) return KVector(t.E.dim(), std::min(3, t.E.dim()));
  return Expr(2.0) * wedge(t.E, push_two_form(t.Lambda, ext_d(t.omega)));
}

ClassificationReport classify_contravariant(const ContravariantPair& p, const std::optional<KForm>& omega,
                                            const Sampler& s, double tol) {
  ClassificationReport rep;
  rep.rank_name = "s";
  rep.rank = p.s;
  rep.n = p.n;
  KVector el = schouten(p.E, p.Lambda);
  KVector ll = schouten(p.Lambda, p.Lambda);
  double r_el = zero_residual(el, s, tol);
  double r_ll = zero_residual(ll, s, tol);
  double r_jac = diff_residual(ll, Expr(-2.0) * wedge(p.E, p.Lambda), s, tol);
  rep.residuals["[E,Lambda]"] = r_el;
  rep.residuals["[Lambda,Lambda]"] = r_ll;
  rep.residuals["[Lambda,Lambda] + 2 E ^ Lambda"] = r_jac;
  rep.residuals["min |E ^ Lambda^s|"] = min_top_norm(p.E, p.Lambda, p.s, s, nullptr);

  // Every contravariant pair with E, Lambda != 0 is pre-coPoisson.
  add_label(rep, label::kPreCoPoisson);
  if (r_el <= tol && r_ll <= tol) add_label(rep, label::kCoPoisson);
  if (r_el <= tol && r_jac <= tol) add_label(rep, label::kJacobi);

  std::optional<KForm> w = omega;
  if (!w) {
    if (is_regular(p)) {
      w = fundamental_one_form(p);
      rep.notes.push_back("omega taken as the fundamental 1-form of the regular pair");
    } else {
      rep.notes.push_back("pair is not regular (s = " + std::to_string(p.s) + " < n = " + std::to_string(p.n) +
                          ") and no omega was given; almost-coPoisson-Jacobi test skipped");
    }
  }
  if (w) {
    check_shape(*w, p.chart, 1, "omega");
    ACPJTriple t{p.E, p.Lambda, *w};
    double r_iE = diff_residual(KForm::scalar(p.E.dim(), pairing(p.E, *w)), KForm::scalar(p.E.dim(), Expr(1.0)), s,
                                tol);
    double r_iw = zero_residual(sharp(p.Lambda, *w), s, tol);
    double r_a1 = diff_residual(el, acpj_rhs_E_Lambda(t), s, tol);
    double r_a2 = diff_residual(ll, acpj_rhs_Lambda_Lambda(t), s, tol);
    rep.residuals["i_E omega - 1"] = r_iE;
    rep.residuals["i_omega Lambda"] = r_iw;
    rep.residuals["[E,Lambda] + E ^ Lambda#(L_E omega)"] = r_a1;
    rep.residuals["[Lambda,Lambda] - 2 E ^ (Lambda# x Lambda#)(d omega)"] = r_a2;
    if (r_iE <= tol && r_iw <= tol && r_a1 <= tol && r_a2 <= tol) add_label(rep, label::kAlmostCoPoissonJacobi);
  }
  finish(rep, s, tol);
  return rep;
}

// ---------------------------------------------------------------------------
// Symbolic linear algebra

namespace {

class MinorTable {
 public:
  explicit MinorTable(const SymMatrix& m) : m_(m), n_(static_cast<int>(m.size())) {}

  // Determinant of the submatrix on the given row and column sets.
  Expr det(unsigned rows, unsigned cols) {
    if (rows == 0) return Expr(1.0);
    std::uint64_t key = (static_cast<std::uint64_t>(rows) << 32) | cols;
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    int row = __builtin_ctz(rows);
    unsigned rest = rows & (rows - 1);
    Expr sum;
    int sign = 1;
    for (int c = 0; c < n_; ++c) {
      if (!(cols & (1u << c))) continue;
      const Expr& a = m_[row][c];
      if (!a.is_zero()) {
        Expr minor = det(rest, cols & ~(1u << c));
        if (!minor.is_zero()) sum += sign > 0 ? a * minor : -(a * minor);
      }
      sign = -sign;
    }
    memo_.emplace(key, sum);
    return sum;
  }

 private:
  const SymMatrix& m_;
  int n_;
  std::unordered_map<std::uint64_t, Expr> memo_;
};

void check_square(const SymMatrix& m) {
  for (const auto& row : m)
    if (row.size() != m.size()) throw InputError("matrix is not square");
  if (m.size() > 16) throw InputError("symbolic determinant limited to 16x16");
}

}  // namespace

Expr symbolic_det(const SymMatrix& m) {
  check_square(m);
  unsigned all = (1u << m.size()) - 1;
  return MinorTable(m).det(all, all);
}

SymMatrix symbolic_adjugate(const SymMatrix& m) {
  check_square(m);
  const int n = static_cast<int>(m.size());
  unsigned all = (1u << n) - 1;
  MinorTable table(m);
  SymMatrix adj(n, std::vector<Expr>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      // adj(j, i) = (-1)^{i+j} det(m without row i and column j)
      Expr minor = table.det(all & ~(1u << i), all & ~(1u << j));
      adj[j][i] = (i + j) % 2 == 0 ? minor : -minor;
    }
  return adj;
}

namespace {
template <Variance V>
SymMatrix matrix_of(const Antisym<V, Expr>& b) {
  if (b.degree() != 2) throw DegreeError("matrix of a non-bivalent tensor");
  const int n = b.dim();
  SymMatrix m(n, std::vector<Expr>(n));
  for (const auto& [idx, c] : b.terms()) {
    m[idx[0]][idx[1]] = c;
    m[idx[1]][idx[0]] = -c;
  }
  return m;
}

template <Variance V>
std::vector<Expr> vector_of(const Antisym<V, Expr>& a) {
  std::vector<Expr> v(a.dim());
  for (const auto& [idx, c] : a.terms()) v[idx[0]] = c;
  return v;
}

// Given the antisymmetric matrix A of a bivalent tensor and the vector w of a
// degree-1 tensor of the same variance, returns (v, B) with
//   M = A^T + w w^T,  v = M^{-1} w,  B = -M^{-T} A M^{-1}.
template <Variance V, Variance W>
std::pair<Antisym<W, Expr>, Antisym<W, Expr>> symbolic_dual(const Antisym<V, Expr>& two,
                                                           const Antisym<V, Expr>& one) {
  const int n = two.dim();
  SymMatrix a = matrix_of(two);
  std::vector<Expr> w = vector_of(one);
  SymMatrix m(n, std::vector<Expr>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m[i][j] = a[j][i] + w[i] * w[j];
  SymMatrix adj = symbolic_adjugate(m);
  Expr det;
  for (int j = 0; j < n; ++j) det += m[0][j] * adj[j][0];
  Expr inv = Expr(1.0) / det;
  SymMatrix minv(n, std::vector<Expr>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) minv[i][j] = adj[i][j] * inv;

  Antisym<W, Expr> v(n, 1);
  for (int i = 0; i < n; ++i) {
    Expr sum;
    for (int j = 0; j < n; ++j) sum += minv[i][j] * w[j];
    v.add({i}, sum);
  }
  // (A M^{-1})(i, b)
  SymMatrix am(n, std::vector<Expr>(n));
  for (int i = 0; i < n; ++i)
    for (int b = 0; b < n; ++b) {
      Expr sum;
      for (int j = 0; j < n; ++j)
        if (!a[i][j].is_zero()) sum += a[i][j] * minv[j][b];
      am[i][b] = sum;
    }
  Antisym<W, Expr> big(n, 2);
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) {
      Expr sum;
      for (int i = 0; i < n; ++i) sum += minv[i][x] * am[i][y];
      big.add({x, y}, -sum);
    }
  return {v, big};
}

// Numeric counterpart on Eigen types.
struct NumericSolve {
  Eigen::VectorXd v;
  Eigen::MatrixXd big;
};

NumericSolve numeric_dual(const Eigen::MatrixXd& a, const Eigen::VectorXd& w, const Point& at) {
  Eigen::MatrixXd m = a.transpose() + w * w.transpose();
  if (matrix_rank(m) < m.rows())
    throw InvariantError("singular duality system at " + describe_point(at) + "; the pair is not regular there");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  Eigen::MatrixXd minv = lu.inverse();
  return {minv * w, -minv.transpose() * a * minv};
}

double worst_entry(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double r = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      double x = relative_residual(a(i, j), b(i, j));
      if (std::isnan(x) || x > r) r = x;
    }
  return r;
}

void keep_worst(double& into, double v) {
  if (std::isnan(v) || v > into) into = v;
}

}  // namespace

SymMatrix sym_matrix(const KForm& b) { return matrix_of(b); }
SymMatrix sym_matrix(const KVector& b) { return matrix_of(b); }

double DualityResiduals::max() const {
  double m = 0.0;
  for (double v : {iE_Omega, i_omega_Lambda, iE_omega, sharp_flat, flat_sharp}) keep_worst(m, v);
  return m;
}

DualityResiduals duality_residuals(const NumForm& omega, const NumForm& Omega, const NumVector& E,
                                   const NumVector& Lambda) {
  Eigen::MatrixXd a = to_matrix(Omega);
  Eigen::MatrixXd l = to_matrix(Lambda);
  Eigen::VectorXd w = to_vector(omega);
  Eigen::VectorXd e = to_vector(E);
  const auto n = a.rows();
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  DualityResiduals r;
  r.iE_Omega = worst_entry(e.transpose() * a, Eigen::MatrixXd::Zero(1, n));
  r.i_omega_Lambda = worst_entry(w.transpose() * l, Eigen::MatrixXd::Zero(1, n));
  r.iE_omega = relative_residual(w.dot(e), 1.0);
  // Omega_b X = A^T X and Lambda# alpha = L^T alpha in components.
  r.sharp_flat = worst_entry(l.transpose() * a.transpose(), id - e * w.transpose());
  r.flat_sharp = worst_entry(a.transpose() * l.transpose(), id - w * e.transpose());
  return r;
}

DualityResiduals duality_residuals(const std::vector<NumForm>& omega, const std::vector<NumForm>& Omega,
                                   const std::vector<NumVector>& E, const std::vector<NumVector>& Lambda) {
  DualityResiduals worst;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    DualityResiduals r = duality_residuals(omega[i], Omega[i], E[i], Lambda[i]);
    keep_worst(worst.iE_Omega, r.iE_Omega);
    keep_worst(worst.i_omega_Lambda, r.i_omega_Lambda);
    keep_worst(worst.iE_omega, r.iE_omega);
    keep_worst(worst.sharp_flat, r.sharp_flat);
    keep_worst(worst.flat_sharp, r.flat_sharp);
  }
  return worst;
}

std::pair<NumVector, NumVector> dual_at(const NumForm& omega, const NumForm& Omega) {
  Eigen::MatrixXd a = to_matrix(Omega);
  Eigen::VectorXd w = to_vector(omega);
  Eigen::MatrixXd m = a.transpose() + w * w.transpose();
  if (matrix_rank(m) < m.rows()) throw InvariantError("singular duality system; the pair is not regular here");
  Eigen::MatrixXd minv = Eigen::FullPivLU<Eigen::MatrixXd>(m).inverse();
  return {from_vector<Variance::Contravariant>(minv * w),
          from_matrix<Variance::Contravariant>(-minv.transpose() * a * minv)};
}

std::pair<NumForm, NumForm> dual_at(const NumVector& E, const NumVector& Lambda) {
  Eigen::MatrixXd a = to_matrix(Lambda);
  Eigen::VectorXd e = to_vector(E);
  Eigen::MatrixXd m = a.transpose() + e * e.transpose();
  if (matrix_rank(m) < m.rows()) throw InvariantError("singular duality system; the pair is not regular here");
  Eigen::MatrixXd minv = Eigen::FullPivLU<Eigen::MatrixXd>(m).inverse();
  return {from_vector<Variance::Covariant>(minv * e), from_matrix<Variance::Covariant>(-minv.transpose() * a * minv)};
}

NumericContravariant numeric_dual_of_covariant(const CovariantPair& p, const Sampler& s) {
  if (!is_regular(p))
    throw InvariantError("covariant pair is not regular (r = " + std::to_string(p.r) + " < n = " +
                         std::to_string(p.n) + "); no dual exists");
  auto wv = sample(p.omega, s);
  auto av = sample(p.Omega, s);
  NumericContravariant out;
  for (std::size_t i = 0; i < wv.size(); ++i) {
    NumericSolve sol = numeric_dual(to_matrix(av[i]), to_vector(wv[i]), s.points()[i]);
    out.E.push_back(from_vector<Variance::Contravariant>(sol.v));
    out.Lambda.push_back(from_matrix<Variance::Contravariant>(sol.big));
  }
  return out;
}

NumericCovariant numeric_dual_of_contravariant(const ContravariantPair& p, const Sampler& s) {
  if (!is_regular(p))
    throw InvariantError("contravariant pair is not regular (s = " + std::to_string(p.s) + " < n = " +
                         std::to_string(p.n) + "); no dual exists");
  auto ev = sample(p.E, s);
  auto lv = sample(p.Lambda, s);
  NumericCovariant out;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    NumericSolve sol = numeric_dual(to_matrix(lv[i]), to_vector(ev[i]), s.points()[i]);
    out.omega.push_back(from_vector<Variance::Covariant>(sol.v));
    out.Omega.push_back(from_matrix<Variance::Covariant>(sol.big));
  }
  return out;
}

CovariantDual dual_of_covariant(const CovariantPair& p, const Sampler& s, double tol) {
  numeric_dual_of_covariant(p, s);  // regularity and per-sample solvability
  auto [e, lambda] = symbolic_dual<Variance::Covariant, Variance::Contravariant>(p.Omega, p.omega);
  DualityResiduals res = duality_residuals(sample(p.omega, s), sample(p.Omega, s), sample(e, s), sample(lambda, s));
  if (!(res.max() <= tol))
    throw InvariantError("computed dual fails the duality axioms (residual " + format_number(res.max()) + ")");
  ContravariantPair pair{p.chart, std::move(e), std::move(lambda), p.n, p.n};
  return {std::move(pair), p.omega, res};
}

ContravariantDual dual_of_contravariant(const ContravariantPair& p, const Sampler& s, double tol) {
  numeric_dual_of_contravariant(p, s);
  auto [w, big] = symbolic_dual<Variance::Contravariant, Variance::Covariant>(p.Lambda, p.E);
  DualityResiduals res = duality_residuals(sample(w, s), sample(big, s), sample(p.E, s), sample(p.Lambda, s));
  if (!(res.max() <= tol))
    throw InvariantError("computed dual fails the duality axioms (residual " + format_number(res.max()) + ")");
  CovariantPair pair{p.chart, std::move(w), std::move(big), p.n, p.n};
  return {std::move(pair), res};
}

KForm fundamental_one_form(const ContravariantPair& p) {
  if (!is_regular(p))
    throw InvariantError("fundamental 1-form needs a regular pair (s = " + std::to_string(p.s) + " < n = " +
                         std::to_string(p.n) + "); it is not unique otherwise");
  return symbolic_dual<Variance::Contravariant, Variance::Covariant>(p.Lambda, p.E).first;
}

KForm push_bivector(const KForm& Omega, const KVector& Lambda) {
  if (Omega.degree() != 2 || Lambda.degree() != 2) throw DegreeError("push_bivector needs degree 2 inputs");
  const int n = Omega.dim();
  std::vector<KForm> flats;
  for (int i = 0; i < n; ++i) flats.push_back(flat(Omega, KVector::basis(n, {i})));
  KForm r(n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) r.add({i, j}, interior(wedge(flats[i], flats[j]), Lambda).value());
  return r;
}

// ---------------------------------------------------------------------------
// Identity checks

namespace {

KForm random_closed_one_form(int dim, std::mt19937_64& rng) {
  return differential(random_polynomial(dim, 3, rng), dim);
}

KForm random_one_form(int dim, std::mt19937_64& rng) {
  KForm a(dim, 1);
  for (int i = 0; i < dim; ++i) a.add({i}, random_polynomial(dim, 2, rng));
  return a;
}

KVector random_vector(int dim, std::mt19937_64& rng) {
  KVector a(dim, 1);
  for (int i = 0; i < dim; ++i) a.add({i}, random_polynomial(dim, 2, rng));
  return a;
}

}  // namespace

double check_dOmega_decomposition(const CovariantPair& p, const ACPJTriple& dual, const Sampler& s,
                                  std::mt19937_64& rng, int trials) {
  const int n = p.chart.dim();
  if (n < 3) return 0.0;
  const KVector& e = dual.E;
  const KVector& lam = dual.Lambda;
  KForm dOmega = ext_d(p.Omega);
  KVector el = schouten(e, lam);
  KVector ll = schouten(lam, lam);
  KVector lew = sharp(lam, lie_derivative(e, dual.omega));
  KVector two = el + wedge(e, lew);
  KVector three = wedge(e, push_two_form(lam, ext_d(dual.omega))) - Expr(0.5) * ll;
  ResidualCheck check;
  for (int k = 0; k < trials; ++k) {
    KForm a = random_closed_one_form(n, rng);
    KForm b = random_closed_one_form(n, rng);
    KForm c = random_closed_one_form(n, rng);
    Expr f = random_polynomial(n, 2, rng);
    Expr g = random_polynomial(n, 2, rng);
    Expr h = random_polynomial(n, 2, rng);
    KVector x = sharp(lam, a) + f * e;
    KVector y = sharp(lam, b) + g * e;
    KVector z = sharp(lam, c) + h * e;
    Expr lhs = interior(wedge(x, wedge(y, z)), dOmega).value();
    Expr rhs = interior(three, wedge(a, wedge(b, c))).value() + f * interior(two, wedge(b, c)).value() +
               g * interior(two, wedge(c, a)).value() + h * interior(two, wedge(a, b)).value();
    check.add(lhs, rhs);
  }
  return check.run(s).residual;
}

double check_splittings(const CovariantPair& p, const ACPJTriple& dual, const Sampler& s, std::mt19937_64& rng,
                        int trials) {
  const int n = p.chart.dim();
  ResidualCheck check;
  for (int k = 0; k < trials; ++k) {
    KVector x = random_vector(n, rng);
    check.add(x, pairing(x, p.omega) * dual.E + sharp(dual.Lambda, flat(p.Omega, x)));
    KForm a = random_one_form(n, rng);
    check.add(a, pairing(a, dual.E) * p.omega + flat(p.Omega, sharp(dual.Lambda, a)));
  }
  return check.run(s).residual;
}

double check_musical_pushes(const CovariantPair& p, const ACPJTriple& dual, const Sampler& s) {
  ResidualCheck check;
  check.add(push_two_form(dual.Lambda, p.Omega), -dual.Lambda);
  check.add(push_bivector(p.Omega, dual.Lambda), -p.Omega);
  return check.run(s).residual;
}

double check_involutivity(const ACPJTriple& t, const Sampler& s, std::mt19937_64& rng, int trials, bool closed) {
  const int n = t.E.dim();
  const KVector& e = t.E;
  const KVector& lam = t.Lambda;
  KForm lw = lie_derivative(e, t.omega);
  KForm dw = ext_d(t.omega);
  ResidualCheck check;
  auto lam_of = [&](const KForm& a, const KForm& b) { return interior(wedge(a, b), lam).value(); };
  for (int k = 0; k < trials; ++k) {
    KForm a = closed ? random_closed_one_form(n, rng) : random_one_form(n, rng);
    KForm b = closed ? random_closed_one_form(n, rng) : random_one_form(n, rng);
    KVector as = sharp(lam, a);
    KVector bs = sharp(lam, b);
    KForm da = ext_d(a);
    KForm db = ext_d(b);
    Expr ae = pairing(a, e);
    Expr be = pairing(b, e);

    // [E, a#] = (L_E a - a(E) L_E omega)# + Lambda(L_E omega, a) E
    KVector rhs1 = sharp(lam, lie_derivative(e, a) - ae * lw) + lam_of(lw, a) * e;
    check.add(schouten(e, as), rhs1);

    // [a#, b#] = (d Lambda(a,b) + i_a# db - i_b# da + a(E) i_b# d omega - b(E) i_a# d omega)#
    //            - d omega(a#, b#) E
    KForm inner = differential(lam_of(a, b), n) + interior(as, db) - interior(bs, da) + ae * interior(bs, dw) -
                  be * interior(as, dw);
    KVector rhs2 = sharp(lam, inner) - interior(wedge(as, bs), dw).value() * e;
    check.add(schouten(as, bs), rhs2);
  }
  return check.run(s).residual;
}

}  // namespace oddgeo
