#include "oddgeo/spacetime.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace oddgeo {

std::string to_string(SpacetimeKind k) { return k == SpacetimeKind::Galilei ? "galilei" : "einstein"; }

Chart phase_chart(std::vector<std::pair<std::string, double>> constants) {
  return Chart({"x0", "x1", "x2", "x3", "x10", "x20", "x30"}, std::move(constants));
}

namespace {

Expr v(int i) { return Expr::coord(vel(i)); }
Expr lit(double d) { return Expr(d); }

KVector dvec(int a) { return KVector::basis(kPhaseDim, {a}); }
KForm dform(int a) { return KForm::basis(kPhaseDim, {a}); }

Box phase_box(double vmax) {
  Box b(kPhaseDim, {-1.0, 1.0});
  for (int i = 1; i <= 3; ++i) b[vel(i)] = {-vmax, vmax};
  return b;
}

// Values of a matrix of expressions at every sample.
std::vector<Eigen::MatrixXd> sample_matrix(const SymMatrix& m, const Sampler& s) {
  std::vector<Expr> flat;
  for (const auto& row : m) flat.insert(flat.end(), row.begin(), row.end());
  std::vector<Eigen::MatrixXd> out;
  const int r = static_cast<int>(m.size());
  const int c = r ? static_cast<int>(m[0].size()) : 0;
  for (const auto& vals : sample_values(flat, s)) {
    Eigen::MatrixXd a(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) a(i, j) = vals[i * c + j];
    out.push_back(a);
  }
  return out;
}

void check_shape(const SymMatrix& m, std::size_t n, const std::string& what) {
  if (m.size() != n) throw InputError(what + " must be " + std::to_string(n) + "x" + std::to_string(n));
  for (const auto& row : m)
    if (row.size() != n) throw InputError(what + " must be " + std::to_string(n) + "x" + std::to_string(n));
}

void check_scales(const Scales& sc) {
  if (!(sc.m > 0 && sc.hbar > 0 && sc.c > 0)) throw InputError("m, hbar and c must be positive");
}

// |a - b| pairs for every ordered entry; `sign` +1 symmetric, -1 antisymmetric.
void check_symmetry(const SymMatrix& m, double sign, const Sampler& s, const std::string& what) {
  ResidualCheck c;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i; j < m.size(); ++j) c.add(m[i][j], Expr(sign) * m[j][i]);
  auto r = c.run(s, 0.0);
  if (!r.equal) throw InputError(what + (sign > 0 ? " is not symmetric" : " is not antisymmetric"));
}

// Christoffel-convention coefficient C^rho_{mu nu} = -K_mu^rho_nu.
Expr chr(const LinearConnection& k, int rho, int mu, int nu) { return -k(rho, mu, nu); }

}  // namespace

Expr timelike_form(const SymMatrix& g) {
  Expr q = g[0][0];
  for (int j = 1; j <= 3; ++j) q += lit(2.0) * g[0][j] * v(j);
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) q += g[i][j] * v(i) * v(j);
  return q;
}

Sampler galilei_sampler(const Chart& chart, std::uint64_t seed, int count) {
  return Sampler(chart, phase_box(1.0), std::nullopt, seed, count);
}

Sampler einstein_sampler(const Chart& chart, const EinsteinInput& in, std::uint64_t seed, int count, double vmax) {
  ScalarField constraint(chart, timelike_form(in.g) + lit(0.05));
  return Sampler(chart, phase_box(vmax), constraint, seed, count);
}

void validate(const GalileiInput& in, const Sampler& s) {
  check_shape(in.g, 3, "spatial metric g");
  check_shape(in.phi, 4, "phi");
  check_scales(in.scales);
  check_symmetry(in.g, 1.0, s, "spatial metric g");
  check_symmetry(in.phi, -1.0, s, "phi");
  auto mats = sample_matrix(in.g, s);
  for (std::size_t k = 0; k < mats.size(); ++k) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mats[k]);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw InputError("spatial metric is not positive definite at " + describe_point(s.points()[k]));
  }
}

void validate(const EinsteinInput& in, const Sampler& s) {
  check_shape(in.g, 4, "metric g");
  check_scales(in.scales);
  check_symmetry(in.g, 1.0, s, "metric g");
  auto mats = sample_matrix(in.g, s);
  for (std::size_t k = 0; k < mats.size(); ++k) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mats[k]);
    const auto& ev = es.eigenvalues();
    int neg = 0, pos = 0;
    for (int i = 0; i < ev.size(); ++i) (ev(i) < 0 ? neg : pos) += std::abs(ev(i)) > 1e-12 ? 1 : 0;
    if (neg != 1 || pos != 3)
      throw InputError("metric does not have signature (-+++) at " + describe_point(s.points()[k]));
  }
}

SymMatrix inverse(const SymMatrix& g) {
  Expr det = symbolic_det(g);
  SymMatrix adj = symbolic_adjugate(g);
  for (auto& row : adj)
    for (auto& e : row) e = e / det;
  return adj;
}

LinearConnection galilei_connection(const GalileiInput& in) {
  SymMatrix gi = inverse(in.g);  // spatial indices 0..2 stand for 1..3
  auto g = [&](int i, int j) -> const Expr& { return in.g[i - 1][j - 1]; };
  auto ginv = [&](int i, int j) -> const Expr& { return gi[i - 1][j - 1]; };
  LinearConnection k;
  for (int i = 1; i <= 3; ++i) {
    Expr k00;
    for (int j = 1; j <= 3; ++j) k00 -= ginv(i, j) * lit(2.0) * in.phi[0][j];
    k.K[i][0][0] = k00;
    for (int h = 1; h <= 3; ++h) {
      Expr k0h;
      for (int j = 1; j <= 3; ++j) k0h -= lit(0.5) * ginv(i, j) * (lit(2.0) * in.phi[h][j] + diff(g(h, j), 0));
      k.K[i][0][h] = k0h;
      k.K[i][h][0] = k0h;
      for (int kk = 1; kk <= 3; ++kk) {
        Expr khk;
        for (int j = 1; j <= 3; ++j)
          khk -= lit(0.5) * ginv(i, j) * (diff(g(j, kk), h) + diff(g(j, h), kk) - diff(g(h, kk), j));
        k.K[i][kk][h] = khk;
      }
    }
  }
  return k;
}

LinearConnection levi_civita(const SymMatrix& g) {
  SymMatrix gi = inverse(g);
  LinearConnection k;
  for (int nu = 0; nu < 4; ++nu)
    for (int l = 0; l < 4; ++l)
      for (int m = l; m < 4; ++m) {
        Expr c;
        for (int s = 0; s < 4; ++s)
          c += lit(0.5) * gi[nu][s] * (diff(g[s][l], m) + diff(g[s][m], l) - diff(g[l][m], s));
        k.K[nu][l][m] = -c;
        k.K[nu][m][l] = -c;
      }
  return k;
}

Expr curvature(const LinearConnection& k, int rho, int sigma, int mu, int nu) {
  Expr r = diff(chr(k, rho, nu, sigma), mu) - diff(chr(k, rho, mu, sigma), nu);
  for (int q = 0; q < 4; ++q)
    r += chr(k, rho, mu, q) * chr(k, q, nu, sigma) - chr(k, rho, nu, q) * chr(k, q, mu, sigma);
  return r;
}

ConnectionDiagnostics connection_diagnostics(const LinearConnection& k, const SymMatrix& g, SpacetimeKind kind,
                                             const Sampler& s) {
  ConnectionDiagnostics d;
  {
    ResidualCheck c;
    for (int nu = 0; nu < 4; ++nu)
      for (int l = 0; l < 4; ++l)
        for (int m = l + 1; m < 4; ++m) c.add(k(nu, l, m), k(nu, m, l));
    d.torsion = c.run(s).residual;
  }
  if (kind == SpacetimeKind::Galilei) {
    auto gs = [&](int i, int j) -> const Expr& { return g[i - 1][j - 1]; };
    ResidualCheck metric, time;
    for (int l = 0; l < 4; ++l) {
      for (int m = 0; m < 4; ++m) time.add(k(0, l, m), Expr());
      for (int i = 1; i <= 3; ++i)
        for (int j = i; j <= 3; ++j) {
          Expr e = diff(gs(i, j), l);
          for (int p = 1; p <= 3; ++p) e += k(p, l, i) * gs(p, j) + k(p, l, j) * gs(i, p);
          metric.add(e, Expr());
        }
    }
    d.metric = metric.run(s).residual;
    d.time = time.run(s).residual;
    // R_l^i_m^j = g^{jp} R^i_{l p m}; the condition is symmetry under (l,i) <-> (m,j).
    SymMatrix gi = inverse(g);
    auto raised = [&](int l, int i, int m, int j) {
      Expr e;
      for (int p = 1; p <= 3; ++p) e += gi[j - 1][p - 1] * curvature(k, i, l, p, m);
      return e;
    };
    ResidualCheck sym;
    for (int l = 0; l < 4; ++l)
      for (int m = 0; m < 4; ++m)
        for (int i = 1; i <= 3; ++i)
          for (int j = 1; j <= 3; ++j)
            if (l * 4 + i < m * 4 + j) sym.add(raised(l, i, m, j), raised(m, j, l, i));
    d.curvature_symmetry = sym.run(s).residual;
  } else {
    ResidualCheck metric;
    for (int l = 0; l < 4; ++l)
      for (int a = 0; a < 4; ++a)
        for (int b = a; b < 4; ++b) {
          Expr e = diff(g[a][b], l);
          for (int p = 0; p < 4; ++p) e += k(p, l, a) * g[p][b] + k(p, l, b) * g[a][p];
          metric.add(e, Expr());
        }
    d.metric = metric.run(s).residual;
  }
  return d;
}

PhaseConnection phase_connection(const LinearConnection& k, SpacetimeKind kind) {
  PhaseConnection gam;
  for (int i = 1; i <= 3; ++i)
    for (int l = 0; l < 4; ++l) {
      Expr e = k(i, l, 0);
      for (int p = 1; p <= 3; ++p) e += k(i, l, p) * v(p);
      if (kind == SpacetimeKind::Einstein) {
        Expr t = k(0, l, 0);
        for (int p = 1; p <= 3; ++p) t += k(0, l, p) * v(p);
        e -= v(i) * t;
      }
      gam[i - 1][l] = e;
    }
  return gam;
}

TangentValuedOneForm phase_connection_form(const PhaseConnection& gamma) {
  TangentValuedOneForm a(kPhaseDim);
  for (int l = 0; l < 4; ++l) {
    a.m[l][l] = lit(1.0);
    for (int i = 1; i <= 3; ++i) a.m[vel(i)][l] = gamma[i - 1][l];
  }
  return a;
}

ContactObjects contact_objects(const SymMatrix& g, SpacetimeKind kind, const Scales& sc) {
  ContactObjects co;
  // dx^lambda/dx^0 along the jet: (1, x^i_0)
  std::array<Expr, 4> u{lit(1.0), v(1), v(2), v(3)};
  co.dee = KVector(kPhaseDim, 1);
  co.time = KForm(kPhaseDim, 1);
  if (kind == SpacetimeKind::Galilei) {
    co.alpha0 = lit(1.0);
    for (int l = 0; l < 4; ++l) co.dee.add({l}, u[l]);
    co.time.add({0}, lit(1.0));
  } else {
    co.alpha0 = lit(1.0) / sqrt(-timelike_form(g));
    Expr s = lit(sc.c) * co.alpha0;
    for (int l = 0; l < 4; ++l) co.dee.add({l}, s * u[l]);
    for (int l = 0; l < 4; ++l) {
      Expr e = g[0][l];
      for (int i = 1; i <= 3; ++i) e += g[i][l] * v(i);
      co.time.add({l}, -(co.alpha0 / lit(sc.c)) * e);
    }
  }
  co.theta.assign(4, std::vector<Expr>(4));
  for (int n = 0; n < 4; ++n)
    for (int l = 0; l < 4; ++l)
      co.theta[n][l] = lit(n == l ? 1.0 : 0.0) - co.dee.coeff({n}) * co.time.coeff({l});
  return co;
}

KVector dynamical_connection(const PhaseConnection& gamma, const Expr& scale) {
  KVector r(kPhaseDim, 1);
  r.add({0}, scale);
  for (int i = 1; i <= 3; ++i) {
    r.add({i}, scale * v(i));
    Expr gi = gamma[i - 1][0];
    for (int j = 1; j <= 3; ++j) gi += gamma[i - 1][j] * v(j);
    r.add({vel(i)}, scale * gi);
  }
  return r;
}

namespace {

// d^i_0 - Gamma_lambda^i d^lambda
KForm nu_gamma(const PhaseConnection& gam, int i) {
  KForm f = dform(vel(i));
  for (int l = 0; l < 4; ++l) f -= gam[i - 1][l] * dform(l);
  return f;
}

// d_lambda + Gamma_lambda^i d^0_i
KVector horizontal(const PhaseConnection& gam, int l) {
  KVector x = dvec(l);
  for (int i = 1; i <= 3; ++i) x += gam[i - 1][l] * dvec(vel(i));
  return x;
}

void fill_unscaled(PhaseStructures& p) {
  const Scales& sc = p.scales;
  const double mc2 = sc.m * sc.c * sc.c / sc.hbar;
  p.omega_u = lit(-mc2) * p.contact.time;
  p.Omega_u = lit(sc.m / sc.hbar) * p.Omega;
  p.E_u = lit(-1.0 / mc2) * p.gamma;
  p.Lambda_u = lit(sc.hbar / sc.m) * p.Lambda;
}

}  // namespace

PhaseStructures phase_structures(const GalileiInput& in) {
  PhaseStructures p;
  p.kind = SpacetimeKind::Galilei;
  p.chart = in.chart;
  p.scales = in.scales;
  p.g = in.g;
  p.K = galilei_connection(in);
  p.Gamma = phase_connection(p.K, p.kind);
  p.contact = contact_objects(in.g, p.kind, in.scales);
  p.gamma = dynamical_connection(p.Gamma, lit(1.0));
  SymMatrix gi = inverse(in.g);
  p.Omega = KForm(kPhaseDim, 2);
  p.Lambda = KVector(kPhaseDim, 2);
  for (int i = 1; i <= 3; ++i) {
    KForm ni = nu_gamma(p.Gamma, i);
    KVector hi = horizontal(p.Gamma, i);
    for (int j = 1; j <= 3; ++j) {
      p.Omega += in.g[i - 1][j - 1] * wedge(ni, dform(j) - v(j) * dform(0));
      p.Lambda += gi[i - 1][j - 1] * wedge(hi, dvec(vel(j)));
    }
  }
  fill_unscaled(p);
  return p;
}

PhaseStructures phase_structures(const EinsteinInput& in) {
  PhaseStructures p;
  p.kind = SpacetimeKind::Einstein;
  p.chart = in.chart;
  p.scales = in.scales;
  p.g = in.g;
  const double c = in.scales.c;
  p.K = levi_civita(in.g);
  p.Gamma = phase_connection(p.K, p.kind);
  p.contact = contact_objects(in.g, p.kind, in.scales);
  Expr ca = lit(c) * p.contact.alpha0;
  p.gamma = dynamical_connection(p.Gamma, ca);
  const KForm& tau = p.contact.time;
  SymMatrix gi = inverse(in.g);
  p.Omega = KForm(kPhaseDim, 2);
  p.Lambda = KVector(kPhaseDim, 2);
  for (int i = 1; i <= 3; ++i) {
    KForm ni = nu_gamma(p.Gamma, i);
    for (int m = 0; m < 4; ++m) {
      Expr coef = ca * (in.g[i][m] + lit(c * c) * tau.coeff({i}) * tau.coeff({m}));
      p.Omega += coef * wedge(ni, dform(m));
    }
  }
  for (int j = 1; j <= 3; ++j)
    for (int l = 0; l < 4; ++l) {
      Expr coef = (gi[j][l] - v(j) * gi[0][l]) / ca;
      p.Lambda += coef * wedge(horizontal(p.Gamma, l), dvec(vel(j)));
    }
  fill_unscaled(p);
  return p;
}

KForm lie_gamma_tau_components(const PhaseStructures& p) {
  // With A(d_lambda) = d_lambda + Gamma_lambda^i d^0_i and A(d^0_i) = 0:
  //   (i_Gamma b)(d_l, d_m)   = 2 b_lm + Gamma_l^i b_{0i,m} + Gamma_m^i b_{l,0i}
  //   (i_Gamma b)(d_l, d^0_j) = b_{l,0j} + Gamma_l^i b_{0i,0j}
  // for b = d tau; tau has no velocity components, so i_Gamma tau = tau.
  const KForm& tau = p.contact.time;
  auto b = [&](int a, int c) { return diff(tau.coeff({c}), a) - diff(tau.coeff({a}), c); };
  KForm r(kPhaseDim, 2);
  for (int l = 0; l < 4; ++l) {
    for (int m = l + 1; m < 4; ++m) {
      Expr e = lit(2.0) * b(l, m);
      for (int i = 1; i <= 3; ++i) e += p.Gamma[i - 1][l] * b(vel(i), m) + p.Gamma[i - 1][m] * b(l, vel(i));
      r.add({l, m}, e - b(l, m));
    }
    for (int j = 1; j <= 3; ++j) {
      Expr e = b(l, vel(j));
      for (int i = 1; i <= 3; ++i) e += p.Gamma[i - 1][l] * b(vel(i), vel(j));
      r.add({l, vel(j)}, e - b(l, vel(j)));
    }
  }
  for (int i = 1; i <= 3; ++i)
    for (int j = i + 1; j <= 3; ++j) r.add({vel(i), vel(j)}, -b(vel(i), vel(j)));
  return r;
}

bool SpacetimeReport::ok() const {
  for (const auto& [k, r] : residuals)
    if (!(r <= tol)) return false;
  return min_top_form > 0;
}

namespace {

double residual_of(const KForm& a, const KForm& b, const Sampler& s) { return compare(a, b, s).residual; }
double residual_of(const KVector& a, const KVector& b, const Sampler& s) { return compare(a, b, s).residual; }

template <Variance V>
double zero_residual(const Antisym<V, Expr>& a, const Sampler& s) {
  ResidualCheck c;
  c.add_zero(a);
  return c.run(s).residual;
}

double theta_residual(const ContactObjects& co, const Sampler& s) {
  ResidualCheck c;
  for (int n = 0; n < 4; ++n) {
    for (int l = 0; l < 4; ++l) {
      Expr sq;
      for (int q = 0; q < 4; ++q) sq += co.theta[n][q] * co.theta[q][l];
      c.add(sq, co.theta[n][l]);
    }
    Expr td;
    for (int l = 0; l < 4; ++l) td += co.theta[n][l] * co.dee.coeff({l});
    c.add(td, Expr());
  }
  return c.run(s).residual;
}

}  // namespace

SpacetimeReport verify_theorems(const PhaseStructures& p, const Sampler& s, double tol) {
  SpacetimeReport rep;
  rep.kind = p.kind;
  rep.tol = tol;
  const bool galilei = p.kind == SpacetimeKind::Galilei;
  auto& res = rep.residuals;

  auto diag = connection_diagnostics(p.K, p.g, p.kind, s);
  res["torsion"] = diag.torsion;
  res["nabla g"] = diag.metric;
  if (galilei) {
    res["nabla dt"] = diag.time;
    res["curvature symmetry"] = diag.curvature_symmetry;
  }
  res["theta o theta - theta, theta(dee)"] = theta_residual(p.contact, s);

  const KForm& time = p.contact.time;
  const double c2 = p.scales.c * p.scales.c;
  if (galilei) {
    res["dt(dee) - 1"] = field_equal(ScalarField(p.chart, interior(p.contact.dee, time).value()),
                                     ScalarField(p.chart, lit(1.0)), s)
                             .residual;
  } else {
    Expr gdd;
    const KVector& d = p.contact.dee;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) gdd += p.g[a][b] * d.coeff({a}) * d.coeff({b});
    SymMatrix gi = inverse(p.g);
    Expr gtt;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) gtt += gi[a][b] * time.coeff({a}) * time.coeff({b});
    ResidualCheck n1, n2, n3;
    n1.add(gdd, lit(-c2));
    n2.add(interior(d, time).value(), lit(1.0));
    n3.add(gtt, lit(-1.0 / c2));
    res["g(dee,dee) + c^2"] = n1.run(s).residual;
    res["tau(dee) - 1"] = n2.run(s).residual;
    res["gbar(tau,tau) + 1/c^2"] = n3.run(s).residual;
  }

  res["d(Omega)"] = zero_residual(ext_d(p.Omega), s);
  res["gamma _| Omega"] = zero_residual(interior(p.gamma, p.Omega), s);
  res["gamma(time) - 1"] =
      field_equal(ScalarField(p.chart, interior(p.gamma, time).value()), ScalarField(p.chart, lit(1.0)), s).residual;

  // min |time ^ Omega^3| over the samples
  {
    Expr top = wedge(time, wedge_power(p.Omega, 3)).coeff({0, 1, 2, 3, 4, 5, 6});
    std::vector<Expr> roots{top};
    rep.min_top_form = std::numeric_limits<double>::infinity();
    for (const auto& row : sample_values(roots, s)) rep.min_top_form = std::min(rep.min_top_form, std::abs(row[0]));
  }

  KVector el = schouten(p.E_u, p.Lambda_u);
  KVector ll = schouten(p.Lambda_u, p.Lambda_u);
  if (galilei) {
    res["[E,Lambda]"] = zero_residual(el, s);
    res["[Lambda,Lambda]"] = zero_residual(ll, s);
  } else {
    KForm dtau = ext_d(time);
    KForm lgt = lie_tv(phase_connection_form(p.Gamma), time);
    res["Omega + c^2 d(tau)"] = residual_of(p.Omega, lit(-c2) * dtau, s);
    res["Omega - c^2 L_Gamma tau + c^2 d(tau)"] = residual_of(p.Omega - lit(c2) * lgt, lit(-c2) * dtau, s);
    res["Omega - c^2 L_Gamma tau + c^2 d(tau), components"] =
        residual_of(p.Omega - lit(c2) * lie_gamma_tau_components(p), lit(-c2) * dtau, s);
    res["L_Gamma tau"] = zero_residual(lgt, s);
    res["[E,Lambda]"] = zero_residual(el, s);
    res["[Lambda,Lambda] + 2 E ^ Lambda"] = residual_of(ll, lit(-2.0) * wedge(p.E_u, p.Lambda_u), s);
  }

  // duality of the unscaled pairs, pointwise
  res["duality"] = duality_residuals(sample(p.omega_u, s), sample(p.Omega_u, s), sample(p.E_u, s),
                                     sample(p.Lambda_u, s))
                       .max();

  // labels from the classification theory
  try {
    CovariantPair cp = make_covariant_pair(p.chart, p.omega_u, p.Omega_u, s, tol);
    rep.covariant_labels = classify_covariant(cp, s, tol).labels;
    ContravariantPair xp = make_contravariant_pair(p.chart, p.E_u, p.Lambda_u, s, tol);
    rep.contravariant_labels = classify_contravariant(xp, p.omega_u, s, tol).labels;
  } catch (const InvariantError& e) {
    rep.notes.push_back(e.what());
  }
  return rep;
}

GalileiInput galilei_flat(Scales sc) {
  GalileiInput in;
  in.g.assign(3, std::vector<Expr>(3));
  for (int i = 0; i < 3; ++i) in.g[i][i] = lit(1.0);
  in.phi.assign(4, std::vector<Expr>(4));
  in.scales = sc;
  return in;
}

EinsteinInput einstein_minkowski(Scales sc) {
  EinsteinInput in;
  in.g.assign(4, std::vector<Expr>(4));
  in.g[0][0] = lit(-1.0);
  for (int i = 1; i < 4; ++i) in.g[i][i] = lit(1.0);
  in.scales = sc;
  return in;
}

EinsteinInput einstein_rindler(Scales sc) {
  EinsteinInput in = einstein_minkowski(sc);
  Expr a = lit(1.0) + lit(0.5) * Expr::coord(1);
  in.g[0][0] = -(a * a);
  return in;
}

}  // namespace oddgeo
