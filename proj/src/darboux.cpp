#include "oddgeo/darboux.hpp"

namespace oddgeo {

Chart darboux_chart(int n) {
  if (n < 1) throw InputError("Darboux chart needs n >= 1");
  std::vector<std::string> names{"t"};
  for (int i = 1; i <= 2 * n; ++i) names.push_back("x" + std::to_string(i));
  return Chart(names, {});
}

DarbouxSpec::DarbouxSpec(int n_, int s_, std::vector<Expr> funcs)
    : DarbouxSpec(darboux_chart(n_), n_, s_, std::move(funcs)) {}

DarbouxSpec::DarbouxSpec(Chart c, int n_, int s_, std::vector<Expr> funcs)
    : chart(std::move(c)), n(n_), s(s_), omega_funcs(std::move(funcs)) {
  if (n < 1) throw InputError("Darboux data needs n >= 1");
  if (s < 0 || s > n) throw InputError("Darboux data needs 0 <= s <= n");
  if (chart.dim() != 2 * n + 1) throw InputError("Darboux chart must have dimension 2n+1");
  if (static_cast<int>(omega_funcs.size()) != 2 * n)
    throw InputError("Darboux data needs 2n omega functions, got " + std::to_string(omega_funcs.size()));
  for (const Expr& e : omega_funcs)
    if (max_coord_index(e) >= chart.dim()) throw InputError("omega function uses a coordinate outside the chart");
}

namespace {
KVector d(int dim, int i) { return KVector::basis(dim, {i}); }
}  // namespace

KForm darboux_omega(const DarbouxSpec& spec) {
  const int dim = 2 * spec.n + 1;
  KForm w = KForm::basis(dim, {0});
  for (int k = 1; k <= 2 * spec.n; ++k) w.add({k}, spec.w(k));
  return w;
}

CovariantPair darboux_covariant(const DarbouxSpec& spec, const Sampler& s) {
  const int dim = 2 * spec.n + 1;
  KForm big(dim, 2);
  for (int i = 1; i <= spec.n; ++i) big.add({i, i + spec.n}, Expr(1.0));
  return make_covariant_pair(spec.chart, darboux_omega(spec), big, s);
}

ACPJTriple darboux_contravariant(const DarbouxSpec& spec) {
  const int dim = 2 * spec.n + 1;
  const int n = spec.n;
  KVector lam(dim, 2);
  for (int i = 1; i <= spec.s; ++i) {
    lam.add({i + n, i}, Expr(1.0));
    lam.add({0, i}, -spec.w(i + n));
    lam.add({0, i + n}, spec.w(i));
  }
  return {d(dim, 0), lam, darboux_omega(spec)};
}

// The expressions below follow the coordinate formulas term by term; the
// double sums are over i, j = 1..s with wedge products of basis vectors.
DarbouxBrackets darboux_bracket_oracle(const DarbouxSpec& spec) {
  const int dim = 2 * spec.n + 1;
  const int n = spec.n;
  auto w = [&](int k) -> const Expr& { return spec.w(k); };
  auto dt = [&](int k) { return diff(w(k), 0); };
  auto dx = [&](int k, int c) { return diff(w(k), c); };

  KVector inner1(dim, 1);
  for (int i = 1; i <= spec.s; ++i) {
    inner1.add({i}, -dt(i + n));
    inner1.add({i + n}, dt(i));
  }
  KVector elam = wedge(d(dim, 0), inner1);

  KVector inner2(dim, 2);
  for (int i = 1; i <= spec.s; ++i) {
    for (int j = 1; j <= spec.s; ++j) {
      inner2 += (w(j + n) * dt(i + n) + dx(j + n, i + n)) * wedge(d(dim, i), d(dim, j));
      inner2 += (w(i + n) * dt(j) - w(j) * dt(i + n) + dx(i + n, j) - dx(j, i + n)) *
                wedge(d(dim, i), d(dim, j + n));
      inner2 += (w(j) * dt(i) + dx(j, i)) * wedge(d(dim, i + n), d(dim, j + n));
    }
  }
  KVector lamlam = dim >= 3 ? Expr(2.0) * wedge(d(dim, 0), inner2) : KVector(dim, std::min(3, dim));
  return {elam, lamlam};
}

DarbouxImages darboux_domega_images(const DarbouxSpec& spec) {
  const int dim = 2 * spec.n + 1;
  const int n = spec.n;
  auto w = [&](int k) -> const Expr& { return spec.w(k); };
  auto dt = [&](int k) { return diff(w(k), 0); };
  auto dx = [&](int k, int c) { return diff(w(k), c); };

  KVector sharp_le(dim, 1);
  for (int i = 1; i <= spec.s; ++i) {
    sharp_le.add({i}, dt(i + n));
    sharp_le.add({i + n}, -dt(i));
    sharp_le.add({0}, dt(i) * w(i + n) - dt(i + n) * w(i));
  }

  KVector ll(dim, 2);
  for (int i = 1; i <= spec.s; ++i) {
    for (int j = 1; j <= spec.s; ++j) {
      ll += (w(i + n) * w(j + n) * dt(i) - w(i) * w(j + n) * dt(i + n) - w(i) * dx(j + n, i + n) +
             w(i + n) * dx(j + n, i) - w(i + n) * dx(i, j + n) + w(i) * dx(i + n, j + n)) *
            wedge(d(dim, 0), d(dim, j));
      ll += (-w(i + n) * w(j) * dt(i) + w(i) * w(j) * dt(i + n) + w(i + n) * dx(i, j) - w(i + n) * dx(j, i) -
             w(i) * dx(i + n, j) + w(i) * dx(j, i + n)) *
            wedge(d(dim, 0), d(dim, j + n));
      ll += (w(j + n) * dt(i + n) + dx(j + n, i + n)) * wedge(d(dim, i), d(dim, j));
      ll += (w(i + n) * dt(j) - w(j) * dt(i + n) + dx(i + n, j) - dx(j, i + n)) * wedge(d(dim, i), d(dim, j + n));
      ll += (w(j) * dt(i) + dx(j, i)) * wedge(d(dim, i + n), d(dim, j + n));
    }
  }
  return {sharp_le, ll};
}

namespace {
std::vector<Expr> zeros(int n) { return std::vector<Expr>(2 * n); }
}  // namespace

DarbouxSpec darboux_flat(int n, int s) { return DarbouxSpec(n, s, zeros(n)); }

DarbouxSpec darboux_contact(int n, int s) {
  auto f = zeros(n);
  for (int i = 1; i <= s; ++i) f[i - 1] = -Expr::coord(i + n);
  return DarbouxSpec(n, s, f);
}

}  // namespace oddgeo
