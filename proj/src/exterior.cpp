#include "oddgeo/exterior.hpp"

#include <cmath>
#include <limits>

namespace oddgeo {

int sort_sign(std::vector<int>& seq) {
  int sign = 1;
  // Insertion sort; sequences are short.
  for (std::size_t i = 1; i < seq.size(); ++i) {
    for (std::size_t j = i; j > 0 && seq[j - 1] >= seq[j]; --j) {
      if (seq[j - 1] == seq[j]) return 0;
      std::swap(seq[j - 1], seq[j]);
      sign = -sign;
    }
  }
  return sign;
}

namespace {
void collect(int dim, int k, int start, Index& cur, std::vector<Index>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < dim; ++i) {
    cur.push_back(i);
    collect(dim, k, i + 1, cur, out);
    cur.pop_back();
  }
}
}  // namespace

std::vector<Index> increasing_indices(int dim, int k) {
  std::vector<Index> out;
  Index cur;
  collect(dim, k, 0, cur, out);
  return out;
}

KForm differential(const Expr& f, int dim) {
  KForm df(dim, 1);
  for (int i = 0; i < dim; ++i) df.add({i}, diff(f, i));
  return df;
}

Expr apply(const KVector& x, const Expr& f) {
  if (x.degree() != 1) throw DegreeError("directional derivative needs a vector field");
  Expr r;
  for (const auto& [i, c] : x.terms()) r += c * diff(f, i[0]);
  return r;
}

KForm ext_d(const KForm& beta) {
  if (beta.degree() + 1 > beta.dim()) return KForm(beta.dim(), beta.degree());
  KForm r(beta.dim(), beta.degree() + 1);
  for (const auto& [idx, c] : beta.terms()) {
    for (int i = 0; i < beta.dim(); ++i) {
      if (std::find(idx.begin(), idx.end(), i) != idx.end()) continue;
      Expr dc = diff(c, i);
      if (dc.is_zero()) continue;
      std::vector<int> seq{i};
      seq.insert(seq.end(), idx.begin(), idx.end());
      r.add(std::move(seq), dc);
    }
  }
  return r;
}

KForm lie_derivative(const KVector& x, const KForm& beta) {
  if (x.degree() != 1) throw DegreeError("Lie derivative needs a vector field");
  KForm r(beta.dim(), beta.degree());
  if (beta.degree() < beta.dim()) r += interior(x, ext_d(beta));
  if (beta.degree() > 0) r += ext_d(interior(x, beta));
  return r;
}

namespace {

// Overall signs of the (2,1) and (2,2) coordinate formulas relative to the
// Lie derivative and the plain cyclic sum. Fixed by the calibration test.
constexpr double kSign21 = 1.0;
constexpr double kSign22 = 1.0;

// (L_X P)^{jk} = X^i d_i P^{jk} - P^{ik} d_i X^j - P^{ji} d_i X^k
KVector lie_bivector(const KVector& x, const KVector& p) {
  const int n = p.dim();
  std::vector<std::vector<Expr>> dx(n, std::vector<Expr>(n));  // dx[j][i] = d_i X^j
  for (int j = 0; j < n; ++j) {
    Expr xj = x.coeff({j});
    for (int i = 0; i < n; ++i) dx[j][i] = diff(xj, i);
  }
  KVector r(n, 2);
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      Expr v = apply(x, p.coeff({j, k}));
      for (int i = 0; i < n; ++i) v -= p.component({i, k}) * dx[j][i] + p.component({j, i}) * dx[k][i];
      r.add({j, k}, v);
    }
  }
  return r;
}

// Sum over l and cyclic (ijk) of P^{li} d_l Q^{jk} + Q^{li} d_l P^{jk}.
KVector cyclic_bivectors(const KVector& p, const KVector& q) {
  const int n = p.dim();
  KVector r(n, 3);
  if (n < 3) return r;
  auto term = [&](int i, int j, int k) {
    Expr v;
    for (int l = 0; l < n; ++l) {
      Expr pli = p.component({l, i});
      Expr qli = q.component({l, i});
      if (!pli.is_zero()) v += pli * diff(q.component({j, k}), l);
      if (!qli.is_zero()) v += qli * diff(p.component({j, k}), l);
    }
    return v;
  };
  for (const auto& idx : increasing_indices(n, 3)) {
    int i = idx[0], j = idx[1], k = idx[2];
    r.add(idx, term(i, j, k) + term(j, k, i) + term(k, i, j));
  }
  return r;
}

}  // namespace

KVector schouten(const KVector& p, const KVector& q) {
  if (p.dim() != q.dim()) throw DegreeError("bracket of multivectors on different charts");
  const int a = p.degree();
  const int b = q.degree();
  if (a == 1 && b == 1) {
    const int n = p.dim();
    KVector r(n, 1);
    for (int k = 0; k < n; ++k) r.add({k}, apply(p, q.coeff({k})) - apply(q, p.coeff({k})));
    return r;
  }
  if (a == 1 && b == 2) return lie_bivector(p, q);
  if (a == 2 && b == 1) return Expr(kSign21) * lie_bivector(q, p);
  if (a == 2 && b == 2) return Expr(kSign22) * cyclic_bivectors(p, q);
  throw DegreeError("bracket implemented for degrees (1,1), (1,2), (2,1), (2,2); got (" +
                    std::to_string(a) + "," + std::to_string(b) + ")");
}

KVector push_two_form(const KVector& lambda, const KForm& beta) {
  if (lambda.degree() != 2 || beta.degree() != 2)
    throw DegreeError("push_two_form needs a bivector and a 2-form");
  const int n = lambda.dim();
  std::vector<KVector> sharps;
  for (int i = 0; i < n; ++i) sharps.push_back(sharp(lambda, KForm::basis(n, {i})));
  KVector r(n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) r.add({i, j}, interior(sharps[j], interior(sharps[i], beta)).value());
  return r;
}

TangentValuedOneForm TangentValuedOneForm::identity(int d) {
  TangentValuedOneForm a(d);
  for (int i = 0; i < d; ++i) a.m[i][i] = Expr(1.0);
  return a;
}

KForm fn_insert(const TangentValuedOneForm& a, const KForm& beta) {
  const int n = beta.dim();
  if (a.dim != n) throw DegreeError("tangent-valued form on a different chart");
  KForm r(n, beta.degree());
  if (beta.degree() == 1) {
    for (int l = 0; l < n; ++l) {
      Expr v;
      for (int nu = 0; nu < n; ++nu) v += beta.coeff({nu}) * a.m[nu][l];
      r.add({l}, v);
    }
  } else if (beta.degree() == 2) {
    for (int x = 0; x < n; ++x) {
      for (int y = x + 1; y < n; ++y) {
        Expr v;
        for (int nu = 0; nu < n; ++nu)
          v += beta.component({nu, y}) * a.m[nu][x] + beta.component({x, nu}) * a.m[nu][y];
        r.add({x, y}, v);
      }
    }
  } else if (beta.degree() != 0) {
    throw DegreeError("insertion implemented for degrees 1 and 2 only");
  }
  return r;
}

KForm lie_tv(const TangentValuedOneForm& a, const KForm& tau) {
  if (tau.degree() != 1) throw DegreeError("lie_tv needs a 1-form");
  return fn_insert(a, ext_d(tau)) - ext_d(fn_insert(a, tau));
}

int matrix_rank(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  double cut = kRankThreshold * std::max(sv.size() ? sv(0) : 0.0, 1.0);
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) >= cut) ++r;
  return r;
}

namespace {
// max that keeps NaN, so a non-finite evaluation cannot pass.
double worse(double a, double b) { return std::isnan(b) || b > a ? b : a; }
}  // namespace

Comparison ResidualCheck::run(const Sampler& s, double tol) const {
  Comparison cmp;
  std::vector<Expr> roots;
  for (std::size_t i = 0; i < lhs_.size(); ++i) {
    if (lhs_[i].id() == rhs_[i].id()) continue;
    if (lhs_[i].is_literal() && rhs_[i].is_literal()) {
      cmp.residual = worse(cmp.residual, relative_residual(lhs_[i].literal_value(), rhs_[i].literal_value()));
      continue;
    }
    roots.push_back(lhs_[i]);
    roots.push_back(rhs_[i]);
  }
  if (!roots.empty()) {
    try {
      for (const auto& row : sample_values(roots, s))
        for (std::size_t k = 0; k < row.size(); k += 2)
          cmp.residual = worse(cmp.residual, relative_residual(row[k], row[k + 1]));
    } catch (const DomainError& e) {
      cmp.equal = false;
      cmp.residual = std::numeric_limits<double>::infinity();
      cmp.diagnostic = e.what();
      return cmp;
    }
  }
  cmp.equal = cmp.residual <= tol;
  return cmp;
}

}  // namespace oddgeo
