#pragma once

// Antisymmetric tensor calculus on a chart.
//
// Conventions (fixed throughout the library):
//  * Components are stored on strictly increasing multi-indices; dx^I and
//    d_I = d_{i1} ^ ... ^ d_{ik} pair by the determinant, so
//    (dx^1 ^ dx^2)(d_1, d_2) = 1.
//  * i_{X1 ^ ... ^ Xk} beta = i_{Xk} ... i_{X1} beta, i.e. the k-vector fills
//    the first k slots of beta in order: (i_P beta)_J = sum_I P^I beta_{IJ}.
//    The same rule applies to forms contracted into multivectors.
//  * sharp(Lambda, alpha) = i_alpha Lambda, flat(Omega, X) = i_X Omega, hence
//    <beta, sharp(Lambda, alpha)> = Lambda(alpha, beta).

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <span>
#include <vector>

#include "oddgeo/error.hpp"
#include "oddgeo/expr.hpp"
#include "oddgeo/sampler.hpp"

namespace oddgeo {

using Index = std::vector<int>;

enum class Variance { Covariant, Contravariant };

/// Sorts `seq` in place; returns the sign of the sorting permutation, or 0 if
/// an index repeats.
int sort_sign(std::vector<int>& seq);

/// All strictly increasing multi-indices of length k in 0..dim-1.
std::vector<Index> increasing_indices(int dim, int k);

namespace detail {
inline bool scalar_is_zero(double v) { return v == 0.0; }
inline bool scalar_is_zero(const Expr& e) { return e.is_zero(); }
template <class S>
S signed_scalar(int sign, const S& v) {
  return sign > 0 ? v : S(-v);
}
}  // namespace detail

/// Antisymmetric tensor of degree k on a dim-dimensional chart with
/// coefficients of type S (a symbolic `Expr` or a `double`). Absent
/// multi-indices are zero.
template <Variance V, class S>
class Antisym {
 public:
  using Scalar = S;
  static constexpr Variance variance = V;

  Antisym(int dim, int degree) : dim_(dim), degree_(degree) {
    if (dim < 1 || degree < 0 || degree > dim)
      throw DegreeError("degree " + std::to_string(degree) + " invalid on a " + std::to_string(dim) +
                        "-dimensional chart");
  }

  static Antisym scalar(int dim, const S& value) {
    Antisym a(dim, 0);
    a.add({}, value);
    return a;
  }
  /// Single term coeff * d_{idx} (any index order; sign applied).
  static Antisym basis(int dim, std::vector<int> idx, const S& coeff = S(1.0)) {
    Antisym a(dim, static_cast<int>(idx.size()));
    a.add(std::move(idx), coeff);
    return a;
  }
  /// Degree-1 object from a full component list.
  static Antisym from_components(std::span<const S> comps) {
    Antisym a(static_cast<int>(comps.size()), 1);
    for (int i = 0; i < a.dim_; ++i) a.add({i}, comps[i]);
    return a;
  }

  int dim() const noexcept { return dim_; }
  int degree() const noexcept { return degree_; }
  const std::map<Index, S>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  /// Coefficient on a strictly increasing index.
  S coeff(const Index& sorted) const {
    auto it = terms_.find(sorted);
    return it == terms_.end() ? S(0.0) : it->second;
  }

  /// Antisymmetric component for an index sequence in any order.
  S component(std::vector<int> idx) const {
    int sign = sort_sign(idx);
    if (sign == 0) return S(0.0);
    return detail::signed_scalar(sign, coeff(idx));
  }

  /// Degree-0 value.
  S value() const { return coeff({}); }

  /// Accumulates coeff onto d_{idx}, any order.
  void add(std::vector<int> idx, const S& c) {
    if (static_cast<int>(idx.size()) != degree_) throw DegreeError("index length does not match degree");
    for (int i : idx)
      if (i < 0 || i >= dim_) throw DegreeError("index out of chart range");
    int sign = sort_sign(idx);
    if (sign == 0 || detail::scalar_is_zero(c)) return;
    auto it = terms_.find(idx);
    S v = detail::signed_scalar(sign, c);
    if (it == terms_.end()) {
      terms_.emplace(std::move(idx), v);
    } else {
      it->second = it->second + v;
      if (detail::scalar_is_zero(it->second)) terms_.erase(it);
    }
  }

  Antisym& operator+=(const Antisym& o) {
    check_same(o);
    for (const auto& [i, c] : o.terms_) add(i, c);
    return *this;
  }
  Antisym& operator-=(const Antisym& o) {
    check_same(o);
    for (const auto& [i, c] : o.terms_) add(i, S(-c));
    return *this;
  }
  friend Antisym operator+(Antisym a, const Antisym& b) { return a += b; }
  friend Antisym operator-(Antisym a, const Antisym& b) { return a -= b; }
  friend Antisym operator-(const Antisym& a) {
    Antisym r(a.dim_, a.degree_);
    for (const auto& [i, c] : a.terms_) r.terms_.emplace(i, S(-c));
    return r;
  }
  friend Antisym operator*(const S& s, const Antisym& a) {
    Antisym r(a.dim_, a.degree_);
    if (detail::scalar_is_zero(s)) return r;
    for (const auto& [i, c] : a.terms_) r.add(i, s * c);
    return r;
  }

  /// Coefficient-wise transform into another scalar type.
  template <class F>
  auto map(F f) const {
    using T = decltype(f(std::declval<const S&>()));
    Antisym<V, T> r(dim_, degree_);
    for (const auto& [i, c] : terms_) r.add(i, f(c));
    return r;
  }

 private:
  void check_same(const Antisym& o) const {
    if (o.dim_ != dim_ || o.degree_ != degree_) throw DegreeError("adding tensors of different shape");
  }

  int dim_;
  int degree_;
  std::map<Index, S> terms_;
};

using KForm = Antisym<Variance::Covariant, Expr>;
using KVector = Antisym<Variance::Contravariant, Expr>;
using NumForm = Antisym<Variance::Covariant, double>;
using NumVector = Antisym<Variance::Contravariant, double>;

template <Variance V>
constexpr Variance dual_variance =
    V == Variance::Covariant ? Variance::Contravariant : Variance::Covariant;

/// Exterior product of two tensors of the same variance.
template <Variance V, class S>
Antisym<V, S> wedge(const Antisym<V, S>& a, const Antisym<V, S>& b) {
  if (a.dim() != b.dim()) throw DegreeError("wedge of tensors on different charts");
  if (a.degree() + b.degree() > a.dim())
    throw DegreeError("wedge degree " + std::to_string(a.degree() + b.degree()) +
                      " exceeds chart dimension " + std::to_string(a.dim()));
  Antisym<V, S> r(a.dim(), a.degree() + b.degree());
  for (const auto& [i, x] : a.terms()) {
    for (const auto& [j, y] : b.terms()) {
      std::vector<int> idx = i;
      idx.insert(idx.end(), j.begin(), j.end());
      r.add(std::move(idx), x * y);
    }
  }
  return r;
}

/// k-th exterior power (k = 0 gives the constant 1).
template <Variance V, class S>
Antisym<V, S> wedge_power(const Antisym<V, S>& a, int k) {
  Antisym<V, S> r = Antisym<V, S>::scalar(a.dim(), S(1.0));
  for (int i = 0; i < k; ++i) r = wedge(r, a);
  return r;
}

/// Interior product of a degree-k object into a degree-r object of the
/// opposite variance (k <= r): the first k slots are filled in order.
template <Variance V, class S>
Antisym<dual_variance<V>, S> interior(const Antisym<V, S>& p,
                                      const Antisym<dual_variance<V>, S>& beta) {
  if (p.dim() != beta.dim()) throw DegreeError("interior product across different charts");
  const int k = p.degree();
  const int r = beta.degree();
  if (k > r)
    throw DegreeError("interior product of degree " + std::to_string(k) + " into degree " +
                      std::to_string(r));
  Antisym<dual_variance<V>, S> out(beta.dim(), r - k);
  for (const auto& [i, x] : p.terms()) {
    for (const auto& [big, y] : beta.terms()) {
      if (!std::includes(big.begin(), big.end(), i.begin(), i.end())) continue;
      std::vector<int> seq = i;
      Index rest;
      std::set_difference(big.begin(), big.end(), i.begin(), i.end(), std::back_inserter(rest));
      seq.insert(seq.end(), rest.begin(), rest.end());
      int sign = sort_sign(seq);
      out.add(rest, detail::signed_scalar(sign, x * y));
    }
  }
  return out;
}

/// Full contraction of equal-degree objects.
template <Variance V, class S>
S pairing(const Antisym<V, S>& a, const Antisym<dual_variance<V>, S>& b) {
  if (a.degree() != b.degree()) throw DegreeError("pairing needs equal degrees");
  return interior(a, b).value();
}

/// sharp(Lambda, alpha) = i_alpha Lambda.
template <class S>
Antisym<Variance::Contravariant, S> sharp(const Antisym<Variance::Contravariant, S>& lambda,
                                          const Antisym<Variance::Covariant, S>& alpha) {
  if (lambda.degree() != 2 || alpha.degree() != 1) throw DegreeError("sharp needs a bivector and a 1-form");
  return interior(alpha, lambda);
}

/// flat(Omega, X) = i_X Omega.
template <class S>
Antisym<Variance::Covariant, S> flat(const Antisym<Variance::Covariant, S>& omega,
                                     const Antisym<Variance::Contravariant, S>& x) {
  if (omega.degree() != 2 || x.degree() != 1) throw DegreeError("flat needs a 2-form and a vector");
  return interior(x, omega);
}

// ---------------------------------------------------------------------------
// Symbolic calculus

/// df as a 1-form.
KForm differential(const Expr& f, int dim);

/// X.f, the directional derivative.
Expr apply(const KVector& x, const Expr& f);

/// Exterior derivative.
KForm ext_d(const KForm& beta);

/// Cartan formula L_X beta = i_X d beta + d i_X beta.
KForm lie_derivative(const KVector& x, const KForm& beta);

/// Schouten-Nijenhuis bracket for degree pairs (1,1), (1,2), (2,1), (2,2), by
/// coordinate formulas. Signs are those for which
///   i_[P,Q] beta = (-1)^{q(p+1)} i_P d i_Q beta + (-1)^p i_Q d i_P beta - i_{P^Q} d beta.
KVector schouten(const KVector& p, const KVector& q);

/// (Lambda# (x) Lambda#)(beta) for a 2-form beta: the bivector
/// (a, b) -> beta(a#, b#).
KVector push_two_form(const KVector& lambda, const KForm& beta);

/// Tangent-valued 1-form A, A(d_l) = sum_n m[n][l] d_n.
struct TangentValuedOneForm {
  int dim;
  std::vector<std::vector<Expr>> m;  // m[nu][lambda]

  explicit TangentValuedOneForm(int d) : dim(d), m(d, std::vector<Expr>(d)) {}
  static TangentValuedOneForm identity(int d);
};

/// Froelicher-Nijenhuis insertion i_A beta for 1- and 2-forms:
/// (i_A beta)(X1..Xk) = sum_i beta(X1, .., A(Xi), .., Xk).
KForm fn_insert(const TangentValuedOneForm& a, const KForm& beta);

/// L_A tau = i_A d tau - d i_A tau for a 1-form tau.
KForm lie_tv(const TangentValuedOneForm& a, const KForm& tau);

// ---------------------------------------------------------------------------
// Numeric evaluation

/// Coefficients evaluated at a point.
template <Variance V>
Antisym<V, double> evaluate(const Antisym<V, Expr>& a, const Point& p) {
  if (a.dim() != p.chart.dim()) throw InputError("tensor and point on different charts");
  std::vector<Expr> roots;
  for (const auto& [i, c] : a.terms()) roots.push_back(c);
  Tape tape(roots);
  auto vals = tape.evaluate(p.values, p.chart.constant_values());
  Antisym<V, double> r(a.dim(), a.degree());
  std::size_t k = 0;
  for (const auto& [i, c] : a.terms()) r.add(i, vals[k++]);
  return r;
}

/// Evaluates at every sample, compiling once.
template <Variance V>
std::vector<Antisym<V, double>> sample(const Antisym<V, Expr>& a, const Sampler& s) {
  std::vector<Expr> roots;
  for (const auto& [i, c] : a.terms()) roots.push_back(c);
  auto table = sample_values(roots, s);
  std::vector<Antisym<V, double>> out;
  out.reserve(table.size());
  for (const auto& row : table) {
    Antisym<V, double> r(a.dim(), a.degree());
    std::size_t k = 0;
    for (const auto& [i, c] : a.terms()) r.add(i, row[k++]);
    out.push_back(std::move(r));
  }
  return out;
}

/// Dense antisymmetric matrix of a degree-2 object: M(i,j) = component(i,j).
template <Variance V>
Eigen::MatrixXd to_matrix(const Antisym<V, double>& a) {
  if (a.degree() != 2) throw DegreeError("to_matrix needs degree 2");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.dim(), a.dim());
  for (const auto& [i, c] : a.terms()) {
    m(i[0], i[1]) = c;
    m(i[1], i[0]) = -c;
  }
  return m;
}

template <Variance V>
Eigen::VectorXd to_vector(const Antisym<V, double>& a) {
  if (a.degree() != 1) throw DegreeError("to_vector needs degree 1");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(a.dim());
  for (const auto& [i, c] : a.terms()) v(i[0]) = c;
  return v;
}

/// Upper triangle of `m` read as a degree-2 object.
template <Variance V>
Antisym<V, double> from_matrix(const Eigen::MatrixXd& m) {
  Antisym<V, double> a(static_cast<int>(m.rows()), 2);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i + 1; j < m.cols(); ++j) a.add({i, j}, m(i, j));
  return a;
}

template <Variance V>
Antisym<V, double> from_vector(const Eigen::VectorXd& v) {
  Antisym<V, double> a(static_cast<int>(v.size()), 1);
  for (int i = 0; i < v.size(); ++i) a.add({i}, v(i));
  return a;
}

/// Singular values below kRankThreshold * max(sigma_max, 1) count as zero.
inline constexpr double kRankThreshold = 1e-8;

int matrix_rank(const Eigen::MatrixXd& m);

/// Rank of a 2-form or bivector at a point (even for antisymmetric input).
template <Variance V>
int rank_at(const Antisym<V, Expr>& b, const Point& p) {
  return matrix_rank(to_matrix(evaluate(b, p)));
}

struct RankInfo {
  int rank = 0;
  bool constant = true;
  std::vector<int> per_sample;
};

template <Variance V>
RankInfo constant_rank(const Antisym<V, Expr>& b, const Sampler& s) {
  if (b.degree() != 2) throw DegreeError("rank needs degree 2");
  RankInfo info;
  for (const auto& v : sample(b, s)) info.per_sample.push_back(matrix_rank(to_matrix(v)));
  info.rank = info.per_sample.empty() ? 0 : info.per_sample.front();
  info.constant = std::all_of(info.per_sample.begin(), info.per_sample.end(),
                              [&](int r) { return r == info.rank; });
  return info;
}

/// Collects (lhs, rhs) expression pairs and measures their largest relative
/// residual over a sampler with one compiled tape.
class ResidualCheck {
 public:
  void add(const Expr& lhs, const Expr& rhs) {
    lhs_.push_back(lhs);
    rhs_.push_back(rhs);
  }
  template <Variance V>
  void add(const Antisym<V, Expr>& lhs, const Antisym<V, Expr>& rhs) {
    if (lhs.dim() != rhs.dim() || lhs.degree() != rhs.degree())
      throw DegreeError("residual between tensors of different shape");
    std::map<Index, std::pair<Expr, Expr>> merged;
    for (const auto& [i, c] : lhs.terms()) merged[i].first = c;
    for (const auto& [i, c] : rhs.terms()) merged[i].second = c;
    for (const auto& [i, pr] : merged) add(pr.first, pr.second);
  }
  /// lhs against zero.
  template <Variance V>
  void add_zero(const Antisym<V, Expr>& lhs) {
    for (const auto& [i, c] : lhs.terms()) add(c, Expr());
  }
  bool empty() const noexcept { return lhs_.empty(); }

  Comparison run(const Sampler& s, double tol = kDefaultTolerance) const;

 private:
  std::vector<Expr> lhs_;
  std::vector<Expr> rhs_;
};

/// Residual between two symbolic tensors over a sampler.
template <Variance V>
Comparison compare(const Antisym<V, Expr>& a, const Antisym<V, Expr>& b, const Sampler& s,
                   double tol = kDefaultTolerance) {
  ResidualCheck c;
  c.add(a, b);
  return c.run(s, tol);
}

/// Largest absolute component over the samples.
template <Variance V>
double max_abs(const Antisym<V, double>& a) {
  double m = 0.0;
  for (const auto& [i, c] : a.terms()) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace oddgeo
