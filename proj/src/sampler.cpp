#include "oddgeo/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "oddgeo/error.hpp"

namespace oddgeo {

Sampler::Sampler(Chart chart, Box box, std::optional<ScalarField> constraint, std::uint64_t seed,
                 int count)
    : chart_(std::move(chart)),
      box_(std::move(box)),
      constraint_(std::move(constraint)),
      seed_(seed),
      count_(count) {
  if (count_ < 1) throw InputError("sample count must be positive");
  if (static_cast<int>(box_.size()) != chart_.dim())
    throw InputError("sampling box has " + std::to_string(box_.size()) +
                     " intervals, chart dimension is " + std::to_string(chart_.dim()));
  for (const auto& [lo, hi] : box_)
    if (!(lo <= hi)) throw InputError("sampling interval with lo > hi");
  if (constraint_ && !(constraint_->chart() == chart_))
    throw InputError("constraint lives on a different chart");

  std::optional<Tape> tape;
  if (constraint_) {
    Expr roots[] = {constraint_->expr()};
    tape.emplace(roots);
  }
  std::mt19937_64 rng(seed_);
  std::vector<double> x(chart_.dim());
  int draws = 0;
  while (static_cast<int>(points_.size()) < count_) {
    if (draws++ >= kMaxDraws)
      throw InputError("sampler found only " + std::to_string(points_.size()) + " of " +
                       std::to_string(count_) + " admissible points in " +
                       std::to_string(kMaxDraws) + " draws");
    for (int i = 0; i < chart_.dim(); ++i) x[i] = uniform(rng, box_[i].first, box_[i].second);
    if (tape) {
      double c = 0.0;
      try {
        c = tape->evaluate(x, chart_.constant_values()).front();
      } catch (const DomainError&) {
        continue;  // outside the constraint's own domain: not admissible
      }
      if (!(c < 0.0)) continue;
    }
    points_.emplace_back(chart_, x);
  }
}

Box Sampler::cube(int dim, double lo, double hi) { return Box(dim, {lo, hi}); }

Sampler Sampler::reseeded(std::uint64_t seed) const {
  return Sampler(chart_, box_, constraint_, seed, count_);
}

double relative_residual(double a, double b) {
  return std::abs(a - b) / (1.0 + std::max(std::abs(a), std::abs(b)));
}

std::string describe_point(const Point& p) {
  std::string out = "(";
  for (int i = 0; i < p.chart.dim(); ++i) {
    if (i) out += ", ";
    out += p.chart.coord(i) + "=" + format_number(p.values[i]);
  }
  return out + ")";
}

std::vector<std::vector<double>> sample_values(std::span<const Expr> exprs, const Sampler& s) {
  Tape tape(exprs);
  std::vector<std::vector<double>> out;
  out.reserve(s.points().size());
  for (const auto& p : s.points()) {
    try {
      out.push_back(tape.evaluate(p.values, s.chart().constant_values()));
    } catch (const DomainError& e) {
      throw DomainError(std::string(e.what()) + " at " + describe_point(p), p.values);
    }
  }
  return out;
}

Comparison field_equal(const ScalarField& f, const ScalarField& g, const Sampler& s, double tol) {
  if (!(f.chart() == g.chart()) || !(f.chart() == s.chart()))
    throw InputError("field_equal: fields and sampler must share one chart");
  Comparison cmp;
  if (f.expr().id() == g.expr().id()) return cmp;
  Expr roots[] = {f.expr(), g.expr()};
  try {
    for (const auto& v : sample_values(roots, s)) {
      double r = relative_residual(v[0], v[1]);
      if (std::isnan(r) || r > cmp.residual) cmp.residual = r;
    }
  } catch (const DomainError& e) {
    cmp.equal = false;
    cmp.residual = std::numeric_limits<double>::infinity();
    cmp.diagnostic = e.what();
    return cmp;
  }
  cmp.equal = cmp.residual <= tol;
  return cmp;
}

}  // namespace oddgeo
