#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oddgeo/expr.hpp"

namespace oddgeo {

inline constexpr int kDefaultSamples = 32;
inline constexpr double kDefaultTolerance = 1e-9;
inline constexpr std::uint64_t kDefaultSeed = 42;
inline constexpr int kMaxDraws = 100000;

/// Closed coordinate interval per chart coordinate.
using Box = std::vector<std::pair<double, double>>;

/// Seeded point generator over a coordinate box. A point is admissible iff the
/// optional constraint field is strictly negative there. The point list is
/// built once, sequentially from the seed, so it is reproducible bit for bit.
class Sampler {
 public:
  Sampler(Chart chart, Box box, std::optional<ScalarField> constraint = std::nullopt,
          std::uint64_t seed = kDefaultSeed, int count = kDefaultSamples);

  /// The box [lo, hi]^dim.
  static Box cube(int dim, double lo = -1.0, double hi = 1.0);

  const Chart& chart() const noexcept { return chart_; }
  const Box& box() const noexcept { return box_; }
  const std::optional<ScalarField>& constraint() const noexcept { return constraint_; }
  std::uint64_t seed() const noexcept { return seed_; }
  int count() const noexcept { return count_; }
  const std::vector<Point>& points() const noexcept { return points_; }

  /// Same configuration with another seed.
  Sampler reseeded(std::uint64_t seed) const;

 private:
  Chart chart_;
  Box box_;
  std::optional<ScalarField> constraint_;
  std::uint64_t seed_;
  int count_;
  std::vector<Point> points_;
};

/// |a - b| / (1 + max(|a|, |b|)).
double relative_residual(double a, double b);

/// Outcome of a sampled equality test.
struct Comparison {
  bool equal = true;
  double residual = 0.0;
  std::optional<std::string> diagnostic;  // set when evaluation failed
};

/// max over samples of relative_residual(f, g); equal iff residual <= tol.
/// A domain error at any sample makes the comparison fail with a diagnostic.
Comparison field_equal(const ScalarField& f, const ScalarField& g, const Sampler& s,
                       double tol = kDefaultTolerance);

/// Evaluates a batch of expressions at every sample point; result[k][i] is
/// expression i at point k. Throws DomainError carrying the point.
std::vector<std::vector<double>> sample_values(std::span<const Expr> exprs, const Sampler& s);

std::string describe_point(const Point& p);

}  // namespace oddgeo
