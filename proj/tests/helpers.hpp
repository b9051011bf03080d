#pragma once

#include <random>
#include <string>
#include <vector>

#include "oddgeo/exterior.hpp"

namespace testing_support {

using namespace oddgeo;

inline Chart coords_chart(int dim) {
  std::vector<std::string> names{"t"};
  for (int i = 1; i < dim; ++i) names.push_back("x" + std::to_string(i));
  return Chart(names, {});
}

inline Sampler cube_sampler(const Chart& c, std::uint64_t seed = kDefaultSeed, int count = kDefaultSamples) {
  return Sampler(c, Sampler::cube(c.dim()), std::nullopt, seed, count);
}

template <Variance V>
Antisym<V, Expr> random_tensor(int dim, int degree, int poly_degree, std::mt19937_64& rng) {
  Antisym<V, Expr> a(dim, degree);
  for (const auto& idx : increasing_indices(dim, degree)) a.add(idx, random_polynomial(dim, poly_degree, rng));
  return a;
}

inline KForm random_form(int dim, int degree, int poly_degree, std::mt19937_64& rng) {
  return random_tensor<Variance::Covariant>(dim, degree, poly_degree, rng);
}

inline KVector random_multivector(int dim, int degree, int poly_degree, std::mt19937_64& rng) {
  return random_tensor<Variance::Contravariant>(dim, degree, poly_degree, rng);
}

inline KVector vec(int dim, int i) { return KVector::basis(dim, {i}); }
inline KForm dx(int dim, int i) { return KForm::basis(dim, {i}); }

}  // namespace testing_support
