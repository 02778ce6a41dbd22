#pragma once

#include <vector>

#include "bl/polynomial.hpp"
#include "bl/solver.hpp"

namespace bl {

/// Nonlinear datum: m polynomial (or rational) maps with a common domain and
/// exponents on the scaling polytope. Construction rejects data off the
/// scaling condition. Degrees default to the per-map fiber-degree bounds and
/// may be overridden for rational-map experiments.
struct NonlinearDatum {
  int domain_dim = 0;
  std::vector<PolynomialMap> maps;
  std::vector<double> exponents;
  std::vector<int> degrees;

  NonlinearDatum(std::vector<PolynomialMap> ms, std::vector<double> ps,
                 std::vector<int> degree_overrides = {});

  int map_count() const { return static_cast<int>(maps.size()); }

  /// Derivative datum at x.
  BLDatum linearized_at(const Vector& x) const;

  NonlinearDatum composed_with_affine(const Matrix& a, const Vector& b) const;
};

/// Evaluator of the affine-invariant weight x -> 1 / BL(dB(x), p).
/// Points where some differential drops rank (relative singular value under
/// surjectivity_tol), and points where the constant is infinite, get weight 0.
struct WeightField {
  NonlinearDatum datum;
  double surjectivity_tol = 1e-8;
  SolveOptions solver_opts;

  explicit WeightField(NonlinearDatum d);

  double operator()(const Vector& x) const;
};

}  // namespace bl
