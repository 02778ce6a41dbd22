#include "bl/weight.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace bl {

NonlinearDatum::NonlinearDatum(std::vector<PolynomialMap> ms, std::vector<double> ps,
                               std::vector<int> degree_overrides)
    : maps(std::move(ms)), exponents(std::move(ps)) {
  if (maps.empty() || maps.size() != exponents.size())
    throw std::invalid_argument("nonlinear datum: size mismatch");
  domain_dim = maps.front().domain_dim();
  double scale = 0.0;
  for (std::size_t j = 0; j < maps.size(); ++j) {
    if (maps[j].domain_dim() != domain_dim)
      throw std::invalid_argument("nonlinear datum: mixed domain dims");
    if (exponents[j] < 0.0 || exponents[j] > 1.0)
      throw std::invalid_argument("nonlinear datum: exponent outside [0,1]");
    scale += exponents[j] * maps[j].target_dim();
  }
  if (std::abs(scale - domain_dim) > 1e-9)
    throw std::invalid_argument("nonlinear datum: scaling condition violated");
  if (degree_overrides.empty()) {
    for (const auto& m : maps) degrees.push_back(m.degree());
  } else {
    if (degree_overrides.size() != maps.size())
      throw std::invalid_argument("nonlinear datum: degree override arity");
    degrees = std::move(degree_overrides);
  }
}

BLDatum NonlinearDatum::linearized_at(const Vector& x) const {
  BLDatum d;
  d.ambient_dim = domain_dim;
  d.exponents = exponents;
  for (const auto& m : maps) d.maps.push_back(m.jacobian_at(x));
  return d;
}

NonlinearDatum NonlinearDatum::composed_with_affine(const Matrix& a, const Vector& b) const {
  std::vector<PolynomialMap> ms;
  for (const auto& m : maps) ms.push_back(m.compose_affine(a, b));
  return NonlinearDatum(std::move(ms), exponents, degrees);
}

WeightField::WeightField(NonlinearDatum d) : datum(std::move(d)) {
  // Hot path: one solve per evaluation point. Restarts and the subspace
  // prescreen are validated separately at datum scale; divergence of the
  // ascent is the degeneracy signal here.
  solver_opts.restarts = 0;
  solver_opts.prescreen = false;
}

double WeightField::operator()(const Vector& x) const {
  BLDatum d = datum.linearized_at(x);
  for (const auto& l : d.maps) {
    Eigen::JacobiSVD<Matrix> svd(l);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || !(sv(0) > 0.0) || sv(sv.size() - 1) < surjectivity_tol * sv(0))
      return 0.0;
  }
  BLResult r = bl_constant(d, solver_opts);
  if (!r.finite()) return 0.0;
  return 1.0 / r.value;
}

}  // namespace bl
