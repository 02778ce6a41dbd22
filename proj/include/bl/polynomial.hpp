#pragma once

#include <map>
#include <optional>
#include <vector>

#include "bl/geometry.hpp"

namespace bl {

/// Sparse multivariate polynomial: exponent multi-index -> coefficient.
/// Zero coefficients are never stored.
class Polynomial {
 public:
  explicit Polynomial(int num_vars = 0) : num_vars_(num_vars) {}

  static Polynomial constant(int num_vars, double c);
  static Polynomial variable(int num_vars, int index);

  int num_vars() const { return num_vars_; }
  const std::map<std::vector<int>, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int total_degree() const;  // 0 for the zero polynomial

  void add_term(const std::vector<int>& exp, double coeff);
  double evaluate(const Vector& x) const;
  Polynomial derivative(int var) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double c) const;

  /// Substitution x <- A y + b; the result lives in A.cols() variables.
  Polynomial compose_affine(const Matrix& a, const Vector& b) const;

  /// General substitution x_i <- subst[i](y).
  Polynomial compose(const std::vector<Polynomial>& subst) const;

 private:
  int num_vars_;
  std::map<std::vector<int>, double> terms_;
};

/// Quotient of polynomials; the denominator is absent for plain polynomials.
/// Rational components come in through configs only and are differentiated by
/// the quotient rule.
struct RationalFn {
  Polynomial num;
  std::optional<Polynomial> den;

  RationalFn() = default;
  RationalFn(Polynomial n) : num(std::move(n)) {}
  RationalFn(Polynomial n, Polynomial d) : num(std::move(n)), den(std::move(d)) {}

  bool is_polynomial() const { return !den.has_value(); }
  double evaluate(const Vector& x) const;
  RationalFn derivative(int var) const;
  RationalFn compose_affine(const Matrix& a, const Vector& b) const;
  RationalFn compose(const std::vector<Polynomial>& subst) const;

  /// Fiber-degree bound: total degree for polynomials, the conservative
  /// max(deg num, deg den) + deg den for quotients.
  int degree_bound() const;
};

/// Map R^n -> R^{n_j} with polynomial (or rational) components and an exact
/// symbolic Jacobian, precomputed so evaluation stays lock-free.
class PolynomialMap {
 public:
  PolynomialMap(int domain_dim, std::vector<RationalFn> components);

  int domain_dim() const { return domain_dim_; }
  int target_dim() const { return static_cast<int>(components_.size()); }
  const std::vector<RationalFn>& components() const { return components_; }

  Vector evaluate(const Vector& x) const;
  Matrix jacobian_at(const Vector& x) const;
  const std::vector<std::vector<RationalFn>>& symbolic_jacobian() const { return jacobian_; }

  int degree() const;  // max component fiber-degree bound, at least 1
  bool is_polynomial() const;
  PolynomialMap compose_affine(const Matrix& a, const Vector& b) const;

  /// B composed with a polynomial change of variables (one polynomial per
  /// original variable, all in a common new variable set).
  PolynomialMap compose(const std::vector<Polynomial>& subst) const;

  static PolynomialMap linear(const Matrix& l);

 private:
  int domain_dim_;
  std::vector<RationalFn> components_;
  std::vector<std::vector<RationalFn>> jacobian_;  // [component][var]
};

/// Grid points of `box` lying on the fiber B^{-1}(z) up to half a cell
/// diagonal (scaled by the local Lipschitz estimate), each refined by one
/// Newton step toward the fiber. Desk scale: target dim <= 2, domain <= 3.
std::vector<Vector> fiber_points(const PolynomialMap& b, const Vector& z, const Box& box,
                                 int grid_n);

}  // namespace bl
