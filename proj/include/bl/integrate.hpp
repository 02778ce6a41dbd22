#pragma once

#include <functional>
#include <vector>

#include "bl/parallel.hpp"
#include "bl/testfn.hpp"
#include "bl/weight.hpp"

namespace bl {

struct IntegrationSpec {
  Box box;
  enum class Method { tensor_quadrature, monte_carlo } method = Method::tensor_quadrature;
  int order = 64;                  // midpoint cells per axis (doubled for the check)
  std::int64_t samples = 100000;   // Monte Carlo budget, >= 1000
  std::uint64_t seed = 0;
  par::Mode mode = par::Mode::parallel;
};

struct Estimate {
  double value = 0.0;
  /// Error budget: the standard error for Monte Carlo, the order-N vs
  /// order-2N difference for quadrature. Assertions use 3x this.
  double budget = 0.0;
};

/// Integral of prod f_j(B_j(x))^{p_j} weighted by 1/BL(dB(x), p) over the
/// box. Factors with p_j = 0 are dropped (0^0 = 1); 0^{p} = 0 for p > 0.
Estimate lhs_functional(const NonlinearDatum& datum, const std::vector<TestFunction>& fs,
                        const IntegrationSpec& spec);

/// prod (deg_j * integral f_j)^{p_j}, closed-form integrals where available.
double rhs_functional(const NonlinearDatum& datum, const std::vector<TestFunction>& fs);

struct InequalityReport {
  Estimate lhs;
  double rhs = 0.0;
  double ratio = 0.0;
  bool violation = false;  // rhs vanished while lhs did not
};

InequalityReport inequality_report(const NonlinearDatum& datum,
                                   const std::vector<TestFunction>& fs,
                                   const IntegrationSpec& spec);

/// Change of variables on the integration domain. Either a global invertible
/// affine map or a separable monotone cubic perturbation
/// y_i = x_i + eps (x_i^3/3 - c_i x_i).
class Diffeo {
 public:
  static Diffeo identity(int dim);
  static Diffeo affine(Matrix a, Vector shift);
  static Diffeo separable_cubic(int dim, double eps, Vector c);

  int dim() const { return dim_; }
  Vector forward(const Vector& x) const;
  Vector inverse(const Vector& y) const;
  double jacobian_det(const Vector& x) const;

  /// Substitution polynomials y-per-original-variable for composing maps.
  std::vector<Polynomial> substitution() const;

  /// Exact bounding box of the preimage of `b` (exact box for cubic,
  /// corner hull for affine).
  Box preimage_box(const Box& b) const;

  /// Samples the Jacobian determinant on a grid; throws when it is not
  /// positive everywhere ("not a diffeomorphism on box").
  void validate_on(const Box& b, int per_axis = 9) const;

 private:
  Diffeo() = default;
  enum class Kind { affine, cubic } kind_ = Kind::affine;
  int dim_ = 0;
  Matrix a_, a_inv_;
  Vector shift_;
  double eps_ = 0.0;
  Vector cubic_c_;
};

/// Relative discrepancy between the weighted functional of (B_j) over the box
/// and of (B_j o phi) over phi^{-1}(box). Equality is exact in the continuum;
/// the return is compared against quadrature/sampling budgets by callers.
double diffeo_invariance_check(const NonlinearDatum& datum, const std::vector<TestFunction>& fs,
                               const Diffeo& phi, const IntegrationSpec& spec);

}  // namespace bl
