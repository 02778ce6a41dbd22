#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bl/integrate.hpp"
#include "bl/solver.hpp"

namespace bl {

/// Matrix-group chart model: explicit multiplication/inversion in chart
/// coordinates, a left-Haar density on the chart, and the algebraic degrees
/// of the group and its multiplication map (model-supplied invariants).
struct GroupModel {
  std::string name;
  int dim = 0;
  Box chart;       // open chart domain
  Box sample_box;  // comfortable region for seeded sampling
  Vector identity;
  std::function<Vector(const Vector&, const Vector&)> multiply;
  std::function<Vector(const Vector&)> invert;
  std::function<double(const Vector&)> haar_density;  // omega > 0, omega(e) = 1
  int mult_degree = 1;
  int group_degree = 1;

  /// Modular character through the adjoint determinant, with the exponent
  /// sign calibrated once against the probe integral at construction.
  double modular(const Vector& g) const;
  int modular_sign = -1;  // exponent on |det Ad(g)|, fixed by calibration

  Matrix left_translation_differential(const Vector& g) const;  // d/dy g*y at e
  Matrix adjoint(const Vector& g) const;                        // d/dh g h g^{-1} at e
};

GroupModel make_abelian_group(int dim, double extent = 20.0);
GroupModel make_positive_reals_group();
GroupModel make_affine_line_group();  // x -> ax + b, left Haar da db / a^2
GroupModel make_heisenberg_group();

/// Compactly supported nonnegative function in chart coordinates.
class GroupFunction {
 public:
  static GroupFunction bump(Vector center, Vector widths, double amplitude = 1.0);
  static GroupFunction gaussian(Vector center, double sigma, double amplitude = 1.0);
  static GroupFunction grid(Box support, std::vector<int> shape, std::vector<double> values);

  int dim() const { return dim_; }
  const Box& support() const { return support_; }
  double operator()(const Vector& x) const;

 private:
  GroupFunction() = default;
  enum class Kind { bump, gaussian, grid } kind_ = Kind::bump;
  int dim_ = 0;
  Box support_;
  Vector center_, widths_;
  double amplitude_ = 1.0;
  double sigma_ = 1.0;
  std::vector<int> shape_;
  std::vector<double> values_;
};

struct GroupQuadSpec {
  int order = 96;  // midpoint cells per axis for chart integrals
  par::Mode mode = par::Mode::parallel;
};

/// Haar integral of f over its support box.
double haar_integral(const GroupModel& g, const GroupFunction& f, const GroupQuadSpec& = {});

/// L^p(G, mu) norm; p may be infinity (grid max with a refinement budget).
double lp_norm(const GroupModel& g, const GroupFunction& f, double p, const GroupQuadSpec& = {});

/// Modular character by the probe-integral definition, cross-checked over
/// three reference bumps (consistency 1e-5). Throws "chart too small for g"
/// when a translated probe support leaves the chart.
double modular_character(const GroupModel& g, const Vector& at, const GroupQuadSpec& = {});

/// Left convolution (f * g)(x) = integral of f(x y^{-1}) g(y) dmu(y),
/// sampled on a node grid covering the product support.
GroupFunction convolve(const GroupModel& g, const GroupFunction& f, const GroupFunction& h,
                       const GroupQuadSpec& = {});

struct YoungReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  std::vector<double> modular_exponents;  // weight applied to each factor
};

/// Both sides of the weighted convolution inequality. Factor j carries the
/// modular weight Delta^{sum_{l<j} 1/p_l' - 1} (first factor unweighted);
/// pass apply_weight = false to reproduce the uncorrected run.
YoungReport young_report(const GroupModel& g, const std::vector<GroupFunction>& fs,
                         const std::vector<double>& p, double r, const GroupQuadSpec& = {},
                         bool apply_weight = true);

struct ConnectionReport {
  double max_rel_discrepancy = 0.0;
  int points_used = 0;
  int points_skipped = 0;
};

/// At seeded chart pairs (x1, x2), compares the solver constant of the
/// derivative datum of (x1, x2) -> (x1, x2, x1 x2) with the closed form
/// B_{p,k} * prod omega(x_j)^{-1} Delta(x_j)^{-sum_{l<j} 1/p_l'}.
/// Tangent data are chart Jacobians (finite differences, h = 1e-5) carried
/// to left-invariant target frames.
ConnectionReport group_bl_identity_check(const GroupModel& g, const std::vector<double>& p,
                                         int num_points, std::uint64_t seed,
                                         const SolveOptions& = {});

}  // namespace bl
