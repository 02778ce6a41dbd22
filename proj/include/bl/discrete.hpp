#pragma once

#include <vector>

#include "bl/integrate.hpp"

namespace bl {

/// Multiset of closed delta-balls in a target space; multiplicities counted.
struct BallCollection {
  int dim = 0;
  double radius = 0.0;
  std::vector<Vector> centers;
  std::vector<int> multiplicities;  // empty means all 1

  static BallCollection single(Vector center, double radius);
  static BallCollection make(int dim, double radius, std::vector<Vector> centers,
                             std::vector<int> multiplicities = {});

  int count() const;  // with multiplicity
  int indicator_sum(const Vector& z) const;
  TestFunction to_test_function() const;
};

/// Grid of spacing delta^alpha anchored at the ball center, clipped to the
/// closed dilate of radius 2*delta.
struct Mesh {
  Vector center;
  double ball_radius = 0.0;
  double spacing = 0.0;
  std::vector<Vector> points;
};

/// Throws "mesh coarser than ball" when delta^alpha >= 2*delta.
Mesh build_mesh(const Vector& ball_center, double delta, double alpha);

/// Per-map degree budgets deg(B_j) * #(union of mesh points over the
/// collection), mesh points deduplicated exactly across balls.
std::vector<double> degree_budget(const NonlinearDatum& datum,
                                  const std::vector<BallCollection>& collections, double delta,
                                  double alpha);

struct FiberSearchOptions {
  int starts = 20;
  int iterations = 60;
  std::uint64_t seed = 0;
};

/// min |B(y) - z| over the closed ball of radius r around x0, by seeded
/// multistart projected Gauss-Newton/gradient descent.
double min_residual_in_ball(const PolynomialMap& b, const Vector& z, const Vector& x0, double r,
                            const FiberSearchOptions& opts = {});

/// Number of mesh points whose fiber passes within delta^beta of x; a mesh
/// point belongs when the residual minimum stays below 1e-3 * delta^beta.
int tube_count(const PolynomialMap& b, const Mesh& mesh, const Vector& x, double delta,
               double beta, const FiberSearchOptions& opts = {});

struct SideReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;  // lhs / rhs, 0 when lhs = 0
  bool ok = false;
};

/// Pointwise bound: rowvol(dB(x)) * [B(x) in V] <= C * delta^{(alpha-beta) n_j}
/// * tube_count, with the experiment constant recorded.
SideReport pointwise_tube_check(const PolynomialMap& b, const Vector& ball_center, double delta,
                                const Vector& x, double alpha, double beta, double budget_c = 4.0,
                                const FiberSearchOptions& opts = {});

/// Hausdorff measure of the fiber patch B^{-1}(z) within the closed ball
/// U_r(x): probe-slab quadrature on the ladder {r/8, r/16, r/32}, Richardson
/// extrapolated at second order. Throws "probe too coarse" when the ladder
/// fails to settle within 10%.
double fiber_measure(const PolynomialMap& b, const Vector& z, const Vector& x, double r,
                     par::Mode mode = par::Mode::parallel);

/// Volume bound: delta^{beta (n - n_j)} * [dist(x, fiber) <= delta^beta]
/// <= C * |fiber within U_{2 delta^beta}(x)|.
SideReport fiber_volume_check(const PolynomialMap& b, const Vector& z, const Vector& x,
                              double delta, double beta, double budget_c = 4.0,
                              const FiberSearchOptions& opts = {});

/// Failure count over 500 seeded samples of the containment
/// L^x(U_{delta/2}(x)) inside B(U_delta(x)).
int linearization_check(const PolynomialMap& b, const Vector& x, double delta,
                        const FiberSearchOptions& opts = {});

/// Largest scale in [lo, hi] at which linearization_check reports zero
/// failures, found by bisection.
double linearization_threshold(const PolynomialMap& b, const Vector& x, double lo, double hi,
                               const FiberSearchOptions& opts = {});

struct DiscreteReport {
  double lhs = 0.0;
  double lhs_budget = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

/// Both sides of the discrete inequality for ball-indicator inputs:
/// lhs integrates prod (sum_V chi_V o B_j)^{p_j} under the weight, rhs is
/// prod (deg_j delta^{n_j} #C_j)^{p_j}.
DiscreteReport discrete_inequality_report(const NonlinearDatum& datum,
                                          const std::vector<BallCollection>& collections,
                                          const IntegrationSpec& spec);

struct ChainReport {
  double lhs = 0.0;
  double mid = 0.0;
  double constant = 0.0;  // lhs / mid
};

/// End-to-end assembly for affine data: the discrete lhs against
/// delta^{(alpha - beta P) n} times the windowed transversality functional of
/// the mesh fibers. The recorded constant is the subject of the regression.
ChainReport affine_chain_check(const NonlinearDatum& datum,
                               const std::vector<BallCollection>& collections, double delta,
                               double alpha, double beta, const IntegrationSpec& spec);

}  // namespace bl
