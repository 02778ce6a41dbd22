#include "bl/discrete.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace bl {

namespace {

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t out = 1;
  while (e-- > 0) out *= b;
  return out;
}

}  // namespace

BallCollection BallCollection::single(Vector center, double radius) {
  const int dim = static_cast<int>(center.size());
  std::vector<Vector> centers;
  centers.push_back(std::move(center));
  return make(dim, radius, std::move(centers));
}

BallCollection BallCollection::make(int dim, double radius, std::vector<Vector> centers,
                                    std::vector<int> multiplicities) {
  if (radius <= 0.0) throw std::invalid_argument("collection: radius must be positive");
  BallCollection c;
  c.dim = dim;
  c.radius = radius;
  for (const auto& p : centers)
    if (p.size() != dim) throw std::invalid_argument("collection: center arity");
  if (!multiplicities.empty() && multiplicities.size() != centers.size())
    throw std::invalid_argument("collection: multiplicity arity");
  for (int m : multiplicities)
    if (m < 1) throw std::invalid_argument("collection: multiplicity < 1");
  c.centers = std::move(centers);
  c.multiplicities = std::move(multiplicities);
  return c;
}

int BallCollection::count() const {
  if (multiplicities.empty()) return static_cast<int>(centers.size());
  int s = 0;
  for (int m : multiplicities) s += m;
  return s;
}

int BallCollection::indicator_sum(const Vector& z) const {
  int s = 0;
  for (std::size_t i = 0; i < centers.size(); ++i)
    if ((z - centers[i]).norm() <= radius) s += multiplicities.empty() ? 1 : multiplicities[i];
  return s;
}

TestFunction BallCollection::to_test_function() const {
  std::vector<TestFunction::Ball> bs;
  for (std::size_t i = 0; i < centers.size(); ++i)
    bs.push_back({centers[i], radius,
                  static_cast<double>(multiplicities.empty() ? 1 : multiplicities[i])});
  return TestFunction::balls(std::move(bs), dim);
}

Mesh build_mesh(const Vector& ball_center, double delta, double alpha) {
  if (delta <= 0.0 || alpha <= 1.0) throw std::invalid_argument("mesh: need delta > 0, alpha > 1");
  const double spacing = std::pow(delta, alpha);
  if (spacing >= 2.0 * delta) throw std::invalid_argument("mesh coarser than ball");
  const int d = static_cast<int>(ball_center.size());
  const double reach = 2.0 * delta;
  const int k = static_cast<int>(std::floor(reach / spacing));

  Mesh mesh;
  mesh.center = ball_center;
  mesh.ball_radius = delta;
  mesh.spacing = spacing;
  std::vector<int> idx(d, -k);
  const std::int64_t total = ipow(2 * k + 1, d);
  for (std::int64_t flat = 0; flat < total; ++flat) {
    std::int64_t rest = flat;
    Vector p = ball_center;
    double norm2 = 0.0;
    for (int i = 0; i < d; ++i) {
      int off = static_cast<int>(rest % (2 * k + 1)) - k;
      rest /= 2 * k + 1;
      double step = off * spacing;
      p[i] += step;
      norm2 += step * step;
    }
    if (norm2 <= reach * reach) mesh.points.push_back(std::move(p));
  }
  return mesh;
}

std::vector<double> degree_budget(const NonlinearDatum& datum,
                                  const std::vector<BallCollection>& collections, double delta,
                                  double alpha) {
  if (collections.size() != datum.maps.size())
    throw std::invalid_argument("degree budget: one collection per map");
  std::vector<double> out;
  for (std::size_t j = 0; j < collections.size(); ++j) {
    // Exact dedup across meshes stands in for the nudged-translation device:
    // coincident points count once toward the zero-set degree.
    std::set<std::vector<double>> distinct;
    for (const auto& c : collections[j].centers) {
      Mesh m = build_mesh(c, delta, alpha);
      for (const auto& p : m.points)
        distinct.insert(std::vector<double>(p.data(), p.data() + p.size()));
    }
    out.push_back(static_cast<double>(datum.degrees[j]) * static_cast<double>(distinct.size()));
  }
  return out;
}

double min_residual_in_ball(const PolynomialMap& b, const Vector& z, const Vector& x0, double r,
                            const FiberSearchOptions& opts) {
  const int n = b.domain_dim();
  auto project = [&](Vector y) {
    Vector d = y - x0;
    double nd = d.norm();
    return nd > r ? Vector(x0 + d * (r / nd)) : y;
  };
  double best = (b.evaluate(x0) - z).norm();

  for (int s = 0; s < opts.starts; ++s) {
    Rng rng = Rng::fork(opts.seed, 0xf1be5000ULL + static_cast<std::uint64_t>(s));
    Vector y = x0;
    if (s > 0) {
      Vector dir(n);
      for (int i = 0; i < n; ++i) dir[i] = rng.normal();
      if (dir.norm() < 1e-12) continue;
      dir.normalize();
      y = x0 + dir * (r * std::pow(rng.uniform01(), 1.0 / n));
    }
    double res = (b.evaluate(y) - z).norm();
    double step = 0.5 * r;
    for (int it = 0; it < opts.iterations && res > 1e-15; ++it) {
      Matrix jac = b.jacobian_at(y);
      Vector resid = b.evaluate(y) - z;
      // Gauss-Newton through the pseudoinverse, projected back to the ball.
      Eigen::JacobiSVD<Matrix> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
      Vector gn = project(y - svd.solve(resid));
      double gn_res = (b.evaluate(gn) - z).norm();
      if (gn_res < res) {
        y = gn;
        res = gn_res;
        continue;
      }
      Vector grad = jac.transpose() * resid;
      double gn2 = grad.norm();
      if (gn2 < 1e-18) break;
      bool improved = false;
      while (step > 1e-14 * r) {
        Vector cand = project(y - grad * (step / gn2));
        double cres = (b.evaluate(cand) - z).norm();
        if (cres < res) {
          y = cand;
          res = cres;
          step *= 1.5;
          improved = true;
          break;
        }
        step *= 0.5;
      }
      if (!improved) break;
    }
    best = std::min(best, res);
  }
  return best;
}

int tube_count(const PolynomialMap& b, const Mesh& mesh, const Vector& x, double delta,
               double beta, const FiberSearchOptions& opts) {
  const double reach = std::pow(delta, beta);
  const double tol = 1e-3 * reach;
  int count = 0;
  for (const auto& z : mesh.points)
    if (min_residual_in_ball(b, z, x, reach, opts) <= tol) ++count;
  return count;
}

SideReport pointwise_tube_check(const PolynomialMap& b, const Vector& ball_center, double delta,
                                const Vector& x, double alpha, double beta, double budget_c,
                                const FiberSearchOptions& opts) {
  SideReport rep;
  const int nj = b.target_dim();
  Vector bx = b.evaluate(x);
  double inside = (bx - ball_center).norm() <= delta ? 1.0 : 0.0;
  rep.lhs = row_volume(b.jacobian_at(x)) * inside;

  Mesh mesh = build_mesh(ball_center, delta, alpha);
  rep.rhs = std::pow(delta, (alpha - beta) * nj) * tube_count(b, mesh, x, delta, beta, opts);
  rep.constant = rep.lhs == 0.0 ? 0.0 : rep.lhs / rep.rhs;
  rep.ok = rep.lhs <= budget_c * rep.rhs;
  return rep;
}

namespace {

double probe_slab_integral(const PolynomialMap& b, const Vector& z, const Vector& x, double r,
                           double probe, par::Mode mode) {
  const int n = b.domain_dim();
  const int nj = b.target_dim();
  const double h = probe / 8.0;  // resolves the slab; keeps flat slabs aligned
  const double extent = r + 2.0 * probe;
  const std::int64_t per_axis = 2 * static_cast<std::int64_t>(std::ceil(extent / h));
  const std::int64_t cells = ipow(per_axis, n);
  const double cell_vol = std::pow(h, n);
  const double normalizer = ball_volume(nj, probe);

  double total = par::sum_indexed(
      cells,
      [&](std::int64_t flat) {
        std::int64_t rest = flat;
        Vector y = x;
        double d2 = 0.0;
        for (int i = 0; i < n; ++i) {
          double off = (static_cast<double>(rest % per_axis) - 0.5 * per_axis + 0.5) * h;
          rest /= per_axis;
          y[i] += off;
          d2 += off * off;
        }
        if (d2 > r * r) return 0.0;
        Vector resid = b.evaluate(y) - z;
        if (resid.norm() > probe) return 0.0;
        Matrix jac = b.jacobian_at(y);
        Matrix gram = jac * jac.transpose();
        double det = gram.determinant();
        return det > 0.0 ? std::sqrt(det) : 0.0;
      },
      mode);
  return total * cell_vol / normalizer;
}

}  // namespace

double fiber_measure(const PolynomialMap& b, const Vector& z, const Vector& x, double r,
                     par::Mode mode) {
  double v1 = probe_slab_integral(b, z, x, r, r / 8.0, mode);
  double v2 = probe_slab_integral(b, z, x, r, r / 16.0, mode);
  double v3 = probe_slab_integral(b, z, x, r, r / 32.0, mode);
  double scale = std::max({std::abs(v2), std::abs(v3), 1e-300});
  if (std::abs(v3 - v2) / scale > 0.10) throw std::runtime_error("probe too coarse");
  (void)v1;
  // Halving ladder with O(probe^2) bias.
  return (4.0 * v3 - v2) / 3.0;
}

SideReport fiber_volume_check(const PolynomialMap& b, const Vector& z, const Vector& x,
                              double delta, double beta, double budget_c,
                              const FiberSearchOptions& opts) {
  SideReport rep;
  const int n = b.domain_dim();
  const int nj = b.target_dim();
  const double reach = std::pow(delta, beta);
  const double tol = 1e-3 * reach;
  bool near = min_residual_in_ball(b, z, x, reach, opts) <= tol;
  if (!near) {
    // Vacuous bound away from the fiber; the probe ladder has nothing to
    // resolve there.
    rep.ok = true;
    return rep;
  }
  rep.lhs = std::pow(reach, n - nj);
  rep.rhs = fiber_measure(b, z, x, 2.0 * reach);
  rep.constant = rep.lhs / rep.rhs;
  rep.ok = rep.lhs <= budget_c * rep.rhs;
  return rep;
}

int linearization_check(const PolynomialMap& b, const Vector& x, double delta,
                        const FiberSearchOptions& opts) {
  const int n = b.domain_dim();
  Matrix jac = b.jacobian_at(x);
  if (numerical_rank(jac) < b.target_dim())
    throw std::invalid_argument("linearization: map not submersive at x");
  Vector bx = b.evaluate(x);
  const double tol = 1e-3 * delta;

  int failures = 0;
  for (int s = 0; s < 500; ++s) {
    Rng rng = Rng::fork(opts.seed, 0x11fea12eULL + static_cast<std::uint64_t>(s));
    Vector dir(n);
    for (int i = 0; i < n; ++i) dir[i] = rng.normal();
    if (dir.norm() < 1e-12) continue;
    dir.normalize();
    Vector v = x + dir * (0.5 * delta * std::pow(rng.uniform01(), 1.0 / n));
    Vector target = bx + jac * (v - x);
    if (min_residual_in_ball(b, target, x, delta, opts) > tol) ++failures;
  }
  return failures;
}

double linearization_threshold(const PolynomialMap& b, const Vector& x, double lo, double hi,
                               const FiberSearchOptions& opts) {
  if (linearization_check(b, x, lo, opts) > 0) return 0.0;  // nothing certified
  for (int it = 0; it < 25; ++it) {
    double mid = 0.5 * (lo + hi);
    (linearization_check(b, x, mid, opts) == 0 ? lo : hi) = mid;
  }
  return lo;
}

DiscreteReport discrete_inequality_report(const NonlinearDatum& datum,
                                          const std::vector<BallCollection>& collections,
                                          const IntegrationSpec& spec) {
  if (collections.size() != datum.maps.size())
    throw std::invalid_argument("discrete report: one collection per map");
  std::vector<TestFunction> fs;
  for (const auto& c : collections) fs.push_back(c.to_test_function());
  DiscreteReport rep;
  Estimate lhs = lhs_functional(datum, fs, spec);
  rep.lhs = lhs.value;
  rep.lhs_budget = lhs.budget;
  rep.rhs = 1.0;
  for (std::size_t j = 0; j < collections.size(); ++j) {
    double base = datum.degrees[j] * std::pow(collections[j].radius, collections[j].dim) *
                  collections[j].count();
    rep.rhs *= std::pow(base, datum.exponents[j]);
  }
  rep.ratio = rep.lhs / rep.rhs;
  return rep;
}

ChainReport affine_chain_check(const NonlinearDatum& datum,
                               const std::vector<BallCollection>& collections, double delta,
                               double alpha, double beta, const IntegrationSpec& spec) {
  const int n = datum.domain_dim;
  double p_total = 0.0;
  for (double p : datum.exponents) p_total += p;

  // Constant-derivative data only: fibers are parallel affine subspaces.
  std::vector<Matrix> jacobians;
  std::vector<Subspace> kers;
  for (const auto& m : datum.maps) {
    if (m.degree() > 1) throw std::invalid_argument("chain check: affine maps only");
    Matrix j = m.jacobian_at(Vector::Zero(n));
    kers.push_back(kernel(j));
    jacobians.push_back(std::move(j));
  }
  BLResult blp = bl_prime(kers, datum.exponents);
  if (!blp.finite()) throw std::invalid_argument("chain check: non-transversal fibers");

  ChainReport rep;
  rep.lhs = discrete_inequality_report(datum, collections, spec).lhs;

  const double reach = 2.0 * std::pow(delta, beta);
  // Windowed fiber-mass product, integrated over the same box.
  std::vector<std::vector<Vector>> mesh_targets;  // per map
  for (std::size_t j = 0; j < collections.size(); ++j) {
    std::vector<Vector> targets;
    for (const auto& c : collections[j].centers) {
      Mesh m = build_mesh(c, delta, alpha);
      targets.insert(targets.end(), m.points.begin(), m.points.end());
    }
    mesh_targets.push_back(std::move(targets));
  }

  const int order = spec.order;
  std::int64_t cells = ipow(order, n);
  Vector h = (spec.box.hi - spec.box.lo) / order;
  double integral = par::sum_indexed(
      cells,
      [&](std::int64_t flat) {
        std::int64_t rest = flat;
        Vector x(n);
        for (int i = 0; i < n; ++i) {
          x[i] = spec.box.lo[i] + (static_cast<double>(rest % order) + 0.5) * h[i];
          rest /= order;
        }
        double prod = 1.0;
        for (std::size_t j = 0; j < mesh_targets.size(); ++j) {
          const Matrix& jac = jacobians[j];
          const int codim = n - static_cast<int>(jac.rows());
          Vector bx = datum.maps[j].evaluate(x);
          double mass = 0.0;
          for (const auto& z : mesh_targets[j]) {
            // Distance from x to the affine fiber via the pseudoinverse.
            Vector resid = bx - z;
            Vector step = jac.transpose() * (jac * jac.transpose()).ldlt().solve(resid).eval();
            double d = step.norm();
            if (d <= reach)
              mass += unit_ball_volume(codim) * std::pow(reach * reach - d * d, 0.5 * codim);
          }
          if (mass == 0.0) return 0.0;
          prod *= std::pow(mass, datum.exponents[j]);
        }
        return prod;
      },
      spec.mode);
  integral *= spec.box.volume() / static_cast<double>(cells);

  rep.mid = std::pow(delta, (alpha - beta * p_total) * n) * integral / blp.value;
  rep.constant = rep.mid > 0.0 ? rep.lhs / rep.mid : 0.0;
  return rep;
}

}  // namespace bl
