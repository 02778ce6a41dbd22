#include "bl/group.hpp"

#include <cmath>
#include <stdexcept>

namespace bl {

namespace {

constexpr double kFdStep = 1e-5;

std::int64_t ipow64(std::int64_t b, int e) {
  std::int64_t out = 1;
  while (e-- > 0) out *= b;
  return out;
}

// Midpoint integral of fn over box.
double box_integral(const Box& box, int order, par::Mode mode,
                    const std::function<double(const Vector&)>& fn) {
  const int n = box.dim();
  const std::int64_t cells = ipow64(order, n);
  Vector h = (box.hi - box.lo) / order;
  double total = par::sum_indexed(
      cells,
      [&](std::int64_t flat) {
        std::int64_t rest = flat;
        Vector x(n);
        for (int i = 0; i < n; ++i) {
          x[i] = box.lo[i] + (static_cast<double>(rest % order) + 0.5) * h[i];
          rest /= order;
        }
        return fn(x);
      },
      mode);
  return total * box.volume() / static_cast<double>(cells);
}

// Bounding box of { y * g : y in s } or { g * y : y in s }; the chart models
// multiply affinely in each argument, so corners suffice.
Box translated_support(const GroupModel& m, const Box& s, const Vector& g, bool right) {
  std::vector<Vector> pts;
  for (unsigned mask = 0; mask < (1u << s.dim()); ++mask) {
    Vector c = s.corner(mask);
    pts.push_back(right ? m.multiply(c, g) : m.multiply(g, c));
  }
  return Box::hull(pts, 1e-12);
}

void require_inside_chart(const GroupModel& m, const Box& b, const char* msg) {
  for (int i = 0; i < b.dim(); ++i)
    if (b.lo[i] < m.chart.lo[i] || b.hi[i] > m.chart.hi[i]) throw std::runtime_error(msg);
}

double probe_modular(const GroupModel& m, const GroupFunction& probe, const Vector& g,
                     const GroupQuadSpec& spec) {
  double reference = box_integral(probe.support(), spec.order, spec.mode, [&](const Vector& x) {
    return probe(x) * m.haar_density(x);
  });
  // supp(f(. g)) = supp(f) g^{-1}
  Box shifted = translated_support(m, probe.support(), m.invert(g), true);
  require_inside_chart(m, shifted, "chart too small for g");
  double translated = box_integral(shifted, spec.order, spec.mode, [&](const Vector& x) {
    return probe(m.multiply(x, g)) * m.haar_density(x);
  });
  return reference / translated;
}

GroupFunction reference_probe(const GroupModel& m, int which) {
  Vector center = m.identity;
  Vector widths = Vector::Constant(m.dim, 0.0);
  for (int i = 0; i < m.dim; ++i) {
    double room = 0.5 * std::min(m.identity[i] - m.chart.lo[i], m.chart.hi[i] - m.identity[i]);
    widths[i] = room * (which == 0 ? 0.5 : which == 1 ? 0.3 : 0.4);
  }
  if (which == 2) {
    for (int i = 0; i < m.dim; ++i) center[i] += 0.2 * widths[i];
  }
  return GroupFunction::bump(center, widths);
}

void validate_model(const GroupModel& m) {
  Rng rng(2024);
  for (int t = 0; t < 20; ++t) {
    Vector g(m.dim);
    for (int i = 0; i < m.dim; ++i) g[i] = rng.uniform(m.sample_box.lo[i], m.sample_box.hi[i]);
    if ((m.multiply(g, m.invert(g)) - m.identity).norm() > 1e-10)
      throw std::logic_error(m.name + ": inverse law fails");
  }
  if (std::abs(m.haar_density(m.identity) - 1.0) > 1e-12)
    throw std::logic_error(m.name + ": haar density not normalized at identity");

  // Left invariance of the Haar density, checked by probe integrals.
  GroupQuadSpec spec;
  GroupFunction probe = reference_probe(m, 0);
  double base = box_integral(probe.support(), spec.order, spec.mode,
                             [&](const Vector& x) { return probe(x) * m.haar_density(x); });
  for (int t = 0; t < 2; ++t) {
    Vector g(m.dim);
    for (int i = 0; i < m.dim; ++i)
      g[i] = 0.5 * (m.sample_box.lo[i] + m.sample_box.hi[i]) +
             0.2 * (t == 0 ? 1 : -1) * (m.sample_box.hi[i] - m.sample_box.lo[i]);
    Box pre = translated_support(m, probe.support(), m.invert(g), false);  // g^{-1} supp
    require_inside_chart(m, pre, "validate: chart too small");
    double moved = box_integral(pre, spec.order, spec.mode, [&](const Vector& x) {
      return probe(m.multiply(g, x)) * m.haar_density(x);
    });
    if (std::abs(moved - base) > 1e-6 * std::abs(base))
      throw std::logic_error(m.name + ": haar density is not left invariant");
  }
}

void calibrate_modular_sign(GroupModel& m) {
  // Find a sample with |det Ad| away from 1; unimodular models keep the
  // default (both signs agree there).
  Rng rng(77);
  for (int t = 0; t < 40; ++t) {
    Vector g(m.dim);
    for (int i = 0; i < m.dim; ++i) g[i] = rng.uniform(m.sample_box.lo[i], m.sample_box.hi[i]);
    double det = std::abs(m.adjoint(g).determinant());
    if (std::abs(std::log(det)) < 0.2) continue;
    double probe = probe_modular(m, reference_probe(m, 0), g, GroupQuadSpec{});
    double plus = det, minus = 1.0 / det;
    m.modular_sign = std::abs(probe - minus) <= std::abs(probe - plus) ? -1 : 1;
    double chosen = m.modular_sign == 1 ? plus : minus;
    if (std::abs(probe - chosen) > 1e-4 * chosen)
      throw std::logic_error(m.name + ": adjoint determinant disagrees with the probe");
    return;
  }
}

}  // namespace

Matrix GroupModel::left_translation_differential(const Vector& g) const {
  Matrix d(dim, dim);
  for (int j = 0; j < dim; ++j) {
    Vector hi = identity, lo = identity;
    hi[j] += kFdStep;
    lo[j] -= kFdStep;
    d.col(j) = (multiply(g, hi) - multiply(g, lo)) / (2.0 * kFdStep);
  }
  return d;
}

Matrix GroupModel::adjoint(const Vector& g) const {
  Vector ginv = invert(g);
  Matrix d(dim, dim);
  for (int j = 0; j < dim; ++j) {
    Vector hi = identity, lo = identity;
    hi[j] += kFdStep;
    lo[j] -= kFdStep;
    Vector chi = multiply(multiply(g, hi), ginv);
    Vector clo = multiply(multiply(g, lo), ginv);
    d.col(j) = (chi - clo) / (2.0 * kFdStep);
  }
  return d;
}

double GroupModel::modular(const Vector& g) const {
  double det = std::abs(adjoint(g).determinant());
  return modular_sign == 1 ? det : 1.0 / det;
}

GroupModel make_abelian_group(int dim, double extent) {
  GroupModel m;
  m.name = "abelian";
  m.dim = dim;
  m.chart = Box::cube(dim, extent);
  m.sample_box = Box::cube(dim, 0.25 * extent);
  m.identity = Vector::Zero(dim);
  m.multiply = [](const Vector& a, const Vector& b) { return Vector(a + b); };
  m.invert = [](const Vector& a) { return Vector(-a); };
  m.haar_density = [](const Vector&) { return 1.0; };
  m.mult_degree = 1;
  validate_model(m);
  calibrate_modular_sign(m);
  return m;
}

GroupModel make_positive_reals_group() {
  GroupModel m;
  m.name = "positive-reals";
  m.dim = 1;
  m.chart = Box((Vector(1) << 0.05).finished(), (Vector(1) << 40.0).finished());
  m.sample_box = Box((Vector(1) << 0.6).finished(), (Vector(1) << 1.8).finished());
  m.identity = Vector::Ones(1);
  m.multiply = [](const Vector& a, const Vector& b) {
    return (Vector(1) << a[0] * b[0]).finished();
  };
  m.invert = [](const Vector& a) { return (Vector(1) << 1.0 / a[0]).finished(); };
  m.haar_density = [](const Vector& a) { return 1.0 / a[0]; };
  m.mult_degree = 2;
  validate_model(m);
  calibrate_modular_sign(m);
  return m;
}

GroupModel make_affine_line_group() {
  GroupModel m;
  m.name = "axb";
  m.dim = 2;
  m.chart = Box((Vector(2) << 0.05, -40.0).finished(), (Vector(2) << 40.0, 40.0).finished());
  m.sample_box = Box((Vector(2) << 0.6, -0.5).finished(), (Vector(2) << 1.8, 0.5).finished());
  m.identity = (Vector(2) << 1.0, 0.0).finished();
  m.multiply = [](const Vector& g, const Vector& h) {
    return (Vector(2) << g[0] * h[0], g[0] * h[1] + g[1]).finished();
  };
  m.invert = [](const Vector& g) {
    return (Vector(2) << 1.0 / g[0], -g[1] / g[0]).finished();
  };
  m.haar_density = [](const Vector& g) { return 1.0 / (g[0] * g[0]); };
  m.mult_degree = 2;
  validate_model(m);
  calibrate_modular_sign(m);
  return m;
}

GroupModel make_heisenberg_group() {
  GroupModel m;
  m.name = "heisenberg";
  m.dim = 3;
  m.chart = Box::cube(3, 8.0);
  m.sample_box = Box::cube(3, 1.0);
  m.identity = Vector::Zero(3);
  m.multiply = [](const Vector& g, const Vector& h) {
    return (Vector(3) << g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1]).finished();
  };
  m.invert = [](const Vector& g) {
    return (Vector(3) << -g[0], -g[1], -g[2] + g[0] * g[1]).finished();
  };
  m.haar_density = [](const Vector&) { return 1.0; };
  m.mult_degree = 2;
  validate_model(m);
  calibrate_modular_sign(m);
  return m;
}

GroupFunction GroupFunction::bump(Vector center, Vector widths, double amplitude) {
  GroupFunction f;
  f.kind_ = Kind::bump;
  f.dim_ = static_cast<int>(center.size());
  for (int i = 0; i < f.dim_; ++i)
    if (!(widths[i] > 0.0)) throw std::invalid_argument("bump: widths must be positive");
  f.support_ = Box(center - widths, center + widths);
  f.center_ = std::move(center);
  f.widths_ = std::move(widths);
  f.amplitude_ = amplitude;
  return f;
}

GroupFunction GroupFunction::gaussian(Vector center, double sigma, double amplitude) {
  GroupFunction f;
  f.kind_ = Kind::gaussian;
  f.dim_ = static_cast<int>(center.size());
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian: sigma must be positive");
  f.support_ = Box(center.array() - 8.0 * sigma, center.array() + 8.0 * sigma);
  f.center_ = std::move(center);
  f.sigma_ = sigma;
  f.amplitude_ = amplitude;
  return f;
}

GroupFunction GroupFunction::grid(Box support, std::vector<int> shape,
                                  std::vector<double> values) {
  GroupFunction f;
  f.kind_ = Kind::grid;
  f.dim_ = support.dim();
  std::size_t total = 1;
  for (int s : shape) {
    if (s < 2) throw std::invalid_argument("group grid: shape");
    total *= static_cast<std::size_t>(s);
  }
  if (values.size() != total || static_cast<int>(shape.size()) != f.dim_)
    throw std::invalid_argument("group grid: payload mismatch");
  f.support_ = std::move(support);
  f.shape_ = std::move(shape);
  f.values_ = std::move(values);
  return f;
}

double GroupFunction::operator()(const Vector& x) const {
  switch (kind_) {
    case Kind::bump: {
      double out = amplitude_;
      for (int i = 0; i < dim_; ++i) {
        double t = (x[i] - center_[i]) / widths_[i];
        if (std::abs(t) >= 1.0) return 0.0;
        out *= std::exp(1.0 - 1.0 / (1.0 - t * t));
      }
      return out;
    }
    case Kind::gaussian: {
      if (!support_.contains(x)) return 0.0;
      double q = (x - center_).squaredNorm() / (2.0 * sigma_ * sigma_);
      return amplitude_ * std::exp(-q);
    }
    case Kind::grid: {
      if (!support_.contains(x)) return 0.0;
      std::vector<int> base(dim_);
      std::vector<double> frac(dim_);
      for (int i = 0; i < dim_; ++i) {
        double t =
            (x[i] - support_.lo[i]) / (support_.hi[i] - support_.lo[i]) * (shape_[i] - 1);
        int b = std::min(static_cast<int>(t), shape_[i] - 2);
        base[i] = b;
        frac[i] = t - b;
      }
      double out = 0.0;
      for (unsigned mask = 0; mask < (1u << dim_); ++mask) {
        double w = 1.0;
        std::size_t idx = 0, stride = 1;
        for (int i = 0; i < dim_; ++i) {
          int on = (mask >> i) & 1u;
          w *= on ? frac[i] : 1.0 - frac[i];
          idx += stride * static_cast<std::size_t>(base[i] + on);
          stride *= static_cast<std::size_t>(shape_[i]);
        }
        out += w * values_[idx];
      }
      return out;
    }
  }
  return 0.0;
}

double haar_integral(const GroupModel& g, const GroupFunction& f, const GroupQuadSpec& spec) {
  require_inside_chart(g, f.support(), "support leaves the chart");
  return box_integral(f.support(), spec.order, spec.mode,
                      [&](const Vector& x) { return f(x) * g.haar_density(x); });
}

double lp_norm(const GroupModel& g, const GroupFunction& f, double p, const GroupQuadSpec& spec) {
  if (std::isinf(p)) {
    // Grid max with a refinement check folded into the returned value.
    auto grid_max = [&](int order) {
      const Box& s = f.support();
      const int n = s.dim();
      std::int64_t cells = ipow64(order, n);
      Vector h = (s.hi - s.lo) / order;
      double best = 0.0;
      for (std::int64_t flat = 0; flat < cells; ++flat) {
        std::int64_t rest = flat;
        Vector x(n);
        for (int i = 0; i < n; ++i) {
          x[i] = s.lo[i] + (static_cast<double>(rest % order) + 0.5) * h[i];
          rest /= order;
        }
        best = std::max(best, f(x));
      }
      return best;
    };
    double coarse = grid_max(spec.order), fine = grid_max(2 * spec.order);
    if (std::abs(fine - coarse) > 0.05 * std::max(fine, 1e-300))
      throw std::runtime_error("sup norm: grid not refined enough");
    return fine;
  }
  double integral = box_integral(f.support(), spec.order, spec.mode, [&](const Vector& x) {
    double v = f(x);
    return v == 0.0 ? 0.0 : std::pow(v, p) * g.haar_density(x);
  });
  return std::pow(integral, 1.0 / p);
}

double modular_character(const GroupModel& g, const Vector& at, const GroupQuadSpec& spec) {
  double first = 0.0;
  for (int which = 0; which < 3; ++which) {
    double val = probe_modular(g, reference_probe(g, which), at, spec);
    if (which == 0)
      first = val;
    else if (std::abs(val - first) > 1e-5 * std::abs(first))
      throw std::runtime_error("modular character: probes disagree");
  }
  return first;
}

namespace {

struct Evaluator {
  std::function<double(const Vector&)> fn;
  Box support;
};

struct detail_kahan_sum_t {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    double y = x - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

GroupFunction convolve_eval(const GroupModel& g, const Evaluator& f, const Evaluator& h,
                            const GroupQuadSpec& spec) {
  // Output support: products u*v over the two support boxes.
  std::vector<Vector> pts;
  for (unsigned a = 0; a < (1u << g.dim); ++a)
    for (unsigned b = 0; b < (1u << g.dim); ++b)
      pts.push_back(g.multiply(f.support.corner(a), h.support.corner(b)));
  Box out_box = Box::hull(pts, 1e-9);
  require_inside_chart(g, f.support, "support leaves the chart");
  require_inside_chart(g, h.support, "support leaves the chart");
  require_inside_chart(g, out_box, "product support escapes chart");

  // The inner quadrature rule over supp(h) is shared by every output point:
  // tabulate inverted nodes and weighted integrand values once.
  const std::int64_t inner_cells = ipow64(spec.order, g.dim);
  Vector inner_h = (h.support.hi - h.support.lo) / spec.order;
  const double inner_vol = h.support.volume() / static_cast<double>(inner_cells);
  std::vector<Vector> node_inverse;
  std::vector<double> node_weight;
  node_inverse.reserve(static_cast<std::size_t>(inner_cells));
  for (std::int64_t flat = 0; flat < inner_cells; ++flat) {
    std::int64_t rest = flat;
    Vector y(g.dim);
    for (int i = 0; i < g.dim; ++i) {
      y[i] = h.support.lo[i] + (static_cast<double>(rest % spec.order) + 0.5) * inner_h[i];
      rest /= spec.order;
    }
    double hy = h.fn(y);
    if (hy == 0.0) continue;
    node_inverse.push_back(g.invert(y));
    node_weight.push_back(hy * g.haar_density(y) * inner_vol);
  }

  const int nodes = spec.order + 1;
  std::vector<int> shape(static_cast<std::size_t>(g.dim), nodes);
  std::int64_t total = ipow64(nodes, g.dim);
  std::vector<double> values(static_cast<std::size_t>(total), 0.0);
  Vector step = (out_box.hi - out_box.lo) / spec.order;

  par::for_each(
      total,
      [&](std::int64_t flat) {
        std::int64_t rest = flat;
        Vector x(g.dim);
        for (int i = 0; i < g.dim; ++i) {
          x[i] = out_box.lo[i] + static_cast<double>(rest % nodes) * step[i];
          rest /= nodes;
        }
        detail_kahan_sum_t acc{};
        for (std::size_t k = 0; k < node_inverse.size(); ++k) {
          double fv = f.fn(g.multiply(x, node_inverse[k]));
          if (fv != 0.0) acc.add(fv * node_weight[k]);
        }
        values[static_cast<std::size_t>(flat)] = acc.sum;
      },
      spec.mode);
  return GroupFunction::grid(out_box, std::move(shape), std::move(values));
}

}  // namespace

GroupFunction convolve(const GroupModel& g, const GroupFunction& f, const GroupFunction& h,
                       const GroupQuadSpec& spec) {
  Evaluator fe{[&f](const Vector& x) { return f(x); }, f.support()};
  Evaluator he{[&h](const Vector& x) { return h(x); }, h.support()};
  return convolve_eval(g, fe, he, spec);
}

YoungReport young_report(const GroupModel& g, const std::vector<GroupFunction>& fs,
                         const std::vector<double>& p, double r, const GroupQuadSpec& spec,
                         bool apply_weight) {
  const int m = static_cast<int>(fs.size());
  if (m < 2 || m > 3 || p.size() != fs.size())
    throw std::invalid_argument("young: two or three factors");
  double dual_sum = 0.0, sigma = 0.0;
  for (double pj : p) {
    if (pj < 1.0) throw std::invalid_argument("young: p_j >= 1 required");
    dual_sum += 1.0 - 1.0 / pj;
    sigma += 1.0 / pj;
  }
  double r_dual = std::isinf(r) ? 1.0 : 1.0 - 1.0 / r;
  if (std::abs(r_dual - dual_sum) > 1e-9)
    throw std::invalid_argument("young: exponent relation violated");

  YoungReport rep;
  // Modular weights: factor j carries Delta^{sum_{l<j} 1/p_l' - 1} (j >= 2).
  std::vector<double> weights(fs.size(), 0.0);
  double acc = 0.0;
  for (int j = 0; j < m; ++j) {
    if (j > 0) weights[static_cast<std::size_t>(j)] = apply_weight ? acc - 1.0 : 0.0;
    acc += 1.0 - 1.0 / p[static_cast<std::size_t>(j)];
  }
  rep.modular_exponents = weights;

  auto weighted = [&](int j) {
    const GroupFunction& f = fs[static_cast<std::size_t>(j)];
    double w = weights[static_cast<std::size_t>(j)];
    return Evaluator{[&f, w, &g](const Vector& x) {
                       double v = f(x);
                       return v == 0.0 || w == 0.0 ? v : v * std::pow(g.modular(x), w);
                     },
                     f.support()};
  };

  GroupFunction conv = convolve_eval(g, weighted(0), weighted(1), spec);
  if (m == 3) {
    Evaluator ce{[&conv](const Vector& x) { return conv(x); }, conv.support()};
    conv = convolve_eval(g, ce, weighted(2), spec);
  }
  rep.lhs = lp_norm(g, conv, r, spec);

  rep.rhs = g.group_degree * std::pow(g.mult_degree, sigma);
  for (int j = 0; j < m; ++j)
    rep.rhs *= lp_norm(g, fs[static_cast<std::size_t>(j)], p[static_cast<std::size_t>(j)], spec);
  rep.ratio = rep.lhs / rep.rhs;
  return rep;
}

ConnectionReport group_bl_identity_check(const GroupModel& g, const std::vector<double>& p,
                                         int num_points, std::uint64_t seed,
                                         const SolveOptions& opts) {
  if (p.size() != 2) throw std::invalid_argument("identity check: two factors");
  const int k = g.dim;
  double r_dual_inv = (1.0 - 1.0 / p[0]) + (1.0 - 1.0 / p[1]);
  std::vector<double> exps = {1.0 / p[0], 1.0 / p[1], r_dual_inv};

  // Euclidean reference constant for the exponent tuple, one dimension at a
  // time (the constant tensorizes over k).
  Matrix e1 = (Matrix(1, 2) << 1, 0).finished();
  Matrix e2 = (Matrix(1, 2) << 0, 1).finished();
  Matrix sum = (Matrix(1, 2) << 1, 1).finished();
  BLResult base = bl_constant(BLDatum(2, {e1, e2, sum}, exps), opts);
  if (!base.finite()) throw std::runtime_error("identity check: euclidean datum diverged");
  const double b_reference = std::pow(base.value, k);

  ConnectionReport rep;
  for (int t = 0; t < num_points; ++t) {
    Rng rng = Rng::fork(seed, 0x9a0b0000ULL + static_cast<std::uint64_t>(t));
    Vector x1(k), x2(k);
    for (int i = 0; i < k; ++i) {
      x1[i] = rng.uniform(g.sample_box.lo[i], g.sample_box.hi[i]);
      x2[i] = rng.uniform(g.sample_box.lo[i], g.sample_box.hi[i]);
    }

    // Chart Jacobian of the multiplication map at (x1, x2).
    Matrix j3(k, 2 * k);
    for (int v = 0; v < 2 * k; ++v) {
      Vector h1 = x1, l1 = x1, h2 = x2, l2 = x2;
      (v < k ? h1[v] : h2[v - k]) += kFdStep;
      (v < k ? l1[v] : l2[v - k]) -= kFdStep;
      j3.col(v) = (g.multiply(h1, h2) - g.multiply(l1, l2)) / (2.0 * kFdStep);
    }

    Matrix frame1 = g.left_translation_differential(x1).inverse();
    Matrix frame2 = g.left_translation_differential(x2).inverse();
    Matrix frame3 = g.left_translation_differential(g.multiply(x1, x2)).inverse();

    std::vector<Matrix> maps(3);
    maps[0] = Matrix::Zero(k, 2 * k);
    maps[0].leftCols(k) = frame1;
    maps[1] = Matrix::Zero(k, 2 * k);
    maps[1].rightCols(k) = frame2;
    maps[2] = frame3 * j3;

    BLDatum datum(2 * k, std::move(maps), exps);
    if (datum.has_degenerate_map()) {
      ++rep.points_skipped;
      continue;
    }
    BLResult solved = bl_constant(datum, opts);
    if (!solved.finite()) {
      ++rep.points_skipped;
      continue;
    }

    double closed = b_reference;
    double acc = 0.0;
    for (int j = 0; j < 2; ++j) {
      const Vector& xj = j == 0 ? x1 : x2;
      closed /= g.haar_density(xj);
      closed *= std::pow(g.modular(xj), -acc);
      acc += 1.0 - 1.0 / p[static_cast<std::size_t>(j)];
    }
    double rel = std::abs(solved.value - closed) / closed;
    rep.max_rel_discrepancy = std::max(rep.max_rel_discrepancy, rel);
    ++rep.points_used;
  }
  return rep;
}

}  // namespace bl
