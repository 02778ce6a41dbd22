#include "bl/integrate.hpp"

#include <cmath>
#include <stdexcept>

namespace bl {

namespace {

double pow_convention(double base, double p) {
  if (p == 0.0) return 1.0;  // dropped factor, 0^0 = 1
  if (base == 0.0) return 0.0;
  if (p == 1.0) return base;
  return std::pow(base, p);
}

using Filter = std::function<bool(const Vector&)>;

struct Integrand {
  const NonlinearDatum* datum;
  const std::vector<TestFunction>* fs;
  const WeightField* weight;
  const Filter* filter;

  double operator()(const Vector& x) const {
    if (*filter && !(*filter)(x)) return 0.0;
    double prod = 1.0;
    for (int j = 0; j < datum->map_count(); ++j) {
      double p = datum->exponents[j];
      if (p == 0.0) continue;
      double fv = (*fs)[static_cast<std::size_t>(j)](datum->maps[j].evaluate(x));
      if (fv == 0.0) return 0.0;
      prod *= pow_convention(fv, p);
    }
    double w = (*weight)(x);
    return w == 0.0 ? 0.0 : prod * w;
  }
};

double midpoint_pass(const Integrand& g, const Box& box, int order, par::Mode mode) {
  const int n = box.dim();
  std::int64_t cells = 1;
  for (int i = 0; i < n; ++i) cells *= order;
  Vector h = (box.hi - box.lo) / order;
  double cell_vol = box.volume() / static_cast<double>(cells);
  double total = par::sum_indexed(
      cells,
      [&](std::int64_t flat) {
        Vector x(n);
        std::int64_t rest = flat;
        for (int i = 0; i < n; ++i) {
          x[i] = box.lo[i] + (static_cast<double>(rest % order) + 0.5) * h[i];
          rest /= order;
        }
        return g(x);
      },
      mode);
  return total * cell_vol;
}

Estimate quadrature_estimate(const Integrand& g, const IntegrationSpec& spec) {
  double coarse = midpoint_pass(g, spec.box, spec.order, spec.mode);
  double fine = midpoint_pass(g, spec.box, 2 * spec.order, spec.mode);
  return Estimate{fine, std::abs(fine - coarse)};
}

Estimate monte_carlo_estimate(const Integrand& g, const IntegrationSpec& spec) {
  if (spec.samples < 1000) throw std::invalid_argument("monte carlo: needs >= 1000 samples");
  const int n = spec.box.dim();
  const int strata = 1 << n;  // one half-split per axis
  const std::int64_t per = std::max<std::int64_t>(1, spec.samples / strata);

  Vector mid = 0.5 * (spec.box.lo + spec.box.hi);
  double value = 0.0, variance = 0.0;
  for (int s = 0; s < strata; ++s) {
    Box sub = spec.box;
    for (int i = 0; i < n; ++i) {
      if ((s >> i) & 1)
        sub.lo[i] = mid[i];
      else
        sub.hi[i] = mid[i];
    }
    auto acc = par::sum_indexed_multi<2>(
        per,
        [&](std::int64_t i) -> std::array<double, 2> {
          Rng rng = Rng::fork(spec.seed, static_cast<std::uint64_t>(s) * 0x100000000ULL +
                                             static_cast<std::uint64_t>(i));
          Vector x(n);
          for (int k = 0; k < n; ++k) x[k] = rng.uniform(sub.lo[k], sub.hi[k]);
          double v = g(x);
          return {v, v * v};
        },
        spec.mode);
    double mean = acc[0] / static_cast<double>(per);
    double var = std::max(0.0, acc[1] / static_cast<double>(per) - mean * mean);
    double vol = sub.volume();
    value += vol * mean;
    variance += vol * vol * var / static_cast<double>(per);
  }
  return Estimate{value, std::sqrt(variance)};
}

Estimate integrate_weighted(const NonlinearDatum& datum, const std::vector<TestFunction>& fs,
                            const IntegrationSpec& spec, const Filter& filter) {
  if (static_cast<int>(fs.size()) != datum.map_count())
    throw std::invalid_argument("integrate: one input function per map");
  for (int j = 0; j < datum.map_count(); ++j)
    if (fs[static_cast<std::size_t>(j)].dim() != datum.maps[j].target_dim())
      throw std::invalid_argument("integrate: input dimension mismatch");
  if (spec.box.dim() != datum.domain_dim)
    throw std::invalid_argument("integrate: box dimension mismatch");

  WeightField weight(datum);
  Integrand g{&datum, &fs, &weight, &filter};
  return spec.method == IntegrationSpec::Method::monte_carlo ? monte_carlo_estimate(g, spec)
                                                             : quadrature_estimate(g, spec);
}

}  // namespace

Estimate lhs_functional(const NonlinearDatum& datum, const std::vector<TestFunction>& fs,
                        const IntegrationSpec& spec) {
  Filter none;
  return integrate_weighted(datum, fs, spec, none);
}

double rhs_functional(const NonlinearDatum& datum, const std::vector<TestFunction>& fs) {
  if (static_cast<int>(fs.size()) != datum.map_count())
    throw std::invalid_argument("rhs: one input function per map");
  double out = 1.0;
  for (int j = 0; j < datum.map_count(); ++j) {
    double mass = fs[static_cast<std::size_t>(j)].integral();
    out *= pow_convention(datum.degrees[static_cast<std::size_t>(j)] * mass,
                          datum.exponents[static_cast<std::size_t>(j)]);
  }
  return out;
}

InequalityReport inequality_report(const NonlinearDatum& datum,
                                   const std::vector<TestFunction>& fs,
                                   const IntegrationSpec& spec) {
  InequalityReport rep;
  rep.lhs = lhs_functional(datum, fs, spec);
  rep.rhs = rhs_functional(datum, fs);
  if (rep.rhs == 0.0) {
    rep.violation = rep.lhs.value > 3.0 * rep.lhs.budget;
    rep.ratio = rep.violation ? std::numeric_limits<double>::infinity() : 0.0;
    return rep;
  }
  rep.ratio = rep.lhs.value / rep.rhs;
  return rep;
}

Diffeo Diffeo::identity(int dim) { return affine(Matrix::Identity(dim, dim), Vector::Zero(dim)); }

Diffeo Diffeo::affine(Matrix a, Vector shift) {
  Diffeo d;
  d.kind_ = Kind::affine;
  d.dim_ = static_cast<int>(a.rows());
  if (a.rows() != a.cols() || shift.size() != a.rows())
    throw std::invalid_argument("diffeo: affine shape");
  d.a_inv_ = a.inverse();
  if (!d.a_inv_.allFinite() || std::abs(a.determinant()) < 1e-14)
    throw std::invalid_argument("diffeo: affine map not invertible");
  d.a_ = std::move(a);
  d.shift_ = std::move(shift);
  return d;
}

Diffeo Diffeo::separable_cubic(int dim, double eps, Vector c) {
  Diffeo d;
  d.kind_ = Kind::cubic;
  d.dim_ = dim;
  if (c.size() != dim) throw std::invalid_argument("diffeo: cubic coefficient arity");
  d.eps_ = eps;
  d.cubic_c_ = std::move(c);
  return d;
}

Vector Diffeo::forward(const Vector& x) const {
  if (kind_ == Kind::affine) return a_ * x + shift_;
  Vector y(dim_);
  for (int i = 0; i < dim_; ++i)
    y[i] = x[i] + eps_ * (x[i] * x[i] * x[i] / 3.0 - cubic_c_[i] * x[i]);
  return y;
}

Vector Diffeo::inverse(const Vector& y) const {
  if (kind_ == Kind::affine) return a_inv_ * (y - shift_);
  // Monotone per axis on the validated region: bisection per coordinate.
  Vector x(dim_);
  for (int i = 0; i < dim_; ++i) {
    double lo = y[i] - 10.0 * (1.0 + std::abs(y[i])), hi = y[i] + 10.0 * (1.0 + std::abs(y[i]));
    auto f = [&](double t) { return t + eps_ * (t * t * t / 3.0 - cubic_c_[i] * t) - y[i]; };
    for (int it = 0; it < 200; ++it) {
      double m = 0.5 * (lo + hi);
      (f(m) < 0.0 ? lo : hi) = m;
    }
    x[i] = 0.5 * (lo + hi);
  }
  return x;
}

double Diffeo::jacobian_det(const Vector& x) const {
  if (kind_ == Kind::affine) return a_.determinant();
  double det = 1.0;
  for (int i = 0; i < dim_; ++i) det *= 1.0 + eps_ * (x[i] * x[i] - cubic_c_[i]);
  return det;
}

std::vector<Polynomial> Diffeo::substitution() const {
  std::vector<Polynomial> subst;
  for (int i = 0; i < dim_; ++i) {
    if (kind_ == Kind::affine) {
      Polynomial s = Polynomial::constant(dim_, shift_[i]);
      for (int k = 0; k < dim_; ++k)
        if (a_(i, k) != 0.0) s = s + Polynomial::variable(dim_, k) * a_(i, k);
      subst.push_back(std::move(s));
    } else {
      Polynomial t = Polynomial::variable(dim_, i);
      Polynomial s = t + (t * t * t) * (eps_ / 3.0) + t * (-eps_ * cubic_c_[i]);
      subst.push_back(std::move(s));
    }
  }
  return subst;
}

Box Diffeo::preimage_box(const Box& b) const {
  if (kind_ == Kind::cubic) {
    // Separable and monotone: the preimage of a box is a box.
    return Box(inverse(b.lo), inverse(b.hi));
  }
  std::vector<Vector> pts;
  for (unsigned m = 0; m < (1u << dim_); ++m) pts.push_back(inverse(b.corner(m)));
  return Box::hull(pts);
}

void Diffeo::validate_on(const Box& b, int per_axis) const {
  std::int64_t cells = 1;
  for (int i = 0; i < dim_; ++i) cells *= per_axis;
  for (std::int64_t flat = 0; flat < cells; ++flat) {
    std::int64_t rest = flat;
    Vector x(dim_);
    for (int i = 0; i < dim_; ++i) {
      x[i] = b.lo[i] + (b.hi[i] - b.lo[i]) * static_cast<double>(rest % per_axis) / (per_axis - 1);
      rest /= per_axis;
    }
    if (!(jacobian_det(x) > 0.0)) throw std::runtime_error("not a diffeomorphism on box");
  }
}

double diffeo_invariance_check(const NonlinearDatum& datum, const std::vector<TestFunction>& fs,
                               const Diffeo& phi, const IntegrationSpec& spec) {
  Box pre = phi.preimage_box(spec.box);
  phi.validate_on(pre);

  Estimate base = lhs_functional(datum, fs, spec);

  std::vector<PolynomialMap> composed;
  for (const auto& m : datum.maps) composed.push_back(m.compose(phi.substitution()));
  NonlinearDatum tilde(std::move(composed), datum.exponents, datum.degrees);

  IntegrationSpec tilde_spec = spec;
  tilde_spec.box = pre;
  Box target = spec.box;
  Filter in_image = [&phi, target](const Vector& x) { return target.contains(phi.forward(x)); };
  Estimate moved = integrate_weighted(tilde, fs, tilde_spec, in_image);

  return std::abs(base.value - moved.value) / std::max(std::abs(base.value), 1e-300);
}

}  // namespace bl
