#include "bl/testfn.hpp"

#include <cmath>
#include <stdexcept>

namespace bl {

TestFunction TestFunction::indicator_ball(Vector center, double radius, double coeff) {
  int d = static_cast<int>(center.size());
  return balls({Ball{std::move(center), radius, coeff}}, d);
}

TestFunction TestFunction::balls(std::vector<Ball> balls, int dim) {
  TestFunction f;
  f.kind_ = Kind::ball_indicator_sum;
  f.dim_ = dim;
  for (const auto& b : balls) {
    if (b.center.size() != dim || b.radius <= 0.0 || b.coeff < 0.0)
      throw std::invalid_argument("test function: bad ball");
  }
  f.balls_ = std::move(balls);
  return f;
}

TestFunction TestFunction::gaussians(std::vector<Gaussian> gs, int dim) {
  TestFunction f;
  f.kind_ = Kind::gaussian_mixture;
  f.dim_ = dim;
  for (const auto& g : gs)
    if (g.mean.size() != dim || g.sigma <= 0.0 || g.coeff < 0.0)
      throw std::invalid_argument("test function: bad gaussian");
  f.gaussians_ = std::move(gs);
  return f;
}

TestFunction TestFunction::grid(Box support, std::vector<int> shape, std::vector<double> values) {
  TestFunction f;
  f.kind_ = Kind::grid_sampled;
  f.dim_ = support.dim();
  std::size_t total = 1;
  for (int s : shape) {
    if (s < 2) throw std::invalid_argument("test function: grid too small");
    total *= static_cast<std::size_t>(s);
  }
  if (values.size() != total || static_cast<int>(shape.size()) != f.dim_)
    throw std::invalid_argument("test function: grid shape mismatch");
  for (double v : values)
    if (v < 0.0) throw std::invalid_argument("test function: negative value");
  f.grid_box_ = std::move(support);
  f.shape_ = std::move(shape);
  f.values_ = std::move(values);
  return f;
}

double TestFunction::operator()(const Vector& x) const {
  switch (kind_) {
    case Kind::ball_indicator_sum: {
      double out = 0.0;
      for (const auto& b : balls_)
        if ((x - b.center).norm() <= b.radius) out += b.coeff;  // closed balls
      return out;
    }
    case Kind::gaussian_mixture: {
      double out = 0.0;
      for (const auto& g : gaussians_) {
        double q = (x - g.mean).squaredNorm() / (2.0 * g.sigma * g.sigma);
        double norm = std::pow(2.0 * M_PI * g.sigma * g.sigma, -0.5 * dim_);
        out += g.coeff * norm * std::exp(-q);
      }
      return out;
    }
    case Kind::grid_sampled: {
      if (!grid_box_.contains(x)) return 0.0;
      // Multilinear interpolation on node values.
      std::vector<int> base(dim_);
      std::vector<double> frac(dim_);
      for (int i = 0; i < dim_; ++i) {
        double t = (x[i] - grid_box_.lo[i]) / (grid_box_.hi[i] - grid_box_.lo[i]) * (shape_[i] - 1);
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

double TestFunction::integral() const {
  switch (kind_) {
    case Kind::ball_indicator_sum: {
      double out = 0.0;
      for (const auto& b : balls_) out += b.coeff * ball_volume(dim_, b.radius);
      return out;
    }
    case Kind::gaussian_mixture: {
      double out = 0.0;
      for (const auto& g : gaussians_) out += g.coeff;
      return out;
    }
    case Kind::grid_sampled: {
      // Trapezoid-type Riemann sum over nodes.
      double cell = 1.0;
      for (int i = 0; i < dim_; ++i)
        cell *= (grid_box_.hi[i] - grid_box_.lo[i]) / (shape_[i] - 1);
      double s = 0.0;
      for (double v : values_) s += v;
      return s * cell;
    }
  }
  return 0.0;
}

TestFunction TestFunction::scaled(double c) const {
  if (c < 0.0) throw std::invalid_argument("test function: negative scale");
  TestFunction f = *this;
  for (auto& b : f.balls_) b.coeff *= c;
  for (auto& g : f.gaussians_) g.coeff *= c;
  for (auto& v : f.values_) v *= c;
  return f;
}

Box TestFunction::support() const {
  switch (kind_) {
    case Kind::ball_indicator_sum: {
      std::vector<Vector> pts;
      for (const auto& b : balls_) {
        pts.push_back(b.center.array() - b.radius);
        pts.push_back(b.center.array() + b.radius);
      }
      return Box::hull(pts);
    }
    case Kind::gaussian_mixture: {
      std::vector<Vector> pts;
      for (const auto& g : gaussians_) {
        pts.push_back(g.mean.array() - 8.0 * g.sigma);
        pts.push_back(g.mean.array() + 8.0 * g.sigma);
      }
      return Box::hull(pts);
    }
    case Kind::grid_sampled:
      return grid_box_;
  }
  throw std::logic_error("unreachable");
}

}  // namespace bl
