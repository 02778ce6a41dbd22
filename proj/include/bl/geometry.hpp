#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace bl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Axis-aligned box; lo and hi must have equal size and lo <= hi componentwise.
struct Box {
  Vector lo;
  Vector hi;

  Box() = default;
  Box(Vector lo_, Vector hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (lo.size() != hi.size()) throw std::invalid_argument("box: dim mismatch");
    for (int i = 0; i < lo.size(); ++i)
      if (!(lo[i] < hi[i])) throw std::invalid_argument("box: degenerate axis");
  }

  static Box cube(int dim, double half_width) {
    return Box(Vector::Constant(dim, -half_width), Vector::Constant(dim, half_width));
  }
  static Box centered(const Vector& c, double half_width) {
    return Box(c.array() - half_width, c.array() + half_width);
  }

  int dim() const { return static_cast<int>(lo.size()); }

  double volume() const {
    double v = 1.0;
    for (int i = 0; i < dim(); ++i) v *= hi[i] - lo[i];
    return v;
  }

  bool contains(const Vector& x) const {
    for (int i = 0; i < dim(); ++i)
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    return true;
  }

  Box inflated(double margin) const {
    return Box(lo.array() - margin, hi.array() + margin);
  }

  /// Corner by bitmask (bit i set -> hi on axis i).
  Vector corner(unsigned mask) const {
    Vector c(dim());
    for (int i = 0; i < dim(); ++i) c[i] = (mask >> i) & 1u ? hi[i] : lo[i];
    return c;
  }

  /// Smallest box containing all given points.
  static Box hull(const std::vector<Vector>& pts, double margin = 0.0) {
    if (pts.empty()) throw std::invalid_argument("box hull: no points");
    Vector lo = pts.front(), hi = pts.front();
    for (const auto& p : pts) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    return Box(lo.array() - margin, hi.array() + margin);
  }
};

/// Volume of the unit ball in d dimensions.
inline double unit_ball_volume(int d) {
  // pi^{d/2} / Gamma(d/2 + 1)
  return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

inline double ball_volume(int d, double radius) {
  return unit_ball_volume(d) * std::pow(radius, d);
}

}  // namespace bl
