#pragma once

#include <vector>

#include "bl/geometry.hpp"

namespace bl {

/// Nonnegative integrable input function on R^d. Ball-indicator sums and
/// Gaussian mixtures carry closed-form integrals; grid-sampled functions are
/// integrated by their own Riemann sums and interpolated multilinearly.
/// In one dimension balls are intervals, which covers indicator inputs.
class TestFunction {
 public:
  enum class Kind { ball_indicator_sum, gaussian_mixture, grid_sampled };

  struct Ball {
    Vector center;
    double radius;
    double coeff;
  };
  struct Gaussian {
    Vector mean;
    double sigma;
    double coeff;  // contributed mass; the density integrates to coeff
  };

  static TestFunction indicator_ball(Vector center, double radius, double coeff = 1.0);
  static TestFunction balls(std::vector<Ball> balls, int dim);
  static TestFunction gaussians(std::vector<Gaussian> gs, int dim);
  static TestFunction grid(Box support, std::vector<int> shape, std::vector<double> values);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  double operator()(const Vector& x) const;
  double integral() const;
  TestFunction scaled(double c) const;

  /// Support box (exact for indicators/grids, +-8 sigma for mixtures).
  Box support() const;

 private:
  TestFunction() = default;
  Kind kind_ = Kind::ball_indicator_sum;
  int dim_ = 0;
  std::vector<Ball> balls_;
  std::vector<Gaussian> gaussians_;
  Box grid_box_;
  std::vector<int> shape_;
  std::vector<double> values_;
};

}  // namespace bl
