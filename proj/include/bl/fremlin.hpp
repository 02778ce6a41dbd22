#pragma once

#include <vector>

#include "bl/integrate.hpp"
#include "bl/solver.hpp"

namespace bl {

/// Nonnegative function on a product of finite weighted sample sets.
/// Axis weights model the Hausdorff measure carried by each sample.
struct GridTensor {
  std::vector<std::vector<double>> axis_weights;  // per-axis, all > 0
  std::vector<double> values;                     // row-major over the product, >= 0

  static GridTensor make(std::vector<std::vector<double>> axis_weights,
                         std::vector<double> values);

  int axes() const { return static_cast<int>(axis_weights.size()); }
  std::size_t axis_size(int j) const { return axis_weights[static_cast<std::size_t>(j)].size(); }
  std::size_t total() const;
};

/// Upper bound on the Fremlin tensor-product norm inf { prod ||F_j||_{q_j} :
/// T <= F_1 x ... x F_m } by alternating pointwise-minimal feasible updates
/// with norm balancing. Always feasible, hence always an upper bound;
/// exact on product tensors. Use infinity() entries of q for sup norms.
double fremlin_upper(const GridTensor& t, const std::vector<double>& q, int max_iter = 200,
                     double stall = 1e-10);

/// Parallel class of affine subspaces: a common tangent with many offsets.
/// Constant tangents keep the windowed Fremlin factor exact.
struct AffineFamily {
  Matrix tangent;                // n x k, orthonormal columns
  std::vector<Vector> offsets;  // one point on each member

  static AffineFamily make(Matrix tangent, std::vector<Vector> offsets);
  int ambient() const { return static_cast<int>(tangent.rows()); }
  int subspace_dim() const { return static_cast<int>(tangent.cols()); }

  /// Distance from x to the j-th member.
  double distance(const Vector& x, std::size_t member) const;
  /// k-dimensional measure of the j-th member inside the closed unit ball
  /// around x.
  double window_mass(const Vector& x, std::size_t member) const;
};

/// Windowed transversality functional for parallel affine families:
/// integral over window centers of BL'(tangents, p)^{-1} * prod (mass of
/// family j in the unit window)^{p_j}. Requires sum p_j (n - k_j) = n and
/// sum p_j >= 1. Degenerate tangent configurations contribute zero.
double window_functional(const std::vector<AffineFamily>& families, const std::vector<double>& p,
                         const Box& centers, int grid_n,
                         par::Mode mode = par::Mode::parallel);

}  // namespace bl
