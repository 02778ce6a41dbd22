#pragma once

#include <vector>

#include "bl/geometry.hpp"
#include "bl/rng.hpp"

namespace bl {

// Relative singular-value cutoff used for every rank decision in the project.
inline constexpr double kRankTol = 1e-10;

/// Linear subspace of R^n stored as an orthonormal basis (columns).
/// The basis may be empty (zero subspace).
struct Subspace {
  int ambient_dim = 0;
  Matrix basis;  // ambient_dim x k, orthonormal columns

  int dim() const { return static_cast<int>(basis.cols()); }

  static Subspace zero(int ambient);
  static Subspace full(int ambient);

  /// Span of arbitrary (possibly dependent) column vectors. Orthonormalized
  /// by modified Gram-Schmidt with one re-orthogonalization pass; columns
  /// whose residual falls under the relative rank cutoff are discarded.
  static Subspace span_of(const Matrix& vectors);

  /// Orthogonal complement.
  Subspace perp() const;

  /// Validates the orthonormality invariant to 1e-10.
  void check_valid() const;
};

/// Orthonormal basis of the null space of L. Rank is decided at the relative
/// singular-value cutoff; the zero matrix yields the full space.
Subspace kernel(const Matrix& L);

/// sqrt(Gram determinant) of the concatenated bases: the volume of the
/// parallelepiped spanned by the union. 0 when the union is dependent.
/// Throws when the dimensions sum beyond the ambient dimension.
double wedge_volume(const std::vector<Subspace>& subspaces);

/// det(L L^T)^{1/2} for a matrix with rows <= cols: the volume spanned by the
/// rows, i.e. how far L is from losing surjectivity.
double row_volume(const Matrix& L);

/// Matrix of L restricted to V in V's stored basis (rows x dim V).
Matrix restrict_to(const Matrix& L, const Subspace& V);

/// Largest principal angle between two subspaces of equal dimension,
/// in radians. Returns pi/2 if dimensions differ.
double max_principal_angle(const Subspace& a, const Subspace& b);

inline bool same_subspace(const Subspace& a, const Subspace& b, double tol = 1e-8) {
  return a.dim() == b.dim() && max_principal_angle(a, b) < tol;
}

Matrix random_orthogonal(int n, Rng& rng);

/// Random SPD matrix with eigenvalues spread over e^{[-logspread, logspread]}.
Matrix random_spd(int n, Rng& rng, double logspread = 1.0);

/// Rank at the relative singular-value cutoff.
int numerical_rank(const Matrix& M);

}  // namespace bl
