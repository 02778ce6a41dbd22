#include "bl/linalg.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace bl {

Subspace Subspace::zero(int ambient) {
  Subspace s;
  s.ambient_dim = ambient;
  s.basis = Matrix(ambient, 0);
  return s;
}

Subspace Subspace::full(int ambient) {
  Subspace s;
  s.ambient_dim = ambient;
  s.basis = Matrix::Identity(ambient, ambient);
  return s;
}

Subspace Subspace::span_of(const Matrix& vectors) {
  const int n = static_cast<int>(vectors.rows());
  double scale = 0.0;
  for (int j = 0; j < vectors.cols(); ++j) scale = std::max(scale, vectors.col(j).norm());

  Matrix q(n, vectors.cols());
  int k = 0;
  // Modified Gram-Schmidt, one re-orthogonalization pass per vector.
  for (int j = 0; j < vectors.cols(); ++j) {
    Vector v = vectors.col(j);
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i < k; ++i) v -= q.col(i).dot(v) * q.col(i);
    double nv = v.norm();
    if (scale > 0.0 && nv > kRankTol * scale) {
      q.col(k++) = v / nv;
    }
  }
  Subspace s;
  s.ambient_dim = n;
  s.basis = q.leftCols(k);
  return s;
}

Subspace Subspace::perp() const {
  // Null space of basis^T.
  return kernel(basis.transpose().eval());
}

void Subspace::check_valid() const {
  if (basis.rows() != ambient_dim) throw std::invalid_argument("subspace: basis shape");
  if (dim() > ambient_dim) throw std::invalid_argument("subspace: dim exceeds ambient");
  Matrix g = basis.transpose() * basis;
  if ((g - Matrix::Identity(dim(), dim())).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("subspace: basis not orthonormal");
}

Subspace kernel(const Matrix& L) {
  const int n = static_cast<int>(L.cols());
  if (L.rows() == 0) return Subspace::full(n);
  Eigen::JacobiSVD<Matrix> svd(L, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (smax > 0.0 && sv(i) > kRankTol * smax) ++rank;
  Subspace s;
  s.ambient_dim = n;
  s.basis = svd.matrixV().rightCols(n - rank);
  return s;
}

int numerical_rank(const Matrix& M) {
  Eigen::JacobiSVD<Matrix> svd(M);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (smax > 0.0 && sv(i) > kRankTol * smax) ++rank;
  return rank;
}

double wedge_volume(const std::vector<Subspace>& subspaces) {
  if (subspaces.empty()) return 1.0;
  const int n = subspaces.front().ambient_dim;
  int total = 0;
  for (const auto& s : subspaces) {
    if (s.ambient_dim != n) throw std::invalid_argument("wedge: ambient dims differ");
    total += s.dim();
  }
  if (total > n) throw std::invalid_argument("wedge overdetermined");
  if (total == 0) return 1.0;

  Matrix b(n, total);
  int c = 0;
  for (const auto& s : subspaces) {
    b.middleCols(c, s.dim()) = s.basis;
    c += s.dim();
  }
  Matrix gram = b.transpose() * b;
  double det = gram.determinant();
  return det > 0.0 ? std::sqrt(det) : 0.0;
}

double row_volume(const Matrix& L) {
  if (L.rows() > L.cols()) throw std::invalid_argument("row_volume: more rows than cols");
  Matrix gram = L * L.transpose();
  double det = gram.determinant();
  return det > 0.0 ? std::sqrt(det) : 0.0;
}

Matrix restrict_to(const Matrix& L, const Subspace& V) {
  if (V.ambient_dim != L.cols()) throw std::invalid_argument("restrict: dim mismatch");
  return L * V.basis;
}

double max_principal_angle(const Subspace& a, const Subspace& b) {
  if (a.dim() != b.dim()) return M_PI / 2.0;
  if (a.dim() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a.basis.transpose() * b.basis);
  double cmin = svd.singularValues().minCoeff();
  cmin = std::min(1.0, std::max(-1.0, cmin));
  return std::acos(cmin);
}

Matrix random_orthogonal(int n, Rng& rng) {
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  // Fix signs so the factorization is canonical.
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i)
    if (r(i, i) < 0) q.col(i) = -q.col(i);
  return q;
}

Matrix random_spd(int n, Rng& rng, double logspread) {
  Matrix q = random_orthogonal(n, rng);
  Vector d(n);
  for (int i = 0; i < n; ++i) d[i] = std::exp(rng.uniform(-logspread, logspread));
  return q * d.asDiagonal() * q.transpose();
}

}  // namespace bl
