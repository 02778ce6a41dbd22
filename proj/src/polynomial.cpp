#include "bl/polynomial.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace bl {

Polynomial Polynomial::constant(int num_vars, double c) {
  Polynomial p(num_vars);
  p.add_term(std::vector<int>(num_vars, 0), c);
  return p;
}

Polynomial Polynomial::variable(int num_vars, int index) {
  Polynomial p(num_vars);
  std::vector<int> e(num_vars, 0);
  e.at(index) = 1;
  p.add_term(e, 1.0);
  return p;
}

int Polynomial::total_degree() const {
  int deg = 0;
  for (const auto& [e, c] : terms_) {
    int d = 0;
    for (int k : e) d += k;
    deg = std::max(deg, d);
  }
  return deg;
}

void Polynomial::add_term(const std::vector<int>& exp, double coeff) {
  if (static_cast<int>(exp.size()) != num_vars_)
    throw std::invalid_argument("polynomial: exponent arity");
  for (int e : exp)
    if (e < 0) throw std::invalid_argument("polynomial: negative exponent");
  auto it = terms_.find(exp);
  double next = (it != terms_.end() ? it->second : 0.0) + coeff;
  if (next == 0.0) {
    if (it != terms_.end()) terms_.erase(it);
  } else {
    terms_[exp] = next;
  }
}

double Polynomial::evaluate(const Vector& x) const {
  if (x.size() != num_vars_) throw std::invalid_argument("polynomial: point arity");
  double out = 0.0;
  for (const auto& [e, c] : terms_) {
    double t = c;
    for (int i = 0; i < num_vars_; ++i)
      for (int k = 0; k < e[i]; ++k) t *= x[i];
    out += t;
  }
  return out;
}

Polynomial Polynomial::derivative(int var) const {
  Polynomial out(num_vars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    std::vector<int> d = e;
    d[var] -= 1;
    out.add_term(d, c * e[var]);
  }
  return out;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial out = *this;
  for (const auto& [e, c] : o.terms_) out.add_term(e, c);
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  Polynomial out = *this;
  for (const auto& [e, c] : o.terms_) out.add_term(e, -c);
  return out;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial out(num_vars_);
  std::vector<int> e(num_vars_);
  for (const auto& [ea, ca] : terms_)
    for (const auto& [eb, cb] : o.terms_) {
      for (int i = 0; i < num_vars_; ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  return out;
}

Polynomial Polynomial::operator*(double c) const {
  Polynomial out(num_vars_);
  if (c == 0.0) return out;
  for (const auto& [e, k] : terms_) out.add_term(e, k * c);
  return out;
}

Polynomial Polynomial::compose_affine(const Matrix& a, const Vector& b) const {
  if (a.rows() != num_vars_ || b.size() != num_vars_)
    throw std::invalid_argument("compose_affine: shape");
  const int ny = static_cast<int>(a.cols());
  // x_i -> sum_k a(i,k) y_k + b_i, expanded term by term.
  std::vector<Polynomial> subst;
  for (int i = 0; i < num_vars_; ++i) {
    Polynomial s = Polynomial::constant(ny, b[i]);
    for (int k = 0; k < ny; ++k)
      if (a(i, k) != 0.0) s = s + Polynomial::variable(ny, k) * a(i, k);
    subst.push_back(std::move(s));
  }
  Polynomial out(ny);
  for (const auto& [e, c] : terms_) {
    Polynomial term = Polynomial::constant(ny, c);
    for (int i = 0; i < num_vars_; ++i)
      for (int k = 0; k < e[i]; ++k) term = term * subst[i];
    out = out + term;
  }
  return out;
}

Polynomial Polynomial::compose(const std::vector<Polynomial>& subst) const {
  if (static_cast<int>(subst.size()) != num_vars_)
    throw std::invalid_argument("compose: substitution arity");
  const int ny = subst.empty() ? 0 : subst.front().num_vars();
  Polynomial out(ny);
  for (const auto& [e, c] : terms_) {
    Polynomial term = Polynomial::constant(ny, c);
    for (int i = 0; i < num_vars_; ++i)
      for (int k = 0; k < e[i]; ++k) term = term * subst[i];
    out = out + term;
  }
  return out;
}

double RationalFn::evaluate(const Vector& x) const {
  double n = num.evaluate(x);
  if (!den) return n;
  return n / den->evaluate(x);
}

RationalFn RationalFn::derivative(int var) const {
  if (!den) return RationalFn(num.derivative(var));
  // (n/d)' = (n'd - nd') / d^2
  Polynomial n1 = num.derivative(var) * *den - num * den->derivative(var);
  return RationalFn(std::move(n1), *den * *den);
}

RationalFn RationalFn::compose_affine(const Matrix& a, const Vector& b) const {
  if (!den) return RationalFn(num.compose_affine(a, b));
  return RationalFn(num.compose_affine(a, b), den->compose_affine(a, b));
}

RationalFn RationalFn::compose(const std::vector<Polynomial>& subst) const {
  if (!den) return RationalFn(num.compose(subst));
  return RationalFn(num.compose(subst), den->compose(subst));
}

int RationalFn::degree_bound() const {
  if (!den) return num.total_degree();
  return std::max(num.total_degree(), den->total_degree()) + den->total_degree();
}

PolynomialMap::PolynomialMap(int domain_dim, std::vector<RationalFn> components)
    : domain_dim_(domain_dim), components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("map: no components");
  for (const auto& c : components_) {
    if (c.num.num_vars() != domain_dim_ || (c.den && c.den->num_vars() != domain_dim_))
      throw std::invalid_argument("map: component arity mismatch");
  }
  jacobian_.resize(components_.size());
  for (std::size_t j = 0; j < components_.size(); ++j) {
    jacobian_[j].reserve(domain_dim_);
    for (int v = 0; v < domain_dim_; ++v) jacobian_[j].push_back(components_[j].derivative(v));
  }
}

Vector PolynomialMap::evaluate(const Vector& x) const {
  Vector out(target_dim());
  for (int j = 0; j < target_dim(); ++j) out[j] = components_[j].evaluate(x);
  return out;
}

Matrix PolynomialMap::jacobian_at(const Vector& x) const {
  Matrix out(target_dim(), domain_dim_);
  for (int j = 0; j < target_dim(); ++j)
    for (int v = 0; v < domain_dim_; ++v) out(j, v) = jacobian_[j][v].evaluate(x);
  return out;
}

int PolynomialMap::degree() const {
  int deg = 1;
  for (const auto& c : components_) deg = std::max(deg, c.degree_bound());
  return deg;
}

bool PolynomialMap::is_polynomial() const {
  for (const auto& c : components_)
    if (!c.is_polynomial()) return false;
  return true;
}

PolynomialMap PolynomialMap::compose_affine(const Matrix& a, const Vector& b) const {
  std::vector<RationalFn> comps;
  for (const auto& c : components_) comps.push_back(c.compose_affine(a, b));
  return PolynomialMap(static_cast<int>(a.cols()), std::move(comps));
}

PolynomialMap PolynomialMap::compose(const std::vector<Polynomial>& subst) const {
  std::vector<RationalFn> comps;
  for (const auto& c : components_) comps.push_back(c.compose(subst));
  const int ny = subst.empty() ? 0 : subst.front().num_vars();
  return PolynomialMap(ny, std::move(comps));
}

PolynomialMap PolynomialMap::linear(const Matrix& l) {
  std::vector<RationalFn> comps;
  for (int r = 0; r < l.rows(); ++r) {
    Polynomial p(static_cast<int>(l.cols()));
    for (int c = 0; c < l.cols(); ++c)
      if (l(r, c) != 0.0) p = p + Polynomial::variable(static_cast<int>(l.cols()), c) * l(r, c);
    comps.push_back(RationalFn(std::move(p)));
  }
  return PolynomialMap(static_cast<int>(l.cols()), std::move(comps));
}

std::vector<Vector> fiber_points(const PolynomialMap& b, const Vector& z, const Box& box,
                                 int grid_n) {
  if (b.target_dim() > 2 || b.domain_dim() > 3)
    throw std::invalid_argument("fiber_points: desk scale is target<=2, domain<=3");
  if (z.size() != b.target_dim()) throw std::invalid_argument("fiber_points: target arity");
  const int n = box.dim();
  if (n != b.domain_dim()) throw std::invalid_argument("fiber_points: box arity");

  Vector h(n);
  for (int i = 0; i < n; ++i) h[i] = (box.hi[i] - box.lo[i]) / grid_n;
  const double half_diag = 0.5 * h.norm();

  std::vector<Vector> out;
  std::vector<int> idx(n, 0);
  const std::int64_t cells = [&] {
    std::int64_t c = 1;
    for (int i = 0; i < n; ++i) c *= grid_n;
    return c;
  }();
  for (std::int64_t flat = 0; flat < cells; ++flat) {
    std::int64_t rest = flat;
    Vector x(n);
    for (int i = 0; i < n; ++i) {
      x[i] = box.lo[i] + (static_cast<double>(rest % grid_n) + 0.5) * h[i];
      rest /= grid_n;
    }
    Matrix jac = b.jacobian_at(x);
    Eigen::JacobiSVD<Matrix> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double lipschitz = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    Vector resid = b.evaluate(x) - z;
    const double eps = half_diag * std::max(lipschitz, 1e-12);
    if (resid.norm() > eps) continue;
    // One Newton step toward the fiber through the pseudoinverse.
    Vector refined = x - svd.solve(resid);
    if (box.contains(refined)) out.push_back(refined);
  }
  return out;
}

}  // namespace bl
