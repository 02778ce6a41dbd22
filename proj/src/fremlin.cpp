#include "bl/fremlin.hpp"

#include <cmath>
#include <stdexcept>

namespace bl {

GridTensor GridTensor::make(std::vector<std::vector<double>> axis_weights,
                            std::vector<double> values) {
  GridTensor t;
  std::size_t total = 1;
  for (const auto& ax : axis_weights) {
    if (ax.empty()) throw std::invalid_argument("tensor: empty axis");
    for (double w : ax)
      if (!(w > 0.0)) throw std::invalid_argument("tensor: weights must be positive");
    total *= ax.size();
  }
  if (values.size() != total) throw std::invalid_argument("tensor: value count");
  for (double v : values)
    if (v < 0.0) throw std::invalid_argument("tensor: negative value");
  t.axis_weights = std::move(axis_weights);
  t.values = std::move(values);
  return t;
}

std::size_t GridTensor::total() const {
  std::size_t s = 1;
  for (const auto& ax : axis_weights) s *= ax.size();
  return s;
}

namespace {

double weighted_norm(const std::vector<double>& f, const std::vector<double>& w, double q) {
  double out = 0.0;
  if (std::isinf(q)) {
    for (double v : f) out = std::max(out, v);
    return out;
  }
  for (std::size_t i = 0; i < f.size(); ++i) out += w[i] * std::pow(f[i], q);
  return std::pow(out, 1.0 / q);
}

}  // namespace

double fremlin_upper(const GridTensor& t, const std::vector<double>& q, int max_iter,
                     double stall) {
  const int m = t.axes();
  if (static_cast<int>(q.size()) != m) throw std::invalid_argument("fremlin: exponent arity");
  for (double e : q)
    if (!(e >= 1.0)) throw std::invalid_argument("fremlin: exponents must be >= 1");

  double vmax = 0.0;
  for (double v : t.values) vmax = std::max(vmax, v);
  if (vmax == 0.0) return 0.0;

  std::vector<std::vector<double>> f(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j)
    f[static_cast<std::size_t>(j)].assign(t.axis_size(j), std::pow(vmax, 1.0 / m));

  std::vector<std::size_t> stride(static_cast<std::size_t>(m));
  std::size_t acc = 1;
  for (int j = 0; j < m; ++j) {
    stride[static_cast<std::size_t>(j)] = acc;
    acc *= t.axis_size(j);
  }
  auto coord = [&](std::size_t flat, int j) {
    return (flat / stride[static_cast<std::size_t>(j)]) % t.axis_size(j);
  };

  double best = std::numeric_limits<double>::infinity();
  double prev = best;
  for (int it = 0; it < max_iter; ++it) {
    // Pointwise-minimal feasible update of each factor given the others.
    for (int j = 0; j < m; ++j) {
      auto& fj = f[static_cast<std::size_t>(j)];
      std::fill(fj.begin(), fj.end(), 0.0);
      for (std::size_t flat = 0; flat < t.values.size(); ++flat) {
        double v = t.values[flat];
        if (v == 0.0) continue;
        double denom = 1.0;
        for (int i = 0; i < m; ++i)
          if (i != j) denom *= f[static_cast<std::size_t>(i)][coord(flat, i)];
        if (denom <= 0.0) denom = 1e-300;
        std::size_t cj = coord(flat, j);
        fj[cj] = std::max(fj[cj], v / denom);
      }
    }
    // Balance the norms; the pointwise product is untouched.
    std::vector<double> norms(static_cast<std::size_t>(m));
    double geo = 1.0;
    for (int j = 0; j < m; ++j) {
      norms[static_cast<std::size_t>(j)] =
          weighted_norm(f[static_cast<std::size_t>(j)], t.axis_weights[static_cast<std::size_t>(j)],
                        q[static_cast<std::size_t>(j)]);
      geo *= norms[static_cast<std::size_t>(j)];
    }
    double objective = geo;
    geo = std::pow(geo, 1.0 / m);
    for (int j = 0; j < m; ++j) {
      double nj = norms[static_cast<std::size_t>(j)];
      if (nj > 0.0)
        for (double& x : f[static_cast<std::size_t>(j)]) x *= geo / nj;
    }
    best = std::min(best, objective);
    if (it > 0 && std::abs(objective - prev) <= stall * std::max(1.0, std::abs(prev))) break;
    prev = objective;
  }
  return best;
}

AffineFamily AffineFamily::make(Matrix tangent, std::vector<Vector> offsets) {
  AffineFamily fam;
  const int n = static_cast<int>(tangent.rows());
  Matrix g = tangent.transpose() * tangent;
  if ((g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("family: tangent basis not orthonormal");
  for (const auto& o : offsets)
    if (o.size() != n) throw std::invalid_argument("family: offset arity");
  if (offsets.empty()) throw std::invalid_argument("family: no members");
  fam.tangent = std::move(tangent);
  fam.offsets = std::move(offsets);
  return fam;
}

double AffineFamily::distance(const Vector& x, std::size_t member) const {
  Vector d = x - offsets[member];
  return (d - tangent * (tangent.transpose() * d)).norm();
}

double AffineFamily::window_mass(const Vector& x, std::size_t member) const {
  double d = distance(x, member);
  if (d > 1.0) return 0.0;
  int k = subspace_dim();
  return unit_ball_volume(k) * std::pow(1.0 - d * d, 0.5 * k);
}

double window_functional(const std::vector<AffineFamily>& families, const std::vector<double>& p,
                         const Box& centers, int grid_n, par::Mode mode) {
  if (families.empty() || families.size() != p.size())
    throw std::invalid_argument("window functional: arity");
  const int n = families.front().ambient();
  double p_total = 0.0, scaling = 0.0;
  std::vector<Subspace> tangents;
  for (std::size_t j = 0; j < families.size(); ++j) {
    if (families[j].ambient() != n) throw std::invalid_argument("window functional: ambient");
    p_total += p[j];
    scaling += p[j] * (n - families[j].subspace_dim());
    Subspace s;
    s.ambient_dim = n;
    s.basis = families[j].tangent;
    tangents.push_back(std::move(s));
  }
  if (p_total < 1.0) throw std::invalid_argument("window functional: needs sum p >= 1");
  if (std::abs(scaling - n) > 1e-9)
    throw std::invalid_argument("window functional: scaling condition violated");

  BLResult blp = bl_prime(tangents, p);
  if (!blp.finite()) return 0.0;  // degenerate tangents carry zero weight
  const double inv_blp = 1.0 / blp.value;

  std::int64_t cells = 1;
  for (int i = 0; i < n; ++i) cells *= grid_n;
  Vector h = (centers.hi - centers.lo) / grid_n;
  double total = par::sum_indexed(
      cells,
      [&](std::int64_t flat) {
        std::int64_t rest = flat;
        Vector x(n);
        for (int i = 0; i < n; ++i) {
          x[i] = centers.lo[i] + (static_cast<double>(rest % grid_n) + 0.5) * h[i];
          rest /= grid_n;
        }
        double prod = inv_blp;
        for (std::size_t j = 0; j < families.size(); ++j) {
          double mass = 0.0;
          for (std::size_t mem = 0; mem < families[j].offsets.size(); ++mem)
            mass += families[j].window_mass(x, mem);
          if (mass == 0.0) return 0.0;
          prod *= std::pow(mass, p[j]);
        }
        return prod;
      },
      mode);
  return total * centers.volume() / static_cast<double>(cells);
}

}  // namespace bl
