#include "bl/solver.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log det of an SPD matrix; -inf when not positive definite.
double spd_log_det(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) return -kInf;
  double ld = 0.0;
  for (int i = 0; i < m.rows(); ++i) ld += std::log(llt.matrixL()(i, i));
  return 2.0 * ld;
}

Matrix spd_log(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  Vector lam = es.eigenvalues();
  for (int i = 0; i < lam.size(); ++i) lam[i] = std::log(std::max(lam[i], 1e-300));
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

Matrix spd_exp(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  Vector lam = es.eigenvalues();
  for (int i = 0; i < lam.size(); ++i) lam[i] = std::exp(lam[i]);
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// Aggregate M(A) = sum_j p_j L_j^T A_j L_j.
Matrix aggregate(const BLDatum& d, const GaussianInput& a) {
  Matrix m = Matrix::Zero(d.ambient_dim, d.ambient_dim);
  for (int j = 0; j < d.map_count(); ++j)
    m.noalias() += d.exponents[j] * d.maps[j].transpose() * a.blocks[j] * d.maps[j];
  return m;
}

// Finiteness screen: a subspace V with dim V > sum p_j dim(L_j V) certifies
// that the constant is infinite. The lattice generated by kernel
// intersections/sums plus seeded random subspaces is scanned; this is a
// sufficient certificate only, divergence of the ascent remains the ground
// truth for the remaining cases.
bool prescreen_certifies_infinite(const BLDatum& d, std::uint64_t seed) {
  const int n = d.ambient_dim;
  std::vector<Subspace> candidates;
  std::vector<Subspace> kers;
  for (const auto& l : d.maps) kers.push_back(kernel(l));
  for (const auto& k : kers) candidates.push_back(k);
  for (std::size_t i = 0; i < kers.size(); ++i)
    for (std::size_t j = i + 1; j < kers.size(); ++j) {
      Matrix joint(n, kers[i].dim() + kers[j].dim());
      joint << kers[i].basis, kers[j].basis;
      candidates.push_back(Subspace::span_of(joint));  // sum
      // intersection = perp of (ker_i^perp + ker_j^perp)
      Subspace pi = kers[i].perp(), pj = kers[j].perp();
      Matrix jp(n, pi.dim() + pj.dim());
      jp << pi.basis, pj.basis;
      candidates.push_back(Subspace::span_of(jp).perp());
    }
  Rng rng = Rng::fork(seed, 0x5eed50aceULL);
  for (int t = 0; t < 200; ++t) {
    int k = rng.uniform_int(1, std::max(1, n - 1));
    Matrix g(n, k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < k; ++j) g(i, j) = rng.normal();
    candidates.push_back(Subspace::span_of(g));
  }

  for (const auto& v : candidates) {
    if (v.dim() == 0) continue;
    double covered = 0.0;
    for (int j = 0; j < d.map_count(); ++j)
      covered += d.exponents[j] * numerical_rank(d.maps[j] * v.basis);
    if (covered < v.dim() - 1e-9) return true;
  }
  return false;
}

struct AscentOutcome {
  double log_value = 0.0;
  SolveStatus status = SolveStatus::converged;
  GaussianInput witness;
  int iterations = 0;
};

AscentOutcome ascend(const BLDatum& d, GaussianInput a, const SolveOptions& opts) {
  AscentOutcome out;
  const int m = d.map_count();
  double prev = gaussian_log_ratio(d, a);
  if (opts.trace_log_ratio) opts.trace_log_ratio->push_back(prev);
  if (!std::isfinite(prev)) {
    out.status = SolveStatus::diverged_to_infinity;
    out.log_value = kInf;
    out.witness = std::move(a);
    return out;
  }

  std::vector<Matrix> logs(m);
  for (int it = 1; it <= opts.max_iter; ++it) {
    Matrix agg = aggregate(d, a);
    Eigen::LDLT<Matrix> solve_m(agg);
    bool singular = solve_m.info() != Eigen::Success || !solve_m.isPositive();
    if (!singular) {
      // Fixed-point map A_j <- (L_j M^{-1} L_j^T)^{-1}, damped halfway in
      // log-spectral coordinates; the undamped step can oscillate close to
      // degenerate data.
      for (int j = 0; j < m; ++j) {
        Matrix proj = symmetrize(d.maps[j] * solve_m.solve(d.maps[j].transpose()));
        Eigen::LDLT<Matrix> inv_p(proj);
        if (inv_p.info() != Eigen::Success || !inv_p.isPositive()) {
          singular = true;
          break;
        }
        Matrix target = symmetrize(inv_p.solve(Matrix::Identity(proj.rows(), proj.cols())));
        logs[j] = (1.0 - opts.damping) * spd_log(a.blocks[j]) + opts.damping * spd_log(target);
      }
    }
    if (singular) {
      out.status = SolveStatus::diverged_to_infinity;
      out.log_value = kInf;
      out.witness = std::move(a);
      out.iterations = it;
      return out;
    }
    for (int j = 0; j < m; ++j) a.blocks[j] = spd_exp(logs[j]);

    double cur = gaussian_log_ratio(d, a);
    if (opts.trace_log_ratio) opts.trace_log_ratio->push_back(cur);
    out.iterations = it;
    if (!std::isfinite(cur) || cur > opts.diverge_log) {
      out.status = SolveStatus::diverged_to_infinity;
      out.log_value = kInf;
      out.witness = std::move(a);
      return out;
    }
    if (std::abs(cur - prev) < opts.tol) {
      out.status = SolveStatus::converged;
      out.log_value = cur;
      out.witness = std::move(a);
      return out;
    }
    prev = cur;
  }
  out.status = SolveStatus::max_iterations;
  out.log_value = prev;
  out.witness = std::move(a);
  return out;
}

}  // namespace

BLDatum::BLDatum(int n, std::vector<Matrix> ls, std::vector<double> ps)
    : ambient_dim(n), maps(std::move(ls)), exponents(std::move(ps)) {
  if (maps.size() != exponents.size()) throw std::invalid_argument("datum: m mismatch");
  for (const auto& l : maps) {
    if (l.cols() != n || l.rows() < 1) throw std::invalid_argument("datum: map shape");
    if (!l.allFinite()) throw std::invalid_argument("datum: non-finite entries");
  }
  for (double p : exponents)
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("datum: exponent outside [0,1]");
}

double BLDatum::scaling_defect() const {
  double s = 0.0;
  for (int j = 0; j < map_count(); ++j) s += exponents[j] * maps[j].rows();
  return std::abs(s - ambient_dim);
}

bool BLDatum::has_degenerate_map() const {
  for (const auto& l : maps)
    if (numerical_rank(l) < l.rows()) return true;
  return false;
}

BLDatum BLDatum::without_zero_exponents() const {
  BLDatum out;
  out.ambient_dim = ambient_dim;
  for (int j = 0; j < map_count(); ++j)
    if (exponents[j] > 0.0) {
      out.maps.push_back(maps[j]);
      out.exponents.push_back(exponents[j]);
    }
  return out;
}

GaussianInput GaussianInput::identity(const BLDatum& d) {
  GaussianInput a;
  for (const auto& l : d.maps) a.blocks.push_back(Matrix::Identity(l.rows(), l.rows()));
  return a;
}

void GaussianInput::check_valid() const {
  for (const auto& b : blocks) {
    if ((b - b.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument("gaussian input: not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(b);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw std::invalid_argument("gaussian input: not positive definite");
  }
}

BLResult BLResult::infinite() {
  BLResult r;
  r.value = kInf;
  r.log_value = kInf;
  r.status = SolveStatus::diverged_to_infinity;
  return r;
}

double gaussian_log_ratio(const BLDatum& d, const GaussianInput& a) {
  double num = 0.0;
  for (int j = 0; j < d.map_count(); ++j) {
    double ld = spd_log_det(a.blocks[j]);
    if (!std::isfinite(ld)) throw std::invalid_argument("gaussian input: block not SPD");
    num += d.exponents[j] * ld;
  }
  Matrix m = aggregate(d, a);
  // Guard against numerically near-singular aggregates before LLT commits.
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  double lmin = es.eigenvalues().minCoeff(), lmax = es.eigenvalues().maxCoeff();
  if (!(lmax > 0.0) || lmin <= 1e-13 * lmax) return kInf;  // degenerate direction
  double den = spd_log_det(m);
  return 0.5 * (num - den);
}

double gaussian_ratio(const BLDatum& d, const GaussianInput& a) {
  double lr = gaussian_log_ratio(d, a);
  return std::isfinite(lr) ? std::exp(lr) : kInf;
}

BLResult bl_constant(const BLDatum& datum_in, const SolveOptions& opts) {
  if (datum_in.scaling_defect() > 1e-9)
    throw std::invalid_argument("scaling condition violated");
  BLDatum d = datum_in.without_zero_exponents();
  if (d.map_count() == 0) throw std::invalid_argument("datum: empty after dropping p=0");
  if (d.has_degenerate_map()) return BLResult::infinite();
  if (opts.prescreen && prescreen_certifies_infinite(d, opts.seed)) {
    BLResult r = BLResult::infinite();
    r.witness = GaussianInput::identity(d);
    return r;
  }

  AscentOutcome main = ascend(d, GaussianInput::identity(d), opts);

  BLResult res;
  res.status = main.status;
  res.log_value = main.log_value;
  res.value = std::isfinite(main.log_value) ? std::exp(main.log_value) : kInf;
  res.witness = main.witness;
  res.iterations = main.iterations;
  if (main.status == SolveStatus::diverged_to_infinity) return res;

  SolveOptions restart_opts = opts;
  restart_opts.trace_log_ratio = nullptr;
  for (int r = 0; r < opts.restarts; ++r) {
    GaussianInput a0;
    Rng rng = Rng::fork(opts.seed, 0xb10c0000ULL + static_cast<std::uint64_t>(r));
    for (const auto& l : d.maps) a0.blocks.push_back(random_spd(static_cast<int>(l.rows()), rng, 1.5));
    AscentOutcome alt = ascend(d, std::move(a0), restart_opts);
    if (alt.status == SolveStatus::diverged_to_infinity) {
      res = BLResult::infinite();
      res.iterations = main.iterations;
      return res;
    }
    if (alt.status == SolveStatus::converged && main.status == SolveStatus::converged) {
      double spread = std::abs(alt.log_value - main.log_value);
      res.restart_spread = std::max(res.restart_spread, spread);
    }
  }
  return res;
}

BLResult bl_prime(const std::vector<Subspace>& subspaces, const std::vector<double>& p,
                  const SolveOptions& opts) {
  if (subspaces.empty() || subspaces.size() != p.size())
    throw std::invalid_argument("bl_prime: size mismatch");
  const int n = subspaces.front().ambient_dim;
  double scale = 0.0;
  std::vector<Matrix> maps;
  std::vector<double> ps;
  for (std::size_t j = 0; j < subspaces.size(); ++j) {
    if (subspaces[j].ambient_dim != n) throw std::invalid_argument("bl_prime: ambient mismatch");
    if (p[j] == 0.0) continue;
    if (subspaces[j].dim() == n)
      throw std::invalid_argument("bl_prime: full-space factor has no quotient inputs");
    scale += p[j] * (n - subspaces[j].dim());
    // Rows span W_j^perp, so the kernel is exactly W_j and the row volume is 1.
    maps.push_back(subspaces[j].perp().basis.transpose());
    ps.push_back(p[j]);
  }
  if (std::abs(scale - n) > 1e-9)
    throw std::invalid_argument("bl_prime: scaling condition violated");
  return bl_constant(BLDatum(n, std::move(maps), std::move(ps)), opts);
}

BLResult bl_restricted(const BLDatum& datum, const Subspace& v, const SolveOptions& opts) {
  if (v.ambient_dim != datum.ambient_dim) throw std::invalid_argument("restricted: ambient");
  std::vector<Matrix> maps;
  for (const auto& l : datum.maps) {
    Matrix r = restrict_to(l, v);
    if (numerical_rank(r) < r.rows()) return BLResult::infinite();
    maps.push_back(std::move(r));
  }
  return bl_constant(BLDatum(v.dim(), std::move(maps), datum.exponents), opts);
}

namespace {

IdentityReport compare_sides(const BLResult& lhs, double rhs_value, bool rhs_finite) {
  IdentityReport rep;
  const bool lf = lhs.finite();
  if (!lf && !rhs_finite) {
    rep.both_infinite = true;
    rep.lhs = rep.rhs = kInf;
    return rep;
  }
  if (lf != rhs_finite) {
    rep.violated = true;
    rep.lhs = lf ? lhs.value : kInf;
    rep.rhs = rhs_finite ? rhs_value : kInf;
    rep.rel_discrepancy = kInf;
    rep.note = "factorization violated";
    return rep;
  }
  rep.lhs = lhs.value;
  rep.rhs = rhs_value;
  rep.rel_discrepancy = std::abs(lhs.value - rhs_value) / std::max(std::abs(rhs_value), 1e-300);
  return rep;
}

}  // namespace

IdentityReport factorization_check(const BLDatum& datum, const SolveOptions& opts) {
  if (datum.has_degenerate_map()) throw std::invalid_argument("factorization: degenerate map");
  BLDatum d = datum.without_zero_exponents();
  BLResult lhs = bl_constant(d, opts);

  std::vector<Subspace> kers;
  for (const auto& l : d.maps) kers.push_back(kernel(l));
  BLResult quotient = bl_prime(kers, d.exponents, opts);
  double factor = 1.0;
  for (int j = 0; j < d.map_count(); ++j)
    factor *= std::pow(row_volume(d.maps[j]), -d.exponents[j]);
  return compare_sides(lhs, quotient.value * factor, quotient.finite());
}

IdentityReport critical_split_check(const BLDatum& extended, const SolveOptions& opts) {
  const int m1 = extended.map_count();
  if (m1 < 2) throw std::invalid_argument("critical split: need at least two maps");
  if (std::abs(extended.exponents[m1 - 1] - 1.0) > 1e-12)
    throw std::invalid_argument("critical split: last exponent must be 1");
  if (extended.scaling_defect() > 1e-9)
    throw std::invalid_argument("critical split: scaling condition violated");

  const Matrix& last = extended.maps[m1 - 1];
  Subspace v = kernel(last);
  BLDatum inner;
  inner.ambient_dim = extended.ambient_dim;
  for (int j = 0; j + 1 < m1; ++j) {
    Matrix r = restrict_to(extended.maps[j], v);
    if (numerical_rank(r) < r.rows())
      throw std::invalid_argument("critical split: map not surjective on kernel");
    inner.maps.push_back(extended.maps[j]);
    inner.exponents.push_back(extended.exponents[j]);
  }

  BLResult lhs = bl_constant(extended, opts);
  BLResult restr = bl_restricted(inner, v, opts);
  double rhs = restr.value / row_volume(last);
  return compare_sides(lhs, rhs, restr.finite());
}

}  // namespace bl
