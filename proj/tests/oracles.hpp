// Test-side oracles. Everything here recomputes expected values through
// routes that do not share code with the solver's ascent path.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "bl/solver.hpp"

namespace bl::oracle {

/// Gaussian ratio restricted to diagonal inputs, evaluated from scratch.
/// One scalar per row of each map; the aggregate determinant is expanded by
/// Cauchy-Binet over row subsets and summed in log space, which stays exact
/// however unbalanced the scan makes the scales. t holds log-scales,
/// flattened (map, row).
class DiagonalRatio {
 public:
  explicit DiagonalRatio(const BLDatum& d) {
    const int n = d.ambient_dim;
    std::vector<Vector> rows;
    for (int j = 0; j < d.map_count(); ++j)
      for (int r = 0; r < d.maps[j].rows(); ++r) {
        rows.push_back(d.maps[j].row(r).transpose());
        log_p_.push_back(std::log(d.exponents[static_cast<std::size_t>(j)]));
        p_.push_back(d.exponents[static_cast<std::size_t>(j)]);
      }
    total_ = static_cast<int>(rows.size());

    // det(sum_i c_i v_i v_i^T) = sum over n-subsets S of (prod_{i in S} c_i)
    // times det(V_S)^2.
    std::vector<int> subset(static_cast<std::size_t>(n));
    enumerate_subsets(rows, n, 0, 0, subset);
  }

  int num_params() const { return total_; }

  double log_ratio(const std::vector<double>& t) const {
    double num = 0.0;
    for (int i = 0; i < total_; ++i) num += p_[static_cast<std::size_t>(i)] * t[static_cast<std::size_t>(i)];

    double max_term = -std::numeric_limits<double>::infinity();
    std::vector<double> terms;
    terms.reserve(subset_logdet2_.size());
    for (std::size_t s = 0; s < subset_logdet2_.size(); ++s) {
      double log_term = subset_logdet2_[s];
      for (int i : subset_rows_[s])
        log_term += log_p_[static_cast<std::size_t>(i)] + t[static_cast<std::size_t>(i)];
      terms.push_back(log_term);
      max_term = std::max(max_term, log_term);
    }
    if (terms.empty() || !std::isfinite(max_term))
      return -std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (double lt : terms) acc += std::exp(lt - max_term);
    double log_det = max_term + std::log(acc);
    return 0.5 * (num - log_det);
  }

 private:
  void enumerate_subsets(const std::vector<Vector>& rows, int n, int start, int depth,
                         std::vector<int>& subset) {
    if (depth == n) {
      Matrix v(n, n);
      for (int k = 0; k < n; ++k) v.row(k) = rows[static_cast<std::size_t>(subset[static_cast<std::size_t>(k)])].transpose();
      double det = v.determinant();
      if (det != 0.0) {
        subset_rows_.push_back(subset);
        subset_logdet2_.push_back(2.0 * std::log(std::abs(det)));
      }
      return;
    }
    for (int i = start; i < static_cast<int>(rows.size()); ++i) {
      subset[static_cast<std::size_t>(depth)] = i;
      enumerate_subsets(rows, n, i + 1, depth + 1, subset);
    }
  }

  int total_ = 0;
  std::vector<double> p_, log_p_;
  std::vector<std::vector<int>> subset_rows_;
  std::vector<double> subset_logdet2_;
};

inline double golden_max(const std::function<double(double)>& f, double lo, double hi,
                         int iters = 80) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

/// Brute-force scan over diagonal Gaussian inputs on the log grid
/// 2^{-20..20}, refined by golden-section coordinate sweeps. Exact for data
/// whose optimal input is diagonal (rank-one targets, coordinate-subset maps).
inline double diagonal_scan_bl(const BLDatum& d, int sweeps = 200) {
  DiagonalRatio ratio(d);
  const double lo = -20.0 * std::log(2.0), hi = 20.0 * std::log(2.0);
  std::vector<double> t(ratio.num_params(), 0.0);

  // Coarse grid pass, one coordinate at a time.
  for (int pass = 0; pass < 3; ++pass) {
    for (int i = 0; i < ratio.num_params(); ++i) {
      double best = t[i], best_val = ratio.log_ratio(t);
      for (int g = 0; g <= 40; ++g) {
        t[i] = lo + (hi - lo) * g / 40.0;
        double v = ratio.log_ratio(t);
        if (v > best_val) {
          best_val = v;
          best = t[i];
        }
      }
      t[i] = best;
    }
  }
  // Golden-section refinement sweeps.
  double prev = ratio.log_ratio(t);
  for (int s = 0; s < sweeps; ++s) {
    for (int i = 0; i < ratio.num_params(); ++i) {
      t[i] = golden_max(
          [&](double x) {
            t[i] = x;
            return ratio.log_ratio(t);
          },
          t[i] - 2.0, t[i] + 2.0);
    }
    double cur = ratio.log_ratio(t);
    if (std::abs(cur - prev) < 1e-13) break;
    prev = cur;
  }
  return std::exp(ratio.log_ratio(t));
}

/// Two rank-one projections at angle theta, p = (1,1): BL = 1/|sin theta| by
/// direct change of variables; the Gaussian ratio at the identity input is
/// evaluated from the explicit 2x2 determinant.
inline double two_skew_bl(double theta) { return 1.0 / std::abs(std::sin(theta)); }

inline double two_skew_ratio_at_identity(double theta) {
  double c = std::cos(theta), s = std::sin(theta);
  // M = l1^T l1 + l2^T l2 with rows (1,0), (c,s).
  double m00 = 1.0 + c * c, m01 = c * s, m11 = s * s;
  double det = m00 * m11 - m01 * m01;
  return std::sqrt(1.0 / det);
}

}  // namespace bl::oracle
