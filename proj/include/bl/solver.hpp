#pragma once

#include <limits>
#include <string>
#include <vector>

#include "bl/linalg.hpp"

namespace bl {

/// Brascamp-Lieb datum: m linear surjections L_j : R^n -> R^{n_j} with
/// exponents p_j in [0,1]. The scaling defect |sum p_j n_j - n| decides
/// whether a finite constant is possible at all.
struct BLDatum {
  int ambient_dim = 0;
  std::vector<Matrix> maps;       // n_j x n each
  std::vector<double> exponents;  // p_j in [0, 1]

  BLDatum() = default;
  BLDatum(int n, std::vector<Matrix> ls, std::vector<double> ps);

  int map_count() const { return static_cast<int>(maps.size()); }
  double scaling_defect() const;
  bool has_degenerate_map() const;  // some L_j short of full row rank

  /// Same datum with p_j = 0 factors removed (their contribution is 1).
  BLDatum without_zero_exponents() const;
};

/// One SPD covariance block per map; the trial input of the Gaussian ratio.
struct GaussianInput {
  std::vector<Matrix> blocks;
  static GaussianInput identity(const BLDatum& d);
  void check_valid() const;  // symmetric to 1e-12, positive definite
};

enum class SolveStatus { converged, diverged_to_infinity, max_iterations };

struct BLResult {
  double value = 0.0;      // +inf iff status == diverged_to_infinity
  double log_value = 0.0;  // log of value when finite
  SolveStatus status = SolveStatus::converged;
  GaussianInput witness;
  int iterations = 0;
  /// Max relative disagreement between the identity start and random
  /// restarts (converged runs only).
  double restart_spread = 0.0;

  bool finite() const { return status != SolveStatus::diverged_to_infinity; }
  static BLResult infinite();
};

struct SolveOptions {
  std::uint64_t seed = 0;
  int max_iter = 10000;
  int restarts = 8;
  double damping = 0.5;          // in log-spectral coordinates
  double tol = 1e-12;            // |delta log ratio| stopping rule
  double diverge_log = 50.0;     // log-ratio beyond this declares +inf
  bool prescreen = true;         // subspace-lattice finiteness screen
  std::vector<double>* trace_log_ratio = nullptr;  // optional per-step record
};

/// (prod det(A_j)^{p_j} / det(sum p_j L_j^T A_j L_j))^{1/2}.
/// Returns +inf when the aggregate matrix is singular (degenerate direction);
/// the supremum of this functional over all SPD inputs is the BL constant.
double gaussian_ratio(const BLDatum& datum, const GaussianInput& a);
double gaussian_log_ratio(const BLDatum& datum, const GaussianInput& a);

/// Best constant of the datum by damped fixed-point ascent over Gaussian
/// inputs, cross-checked against seeded SPD restarts.
/// Throws std::invalid_argument when the scaling condition fails.
BLResult bl_constant(const BLDatum& datum, const SolveOptions& opts = {});

/// Quotient-form constant for subspace data (W_1, ..., W_m): inputs live on
/// R^n / W_j. Realized through the datum whose rows span each W_j's
/// orthogonal complement, which has unit row volume.
/// Requires sum p_j (n - dim W_j) = n.
BLResult bl_prime(const std::vector<Subspace>& subspaces, const std::vector<double>& p,
                  const SolveOptions& opts = {});

/// Constant of the datum restricted to V; +inf when some restricted map
/// fails to be surjective.
BLResult bl_restricted(const BLDatum& datum, const Subspace& V, const SolveOptions& opts = {});

struct IdentityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_discrepancy = 0.0;  // 0 when both infinite
  bool both_infinite = false;
  bool violated = false;  // one side finite, the other not
  std::string note;
};

/// Checks BL(L, p) = BL'(ker L_j, p) * prod rowvol(L_j)^{-p_j}, both sides
/// computed independently by the solver.
IdentityReport factorization_check(const BLDatum& datum, const SolveOptions& opts = {});

/// Splitting across V = ker(L_{m+1}) for an extended datum whose last
/// exponent is 1: BL(ext) = rowvol(L_{m+1})^{-1} * BL(restriction to V).
IdentityReport critical_split_check(const BLDatum& extended, const SolveOptions& opts = {});

}  // namespace bl
