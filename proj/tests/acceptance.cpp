// Acceptance battery: every release criterion with its tolerance pinned in
// code, one pass/fail line each. Exits nonzero when any criterion fails.
// argv[1] must point at the bl executable (used by the determinism check).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bl/discrete.hpp"
#include "bl/fremlin.hpp"
#include "bl/group.hpp"
#include "bl/integrate.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace bl;

namespace {

int failures = 0;
std::string cli_path;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void report(int criterion, const std::string& name, bool pass, const std::string& detail,
            double elapsed) {
  std::printf("%s criterion %2d: %s (%s; %.2fs)\n", pass ? "PASS" : "FAIL", criterion,
              name.c_str(), detail.c_str(), elapsed);
  if (!pass) ++failures;
}

Polynomial var(int n, int i) { return Polynomial::variable(n, i); }

NonlinearDatum parabola_datum() {
  Polynomial x = var(2, 0), y = var(2, 1);
  std::vector<PolynomialMap> maps;
  maps.push_back(PolynomialMap(2, {RationalFn(x)}));
  maps.push_back(PolynomialMap(2, {RationalFn(x + y * y)}));
  return NonlinearDatum(std::move(maps), {1.0, 1.0});
}

NonlinearDatum lw2_nonlinear() {
  std::vector<PolynomialMap> maps;
  maps.push_back(PolynomialMap(2, {RationalFn(var(2, 0))}));
  maps.push_back(PolynomialMap(2, {RationalFn(var(2, 1))}));
  return NonlinearDatum(std::move(maps), {1.0, 1.0});
}

// --------------------------------------------------------------------------

void criterion_1_exact_constants() {
  Timer t;
  double worst = 0.0, worst_skew = 0.0;
  bool in_time = true;
  for (const BLDatum& d :
       {gen::loomis_whitney_2d(), gen::loomis_whitney_3d(), gen::hoelder_2d()}) {
    Timer each;
    worst = std::max(worst, std::abs(bl_constant(d).value - 1.0));
    in_time = in_time && each.seconds() < 1.0;
  }
  for (double theta : {M_PI / 6, M_PI / 4, M_PI / 3}) {
    Timer each;
    double got = bl_constant(gen::two_skew(theta)).value;
    worst_skew = std::max(worst_skew, std::abs(got - 1.0 / std::sin(theta)));
    in_time = in_time && each.seconds() < 1.0;
  }
  bool pass = worst < 1e-8 && worst_skew < 1e-6 && in_time;
  std::ostringstream d;
  d << "unit-family err " << worst << ", skew err " << worst_skew
    << (in_time ? "" : ", over time budget");
  report(1, "exact constants", pass, d.str(), t.seconds());
}

void criterion_2_oracle_equivalence() {
  Timer t;
  double worst_rel = 0.0, worst_spread = 0.0;
  for (int i = 0; i < 100; ++i) {
    std::uint64_t seed = 4000 + static_cast<std::uint64_t>(i);
    BLDatum d = i % 2 == 0 ? gen::random_rank_one_datum(seed, 2, 4)
                           : gen::random_subset_datum(seed).datum;
    SolveOptions opts;
    opts.seed = seed;
    BLResult r = bl_constant(d, opts);
    if (r.status != SolveStatus::converged) {
      worst_rel = std::numeric_limits<double>::infinity();
      break;
    }
    double scanned = oracle::diagonal_scan_bl(d);
    worst_rel = std::max(worst_rel, std::abs(r.value - scanned) / scanned);
    worst_spread = std::max(worst_spread, r.restart_spread);
  }
  bool pass = worst_rel <= 1e-4 && worst_spread <= 1e-6;
  std::ostringstream d;
  d << "oracle rel " << worst_rel << ", restart spread " << worst_spread;
  report(2, "diagonal-scan oracle equivalence (100 data)", pass, d.str(), t.seconds());
}

void criterion_3_identity_suites() {
  Timer t;
  double worst_f = 0.0, worst_s = 0.0;
  for (int i = 0; i < 100; ++i) {
    SolveOptions opts;
    opts.seed = 5000 + static_cast<std::uint64_t>(i);
    auto fr = factorization_check(gen::random_young_type_3d(opts.seed), opts);
    worst_f = std::max(worst_f, fr.violated ? 1.0 : fr.rel_discrepancy);
    auto sr = critical_split_check(gen::random_split_datum(opts.seed), opts);
    worst_s = std::max(worst_s, sr.violated ? 1.0 : sr.rel_discrepancy);
  }
  bool pass = worst_f < 1e-6 && worst_s < 1e-6 && t.seconds() < 60.0;
  std::ostringstream d;
  d << "factorization " << worst_f << ", split " << worst_s;
  report(3, "identity suites (100 + 100)", pass, d.str(), t.seconds());
}

void criterion_4_weight_correctness() {
  Timer t;
  double worst = 0.0;
  Rng rng(606);
  int accepted = 0;
  while (accepted < 1000) {
    Polynomial x = var(2, 0), y = var(2, 1);
    auto coef = [&] { return rng.uniform(-1.5, 1.5); };
    Polynomial f = x * coef() + y * coef() + x * y * coef() + x * x * coef();
    Polynomial g = x * coef() + y * coef() + y * y * coef() + x * x * coef();
    std::vector<PolynomialMap> maps;
    maps.push_back(PolynomialMap(2, {RationalFn(f)}));
    maps.push_back(PolynomialMap(2, {RationalFn(g)}));
    NonlinearDatum nd(std::move(maps), {1.0, 1.0});
    Vector p(2);
    p << rng.uniform(-1, 1), rng.uniform(-1, 1);
    Matrix jac(2, 2);
    jac.row(0) = nd.maps[0].jacobian_at(p);
    jac.row(1) = nd.maps[1].jacobian_at(p);
    double det = std::abs(jac.determinant());
    if (det < 1e-3) continue;  // the degeneracy convention owns these
    WeightField w(nd);
    worst = std::max(worst, std::abs(w(p) - det) / det);
    ++accepted;
  }

  WeightField pw(parabola_datum());
  double worst_parab = 0.0;
  for (int i = 0; i <= 40; ++i)
    for (int j = 0; j <= 40; ++j) {
      Vector p(2);
      p << -1.0 + 0.05 * i, -1.0 + 0.05 * j;
      worst_parab = std::max(worst_parab, std::abs(pw(p) - 2.0 * std::abs(p[1])));
    }
  bool pass = worst < 1e-8 && worst_parab < 1e-8;
  std::ostringstream d;
  d << "determinant rel " << worst << ", parabola abs " << worst_parab;
  report(4, "weight field determinant case (1000 points)", pass, d.str(), t.seconds());
}

void criterion_5_global_stability() {
  Timer t;
  auto fs = std::vector<TestFunction>{
      TestFunction::indicator_ball((Vector(1) << 0.0).finished(), 1.0),
      TestFunction::indicator_ball((Vector(1) << 0.0).finished(), 1.0)};
  IntegrationSpec spec;
  spec.box = Box::cube(2, 2.0);
  spec.method = IntegrationSpec::Method::monte_carlo;
  spec.samples = 1000000;
  spec.seed = 7;
  auto rep = inequality_report(parabola_datum(), fs, spec);
  bool value_ok = std::abs(rep.lhs.value - 4.0) <= 3.0 * rep.lhs.budget;

  double lo_ratio = rep.ratio, hi_ratio = rep.ratio;
  for (double half : {4.0, 8.0}) {
    IntegrationSpec wide = spec;
    wide.box = Box::cube(2, half);
    wide.samples = 400000;
    auto w = inequality_report(parabola_datum(), fs, wide);
    lo_ratio = std::min(lo_ratio, w.ratio);
    hi_ratio = std::max(hi_ratio, w.ratio);
  }
  bool stable = (hi_ratio - lo_ratio) / rep.ratio < 0.10;
  bool pass = value_ok && stable && t.seconds() < 120.0;
  std::ostringstream d;
  d << "lhs " << rep.lhs.value << " +- " << rep.lhs.budget << ", ratio spread "
    << (hi_ratio - lo_ratio) / rep.ratio;
  report(5, "global inequality stability (1e6 samples)", pass, d.str(), t.seconds());
}

void criterion_6_diffeo_invariance() {
  Timer t;
  std::vector<TestFunction> fs = {
      TestFunction::gaussians({{(Vector(1) << 0.1).finished(), 0.35, 1.0}}, 1),
      TestFunction::gaussians({{(Vector(1) << -0.2).finished(), 0.27, 1.0}}, 1)};
  Polynomial x = var(2, 0), y = var(2, 1);
  std::vector<PolynomialMap> curved_maps;
  curved_maps.push_back(PolynomialMap(2, {RationalFn(x)}));
  curved_maps.push_back(PolynomialMap(2, {RationalFn(y + x * x)}));
  NonlinearDatum curved(std::move(curved_maps), {1.0, 1.0});

  IntegrationSpec spec;
  spec.box = Box::cube(2, 3.0);
  spec.order = 128;

  Matrix a(2, 2);
  a << 1.1, 0.4, -0.2, 0.9;
  Diffeo lin = Diffeo::affine(a, (Vector(2) << 0.15, -0.1).finished());
  Diffeo cubic = Diffeo::separable_cubic(2, 0.04, (Vector(2) << 0.5, 0.8).finished());

  double worst_linear = 0.0, worst_cubic = 0.0;
  for (const NonlinearDatum& d : {lw2_nonlinear(), curved}) {
    worst_linear = std::max(worst_linear, diffeo_invariance_check(d, fs, lin, spec));
    worst_cubic = std::max(worst_cubic, diffeo_invariance_check(d, fs, cubic, spec));
  }
  bool pass = worst_linear < 1e-6 && worst_cubic < 1e-3;
  std::ostringstream d;
  d << "linear " << worst_linear << ", cubic " << worst_cubic;
  report(6, "diffeomorphism invariance (two datasets)", pass, d.str(), t.seconds());
}

void criterion_7_discrete_ladder() {
  Timer t;
  IntegrationSpec spec;
  spec.box = Box::cube(2, 1.0);
  spec.order = 100;
  bool lw_ok = true;
  for (double delta : {0.1, 0.05, 0.025}) {
    std::vector<BallCollection> cs = {BallCollection::single((Vector(1) << 0.0).finished(), delta),
                                      BallCollection::single((Vector(1) << 0.0).finished(), delta)};
    auto rep = discrete_inequality_report(lw2_nonlinear(), cs, spec);
    lw_ok = lw_ok && std::abs(rep.ratio - 4.0) < 1e-9;
  }

  IntegrationSpec pspec = spec;
  pspec.order = 200;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double delta : {0.1, 0.05, 0.025}) {
    std::vector<BallCollection> cs = {BallCollection::single((Vector(1) << 0.0).finished(), delta),
                                      BallCollection::single((Vector(1) << 0.0).finished(), delta)};
    auto rep = discrete_inequality_report(parabola_datum(), cs, pspec);
    lo = std::min(lo, rep.ratio);
    hi = std::max(hi, rep.ratio);
  }
  bool pass = lw_ok && hi / lo < 2.0;
  std::ostringstream d;
  d << "lw exact " << (lw_ok ? "yes" : "no") << ", parabola ratio span " << hi / lo;
  report(7, "discrete inequality delta ladder", pass, d.str(), t.seconds());
}

void criterion_8_mesh_tube_bookkeeping() {
  Timer t;
  const double alpha = 1.5, beta = 1.25;
  bool mesh_ok = true;
  for (int dim : {1, 2}) {
    Vector center = Vector::Zero(dim);
    double prev = static_cast<double>(build_mesh(center, 0.2, alpha).points.size());
    for (double delta : {0.1, 0.05}) {
      double cur = static_cast<double>(build_mesh(center, delta, alpha).points.size());
      if (std::abs(std::log2(cur / prev) - (alpha - 1.0) * dim) >= 0.5) mesh_ok = false;
      prev = cur;
    }
  }

  int tube_matches = 0;
  Rng rng(808);
  for (int i = 0; i < 100; ++i) {
    double delta = rng.uniform(0.05, 0.12);
    double slope = rng.uniform(0.5, 2.0);
    PolynomialMap b(2, {RationalFn(var(2, 0) * slope)});
    Vector center = (Vector(1) << rng.uniform(-0.5, 0.5)).finished();
    Mesh mesh = build_mesh(center, delta, alpha);
    Vector x(2);
    x << rng.uniform(center[0] / slope - delta, center[0] / slope + delta), rng.uniform(-1, 1);
    int counted = tube_count(b, mesh, x, delta, beta);
    const double reach = std::pow(delta, beta);
    int expected = 0;
    for (const auto& z : mesh.points)
      if (std::max(0.0, std::abs(slope * x[0] - z[0]) - slope * reach) <= 1e-3 * reach) ++expected;
    if (counted == expected) ++tube_matches;
  }

  double worst_c = 0.0;
  for (int i = 0; i < 25; ++i) {
    double delta = rng.uniform(0.04, 0.1);
    double slope = rng.uniform(0.6, 1.8);
    PolynomialMap b(2, {RationalFn(var(2, 0) * slope)});
    Vector inside(2);
    inside << rng.uniform(-delta, delta) * 0.9 / slope, rng.uniform(-1, 1);
    auto rep = pointwise_tube_check(b, (Vector(1) << 0.0).finished(), delta, inside, alpha, beta,
                                    4.0);
    worst_c = std::max(worst_c, rep.constant);
    if (!rep.ok) worst_c = std::numeric_limits<double>::infinity();
  }
  bool pass = mesh_ok && tube_matches == 100 && worst_c <= 4.0;
  std::ostringstream d;
  d << "mesh scaling " << (mesh_ok ? "ok" : "off") << ", tube oracle " << tube_matches
    << "/100, pointwise C " << worst_c;
  report(8, "mesh and tube bookkeeping", pass, d.str(), t.seconds());
}

void criterion_9_fiber_measures() {
  Timer t;
  PolynomialMap flat(2, {RationalFn(var(2, 0))});
  PolynomialMap dilated(2, {RationalFn(var(2, 0) * 2.0)});
  Vector z0 = (Vector(1) << 0.0).finished();
  Vector origin = Vector::Zero(2);
  double seg = fiber_measure(flat, z0, origin, 1.0);
  double seg2 = fiber_measure(dilated, z0, origin, 1.0);

  Polynomial x = var(2, 0), y = var(2, 1);
  PolynomialMap circle(2, {RationalFn(x * x + y * y)});
  double r = 0.5;
  double arc = fiber_measure(circle, (Vector(1) << 1.0).finished(), (Vector(2) << 1.0, 0.0).finished(), r);
  double arc_expected = 4.0 * std::asin(0.5 * r);

  auto flat_bound = fiber_volume_check(flat, z0, origin, 0.1, 1.25, 1.0);
  auto curved_bound = fiber_volume_check(circle, (Vector(1) << 1.0).finished(),
                                         (Vector(2) << 1.0, 0.0).finished(), 0.1, 1.25, 1.0);

  bool pass = std::abs(seg - 2.0) < 1e-3 && std::abs(seg2 - 2.0) < 1e-3 &&
              std::abs(arc - arc_expected) / arc_expected < 0.02 && flat_bound.ok &&
              curved_bound.ok;
  std::ostringstream d;
  d << "segment " << seg << " / " << seg2 << ", arc rel "
    << std::abs(arc - arc_expected) / arc_expected;
  report(9, "fiber measures", pass, d.str(), t.seconds());
}

void criterion_10_fremlin() {
  Timer t;
  Rng rng(909);
  double worst_product = 0.0;
  for (int i = 0; i < 10; ++i) {
    std::vector<double> f1(3), f2(4), w1(3), w2(4);
    for (double& v : f1) v = rng.uniform(0.2, 2.0);
    for (double& v : f2) v = rng.uniform(0.2, 2.0);
    for (double& v : w1) v = rng.uniform(0.5, 1.5);
    for (double& v : w2) v = rng.uniform(0.5, 1.5);
    std::vector<double> values;
    for (std::size_t b = 0; b < f2.size(); ++b)
      for (std::size_t a = 0; a < f1.size(); ++a) values.push_back(f1[a] * f2[b]);
    GridTensor tensor = GridTensor::make({w1, w2}, values);
    double q1 = rng.uniform(1.0, 3.0), q2 = rng.uniform(1.0, 3.0);
    auto norm = [](const std::vector<double>& f, const std::vector<double>& w, double q) {
      double s = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * std::pow(f[i], q);
      return std::pow(s, 1.0 / q);
    };
    double expect = norm(f1, w1, q1) * norm(f2, w2, q2);
    worst_product = std::max(worst_product,
                             std::abs(fremlin_upper(tensor, {q1, q2}) - expect) / expect);
  }

  GridTensor diag = GridTensor::make({{1.0, 1.0}, {1.0, 1.0}}, {1.0, 0.0, 0.0, 1.0});
  double diag_v = fremlin_upper(diag, {1.0, 1.0});
  double brute = std::numeric_limits<double>::infinity();
  for (int i = -60; i <= 60; ++i)
    for (int j = -60; j <= 60; ++j) {
      double a = std::pow(2.0, 0.2 * i), b = std::pow(2.0, 0.2 * j);
      brute = std::min(brute, (a + b) * (1.0 / a + 1.0 / b));
    }

  GridTensor base = GridTensor::make({{1.0, 0.7}, {2.0, 1.0, 0.4}},
                                     {2.0, 1.0, 0.5, 3.0, 1.5, 0.2});
  std::vector<double> q = {1.5, 2.0};
  double eps = 0.43;
  GridTensor scaled = base;
  for (double& w : scaled.axis_weights[0]) w *= eps;            // k_1 = 1
  for (double& w : scaled.axis_weights[1]) w *= eps * eps;      // k_2 = 2
  double factor = std::pow(eps, 1.0 / q[0] + 2.0 / q[1]);
  double rescale_err =
      std::abs(fremlin_upper(scaled, q) - factor * fremlin_upper(base, q)) /
      (factor * fremlin_upper(base, q));

  bool pass = worst_product < 1e-6 && std::abs(diag_v - 4.0) < 1e-6 &&
              std::abs(brute - 4.0) < 1e-6 && rescale_err < 1e-9;
  std::ostringstream d;
  d << "product rel " << worst_product << ", diag " << diag_v << " (oracle " << brute
    << "), rescale rel " << rescale_err;
  report(10, "Fremlin norm estimates", pass, d.str(), t.seconds());
}

void criterion_11_group_suite() {
  Timer t;
  GroupModel axb = make_affine_line_group();
  Rng rng(111);
  double worst_hom = 0.0;
  for (int i = 0; i < 6; ++i) {
    Vector g = (Vector(2) << rng.uniform(0.8, 1.3), rng.uniform(-0.2, 0.2)).finished();
    Vector h = (Vector(2) << rng.uniform(0.8, 1.3), rng.uniform(-0.2, 0.2)).finished();
    double dg = modular_character(axb, g), dh = modular_character(axb, h);
    double dgh = modular_character(axb, axb.multiply(g, h));
    worst_hom = std::max(worst_hom, std::abs(dgh - dg * dh) / (dg * dh));
  }

  GroupModel line = make_abelian_group(1, 40.0);
  GroupQuadSpec quad;
  quad.order = 128;
  std::vector<GroupFunction> fs = {
      GroupFunction::bump((Vector(1) << 0.2).finished(), (Vector(1) << 0.8).finished()),
      GroupFunction::bump((Vector(1) << -0.4).finished(), (Vector(1) << 0.6).finished(), 1.7)};
  auto young = young_report(line, fs, {1.0, 1.0}, 1.0, quad);

  SolveOptions opts;
  opts.seed = 13;
  opts.restarts = 2;
  auto conn = group_bl_identity_check(axb, {2.0, 2.0}, 50, 13, opts);

  bool pass = worst_hom <= 1e-4 && std::abs(young.ratio - 1.0) <= 1e-9 &&
              conn.points_used == 50 && conn.max_rel_discrepancy < 1e-3 && t.seconds() < 180.0;
  std::ostringstream d;
  d << "hom " << worst_hom << ", young ratio " << young.ratio << ", identity "
    << conn.max_rel_discrepancy << " @ " << conn.points_used << " pts";
  report(11, "group suite", pass, d.str(), t.seconds());
}

void criterion_12_determinism() {
  Timer t;
  auto run_once = [&](const std::string& dir) {
    std::string cmd = cli_path + " suite --all --seed 7 --out " + dir + " > /dev/null 2>&1";
    return std::system(cmd.c_str()) == 0;
  };
  bool ok1 = run_once("/tmp/bl_accept_a");
  bool ok2 = run_once("/tmp/bl_accept_b");
  auto slurp = [](const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  std::string a = slurp("/tmp/bl_accept_a/suite.csv");
  std::string b = slurp("/tmp/bl_accept_b/suite.csv");
  bool pass = ok1 && ok2 && !a.empty() && a == b;
  std::ostringstream d;
  d << "suite runs " << (ok1 && ok2 ? "clean" : "failing") << ", reports "
    << (a == b ? "identical" : "differ") << " (" << a.size() << " bytes)";
  report(12, "suite determinism", pass, d.str(), t.seconds());
}

}  // namespace

int main(int argc, char** argv) {
  cli_path = argc > 1 ? argv[1] : "bl";
  Timer total;
  criterion_1_exact_constants();
  criterion_2_oracle_equivalence();
  criterion_3_identity_suites();
  criterion_4_weight_correctness();
  criterion_5_global_stability();
  criterion_6_diffeo_invariance();
  criterion_7_discrete_ladder();
  criterion_8_mesh_tube_bookkeeping();
  criterion_9_fiber_measures();
  criterion_10_fremlin();
  criterion_11_group_suite();
  criterion_12_determinism();
  std::printf("%s: %d/12 criteria passed (%.1fs total)\n", failures == 0 ? "OK" : "FAILED",
              12 - failures, total.seconds());
  return failures == 0 ? 0 : 1;
}
