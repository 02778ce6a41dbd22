// bl: command-line laboratory for Brascamp-Lieb constants, weighted
// functionals, and the discrete machinery behind them. JSON configs in,
// JSON/CSV reports out; all randomness flows from --seed.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bl/discrete.hpp"
#include "bl/fremlin.hpp"
#include "bl/group.hpp"
#include "bl/json_io.hpp"

namespace {

using namespace bl;
using bl::io::format_number;
using bl::io::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitCheckFailed = 2;

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write '" + path + "'");
  out << text;
}

std::string status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged:
      return "converged";
    case SolveStatus::diverged_to_infinity:
      return "diverged-to-infinity";
    case SolveStatus::max_iterations:
      return "max-iterations";
  }
  return "unknown";
}

// ---------------------------------------------------------------- compute --

struct ComputeArgs {
  std::string datum_path, out;
  std::uint64_t seed = 0;
  int max_iter = 10000;
  int restarts = 8;
};

int run_compute(const ComputeArgs& a) {
  BLDatum datum = io::datum_from_json(io::parse_json_file(a.datum_path));
  SolveOptions opts;
  opts.seed = a.seed;
  opts.max_iter = a.max_iter;
  opts.restarts = a.restarts;
  BLResult r = bl_constant(datum, opts);

  json out{{"config",
            {{"datum", a.datum_path},
             {"seed", a.seed},
             {"max_iter", a.max_iter},
             {"restarts", a.restarts}}},
           {"finite", r.finite()},
           {"status", status_name(r.status)},
           {"iterations", r.iterations},
           {"restart_spread", r.restart_spread},
           {"scaling_defect", datum.scaling_defect()}};
  if (r.finite())
    out["value"] = r.value;
  else
    out["value"] = "inf";
  write_text(a.out, out.dump(2) + "\n");
  return kExitOk;
}

// ------------------------------------------------------------------ check --

struct CheckArgs {
  std::string kind, datum_path, out;
  std::uint64_t seed = 0;
  double tolerance = 1e-6;
};

int run_check(const CheckArgs& a) {
  BLDatum datum = io::datum_from_json(io::parse_json_file(a.datum_path));
  SolveOptions opts;
  opts.seed = a.seed;
  IdentityReport rep;
  if (a.kind == "factorization")
    rep = factorization_check(datum, opts);
  else if (a.kind == "critical-split")
    rep = critical_split_check(datum, opts);
  else
    throw std::invalid_argument("unknown check '" + a.kind + "'");

  bool pass = !rep.violated && (rep.both_infinite || rep.rel_discrepancy <= a.tolerance);
  json out{{"config",
            {{"check", a.kind}, {"datum", a.datum_path}, {"seed", a.seed},
             {"tolerance", a.tolerance}}},
           {"lhs", format_number(rep.lhs)},
           {"rhs", format_number(rep.rhs)},
           {"rel_discrepancy", format_number(rep.rel_discrepancy)},
           {"both_infinite", rep.both_infinite},
           {"violated", rep.violated},
           {"pass", pass}};
  write_text(a.out, out.dump(2) + "\n");
  return pass ? kExitOk : kExitCheckFailed;
}

// ----------------------------------------------------------------- weight --

struct WeightArgs {
  std::string datum_path, out;
  std::vector<double> lo{-1.0, -1.0}, hi{1.0, 1.0};
  int resolution = 101;
};

int run_weight(const WeightArgs& a) {
  NonlinearDatum datum = io::nonlinear_from_json(io::parse_json_file(a.datum_path));
  if (datum.domain_dim != 2) throw std::invalid_argument("weight grid: domain must be 2-d");
  if (a.lo.size() != 2 || a.hi.size() != 2) throw std::invalid_argument("weight grid: box arity");
  WeightField w(datum);

  const int res = a.resolution;
  std::vector<double> values(static_cast<std::size_t>(res) * res);
  par::for_each(static_cast<std::int64_t>(values.size()), [&](std::int64_t flat) {
    int i = static_cast<int>(flat % res), j = static_cast<int>(flat / res);
    Vector p(2);
    p << a.lo[0] + (a.hi[0] - a.lo[0]) * i / (res - 1),
        a.lo[1] + (a.hi[1] - a.lo[1]) * j / (res - 1);
    values[static_cast<std::size_t>(flat)] = w(p);
  });

  std::ostringstream csv;
  csv << "# config: " << json{{"datum", a.datum_path},
                              {"lo", a.lo},
                              {"hi", a.hi},
                              {"resolution", res}}
             .dump()
      << "\n";
  csv << "x,y,weight\n";
  for (int j = 0; j < res; ++j)
    for (int i = 0; i < res; ++i) {
      double x = a.lo[0] + (a.hi[0] - a.lo[0]) * i / (res - 1);
      double y = a.lo[1] + (a.hi[1] - a.lo[1]) * j / (res - 1);
      csv << format_number(x) << ',' << format_number(y) << ','
          << format_number(values[static_cast<std::size_t>(j) * res + i]) << "\n";
    }
  write_text(a.out, csv.str());
  return kExitOk;
}

// -------------------------------------------------------------- integrate --

struct IntegrateArgs {
  std::string config_path, out;
  std::int64_t seed_override = -1;
};

std::string box_text(const Box& b) {
  std::ostringstream s;
  for (int i = 0; i < b.dim(); ++i) {
    if (i) s << 'x';
    s << '[' << format_number(b.lo[i]) << ';' << format_number(b.hi[i]) << ']';
  }
  return s.str();
}

int run_integrate(const IntegrateArgs& a) {
  json cfg = io::parse_json_file(a.config_path);
  NonlinearDatum datum = io::nonlinear_from_json(cfg.at("datum"));
  std::vector<TestFunction> fs;
  for (const auto& f : cfg.at("functions")) fs.push_back(io::testfn_from_json(f));
  IntegrationSpec spec = io::integration_spec_from_json(cfg, datum.domain_dim);
  if (a.seed_override >= 0) spec.seed = static_cast<std::uint64_t>(a.seed_override);

  InequalityReport rep = inequality_report(datum, fs, spec);

  std::ostringstream csv;
  json resolved = cfg;
  resolved["seed"] = spec.seed;
  csv << "# config: " << resolved.dump() << "\n";
  csv << "lhs,stderr,rhs,ratio,seed,method,box\n";
  csv << format_number(rep.lhs.value) << ',' << format_number(rep.lhs.budget) << ','
      << format_number(rep.rhs) << ',' << format_number(rep.ratio) << ',' << spec.seed << ','
      << (spec.method == IntegrationSpec::Method::monte_carlo ? "monte-carlo"
                                                              : "tensor-quadrature")
      << ',' << box_text(spec.box) << "\n";
  write_text(a.out, csv.str());
  return rep.violation ? kExitCheckFailed : kExitOk;
}

// -------------------------------------------------------------- discretize --

struct DiscretizeArgs {
  std::string config_path, out;
  std::int64_t seed_override = -1;
};

int run_discretize(const DiscretizeArgs& a) {
  json cfg = io::parse_json_file(a.config_path);
  NonlinearDatum datum = io::nonlinear_from_json(cfg.at("datum"));
  const double alpha = cfg.value("alpha", 1.5);
  const double beta = cfg.value("beta", 1.25);
  std::vector<double> deltas;
  for (const auto& d : cfg.value("deltas", json::array({0.1, 0.05, 0.025})))
    deltas.push_back(d.get<double>());
  IntegrationSpec spec = io::integration_spec_from_json(cfg, datum.domain_dim);
  if (a.seed_override >= 0) spec.seed = static_cast<std::uint64_t>(a.seed_override);
  const bool with_chain = cfg.value("chain", false);

  std::ostringstream csv;
  json resolved = cfg;
  resolved["seed"] = spec.seed;
  resolved["alpha"] = alpha;
  resolved["beta"] = beta;
  csv << "# config: " << resolved.dump() << "\n";
  csv << "check,delta,alpha,beta,lhs,budget,rhs,ratio,constant,seed\n";

  bool ok = true;
  for (double delta : deltas) {
    std::vector<BallCollection> collections;
    for (const auto& cj : cfg.at("collections")) {
      json with_radius = cj;
      with_radius["radius"] = delta;
      collections.push_back(io::collection_from_json(with_radius));
    }
    DiscreteReport rep = discrete_inequality_report(datum, collections, spec);
    csv << "discrete-inequality," << format_number(delta) << ',' << format_number(alpha) << ','
        << format_number(beta) << ',' << format_number(rep.lhs) << ','
        << format_number(rep.lhs_budget) << ',' << format_number(rep.rhs) << ','
        << format_number(rep.ratio) << ",," << spec.seed << "\n";

    for (std::size_t j = 0; j < collections.size(); ++j) {
      double meshes = 0.0;
      for (const auto& c : collections[j].centers)
        meshes += static_cast<double>(build_mesh(c, delta, alpha).points.size());
      csv << "mesh-count-map" << j << ',' << format_number(delta) << ',' << format_number(alpha)
          << ',' << format_number(beta) << ',' << format_number(meshes) << ",,,,," << spec.seed
          << "\n";
    }

    if (with_chain) {
      ChainReport chain = affine_chain_check(datum, collections, delta, alpha, beta, spec);
      csv << "chain," << format_number(delta) << ',' << format_number(alpha) << ','
          << format_number(beta) << ',' << format_number(chain.lhs) << ",,"
          << format_number(chain.mid) << ',' << format_number(chain.lhs / chain.mid) << ','
          << format_number(chain.constant) << ',' << spec.seed << "\n";
      if (!(chain.constant <= cfg.value("chain_budget", 4.0))) ok = false;
    }

    if (cfg.contains("probe_points")) {
      FiberSearchOptions search;
      search.seed = spec.seed;
      const double budget_c = cfg.value("pointwise_budget", 4.0);
      for (const auto& pj : cfg.at("probe_points")) {
        Vector x = io::vector_from_json(pj);
        for (std::size_t j = 0; j < collections.size(); ++j) {
          const Vector& z = collections[j].centers.front();
          auto tube = pointwise_tube_check(datum.maps[j], z, delta, x, alpha, beta, budget_c,
                                           search);
          csv << "pointwise-map" << j << ',' << format_number(delta) << ','
              << format_number(alpha) << ',' << format_number(beta) << ','
              << format_number(tube.lhs) << ",," << format_number(tube.rhs) << ",,"
              << format_number(tube.constant) << ',' << spec.seed << "\n";
          if (!tube.ok) ok = false;

          auto vol = fiber_volume_check(datum.maps[j], z, x, delta, beta, budget_c, search);
          csv << "fiber-volume-map" << j << ',' << format_number(delta) << ','
              << format_number(alpha) << ',' << format_number(beta) << ','
              << format_number(vol.lhs) << ",," << format_number(vol.rhs) << ",,"
              << format_number(vol.constant) << ',' << spec.seed << "\n";
          if (!vol.ok) ok = false;

          // Linearization containment at the probe; skipped (-1) at
          // non-submersive points.
          double fails = -1.0;
          try {
            fails = linearization_check(datum.maps[j], x, delta, search);
          } catch (const std::invalid_argument&) {
          }
          csv << "linearization-map" << j << ',' << format_number(delta) << ','
              << format_number(alpha) << ',' << format_number(beta) << ','
              << format_number(fails) << ",,0,,," << spec.seed << "\n";
          if (fails > 0.0) ok = false;
        }
      }
    }
  }
  write_text(a.out, csv.str());
  return ok ? kExitOk : kExitCheckFailed;
}

// ------------------------------------------------------------------ young --

struct YoungArgs {
  std::string group, config_path, out;
  std::int64_t seed_override = -1;
};

GroupModel make_group(const std::string& name) {
  if (name == "abelian") return make_abelian_group(1, 40.0);
  if (name == "abelian2") return make_abelian_group(2, 20.0);
  if (name == "positive-reals") return make_positive_reals_group();
  if (name == "axb") return make_affine_line_group();
  if (name == "heisenberg") return make_heisenberg_group();
  throw std::invalid_argument("unknown group '" + name + "'");
}

int run_young(const YoungArgs& a) {
  json cfg = io::parse_json_file(a.config_path);
  GroupModel model = make_group(a.group);

  std::vector<GroupFunction> fs;
  for (const auto& f : cfg.at("functions"))
    fs.push_back(GroupFunction::bump(io::vector_from_json(f.at("center")),
                                     io::vector_from_json(f.at("widths")),
                                     f.value("amplitude", 1.0)));
  std::vector<double> p;
  for (const auto& pj : cfg.at("p")) p.push_back(pj.get<double>());
  double r = cfg.at("r").is_string() ? std::numeric_limits<double>::infinity()
                                     : cfg.at("r").get<double>();
  GroupQuadSpec quad;
  quad.order = cfg.value("order", 64);
  std::uint64_t seed = cfg.value("seed", static_cast<std::uint64_t>(0));
  if (a.seed_override >= 0) seed = static_cast<std::uint64_t>(a.seed_override);

  std::ostringstream csv;
  json resolved = cfg;
  resolved["group"] = a.group;
  resolved["seed"] = seed;
  csv << "# config: " << resolved.dump() << "\n";
  csv << "check,weighted,lhs,rhs,ratio,budget,seed\n";

  bool ok = true;
  for (bool weighted : {true, false}) {
    YoungReport rep = young_report(model, fs, p, r, quad, weighted);
    csv << "young," << (weighted ? 1 : 0) << ',' << format_number(rep.lhs) << ','
        << format_number(rep.rhs) << ',' << format_number(rep.ratio) << ",," << seed << "\n";
  }

  if (int pts = cfg.value("identity_points", 0); pts > 0) {
    SolveOptions opts;
    opts.seed = seed;
    opts.restarts = 2;
    ConnectionReport rep = group_bl_identity_check(model, p, pts, seed, opts);
    double budget = cfg.value("identity_tolerance", 1e-3);
    csv << "derivative-identity,," << format_number(rep.max_rel_discrepancy) << ",,,"
        << format_number(budget) << ',' << seed << "\n";
    if (!(rep.max_rel_discrepancy < budget) || rep.points_used == 0) ok = false;
  }
  write_text(a.out, csv.str());
  return ok ? kExitOk : kExitCheckFailed;
}

// ------------------------------------------------------------------ suite --

struct SuiteArgs {
  bool all = false;
  std::uint64_t seed = 7;
  std::string out_dir = "bl_reports";
};

struct SuiteRecorder {
  std::ostringstream csv;
  int failures = 0;

  void row(const std::string& check, const std::string& param, double value, double budget,
           bool pass) {
    csv << check << ',' << param << ',' << format_number(value) << ',' << format_number(budget)
        << ',' << (pass ? "pass" : "FAIL") << "\n";
    if (!pass) ++failures;
    std::cout << (pass ? "pass " : "FAIL ") << check << " " << param << " = "
              << format_number(value) << " (budget " << format_number(budget) << ")\n";
  }
};

NonlinearDatum suite_parabola() {
  Polynomial x = Polynomial::variable(2, 0), y = Polynomial::variable(2, 1);
  std::vector<PolynomialMap> maps;
  maps.push_back(PolynomialMap(2, {RationalFn(x)}));
  maps.push_back(PolynomialMap(2, {RationalFn(x + y * y)}));
  return NonlinearDatum(std::move(maps), {1.0, 1.0});
}

BLDatum suite_rank_one(std::uint64_t seed) {
  Rng rng = Rng::fork(seed, 901);
  for (;;) {
    std::vector<Matrix> maps;
    bool ok = true;
    for (int j = 0; j < 3; ++j) {
      Matrix l(1, 3);
      for (int i = 0; i < 3; ++i) l(0, i) = rng.normal();
      if (l.norm() < 0.3) ok = false;
      maps.push_back(l);
    }
    if (!ok) continue;
    for (int u = 0; u < 3 && ok; ++u)
      for (int v = u + 1; v < 3; ++v)
        if (std::abs(maps[u].row(0).normalized().dot(maps[v].row(0).normalized())) > 0.95)
          ok = false;
    if (ok) return BLDatum(3, std::move(maps), {1.0, 1.0, 1.0});
  }
}

int run_suite(const SuiteArgs& a) {
  if (!a.all) throw std::invalid_argument("suite: pass --all");
  SuiteRecorder rec;
  const std::uint64_t seed = a.seed;

  // Exact constants.
  {
    SolveOptions opts;
    opts.seed = seed;
    Matrix e1 = (Matrix(1, 2) << 1, 0).finished(), e2 = (Matrix(1, 2) << 0, 1).finished();
    auto lw = bl_constant(BLDatum(2, {e1, e2}, {1.0, 1.0}), opts);
    rec.row("compute", "loomis-whitney-2d", lw.value, 1e-8, std::abs(lw.value - 1.0) < 1e-8);
    auto hold = bl_constant(BLDatum(2, {Matrix::Identity(2, 2), Matrix::Identity(2, 2)},
                                    {0.5, 0.5}),
                            opts);
    rec.row("compute", "hoelder", hold.value, 1e-8, std::abs(hold.value - 1.0) < 1e-8);
    for (double deg : {30.0, 45.0, 60.0}) {
      double theta = deg * M_PI / 180.0;
      Matrix skew(1, 2);
      skew << std::cos(theta), std::sin(theta);
      auto r = bl_constant(BLDatum(2, {e1, skew}, {1.0, 1.0}), opts);
      double expect = 1.0 / std::sin(theta);
      rec.row("compute", "skew-" + std::to_string(static_cast<int>(deg)), r.value, 1e-6,
              std::abs(r.value - expect) < 1e-6);
    }
  }

  // Identity suites.
  {
    SolveOptions opts;
    opts.seed = seed;
    double worst_f = 0.0, worst_s = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      Rng rng = Rng::fork(seed + s, 77);
      std::vector<Matrix> maps;
      for (int j = 0; j < 3; ++j) {
        Matrix l(2, 3);
        for (int i = 0; i < 2; ++i)
          for (int k = 0; k < 3; ++k) l(i, k) = rng.normal();
        maps.push_back(l);
      }
      BLDatum d(3, std::move(maps), {0.5, 0.5, 0.5});
      if (d.has_degenerate_map()) continue;
      worst_f = std::max(worst_f, factorization_check(d, opts).rel_discrepancy);
      worst_s = std::max(worst_s, critical_split_check(suite_rank_one(seed + s), opts).rel_discrepancy);
    }
    rec.row("factorization", "10-seeds", worst_f, 1e-6, worst_f < 1e-6);
    rec.row("critical-split", "10-seeds", worst_s, 1e-6, worst_s < 1e-6);
  }

  // Weight field.
  {
    WeightField w(suite_parabola());
    double worst = 0.0;
    for (int i = 0; i < 21; ++i)
      for (int j = 0; j < 21; ++j) {
        Vector p(2);
        p << -1.0 + 0.1 * i, -1.0 + 0.1 * j;
        worst = std::max(worst, std::abs(w(p) - 2.0 * std::abs(p[1])));
      }
    rec.row("weight", "parabola-grid", worst, 1e-8, worst < 1e-8);
  }

  // Global inequality.
  {
    std::vector<TestFunction> fs = {
        TestFunction::indicator_ball((Vector(1) << 0.0).finished(), 1.0),
        TestFunction::indicator_ball((Vector(1) << 0.0).finished(), 1.0)};
    IntegrationSpec spec;
    spec.box = Box::cube(2, 2.0);
    spec.method = IntegrationSpec::Method::monte_carlo;
    spec.samples = 100000;
    spec.seed = seed;
    auto rep = inequality_report(suite_parabola(), fs, spec);
    rec.row("integrate", "parabola-mc", rep.lhs.value, 3.0 * rep.lhs.budget,
            std::abs(rep.lhs.value - 4.0) <= 3.0 * rep.lhs.budget);
    IntegrationSpec wide = spec;
    wide.box = Box::cube(2, 4.0);
    auto rep2 = inequality_report(suite_parabola(), fs, wide);
    double drift = std::abs(rep2.ratio - rep.ratio) / rep.ratio;
    rec.row("integrate", "ratio-box-stability", drift, 0.1, drift < 0.1);
  }

  // Discrete ladder.
  {
    std::vector<PolynomialMap> maps;
    maps.push_back(PolynomialMap(2, {RationalFn(Polynomial::variable(2, 0))}));
    maps.push_back(PolynomialMap(2, {RationalFn(Polynomial::variable(2, 1))}));
    NonlinearDatum lw(std::move(maps), {1.0, 1.0});
    IntegrationSpec spec;
    spec.box = Box::cube(2, 1.0);
    spec.order = 100;
    spec.seed = seed;
    for (double delta : {0.1, 0.05, 0.025}) {
      std::vector<BallCollection> cs = {
          BallCollection::single((Vector(1) << 0.0).finished(), delta),
          BallCollection::single((Vector(1) << 0.0).finished(), delta)};
      auto rep = discrete_inequality_report(lw, cs, spec);
      rec.row("discretize", "lw-ratio-delta-" + format_number(delta), rep.ratio, 1e-6,
              std::abs(rep.ratio - 4.0) < 1e-6);
    }
    std::vector<BallCollection> cs = {BallCollection::single((Vector(1) << 0.0).finished(), 0.1),
                                      BallCollection::single((Vector(1) << 0.0).finished(), 0.1)};
    auto chain = affine_chain_check(lw, cs, 0.1, 1.5, 1.25, spec);
    rec.row("discretize", "chain-constant", chain.constant, 4.0,
            chain.constant > 0.0 && chain.constant <= 4.0);
  }

  // Fremlin bounds.
  {
    GridTensor diag = GridTensor::make({{1.0, 1.0}, {1.0, 1.0}}, {1.0, 0.0, 0.0, 1.0});
    double v = fremlin_upper(diag, {1.0, 1.0});
    rec.row("fremlin", "diagonal-2", v, 1e-6, std::abs(v - 4.0) < 1e-6);

    GridTensor prod = GridTensor::make({{1.0, 0.5}, {2.0, 1.0, 1.0}},
                                       {2.0, 1.0, 6.0, 3.0, 4.0, 2.0});
    double norm1 = 1.0 * 2.0 + 0.5 * 1.0;           // ||(2,1)||_1 weights (1, .5)
    double norm2 = 2.0 * 1.0 + 1.0 * 3.0 + 1.0 * 2.0;  // ||(1,3,2)||_1 weights (2,1,1)
    double pv = fremlin_upper(prod, {1.0, 1.0});
    rec.row("fremlin", "product", std::abs(pv - norm1 * norm2), 1e-6,
            std::abs(pv - norm1 * norm2) < 1e-6);

    GridTensor scaled = prod;
    for (double& w : scaled.axis_weights[0]) w *= 0.5;
    double lhs = fremlin_upper(scaled, {1.0, 1.0});
    double rhs = 0.5 * pv;
    rec.row("fremlin", "rescaling", std::abs(lhs - rhs), 1e-9, std::abs(lhs - rhs) < 1e-9);
  }

  // Window functional.
  {
    Matrix ex = (Matrix(2, 1) << 1, 0).finished(), ey = (Matrix(2, 1) << 0, 1).finished();
    AffineFamily h = AffineFamily::make(ex, {Vector::Zero(2)});
    AffineFamily v = AffineFamily::make(ey, {Vector::Zero(2)});
    double val = window_functional({h, v}, {1.0, 1.0}, Box::cube(2, 2.0), 200);
    double rel = std::abs(val - M_PI * M_PI) / (M_PI * M_PI);
    rec.row("window", "orthogonal-lines", rel, 0.05, rel < 0.05);
  }

  // Group suite.
  {
    GroupModel line = make_abelian_group(1, 40.0);
    GroupQuadSpec quad;
    quad.order = 128;
    std::vector<GroupFunction> fs = {
        GroupFunction::bump((Vector(1) << 0.2).finished(), (Vector(1) << 0.8).finished()),
        GroupFunction::bump((Vector(1) << -0.4).finished(), (Vector(1) << 0.6).finished())};
    auto young = young_report(line, fs, {1.0, 1.0}, 1.0, quad);
    rec.row("young", "real-line-ratio", young.ratio, 1e-9, std::abs(young.ratio - 1.0) < 1e-9);

    GroupModel axb = make_affine_line_group();
    Rng rng = Rng::fork(seed, 31);
    double worst = 0.0;
    for (int t = 0; t < 3; ++t) {
      Vector g1 = (Vector(2) << rng.uniform(0.8, 1.3), rng.uniform(-0.2, 0.2)).finished();
      Vector g2 = (Vector(2) << rng.uniform(0.8, 1.3), rng.uniform(-0.2, 0.2)).finished();
      double da = modular_character(axb, g1), db = modular_character(axb, g2);
      double dab = modular_character(axb, axb.multiply(g1, g2));
      worst = std::max(worst, std::abs(dab - da * db) / (da * db));
    }
    rec.row("young", "axb-modular-homomorphism", worst, 1e-4, worst < 1e-4);

    SolveOptions opts;
    opts.seed = seed;
    opts.restarts = 2;
    auto conn = group_bl_identity_check(axb, {2.0, 2.0}, 5, seed, opts);
    rec.row("young", "axb-derivative-identity", conn.max_rel_discrepancy, 1e-3,
            conn.points_used > 0 && conn.max_rel_discrepancy < 1e-3);
  }

  std::filesystem::create_directories(a.out_dir);
  std::ofstream out(a.out_dir + "/suite.csv");
  out << "# config: " << json{{"seed", seed}, {"suite", "all"}}.dump() << "\n";
  out << "check,param,value,budget,status\n" << rec.csv.str();
  std::cout << (rec.failures == 0 ? "suite: all checks passed\n"
                                  : "suite: " + std::to_string(rec.failures) + " failures\n");
  return rec.failures == 0 ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for Brascamp-Lieb constants and weighted functionals"};
  app.require_subcommand(1);

  ComputeArgs compute_args;
  auto* compute = app.add_subcommand("compute", "Best constant of a linear datum");
  compute->add_option("--datum", compute_args.datum_path, "datum JSON")->required();
  compute->add_option("--seed", compute_args.seed, "random seed");
  compute->add_option("--max-iter", compute_args.max_iter, "ascent iteration cap");
  compute->add_option("--restarts", compute_args.restarts, "random SPD restarts");
  compute->add_option("--out", compute_args.out, "output path (default stdout)");

  CheckArgs check_args;
  auto* check = app.add_subcommand("check", "Structural identities of a datum");
  check->add_option("kind", check_args.kind, "factorization | critical-split")->required();
  check->add_option("--datum", check_args.datum_path, "datum JSON")->required();
  check->add_option("--seed", check_args.seed, "random seed");
  check->add_option("--tolerance", check_args.tolerance, "pass threshold");
  check->add_option("--out", check_args.out, "output path (default stdout)");

  WeightArgs weight_args;
  auto* weight = app.add_subcommand("weight", "Weight-field grid for a 2-d nonlinear datum");
  weight->add_option("--datum", weight_args.datum_path, "nonlinear datum JSON")->required();
  weight->add_option("--lo", weight_args.lo, "box lower corner")->expected(2);
  weight->add_option("--hi", weight_args.hi, "box upper corner")->expected(2);
  weight->add_option("--resolution", weight_args.resolution, "grid nodes per axis");
  weight->add_option("--out", weight_args.out, "CSV path (default stdout)");

  IntegrateArgs integrate_args;
  auto* integrate = app.add_subcommand("integrate", "Both sides of the weighted inequality");
  integrate->add_option("--config", integrate_args.config_path, "run config JSON")->required();
  integrate->add_option("--out", integrate_args.out, "CSV path (default stdout)");
  integrate->add_option("--seed", integrate_args.seed_override, "seed override");

  DiscretizeArgs discretize_args;
  auto* discretize = app.add_subcommand("discretize", "Discrete inequality over a delta ladder");
  discretize->add_option("--config", discretize_args.config_path, "lab config JSON")->required();
  discretize->add_option("--out", discretize_args.out, "CSV path (default stdout)");
  discretize->add_option("--seed", discretize_args.seed_override, "seed override");

  YoungArgs young_args;
  auto* young = app.add_subcommand("young", "Weighted convolution inequality on a chart group");
  young->add_option("--group", young_args.group, "abelian | positive-reals | axb | heisenberg")
      ->required();
  young->add_option("--config", young_args.config_path, "young config JSON")->required();
  young->add_option("--out", young_args.out, "CSV path (default stdout)");
  young->add_option("--seed", young_args.seed_override, "seed override");

  SuiteArgs suite_args;
  auto* suite = app.add_subcommand("suite", "Deterministic verification battery");
  suite->add_flag("--all", suite_args.all, "run every check");
  suite->add_option("--seed", suite_args.seed, "random seed");
  suite->add_option("--out", suite_args.out_dir, "report directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*compute) return run_compute(compute_args);
    if (*check) return run_check(check_args);
    if (*weight) return run_weight(weight_args);
    if (*integrate) return run_integrate(integrate_args);
    if (*discretize) return run_discretize(discretize_args);
    if (*young) return run_young(young_args);
    if (*suite) return run_suite(suite_args);
  } catch (const CheckFailure& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
