// Wall-clock comparison of the OpenMP kernels against the serial reference
// paths. The two modes share the chunked reduction, so values must agree
// bit for bit; only the schedule differs.

#include <chrono>
#include <cstdio>
#include <string>

#include "bl/discrete.hpp"
#include "bl/fremlin.hpp"
#include "bl/group.hpp"

using namespace bl;

namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct Case {
  std::string name;
  double serial = 0.0, parallel = 0.0, value_serial = 0.0, value_parallel = 0.0;
};

template <class F>
Case run_case(const std::string& name, F&& body) {
  Case c;
  c.name = name;
  double t0 = now_seconds();
  c.value_serial = body(par::Mode::serial);
  c.serial = now_seconds() - t0;
  t0 = now_seconds();
  c.value_parallel = body(par::Mode::parallel);
  c.parallel = now_seconds() - t0;
  return c;
}

NonlinearDatum parabola_datum() {
  Polynomial x = Polynomial::variable(2, 0), y = Polynomial::variable(2, 1);
  std::vector<PolynomialMap> maps;
  maps.push_back(PolynomialMap(2, {RationalFn(x)}));
  maps.push_back(PolynomialMap(2, {RationalFn(x + y * y)}));
  return NonlinearDatum(std::move(maps), {1.0, 1.0});
}

}  // namespace

int main() {
  std::printf("workers: %d\n\n", par::worker_count());
  std::vector<Case> cases;

  {
    NonlinearDatum datum = parabola_datum();
    std::vector<TestFunction> fs = {
        TestFunction::indicator_ball((Vector(1) << 0.0).finished(), 1.0),
        TestFunction::indicator_ball((Vector(1) << 0.0).finished(), 1.0)};
    cases.push_back(run_case("monte-carlo functional (4e5 samples)", [&](par::Mode mode) {
      IntegrationSpec spec;
      spec.box = Box::cube(2, 2.0);
      spec.method = IntegrationSpec::Method::monte_carlo;
      spec.samples = 400000;
      spec.seed = 7;
      spec.mode = mode;
      return lhs_functional(datum, fs, spec).value;
    }));
    cases.push_back(run_case("tensor quadrature functional (512^2)", [&](par::Mode mode) {
      IntegrationSpec spec;
      spec.box = Box::cube(2, 2.0);
      spec.order = 256;  // doubled internally for the budget check
      spec.mode = mode;
      return lhs_functional(datum, fs, spec).value;
    }));
    cases.push_back(run_case("fiber measure ladder (circle)", [&](par::Mode mode) {
      Polynomial x = Polynomial::variable(2, 0), y = Polynomial::variable(2, 1);
      PolynomialMap circle(2, {RationalFn(x * x + y * y)});
      return fiber_measure(circle, (Vector(1) << 1.0).finished(),
                           (Vector(2) << 1.0, 0.0).finished(), 0.5, mode);
    }));
  }

  {
    Matrix ex = (Matrix(2, 1) << 1, 0).finished(), ey = (Matrix(2, 1) << 0, 1).finished();
    AffineFamily h = AffineFamily::make(ex, {Vector::Zero(2)});
    AffineFamily v = AffineFamily::make(ey, {Vector::Zero(2)});
    cases.push_back(run_case("window functional (600^2 centers)", [&](par::Mode mode) {
      return window_functional({h, v}, {1.0, 1.0}, Box::cube(2, 2.0), 600, mode);
    }));
  }

  {
    GroupModel axb = make_affine_line_group();
    GroupFunction f = GroupFunction::bump((Vector(2) << 1.0, 0.0).finished(),
                                          (Vector(2) << 0.3, 0.3).finished());
    GroupFunction g = GroupFunction::bump((Vector(2) << 1.25, 0.1).finished(),
                                          (Vector(2) << 0.25, 0.25).finished());
    cases.push_back(run_case("group convolution (64^2 grid)", [&](par::Mode mode) {
      GroupQuadSpec spec;
      spec.order = 64;
      spec.mode = mode;
      GroupFunction conv = convolve(axb, f, g, spec);
      return haar_integral(axb, conv, GroupQuadSpec{64, mode});
    }));
  }

  std::printf("%-38s %10s %10s %8s  %s\n", "kernel", "serial[s]", "openmp[s]", "speedup",
              "bit-identical");
  for (const auto& c : cases) {
    std::printf("%-38s %10.3f %10.3f %7.2fx  %s\n", c.name.c_str(), c.serial, c.parallel,
                c.serial / c.parallel, c.value_serial == c.value_parallel ? "yes" : "NO");
  }
  return 0;
}
