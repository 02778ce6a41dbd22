#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bl/weight.hpp"
#include "oracles.hpp"

using namespace bl;

namespace {

Polynomial var(int n, int i) { return Polynomial::variable(n, i); }

NonlinearDatum parabola_datum() {
  Polynomial x = var(2, 0), y = var(2, 1);
  std::vector<PolynomialMap> maps;
  maps.push_back(PolynomialMap(2, {RationalFn(x)}));
  maps.push_back(PolynomialMap(2, {RationalFn(x + y * y)}));
  return NonlinearDatum(std::move(maps), {1.0, 1.0});
}

}  // namespace

TEST_CASE("scaling condition is checked at construction") {
  Polynomial x = var(2, 0);
  std::vector<PolynomialMap> maps;
  maps.push_back(PolynomialMap(2, {RationalFn(x)}));
  CHECK_THROWS_AS(NonlinearDatum(std::move(maps), {1.0}), std::invalid_argument);
}

TEST_CASE("identity datum has unit weight") {
  Polynomial x = var(2, 0), y = var(2, 1);
  std::vector<PolynomialMap> maps;
  maps.push_back(PolynomialMap(2, {RationalFn(x)}));
  maps.push_back(PolynomialMap(2, {RationalFn(y)}));
  WeightField w{NonlinearDatum(std::move(maps), {1.0, 1.0})};
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    Vector p(2);
    p << rng.uniform(-5, 5), rng.uniform(-5, 5);
    CHECK(w(p) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("parabola weight is 2|y| and vanishes on the degenerate line") {
  WeightField w{parabola_datum()};
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    Vector p(2);
    p << rng.uniform(-2, 2), rng.uniform(-2, 2);
    CHECK(w(p) == doctest::Approx(2.0 * std::abs(p[1])).epsilon(1e-8));
  }
  for (double x : {-1.5, 0.0, 0.4}) {
    Vector p(2);
    p << x, 0.0;
    CHECK(w(p) == 0.0);
  }
}

TEST_CASE("determinant case at seeded points") {
  Rng rng(3);
  for (int t = 0; t < 60; ++t) {
    // Two random quadratic maps R^2 -> R, p = (1,1).
    Polynomial x = var(2, 0), y = var(2, 1);
    auto rnd = [&] { return rng.uniform(-1.5, 1.5); };
    Polynomial f = x * rnd() + y * rnd() + x * y * rnd() + x * x * rnd();
    Polynomial g = x * rnd() + y * rnd() + y * y * rnd();
    std::vector<PolynomialMap> maps;
    maps.push_back(PolynomialMap(2, {RationalFn(f)}));
    maps.push_back(PolynomialMap(2, {RationalFn(g)}));
    NonlinearDatum d(std::move(maps), {1.0, 1.0});
    WeightField w{d};
    Vector p(2);
    p << rng.uniform(-1, 1), rng.uniform(-1, 1);
    Matrix jac(2, 2);
    jac.row(0) = d.maps[0].jacobian_at(p);
    jac.row(1) = d.maps[1].jacobian_at(p);
    double det = std::abs(jac.determinant());
    if (det < 1e-3) continue;  // stays clear of the degeneracy convention
    CHECK(w(p) == doctest::Approx(det).epsilon(1e-8));
  }
}

TEST_CASE("weight of a rank-one triple matches the diagonal scan oracle") {
  // (x, y, x - y^2) with p = 2/3 at the point (0, 1).
  Polynomial x = var(2, 0), y = var(2, 1);
  std::vector<PolynomialMap> maps;
  maps.push_back(PolynomialMap(2, {RationalFn(x)}));
  maps.push_back(PolynomialMap(2, {RationalFn(y)}));
  maps.push_back(PolynomialMap(2, {RationalFn(x - y * y)}));
  NonlinearDatum d(std::move(maps), {2.0 / 3, 2.0 / 3, 2.0 / 3});
  Vector p(2);
  p << 0.0, 1.0;
  double scanned = oracle::diagonal_scan_bl(d.linearized_at(p));
  WeightField w{d};
  CHECK(w(p) == doctest::Approx(1.0 / scanned).epsilon(1e-4));
}

TEST_CASE("affine covariance of the weight") {
  NonlinearDatum d = parabola_datum();
  WeightField w{d};
  Rng rng(4);
  for (int t = 0; t < 15; ++t) {
    Matrix a(2, 2);
    for (;;) {
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) a(i, j) = rng.normal();
      if (std::abs(a.determinant()) > 0.3) break;
    }
    NonlinearDatum moved = d.composed_with_affine(a, Vector::Zero(2));
    WeightField wm{moved};
    Vector p(2);
    p << rng.uniform(-1, 1), rng.uniform(0.2, 1.5);
    double lhs = wm(p);
    double rhs = std::abs(a.determinant()) * w(a * p);
    if (rhs < 1e-6) continue;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
  }
}

TEST_CASE("weight continuity away from degeneracy") {
  WeightField w{parabola_datum()};
  // Search for a scale at which the weight ratio stays within [1/2, 2]
  // on pair samples from a box that avoids the degenerate line.
  Rng rng(5);
  double delta = 0.25;
  bool found = false;
  while (delta > 1e-6 && !found) {
    bool ok = true;
    for (int t = 0; t < 200 && ok; ++t) {
      Vector p(2);
      p << rng.uniform(-1, 1), rng.uniform(0.5, 2.0);
      Vector q = p;
      q[0] += rng.uniform(-delta, delta);
      q[1] += rng.uniform(-delta, delta);
      if (q[1] < 0.4) continue;
      double r = w(p) / w(q);
      if (r < 0.5 || r > 2.0) ok = false;
    }
    if (ok)
      found = true;
    else
      delta *= 0.5;
  }
  CHECK(found);
  CHECK(delta > 1e-6);
}
