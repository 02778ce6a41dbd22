#include "bl/json_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace bl::io {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

void require(bool ok, const std::string& what) {
  if (!ok) fail(what);
}

}  // namespace

json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line/column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream msg;
    msg << path << ":" << line << ":" << col << ": " << e.what();
    fail(msg.str());
  }
}

Matrix matrix_from_json(const json& j) {
  require(j.is_array() && !j.empty(), "matrix: expected a non-empty array of rows");
  const std::size_t rows = j.size();
  require(j[0].is_array() && !j[0].empty(), "matrix: rows must be arrays");
  const std::size_t cols = j[0].size();
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    require(j[r].is_array() && j[r].size() == cols, "matrix: ragged rows");
    for (std::size_t c = 0; c < cols; ++c) {
      require(j[r][c].is_number(), "matrix: entries must be numbers");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Vector vector_from_json(const json& j) {
  require(j.is_array(), "vector: expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    require(j[i].is_number(), "vector: entries must be numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

BLDatum datum_from_json(const json& j) {
  require(j.contains("n") && j.contains("maps") && j.contains("exponents"),
          "datum: needs n, maps, exponents");
  int n = j["n"].get<int>();
  std::vector<Matrix> maps;
  for (const auto& mj : j["maps"]) maps.push_back(matrix_from_json(mj));
  std::vector<double> ps;
  for (const auto& pj : j["exponents"]) ps.push_back(pj.get<double>());
  return BLDatum(n, std::move(maps), std::move(ps));
}

json datum_to_json(const BLDatum& d) {
  json maps = json::array();
  for (const auto& m : d.maps) maps.push_back(matrix_to_json(m));
  return json{{"n", d.ambient_dim}, {"maps", std::move(maps)}, {"exponents", d.exponents}};
}

Polynomial polynomial_from_json(const json& j) {
  require(j.contains("vars") && j.contains("terms"), "polynomial: needs vars and terms");
  Polynomial p(j["vars"].get<int>());
  for (const auto& t : j["terms"]) {
    require(t.contains("exp") && t.contains("c"), "polynomial: term needs exp and c");
    std::vector<int> e;
    for (const auto& x : t["exp"]) e.push_back(x.get<int>());
    p.add_term(e, t["c"].get<double>());
  }
  return p;
}

json polynomial_to_json(const Polynomial& p) {
  json terms = json::array();
  for (const auto& [e, c] : p.terms()) terms.push_back(json{{"exp", e}, {"c", c}});
  return json{{"vars", p.num_vars()}, {"terms", std::move(terms)}};
}

RationalFn rational_from_json(const json& j, int vars) {
  if (j.contains("num")) {
    Polynomial num = polynomial_from_json(j["num"]);
    require(num.num_vars() == vars, "rational: arity mismatch");
    if (j.contains("den")) {
      Polynomial den = polynomial_from_json(j["den"]);
      require(den.num_vars() == vars, "rational: arity mismatch");
      return RationalFn(std::move(num), std::move(den));
    }
    return RationalFn(std::move(num));
  }
  Polynomial p = polynomial_from_json(j);
  require(p.num_vars() == vars, "component: arity mismatch");
  return RationalFn(std::move(p));
}

PolynomialMap polymap_from_json(const json& j) {
  require(j.contains("domain_dim") && j.contains("components"),
          "map: needs domain_dim and components");
  int n = j["domain_dim"].get<int>();
  std::vector<RationalFn> comps;
  for (const auto& c : j["components"]) comps.push_back(rational_from_json(c, n));
  return PolynomialMap(n, std::move(comps));
}

json polymap_to_json(const PolynomialMap& m) {
  json comps = json::array();
  for (const auto& c : m.components()) {
    if (c.is_polynomial())
      comps.push_back(polynomial_to_json(c.num));
    else
      comps.push_back(json{{"num", polynomial_to_json(c.num)}, {"den", polynomial_to_json(*c.den)}});
  }
  return json{{"domain_dim", m.domain_dim()}, {"components", std::move(comps)}};
}

NonlinearDatum nonlinear_from_json(const json& j) {
  require(j.contains("maps") && j.contains("exponents"), "nonlinear datum: needs maps, exponents");
  std::vector<PolynomialMap> maps;
  for (const auto& mj : j["maps"]) maps.push_back(polymap_from_json(mj));
  std::vector<double> ps;
  for (const auto& pj : j["exponents"]) ps.push_back(pj.get<double>());
  std::vector<int> degrees;
  if (j.contains("degrees"))
    for (const auto& dj : j["degrees"]) degrees.push_back(dj.get<int>());
  return NonlinearDatum(std::move(maps), std::move(ps), std::move(degrees));
}

json nonlinear_to_json(const NonlinearDatum& d) {
  json maps = json::array();
  for (const auto& m : d.maps) maps.push_back(polymap_to_json(m));
  return json{{"maps", std::move(maps)}, {"exponents", d.exponents}, {"degrees", d.degrees}};
}

Box box_from_json(const json& j) {
  require(j.contains("lo") && j.contains("hi"), "box: needs lo and hi");
  return Box(vector_from_json(j["lo"]), vector_from_json(j["hi"]));
}

json box_to_json(const Box& b) {
  return json{{"lo", vector_to_json(b.lo)}, {"hi", vector_to_json(b.hi)}};
}

TestFunction testfn_from_json(const json& j) {
  require(j.contains("kind"), "test function: needs kind");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "ball-indicator-sum") {
    std::vector<TestFunction::Ball> balls;
    int dim = j["dim"].get<int>();
    for (const auto& b : j["balls"])
      balls.push_back({vector_from_json(b["center"]), b["radius"].get<double>(),
                       b.value("coeff", 1.0)});
    return TestFunction::balls(std::move(balls), dim);
  }
  if (kind == "gaussian-mixture") {
    std::vector<TestFunction::Gaussian> gs;
    int dim = j["dim"].get<int>();
    for (const auto& g : j["gaussians"])
      gs.push_back({vector_from_json(g["mean"]), g["sigma"].get<double>(), g.value("coeff", 1.0)});
    return TestFunction::gaussians(std::move(gs), dim);
  }
  if (kind == "grid-sampled") {
    std::vector<int> shape;
    for (const auto& s : j["shape"]) shape.push_back(s.get<int>());
    std::vector<double> values;
    for (const auto& v : j["values"]) values.push_back(v.get<double>());
    return TestFunction::grid(box_from_json(j["box"]), std::move(shape), std::move(values));
  }
  fail("test function: unknown kind '" + kind + "'");
}

BallCollection collection_from_json(const json& j) {
  require(j.contains("dim") && j.contains("radius") && j.contains("centers"),
          "collection: needs dim, radius, centers");
  std::vector<Vector> centers;
  for (const auto& c : j["centers"]) centers.push_back(vector_from_json(c));
  std::vector<int> mult;
  if (j.contains("multiplicities"))
    for (const auto& m : j["multiplicities"]) mult.push_back(m.get<int>());
  return BallCollection::make(j["dim"].get<int>(), j["radius"].get<double>(), std::move(centers),
                              std::move(mult));
}

IntegrationSpec integration_spec_from_json(const json& j, int dim) {
  IntegrationSpec spec;
  if (j.contains("box"))
    spec.box = box_from_json(j["box"]);
  else
    spec.box = Box::cube(dim, 2.0);
  const std::string method = j.value("method", "tensor-quadrature");
  if (method == "monte-carlo")
    spec.method = IntegrationSpec::Method::monte_carlo;
  else if (method == "tensor-quadrature")
    spec.method = IntegrationSpec::Method::tensor_quadrature;
  else
    fail("spec: unknown method '" + method + "'");
  spec.order = j.value("order", 64);
  spec.samples = j.value("samples", static_cast<std::int64_t>(100000));
  spec.seed = j.value("seed", static_cast<std::uint64_t>(0));
  return spec;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace bl::io
