#pragma once

#include <json.hpp>
#include <string>

#include "bl/discrete.hpp"
#include "bl/group.hpp"

namespace bl::io {

using nlohmann::json;

/// Parse with line/column diagnostics folded into the exception message.
json parse_json_file(const std::string& path);

Matrix matrix_from_json(const json& j);          // array of row arrays
json matrix_to_json(const Matrix& m);
Vector vector_from_json(const json& j);
json vector_to_json(const Vector& v);

BLDatum datum_from_json(const json& j);          // {"n":, "maps":, "exponents":}
json datum_to_json(const BLDatum& d);

Polynomial polynomial_from_json(const json& j);  // {"vars":, "terms":[{"exp":,"c":}]}
json polynomial_to_json(const Polynomial& p);

RationalFn rational_from_json(const json& j, int vars);
PolynomialMap polymap_from_json(const json& j);  // {"domain_dim":, "components":}
json polymap_to_json(const PolynomialMap& m);

NonlinearDatum nonlinear_from_json(const json& j);
json nonlinear_to_json(const NonlinearDatum& d);

Box box_from_json(const json& j);  // {"lo": [...], "hi": [...]}
json box_to_json(const Box& b);

TestFunction testfn_from_json(const json& j);
BallCollection collection_from_json(const json& j);

IntegrationSpec integration_spec_from_json(const json& j, int dim);

/// Shortest-round-trip decimal text for a double; used everywhere a number
/// lands in a report so reruns are byte-identical.
std::string format_number(double v);

}  // namespace bl::io
