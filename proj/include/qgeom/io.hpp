#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qgeom/envelope_sections.hpp"

namespace qgeom::io {

using Json = nlohmann::json;

/// Parses "re,im" (or a plain real number).
Complex parse_complex(const std::string& text, const std::string& what);

Json to_json(Complex z);
Json to_json(const Matrix& m);
Json to_json(const GaugePotential& phi);
Json to_json(const ComplexPath& path);
Json to_json(const QuantumDivisor& divisor);
Json to_json(const BoundaryReport& report);
Json cells_to_json(const std::vector<Cell>& cells);

/// Each parser names the offending field in its ValidationError, prefixed
/// with `where`.
Complex complex_from_json(const Json& j, const std::string& where);
Matrix matrix_from_json(const Json& j, const std::string& where);
GaugePotential connection_from_json(const Json& j);
ComplexPath path_from_json(const Json& j, const std::string& where = "path");
std::vector<Cell> cells_from_json(const Json& j);
QuantumTrajectory chain_from_json(const Json& j, const GaugePotential& phi,
                                  double exclusion_radius = 1e-6);
QuantumDivisor divisor_from_json(const Json& j);

Json read_json_file(const std::string& filename);
GaugePotential read_connection(const std::string& filename);
ComplexPath read_path(const std::string& filename);

/// An envelope set-up: the connection file (relative to the fixture's
/// directory), element, anchor pole, basepoint, route, z targets, and an
/// optional alternate route homotopic to the first.
struct EnvelopeFixture {
    EnvelopeSectionSpec spec;
    std::vector<Complex> alternate_route;
};
EnvelopeFixture read_envelope(const std::string& filename);

/// CSV row: re(z), im(z), then row-major re/im pairs of m, 17 significant digits.
std::string csv_header(int rows, int cols);
std::string csv_row(Complex z, const Matrix& m);

}  // namespace qgeom::io
