#include "qgeom/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace qgeom::io {

Complex parse_complex(const std::string& text, const std::string& what) {
    std::istringstream in(text);
    double re = 0.0, im = 0.0;
    char comma = 0;
    if (!(in >> re)) throw ValidationError(what + ": expected \"re,im\", got \"" + text + "\"");
    if (in >> comma) {
        if (comma != ',' || !(in >> im))
            throw ValidationError(what + ": expected \"re,im\", got \"" + text + "\"");
    }
    std::string rest;
    if (in >> rest) throw ValidationError(what + ": trailing characters in \"" + text + "\"");
    return {re, im};
}

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json to_json(const GaugePotential& phi) {
    Json poles = Json::array();
    for (const auto& pole : phi.poles()) {
        Json laurent = Json::array();
        for (const auto& a : pole.laurent) laurent.push_back(to_json(a));
        poles.push_back({{"position", to_json(pole.position)}, {"laurent", std::move(laurent)}});
    }
    Json tail = Json::array();
    for (const auto& b : phi.poly_tail()) tail.push_back(to_json(b));
    return {{"algebra", {{"family", std::string(to_string(phi.algebra().family))}, {"n", phi.dimension()}}},
            {"poles", std::move(poles)},
            {"poly_tail", std::move(tail)}};
}

Json to_json(const ComplexPath& path) {
    Json segments = Json::array();
    for (const auto& segment : path.segments()) {
        if (const auto* poly = std::get_if<Polyline>(&segment)) {
            Json points = Json::array();
            for (const Complex& z : poly->points) points.push_back(to_json(z));
            segments.push_back({{"type", "polyline"}, {"points", std::move(points)}});
        } else {
            const Arc& arc = std::get<Arc>(segment);
            segments.push_back({{"type", "arc"},
                                {"center", to_json(arc.center)},
                                {"radius", arc.radius},
                                {"from_angle", arc.from_angle},
                                {"to_angle", arc.to_angle}});
        }
    }
    return {{"segments", std::move(segments)}};
}

Json to_json(const QuantumDivisor& divisor) {
    Json terms = Json::array();
    for (const auto& term : divisor.terms())
        terms.push_back({{"point", to_json(term.point)}, {"coefficient", to_json(term.coefficient)}});
    return {{"terms", std::move(terms)}};
}

Json to_json(const BoundaryReport& report) {
    Json out = to_json(report.divisor);
    Json dropped = Json::array();
    for (const auto& d : report.dropped)
        dropped.push_back({{"point", to_json(d.point)}, {"reason", d.reason}});
    out["dropped"] = std::move(dropped);
    return out;
}

Json cells_to_json(const std::vector<Cell>& cells) {
    Json out = Json::array();
    for (const Cell& cell : cells)
        out.push_back({{"weight", to_json(cell.weight)},
                       {"path", to_json(cell.path)},
                       {"germ", {{"anchor", to_json(cell.germ.anchor)}, {"value", to_json(cell.germ.value)}}}});
    return {{"cells", std::move(out)}};
}

namespace {

const Json& field(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object()) throw ValidationError(where + ": expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw ValidationError(where + "." + key + ": missing");
    return *it;
}

double number(const Json& j, const std::string& where) {
    if (!j.is_number()) throw ValidationError(where + ": expected a number");
    return j.get<double>();
}

}  // namespace

Complex complex_from_json(const Json& j, const std::string& where) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ValidationError(where + ": expected [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

Matrix matrix_from_json(const Json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw ValidationError(where + ": expected a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (!j[0].is_array() || j[0].empty())
        throw ValidationError(where + "[0]: expected a non-empty row");
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const std::string row_where = where + "[" + std::to_string(i) + "]";
        const Json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw ValidationError(row_where + ": expected a row of " + std::to_string(cols) + " entries");
        for (Eigen::Index k = 0; k < cols; ++k)
            m(i, k) = complex_from_json(row[static_cast<std::size_t>(k)],
                                        row_where + "[" + std::to_string(k) + "]");
    }
    return m;
}

GaugePotential connection_from_json(const Json& j) {
    const Json& algebra = field(j, "algebra", "connection");
    const Json& family = field(algebra, "family", "algebra");
    if (!family.is_string()) throw ValidationError("algebra.family: expected a string");
    const Json& n = field(algebra, "n", "algebra");
    if (!n.is_number_integer()) throw ValidationError("algebra.n: expected an integer");
    const AlgebraSpec spec(family_from_string(family.get<std::string>()), n.get<int>());

    std::vector<Pole> poles;
    if (j.contains("poles")) {
        const Json& list = j["poles"];
        if (!list.is_array()) throw ValidationError("poles: expected an array");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string where = "poles[" + std::to_string(i) + "]";
            Pole pole;
            pole.position = complex_from_json(field(list[i], "position", where), where + ".position");
            const Json& laurent = field(list[i], "laurent", where);
            if (!laurent.is_array()) throw ValidationError(where + ".laurent: expected an array");
            for (std::size_t k = 0; k < laurent.size(); ++k)
                pole.laurent.push_back(
                    matrix_from_json(laurent[k], where + ".laurent[" + std::to_string(k) + "]"));
            poles.push_back(std::move(pole));
        }
    }
    std::vector<Matrix> tail;
    if (j.contains("poly_tail")) {
        const Json& list = j["poly_tail"];
        if (!list.is_array()) throw ValidationError("poly_tail: expected an array");
        for (std::size_t k = 0; k < list.size(); ++k)
            tail.push_back(matrix_from_json(list[k], "poly_tail[" + std::to_string(k) + "]"));
    }
    return GaugePotential(spec, std::move(poles), std::move(tail));
}

ComplexPath path_from_json(const Json& j, const std::string& where) {
    const Json& segments = field(j, "segments", where);
    if (!segments.is_array() || segments.empty())
        throw ValidationError(where + ".segments: expected a non-empty array");
    std::vector<Segment> out;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        const std::string sw = where + ".segments[" + std::to_string(s) + "]";
        const Json& type = field(segments[s], "type", sw);
        if (type == "polyline") {
            const Json& points = field(segments[s], "points", sw);
            if (!points.is_array()) throw ValidationError(sw + ".points: expected an array");
            Polyline poly;
            for (std::size_t k = 0; k < points.size(); ++k)
                poly.points.push_back(complex_from_json(points[k], sw + ".points[" + std::to_string(k) + "]"));
            out.emplace_back(std::move(poly));
        } else if (type == "arc") {
            Arc arc;
            arc.center = complex_from_json(field(segments[s], "center", sw), sw + ".center");
            arc.radius = number(field(segments[s], "radius", sw), sw + ".radius");
            arc.from_angle = number(field(segments[s], "from_angle", sw), sw + ".from_angle");
            arc.to_angle = number(field(segments[s], "to_angle", sw), sw + ".to_angle");
            out.emplace_back(arc);
        } else {
            throw ValidationError(sw + ".type: expected \"polyline\" or \"arc\"");
        }
    }
    try {
        return ComplexPath(std::move(out));
    } catch (const ValidationError& e) {
        throw ValidationError(where + ": " + e.what());
    }
}

std::vector<Cell> cells_from_json(const Json& j) {
    const Json& list = field(j, "cells", "chain");
    if (!list.is_array()) throw ValidationError("cells: expected an array");
    std::vector<Cell> cells;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string where = "cells[" + std::to_string(i) + "]";
        Cell cell{1.0, path_from_json(field(list[i], "path", where), where + ".path"), {}};
        if (list[i].contains("weight")) cell.weight = complex_from_json(list[i]["weight"], where + ".weight");
        const Json& germ = field(list[i], "germ", where);
        cell.germ.anchor = complex_from_json(field(germ, "anchor", where + ".germ"), where + ".germ.anchor");
        cell.germ.value = matrix_from_json(field(germ, "value", where + ".germ"), where + ".germ.value");
        cell.germ.kind = GermKind::adjoint;
        cells.push_back(std::move(cell));
    }
    return cells;
}

QuantumTrajectory chain_from_json(const Json& j, const GaugePotential& phi, double exclusion_radius) {
    return QuantumTrajectory(phi, cells_from_json(j), exclusion_radius);
}

QuantumDivisor divisor_from_json(const Json& j) {
    const Json& terms = field(j, "terms", "divisor");
    if (!terms.is_array()) throw ValidationError("terms: expected an array");
    QuantumDivisor divisor;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const std::string where = "terms[" + std::to_string(i) + "]";
        divisor.add(complex_from_json(field(terms[i], "point", where), where + ".point"),
                    matrix_from_json(field(terms[i], "coefficient", where), where + ".coefficient"));
    }
    return divisor;
}

Json read_json_file(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw ValidationError(filename + ": cannot open file");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError(filename + ": JSON parse error: " + e.what());
    }
}

GaugePotential read_connection(const std::string& filename) {
    try {
        return connection_from_json(read_json_file(filename));
    } catch (const ValidationError& e) {
        const std::string what = e.what();
        if (what.rfind(filename, 0) == 0) throw;
        throw ValidationError(filename + ": " + what);
    }
}

ComplexPath read_path(const std::string& filename) {
    try {
        return path_from_json(read_json_file(filename));
    } catch (const ValidationError& e) {
        const std::string what = e.what();
        if (what.rfind(filename, 0) == 0) throw;
        throw ValidationError(filename + ": " + what);
    }
}

namespace {

std::vector<Complex> points_from_json(const Json& j, const std::string& where) {
    if (!j.is_array()) throw ValidationError(where + ": expected an array of [re, im]");
    std::vector<Complex> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(complex_from_json(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

}  // namespace

EnvelopeFixture read_envelope(const std::string& filename) {
    const Json j = read_json_file(filename);
    try {
        const Json& conn = field(j, "connection", "envelope");
        if (!conn.is_string()) throw ValidationError("envelope.connection: expected a file name");
        const std::filesystem::path base = std::filesystem::path(filename).parent_path();
        GaugePotential phi = read_connection((base / conn.get<std::string>()).string());
        const AlgebraSpec algebra = phi.algebra();
        Matrix e = matrix_from_json(field(j, "element", "envelope"), "element");
        if (!algebra.contains(e)) throw ValidationError("element: not in the connection's algebra");
        EnvelopeFixture out{
            EnvelopeSectionSpec{std::move(phi), AdjointElement(std::move(e), algebra),
                                complex_from_json(field(j, "anchor_pole", "envelope"), "anchor_pole"),
                                {}, {},
                                complex_from_json(field(j, "basepoint", "envelope"), "basepoint")},
            {}};
        if (j.contains("route")) out.spec.route = points_from_json(j["route"], "route");
        if (j.contains("z_targets")) out.spec.z_targets = points_from_json(j["z_targets"], "z_targets");
        if (j.contains("alternate_route"))
            out.alternate_route = points_from_json(j["alternate_route"], "alternate_route");
        return out;
    } catch (const ValidationError& e) {
        const std::string what = e.what();
        if (what.rfind(filename, 0) == 0) throw;
        throw ValidationError(filename + ": " + what);
    }
}

std::string csv_header(int rows, int cols) {
    std::string out = "re_z,im_z";
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const std::string idx = std::to_string(i) + std::to_string(j);
            out += ",re_m" + idx + ",im_m" + idx;
        }
    return out;
}

std::string csv_row(Complex z, const Matrix& m) {
    char buf[64];
    std::string out;
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        if (!out.empty()) out += ',';
        out += buf;
    };
    put(z.real());
    put(z.imag());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            put(m(i, j).real());
            put(m(i, j).imag());
        }
    return out;
}

}  // namespace qgeom::io
