#include "qgeom/quantum_homology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qgeom {

void QuantumDivisor::add(Complex point, const Matrix& coefficient) {
    for (auto it = terms_.begin(); it != terms_.end(); ++it) {
        if (std::abs(it->point - point) > merge_radius_) continue;
        if (it->coefficient.rows() != coefficient.rows() || it->coefficient.cols() != coefficient.cols())
            throw ValidationError("divisor: coefficient sizes differ");
        it->coefficient += coefficient;
        if (it->coefficient.isZero(0.0)) terms_.erase(it);
        return;
    }
    if (!coefficient.isZero(0.0)) terms_.push_back({point, coefficient});
}

void QuantumDivisor::add(const QuantumDivisor& other, Complex weight) {
    for (const auto& term : other.terms_) add(term.point, weight * term.coefficient);
}

double QuantumDivisor::total_norm() const {
    double total = 0.0;
    for (const auto& term : terms_) total += term.coefficient.norm();
    return total;
}

Matrix QuantumDivisor::coefficient_at(Complex point, int n) const {
    for (const auto& term : terms_)
        if (std::abs(term.point - point) <= merge_radius_) return term.coefficient;
    return Matrix::Zero(n, n);
}

double QuantumDivisor::distance(const QuantumDivisor& other) const {
    QuantumDivisor diff(merge_radius_);
    diff.add(*this);
    diff.add(other, -1.0);
    double worst = 0.0;
    for (const auto& term : diff.terms_) worst = std::max(worst, term.coefficient.norm());
    return worst;
}

namespace {

bool near_point(Complex a, Complex b) { return std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)); }

// Paths may end inside an exclusion disk but must not cross one.
void check_cell_path(const ComplexPath& path, const PunctureSet& punctures, const std::string& where) {
    const double eps = punctures.exclusion_radius();
    for (const Complex& q : punctures.points()) {
        if (distance_to_path(path, q) > eps) continue;
        const bool at_start = std::abs(path.start() - q) <= eps;
        const bool at_end = std::abs(path.end() - q) <= eps;
        if (!at_start && !at_end)
            throw ValidationError(where + ": path crosses the exclusion disk of a puncture");
        const double t0 = at_start ? exit_parameter(path, q, 2.0 * eps) : 0.0;
        const double t1 = at_end ? exit_parameter(path, q, 2.0 * eps, true) : 1.0;
        if (!(t1 > t0) || distance_to_path(path.subpath(t0, t1), q) <= eps)
            throw ValidationError(where + ": path returns into the exclusion disk of a puncture");
    }
}

}  // namespace

QuantumTrajectory::QuantumTrajectory(GaugePotential phi, std::vector<Cell> cells,
                                     double exclusion_radius)
    : phi_(std::move(phi)), punctures_(phi_.punctures(exclusion_radius)), cells_(std::move(cells)) {
    const int n = phi_.dimension();
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        const std::string where = "cells[" + std::to_string(i) + "]";
        const Cell& cell = cells_[i];
        if (cell.germ.kind != GermKind::adjoint)
            throw ValidationError(where + ".germ: must be an adjoint germ");
        if (cell.germ.value.rows() != n || cell.germ.value.cols() != n)
            throw ValidationError(where + ".germ.value: expected a " + std::to_string(n) + "x" +
                                  std::to_string(n) + " matrix");
        if (!cell.germ.value.allFinite()) throw ValidationError(where + ".germ.value: non-finite");
        if (!near_point(cell.germ.anchor, cell.path.start()) &&
            !near_point(cell.germ.anchor, cell.path.end()))
            throw ValidationError(where + ".germ.anchor: must be an endpoint of the path");
        if (punctures_.excludes(cell.germ.anchor))
            throw ValidationError(where + ".germ.anchor: inside the exclusion disk of a puncture");
        check_cell_path(cell.path, punctures_, where);
    }
}

QuantumTrajectory QuantumTrajectory::operator+(const QuantumTrajectory& other) const {
    std::vector<Cell> cells = cells_;
    cells.insert(cells.end(), other.cells_.begin(), other.cells_.end());
    return QuantumTrajectory(phi_, std::move(cells), punctures_.exclusion_radius());
}

QuantumTrajectory QuantumTrajectory::scaled(Complex factor) const {
    std::vector<Cell> cells = cells_;
    for (auto& cell : cells) cell.weight *= factor;
    return QuantumTrajectory(phi_, std::move(cells), punctures_.exclusion_radius());
}

QuantumTrajectory QuantumTrajectory::reversed() const {
    std::vector<Cell> cells = cells_;
    for (auto& cell : cells) cell.path = cell.path.reversed();
    return QuantumTrajectory(phi_, std::move(cells), punctures_.exclusion_radius());
}

namespace {

TransportedSection make_cell_section(const QuantumTrajectory& gamma, const Cell& cell, double tol,
                                     bool reversed) {
    TransportOptions options;
    options.tol = tol;
    options.exclusion_radius = gamma.punctures().exclusion_radius();
    const PotentialField field = PotentialField::of(gamma.phi(), options.exclusion_radius);
    return TransportedSection(field, reversed ? cell.path.reversed() : cell.path, cell.germ.value,
                              GermKind::adjoint, options);
}

}  // namespace

CellSection::CellSection(const QuantumTrajectory& gamma, const Cell& cell, double tol)
    : section_(make_cell_section(gamma, cell, tol, !near_point(cell.germ.anchor, cell.path.start()))),
      reversed_(!near_point(cell.germ.anchor, cell.path.start())) {}

std::vector<double> CellSection::mesh() const {
    std::vector<double> m = section_.mesh();
    if (reversed_) {
        for (double& t : m) t = 1.0 - t;
        std::reverse(m.begin(), m.end());
    }
    return m;
}

std::pair<Cell, Cell> subdivide(const QuantumTrajectory& gamma, const Cell& cell, double t,
                                double tol) {
    if (!(t > 0.0 && t < 1.0)) throw ValidationError("subdivide: parameter must lie in (0, 1)");
    const CellSection section(gamma, cell, tol);
    auto [first, second] = cell.path.split(t);
    const Complex mid = second.start();
    Cell a{cell.weight, first, {}};
    Cell b{cell.weight, second, {}};
    const bool at_start = near_point(cell.germ.anchor, cell.path.start());
    a.germ = at_start ? cell.germ : FlatSectionGerm{mid, section.value(t), GermKind::adjoint};
    b.germ = at_start ? FlatSectionGerm{mid, section.value(t), GermKind::adjoint} : cell.germ;
    return {a, b};
}

BoundaryReport boundary_1(const QuantumTrajectory& gamma, double tol) {
    BoundaryReport report;
    const PunctureSet& punctures = gamma.punctures();
    const TransportOptions options{tol, punctures.exclusion_radius(), TransportOptions{}.max_steps};
    const PotentialField field = PotentialField::of(gamma.phi(), punctures.exclusion_radius());

    auto dropped = [&](Complex point) {
        for (std::size_t i = 0; i < punctures.points().size(); ++i) {
            const Complex q = punctures.points()[i];
            if (std::abs(point - q) <= punctures.exclusion_radius()) {
                report.dropped.push_back(
                    {point, "within the exclusion radius of puncture " + std::to_string(i)});
                return true;
            }
        }
        return false;
    };

    for (const Cell& cell : gamma.cells()) {
        const bool anchored_at_start = near_point(cell.germ.anchor, cell.path.start());
        const Complex start = cell.path.start(), end = cell.path.end();
        const Complex far_point = anchored_at_start ? end : start;
        const Complex near = anchored_at_start ? start : end;
        const double sign_near = anchored_at_start ? -1.0 : 1.0;

        report.divisor.add(near, (sign_near * cell.weight) * cell.germ.value);
        if (dropped(far_point)) continue;
        const ComplexPath route = anchored_at_start ? cell.path : cell.path.reversed();
        const Matrix far_value =
            TransportedSection(field, route, cell.germ.value, GermKind::adjoint, options).end_value();
        report.divisor.add(far_point, (-sign_near * cell.weight) * far_value);
    }
    return report;
}

CycleCheck is_cycle(const QuantumTrajectory& gamma, double tol, double transport_tol) {
    const double residual = boundary_1(gamma, transport_tol).divisor.total_norm();
    return {residual <= tol, residual};
}

TrivialCycle trivial_cycle_around(const GaugePotential& phi, Complex p, double radius,
                                  const AdjointElement& e, double tol) {
    const TransportOptions defaults;
    const ComplexPath loop = loop_around(p, radius, 0.0, phi.punctures(defaults.exclusion_radius));
    const Matrix m = monodromy(phi, loop, tol).matrix();
    QuantumTrajectory trajectory(phi, {Cell{1.0, loop, FlatSectionGerm::adjoint(loop.start(), e)}},
                                 defaults.exclusion_radius);
    return {std::move(trajectory), (m * e.matrix() - e.matrix() * m).norm()};
}

PoleLocalSection::PoleLocalSection(const GaugePotential& phi, Complex p, ComplexPath route,
                                   Matrix germ_value, double tol)
    : phi_(phi), p_(p), route_(std::move(route)), germ_(std::move(germ_value)) {
    if (phi_.find_pole(p) < 0)
        throw ValidationError("pole-anchored section: the potential has no pole at the anchor");
    if (!near_point(route_.start(), p))
        throw ValidationError("pole-anchored section: route must start at the pole");
    options_.tol = tol;
    if (phi_.punctures(options_.exclusion_radius).excludes(route_.end()))
        throw ValidationError("pole-anchored section: route end lies in an exclusion disk");
}

double PoleLocalSection::crossing_parameter(double r) const {
    const double t = exit_parameter(route_, p_, r);
    if (t >= 1.0 && std::abs(route_.end() - p_) < r)
        throw ValidationError("pole-anchored section: route never leaves the disk of radius " +
                              std::to_string(r));
    return t;
}

TransportedSection PoleLocalSection::route_section(double t0) const {
    const ComplexPath back = route_.subpath(t0, 1.0).reversed();
    return TransportedSection(PotentialField::of(phi_, options_.exclusion_radius), back, germ_,
                              GermKind::adjoint, options_);
}

TransportedSection PoleLocalSection::circle(double r) const {
    const double tc = crossing_parameter(r);
    const Matrix start_value = route_section(tc).end_value();
    const Complex crossing = route_.eval(tc).point;
    const ComplexPath loop = loop_around(p_, r, std::arg(crossing - p_));
    return TransportedSection(PotentialField::of(phi_, options_.exclusion_radius), loop, start_value,
                              GermKind::adjoint, options_);
}

std::vector<Matrix> PoleLocalSection::circle_values(double r, int n) const {
    const TransportedSection section = circle(r);
    const double theta0 = std::arg(section.path().start() - p_);
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        double u = (2.0 * kPi * j / n - theta0) / (2.0 * kPi);
        u -= std::floor(u);
        out.push_back(section.value(u));
    }
    return out;
}

double PoleLocalSection::circle_max(double r) const {
    double best = 0.0;
    for (const auto& m : circle_values(r, 64)) best = std::max(best, m.norm());
    return best;
}

double PoleLocalSection::circle_defect(double r) const {
    const TransportedSection section = circle(r);
    const Matrix start = section.value(0.0);
    return (section.end_value() - start).norm() / std::max(start.norm(), 1e-300);
}

double default_gate_radius(const GaugePotential& phi, Complex p, const ComplexPath& route) {
    double reach = std::abs(route.end() - p);
    for (const Complex& q : phi.pole_positions())
        if (std::abs(q - p) > 1e-10) reach = std::min(reach, std::abs(q - p));
    reach = std::min(reach, route.pieces().front().length());
    return 0.02 * reach;
}

PoleGate pole_growth_gate(const GaugePotential& phi, const PoleLocalSection& local, double r) {
    const int index = phi.find_pole(local.pole());
    if (index < 0) throw ValidationError("pole gate: the potential has no pole at the anchor");
    PoleGate gate;
    gate.radii = {r, 0.5 * r, 0.25 * r};
    for (double radius : gate.radii) {
        gate.norms.push_back(local.circle_max(radius));
        gate.monodromy_defect = std::max(gate.monodromy_defect, local.circle_defect(radius));
    }
    if (gate.monodromy_defect > 1e-6)
        throw NumericalError("pole gate: the section is not single-valued around the anchor pole "
                             "(defect " + std::to_string(gate.monodromy_defect) + ")");

    const bool vanishing = std::all_of(gate.norms.begin(), gate.norms.end(),
                                       [](double v) { return v <= 1e-300; });
    if (vanishing) {
        gate.slope = 0.0;
    } else {
        if (std::any_of(gate.norms.begin(), gate.norms.end(), [](double v) { return v <= 1e-300; }))
            throw NumericalError("pole gate: section vanishes on some circles only");
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            mx += std::log(gate.radii[i]) / 3.0;
            my += std::log(gate.norms[i]) / 3.0;
        }
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            const double dx = std::log(gate.radii[i]) - mx;
            sxy += dx * (std::log(gate.norms[i]) - my);
            sxx += dx * dx;
        }
        gate.slope = sxy / sxx;
    }
    gate.exponent = static_cast<int>(std::lround(gate.slope));
    if (std::abs(gate.slope - gate.exponent) > 0.1 || gate.exponent < -phi.dimension())
        throw NumericalError("pole gate: growth exponent " + std::to_string(gate.slope) +
                             " is not a bounded integer; no finite-order pole at the anchor");
    const int order = phi.poles()[static_cast<std::size_t>(index)].order();
    gate.integrand_order = std::max(0, order - gate.exponent - 1);
    return gate;
}

LocalizedTrajectory localized_boundary_trajectory(const GaugePotential& phi, Complex p, Complex z,
                                                  const AdjointElement& e,
                                                  const std::vector<Complex>& route, double tol) {
    if (phi.find_pole(p) < 0)
        throw ValidationError("localized trajectory: the potential has no pole at the anchor");
    if (e.dimension() != phi.dimension())
        throw ValidationError("localized trajectory: E has the wrong size");
    const TransportOptions defaults;
    if (phi.punctures(defaults.exclusion_radius).excludes(z))
        throw ValidationError("localized trajectory: z lies in an exclusion disk");
    std::vector<Complex> points{p};
    points.insert(points.end(), route.begin(), route.end());
    points.push_back(z);
    const ComplexPath path = ComplexPath::polyline(points);
    QuantumTrajectory trajectory(
        phi, {Cell{1.0, path, FlatSectionGerm::adjoint(z, e)}}, defaults.exclusion_radius);
    const PoleLocalSection local(phi, p, path, e.matrix(), tol);
    PoleGate gate = pole_growth_gate(phi, local, default_gate_radius(phi, p, path));
    return {std::move(trajectory), std::move(gate)};
}

}  // namespace qgeom
