#include "qgeom/envelope_sections.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qgeom/quadrature.hpp"

namespace qgeom {

namespace {

Matrix bracket(const Matrix& a, const Matrix& b) { return a * b - b * a; }

double other_pole_distance(const GaugePotential& phi, Complex p) {
    double r = std::numeric_limits<double>::infinity();
    for (const Complex& q : phi.pole_positions())
        if (std::abs(q - p) > 1e-10) r = std::min(r, std::abs(q - p));
    return r;
}

int pole_near(const PunctureSet& punctures, Complex z) {
    for (std::size_t i = 0; i < punctures.points().size(); ++i)
        if (std::abs(punctures.points()[i] - z) <= punctures.exclusion_radius())
            return static_cast<int>(i);
    return -1;
}

Matrix regular_cell_integral(const QuantumTrajectory& gamma, const Cell& cell, double tol) {
    const CellSection section(gamma, cell, tol);
    std::vector<double> breaks = section.mesh();
    for (double b : cell.path.breakpoints()) breaks.push_back(b);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(),
                             [](double a, double b) { return b - a < 1e-15; }),
                 breaks.end());
    const GaugePotential& phi = gamma.phi();
    auto integrand = [&](double t) -> Matrix {
        const PathPoint pt = cell.path.eval(t);
        return bracket(phi(pt.point), section.value(t)) * pt.velocity;
    };
    return quadrature::integrate<Matrix>(integrand, breaks, 1e-3 * tol, 1e-2 * tol, 50000).value;
}

}  // namespace

PoleCellIntegral::PoleCellIntegral(const GaugePotential& phi, Complex p, const ComplexPath& path,
                                   const Matrix& germ_value, double tol) {
    local_ = std::make_shared<const PoleLocalSection>(phi, p, path, germ_value, tol);
    gate_ = pole_growth_gate(phi, *local_, default_gate_radius(phi, p, path));
    const int d = gate_.integrand_order;

    const double analytic_radius = other_pole_distance(phi, p);
    const double taylor_radius = 0.5 * std::min(analytic_radius, std::abs(path.end() - p));
    const double t_a = exit_parameter(path, p, 0.125 * taylor_radius);
    route_section_ = std::make_shared<const TransportedSection>(local_->route_section(t_a));

    auto integrand_value = [phi, p, d](Complex zeta, const Matrix& m) -> Matrix {
        return bracket(phi(zeta), m) * std::pow(zeta - p, d + 1);
    };

    RegIntegralSpec spec{AnalyticFunction{}, p, path.end(), d, path, {}, {}, 0.1 * tol};
    spec.f.radius = analytic_radius;
    spec.f.accuracy = 10.0 * tol;
    spec.f.circle_samples = [local = local_, integrand_value, p](double r, int n) {
        std::vector<Matrix> values = local->circle_values(r, n);
        for (int j = 0; j < n; ++j)
            values[static_cast<std::size_t>(j)] = integrand_value(
                p + std::polar(r, 2.0 * kPi * j / n), values[static_cast<std::size_t>(j)]);
        return values;
    };
    const auto route_value = [section = route_section_, t_a](double t) {
        const double s = std::clamp((1.0 - t) / (1.0 - t_a), 0.0, 1.0);
        return section->value(s);
    };
    spec.path_values = [route_value, integrand_value, path, t_a](double t) -> Matrix {
        if (t < t_a) throw NumericalError("pole cell: section requested inside the near disk");
        return integrand_value(path.eval(t).point, route_value(t));
    };
    spec.f.evaluator = [route_value, integrand_value, path, t_a, local = local_, phi,
                        tol](Complex zeta) -> Matrix {
        const double t = nearest_parameter(path, zeta);
        const Complex foot = path.eval(t).point;
        Matrix m = t >= t_a ? route_value(t) : local->route_section(t).end_value();
        if (std::abs(zeta - foot) > 1e-14 * std::max(1.0, std::abs(zeta))) {
            TransportOptions options;
            options.tol = tol;
            m = TransportedSection(PotentialField::of(phi, options.exclusion_radius),
                                   ComplexPath::segment(foot, zeta), m, GermKind::adjoint, options)
                    .end_value();
        }
        return integrand_value(zeta, m);
    };
    for (double s : route_section_->mesh()) spec.mesh.push_back(1.0 - s * (1.0 - t_a));
    integrator_ = std::make_shared<const RegularizedIntegrator>(std::move(spec));
}

Matrix counterterm(const QuantumTrajectory& gamma, double tol) {
    const int n = gamma.phi().dimension();
    Matrix total = Matrix::Zero(n, n);
    for (const Cell& cell : gamma.cells()) {
        const int at_start = pole_near(gamma.punctures(), cell.path.start());
        const int at_end = pole_near(gamma.punctures(), cell.path.end());
        if (at_start >= 0 && at_end >= 0)
            throw ValidationError("counterterm: cell with both endpoints at punctures");
        if (at_start < 0 && at_end < 0) {
            total += cell.weight * regular_cell_integral(gamma, cell, tol);
        } else if (at_start >= 0) {
            const Complex p = gamma.punctures().points()[static_cast<std::size_t>(at_start)];
            total += cell.weight * PoleCellIntegral(gamma.phi(), p, cell.path, cell.germ.value, tol).value();
        } else {
            const Complex p = gamma.punctures().points()[static_cast<std::size_t>(at_end)];
            total -= cell.weight *
                     PoleCellIntegral(gamma.phi(), p, cell.path.reversed(), cell.germ.value, tol).value();
        }
    }
    return total;
}

namespace {

Matrix transported_target(const EnvelopeSectionSpec& spec, Complex z, double tol) {
    TransportOptions options;
    options.tol = tol;
    Matrix m = spec.e.matrix();
    if (std::abs(z - spec.basepoint) > 0.0) {
        m = TransportedSection(PotentialField::of(spec.phi, options.exclusion_radius),
                               ComplexPath::segment(spec.basepoint, z), m, GermKind::adjoint, options)
                .end_value();
    }
    if (spec.phi.algebra().family == Family::sl)
        m -= Matrix::Identity(m.rows(), m.cols()) * (m.trace() / static_cast<double>(m.rows()));
    return m;
}

}  // namespace

EnvelopeEvaluation evaluate_envelope(const EnvelopeSectionSpec& spec, Complex z, double tol) {
    if (spec.e.dimension() != spec.phi.dimension())
        throw ValidationError("envelope: E has the wrong size");
    EnvelopeEvaluation out;
    out.z = z;
    out.transported = transported_target(spec, z, tol);
    const AdjointElement target(out.transported, spec.e.algebra());
    const LocalizedTrajectory loc =
        localized_boundary_trajectory(spec.phi, spec.anchor_pole, z, target, spec.route, tol);
    out.gate = loc.gate;
    out.value = counterterm(loc.trajectory, tol);
    return out;
}

Matrix envelope_section(const EnvelopeSectionSpec& spec, Complex z, double tol) {
    return evaluate_envelope(spec, z, tol).value;
}

std::vector<double> envelope_residual_scan(const EnvelopeSectionSpec& spec, Complex z,
                                           const std::vector<Complex>& q_values, double tol) {
    const AdjointElement target(transported_target(spec, z, tol), spec.e.algebra());
    const LocalizedTrajectory loc =
        localized_boundary_trajectory(spec.phi, spec.anchor_pole, z, target, spec.route, tol);
    const Cell& cell = loc.trajectory.cells().front();
    const PoleCellIntegral integral(spec.phi, spec.anchor_pole, cell.path, cell.germ.value, tol);
    std::vector<double> out;
    out.reserve(q_values.size());
    for (const Complex& q : q_values) out.push_back(integral.integrator().condition_residual(q).norm());
    return out;
}

double envelope_flatness_residual(const EnvelopeSectionSpec& spec, Complex z, double rho,
                                  double tol) {
    if (!(rho > 0.0)) throw ValidationError("envelope flatness: radius must be positive");
    constexpr int nodes = 16;
    Matrix derivative = Matrix::Zero(spec.phi.dimension(), spec.phi.dimension());
    for (int j = 0; j < nodes; ++j) {
        const Complex w = std::polar(1.0, 2.0 * kPi * j / nodes);
        derivative += envelope_section(spec, z + rho * w, tol) * std::conj(w);
    }
    derivative /= nodes * rho;
    const Matrix value = envelope_section(spec, z, tol);
    const Matrix phi = potential_eval(spec.phi, z).matrix();
    const double scale = derivative.norm() + phi.norm() * value.norm();
    if (scale == 0.0) return 0.0;
    return (derivative - bracket(phi, value)).norm() / scale;
}

}  // namespace qgeom
