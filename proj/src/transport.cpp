#include "qgeom/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qgeom {

FlatSectionGerm FlatSectionGerm::adjoint(Complex anchor, const AdjointElement& value) {
    return {anchor, value.matrix(), GermKind::adjoint};
}

FlatSectionGerm FlatSectionGerm::fundamental(Complex anchor, const GroupElement& value) {
    return {anchor, value.matrix(), GermKind::fundamental};
}

void require_clear_path(const ComplexPath& path, const PunctureSet& punctures) {
    if (min_distance_to_punctures(path, punctures) <= punctures.exclusion_radius())
        throw ValidationError("transport: path enters the exclusion disk of a puncture");
}

namespace {

DenseSolution solve(const PotentialField& field, const ComplexPath& path, Matrix init,
                    GermKind kind, const TransportOptions& options) {
    if (init.rows() != field.n || init.cols() != field.n)
        throw ValidationError("transport: initial value has the wrong size");
    require_clear_path(path, field.punctures);
    const auto br = path.breakpoints();
    // step control at a tenth of the requested tolerance
    OdeOptions ode{0.1 * options.tol, 0.0, options.max_steps};
    if (kind == GermKind::fundamental) {
        MatrixRhs rhs = [&](double t, const Matrix& v) -> Matrix {
            const PathPoint pt = path.eval(t);
            return (field.eval(pt.point) * pt.velocity) * v;
        };
        return integrate_dopri5(rhs, br, std::move(init), ode);
    }
    MatrixRhs rhs = [&](double t, const Matrix& w) -> Matrix {
        const PathPoint pt = path.eval(t);
        const Matrix a = field.eval(pt.point) * pt.velocity;
        return a * w - w * a;
    };
    return integrate_dopri5(rhs, br, std::move(init), ode);
}

}  // namespace

TransportedSection::TransportedSection(const PotentialField& field, ComplexPath path, Matrix init,
                                       GermKind kind, const TransportOptions& options)
    : path_(std::move(path)), kind_(kind),
      solution_(solve(field, path_, std::move(init), kind, options)) {}

TransportResult transport_fundamental(const PotentialField& field, const ComplexPath& path,
                                      const GroupElement& init, const TransportOptions& options) {
    return TransportedSection(field, path, init.matrix(), GermKind::fundamental, options).result();
}

TransportResult transport_fundamental(const GaugePotential& phi, const ComplexPath& path,
                                      const GroupElement& init, double tol) {
    TransportOptions options;
    options.tol = tol;
    return transport_fundamental(PotentialField::of(phi, options.exclusion_radius), path, init,
                                 options);
}

TransportResult transport_adjoint(const PotentialField& field, const ComplexPath& path,
                                  const FlatSectionGerm& germ, const TransportOptions& options) {
    if (germ.kind != GermKind::adjoint)
        throw ValidationError("transport_adjoint: germ is not an adjoint germ");
    if (std::abs(germ.anchor - path.start()) > 1e-10 * std::max(1.0, std::abs(germ.anchor)))
        throw ValidationError("transport_adjoint: germ anchor is not the path start");
    return TransportedSection(field, path, germ.value, GermKind::adjoint, options).result();
}

TransportResult transport_adjoint(const GaugePotential& phi, const ComplexPath& path,
                                  const FlatSectionGerm& germ, double tol) {
    TransportOptions options;
    options.tol = tol;
    return transport_adjoint(PotentialField::of(phi, options.exclusion_radius), path, germ,
                             options);
}

GroupElement monodromy(const GaugePotential& phi, const ComplexPath& loop, double tol) {
    if (!loop.is_closed()) throw ValidationError("monodromy: loop is not closed");
    return GroupElement(
        transport_fundamental(phi, loop, GroupElement::identity(phi.dimension()), tol).end_value);
}

double adjoint_monodromy_check(const GaugePotential& phi, const ComplexPath& loop,
                               const AdjointElement& e, double tol) {
    if (!loop.is_closed()) throw ValidationError("adjoint_monodromy_check: loop is not closed");
    const auto res = transport_adjoint(phi, loop, FlatSectionGerm::adjoint(loop.start(), e), tol);
    return (res.end_value - e.matrix()).norm();
}

namespace {

struct LassoPlan {
    Complex basepoint;
    std::vector<std::pair<double, std::size_t>> order;  // (angle, pole index)
    double radius = 0.0;
};

bool try_basepoint(const std::vector<Complex>& poles, Complex b, double radius, double eps,
                   LassoPlan& plan) {
    plan.basepoint = b;
    plan.radius = radius;
    plan.order.clear();
    for (std::size_t i = 0; i < poles.size(); ++i) {
        const Complex p = poles[i];
        const Complex foot = p + radius * (b - p) / std::abs(b - p);
        for (std::size_t j = 0; j < poles.size(); ++j) {
            if (j == i) continue;
            const ComplexPath spoke = ComplexPath::segment(b, foot);
            if (distance_to_path(spoke, poles[j]) <= 2.0 * radius + eps) return false;
        }
        plan.order.emplace_back(std::arg(p - b), i);
    }
    std::sort(plan.order.begin(), plan.order.end());
    for (std::size_t k = 0; k + 1 < plan.order.size(); ++k)
        if (plan.order[k + 1].first - plan.order[k].first < 1e-9) return false;
    return true;
}

}  // namespace

CompositeMonodromy composite_monodromy(const GaugePotential& phi, double tol) {
    const auto poles = phi.pole_positions();
    const int n = phi.dimension();
    CompositeMonodromy out;
    out.product = Matrix::Identity(n, n);
    if (poles.empty()) {
        out.basepoint = 0.0;
        return out;
    }
    Complex center = 0.0;
    for (const Complex& p : poles) center += p;
    center /= static_cast<double>(poles.size());
    double spread = 0.0, closest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poles.size(); ++i) {
        spread = std::max(spread, std::abs(poles[i] - center));
        for (std::size_t j = 0; j < i; ++j) closest = std::min(closest, std::abs(poles[i] - poles[j]));
    }
    if (!std::isfinite(closest)) closest = 1.0;
    const double radius = 0.25 * closest;
    const double eps = TransportOptions{}.exclusion_radius;
    const double reach = 2.0 * spread + 1.0;

    // the basepoint sits below the poles; nudge it sideways if a spoke
    // grazes another pole
    LassoPlan plan;
    bool found = false;
    for (int attempt = 0; attempt < 64 && !found; ++attempt) {
        const double shift = (attempt % 2 == 0 ? 1.0 : -1.0) * 0.05 * ((attempt + 1) / 2);
        const Complex b = center + reach * std::polar(1.0, -kPi / 2.0 + shift);
        found = try_basepoint(poles, b, radius, eps, plan);
    }
    if (!found) throw NumericalError("composite_monodromy: no basepoint with clear lassos");

    out.basepoint = plan.basepoint;
    for (const auto& [angle, i] : plan.order) {
        const Complex p = poles[i];
        const Complex dir = (plan.basepoint - p) / std::abs(plan.basepoint - p);
        const Complex foot = p + plan.radius * dir;
        const ComplexPath lasso = ComplexPath::segment(plan.basepoint, foot)
                                      .then(loop_around(p, plan.radius, std::arg(dir)))
                                      .then(ComplexPath::segment(foot, plan.basepoint));
        Matrix m = monodromy(phi, lasso, tol).matrix();
        out.product = m * out.product;
        out.loops.push_back({p, lasso, std::move(m)});
    }
    return out;
}

}  // namespace qgeom
