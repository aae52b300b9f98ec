#include "qgeom/deformation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qgeom/quadrature.hpp"

namespace qgeom {

DeformationPotentialField::DeformationPotentialField(QuantumTrajectory gamma, Complex o, double tol)
    : gamma_(std::move(gamma)), o_(o), tol_(tol) {
    if (!(tol > 0.0)) throw ValidationError("deformation potential: tol must be positive");
    const CycleCheck check = is_cycle(gamma_, 1e-6, tol);
    cycle_residual_ = check.residual;
    if (!check.is_cycle)
        throw ValidationError("deformation potential: trajectory is not a cycle (boundary norm " +
                              std::to_string(check.residual) + ")");
    for (const Cell& cell : gamma_.cells()) {
        if (distance_to_path(cell.path, o) <= 1e-4)
            throw ValidationError("deformation potential: reference point o too close to a path");
        sections_.emplace_back(gamma_, cell, tol);
    }
    if (gamma_.punctures().distance(o) <= gamma_.punctures().exclusion_radius())
        throw ValidationError("deformation potential: reference point o on a puncture");
}

double DeformationPotentialField::forbidden_distance(Complex x) const {
    double d = std::min(std::abs(x - o_), gamma_.punctures().distance(x));
    for (const Cell& cell : gamma_.cells()) d = std::min(d, distance_to_path(cell.path, x));
    return d;
}

Matrix DeformationPotentialField::integrate(const std::function<Complex(Complex)>& kernel) const {
    const int n = gamma_.phi().dimension();
    Matrix total = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < sections_.size(); ++i) {
        const Cell& cell = gamma_.cells()[i];
        const CellSection& section = sections_[i];
        std::vector<double> breaks = section.mesh();
        for (double b : cell.path.breakpoints()) breaks.push_back(b);
        std::sort(breaks.begin(), breaks.end());
        breaks.erase(std::unique(breaks.begin(), breaks.end(),
                                 [](double a, double b) { return b - a < 1e-15; }),
                     breaks.end());
        auto integrand = [&](double t) -> Matrix {
            const PathPoint pt = cell.path.eval(t);
            return section.value(t) * (kernel(pt.point) * pt.velocity);
        };
        total += cell.weight *
                 quadrature::integrate<Matrix>(integrand, breaks, 1e-3 * tol_, 1e-2 * tol_, 50000).value;
    }
    return total;
}

Matrix DeformationPotentialField::value(Complex x) const {
    if (forbidden_distance(x) <= 1e-4)
        throw ValidationError("deformation potential: x too close to a path, o or a puncture");
    const ThirdKindForm form(x, o_);
    return integrate([&form](Complex y) { return third_kind_eval(form, y); });
}

Matrix DeformationPotentialField::derivative(Complex x) const {
    const double rho = 0.5 * forbidden_distance(x);
    if (rho <= 0.5e-4)
        throw ValidationError("deform_direction: Cauchy circle collides with a path, o or a pole");
    auto cauchy = [&](int count) {
        std::vector<Matrix> values;
        Matrix acc = Matrix::Zero(gamma_.phi().dimension(), gamma_.phi().dimension());
        double fmax = 0.0;
        for (int j = 0; j < count; ++j) {
            const Complex w = std::polar(1.0, 2.0 * kPi * j / count);
            const Matrix f = value(x + rho * w);
            fmax = std::max(fmax, f.norm());
            acc += f * std::conj(w);
        }
        return std::pair<Matrix, double>(acc / (count * rho), fmax);
    };
    auto [previous, fmax] = cauchy(16);
    for (int count = 32; count <= 256; count *= 2) {
        auto [next, next_max] = cauchy(count);
        // values carry absolute quadrature noise of order tol
        const double scale = std::max(fmax, next_max) / rho;
        if ((next - previous).norm() <= 1e-9 * scale + tol_ / rho) return next;
        previous = std::move(next);
        fmax = next_max;
    }
    throw NumericalError("deform_direction: Cauchy derivative did not stabilise with 256 nodes");
}

Matrix DeformationPotentialField::direction(Complex x) const {
    const Matrix f = value(x);
    const Matrix phi = potential_eval(gamma_.phi(), x).matrix();
    return derivative(x) + (f * phi - phi * f);
}

std::function<Matrix(Complex)> DeformationPotentialField::direction_field() const {
    return [self = *this](Complex x) { return self.direction(x); };
}

Matrix deformation_potential(const QuantumTrajectory& gamma, Complex x, Complex o, double tol) {
    return DeformationPotentialField(gamma, o, tol).value(x);
}

Matrix deform_direction(const QuantumTrajectory& gamma, Complex x, Complex o, double tol) {
    return DeformationPotentialField(gamma, o, tol).direction(x);
}

ReferenceShift reference_shift_constant(const QuantumTrajectory& gamma, Complex o, Complex o_prime,
                                        const std::vector<Complex>& x_samples, double tol) {
    if (x_samples.empty()) throw ValidationError("reference_shift_constant: no sample points");
    const DeformationPotentialField base(gamma, o, tol);
    const DeformationPotentialField shifted(gamma, o_prime, tol);
    std::vector<Matrix> diffs;
    for (const Complex& x : x_samples) diffs.push_back(shifted.value(x) - base.value(x));
    Matrix mean = Matrix::Zero(diffs[0].rows(), diffs[0].cols());
    for (const auto& d : diffs) mean += d;
    mean /= static_cast<double>(diffs.size());
    double spread = 0.0;
    for (const auto& d : diffs) spread = std::max(spread, (d - mean).norm());
    return {mean, spread};
}

double homology_invariance_check(const QuantumTrajectory& gamma,
                                 const QuantumTrajectory& gamma_deformed, Complex x, Complex o,
                                 double tol) {
    return (deformation_potential(gamma, x, o, tol) - deformation_potential(gamma_deformed, x, o, tol))
        .norm();
}

}  // namespace qgeom
