#pragma once

#include <functional>
#include <vector>

#include "qgeom/quantum_homology.hpp"

namespace qgeom {

/// x -> F(x) = sum_i w_i int_{gamma_i} omega_{x,o}(y) sigma_i(y) for a closed
/// quantum trajectory, with the sections precomputed once along every cell.
class DeformationPotentialField {
public:
    /// Throws ValidationError unless the trajectory is a cycle to 1e-6.
    DeformationPotentialField(QuantumTrajectory gamma, Complex o, double tol = 1e-10);

    const QuantumTrajectory& trajectory() const { return gamma_; }
    Complex reference() const { return o_; }
    double cycle_residual() const { return cycle_residual_; }

    /// Distance from x to the nearest cell path, the reference point or pole.
    double forbidden_distance(Complex x) const;

    Matrix value(Complex x) const;
    /// dF/dx from the Cauchy integral on the circle of radius
    /// forbidden_distance(x) / 2 around x.
    Matrix derivative(Complex x) const;
    /// dF(x) + [F(x), Phi(x)].
    Matrix direction(Complex x) const;
    /// The direction as a field, e.g. for DeformedPotential.
    std::function<Matrix(Complex)> direction_field() const;

private:
    Matrix integrate(const std::function<Complex(Complex)>& kernel) const;

    QuantumTrajectory gamma_;
    Complex o_;
    double tol_;
    double cycle_residual_ = 0.0;
    std::vector<CellSection> sections_;
};

Matrix deformation_potential(const QuantumTrajectory& gamma, Complex x, Complex o,
                             double tol = 1e-10);
Matrix deform_direction(const QuantumTrajectory& gamma, Complex x, Complex o, double tol = 1e-10);

struct ReferenceShift {
    Matrix constant;
    double spread = 0.0;
};

/// Mean and maximal deviation of F_{o'}(x) - F_o(x) over the sample points.
ReferenceShift reference_shift_constant(const QuantumTrajectory& gamma, Complex o, Complex o_prime,
                                        const std::vector<Complex>& x_samples, double tol = 1e-10);

/// |F_gamma(x) - F_gamma'(x)|_F.
double homology_invariance_check(const QuantumTrajectory& gamma,
                                 const QuantumTrajectory& gamma_deformed, Complex x, Complex o,
                                 double tol = 1e-10);

}  // namespace qgeom
