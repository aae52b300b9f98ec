#pragma once

#include <functional>
#include <vector>

#include "qgeom/lie_numerics.hpp"
#include "qgeom/sphere_geometry.hpp"

namespace qgeom {

/// A pole of the gauge potential; laurent[k-1] multiplies (zeta - position)^{-k}.
struct Pole {
    Complex position;
    std::vector<Matrix> laurent;
    int order() const { return static_cast<int>(laurent.size()); }
};

/// The matrix-valued coefficient of dzeta of a rational one-form on the
/// sphere:  sum_i sum_k A_{i,k} (zeta - p_i)^{-k} + sum_j B_j zeta^j.
class GaugePotential {
public:
    GaugePotential(AlgebraSpec algebra, std::vector<Pole> poles, std::vector<Matrix> poly_tail = {});

    const AlgebraSpec& algebra() const { return algebra_; }
    int dimension() const { return algebra_.n; }
    const std::vector<Pole>& poles() const { return poles_; }
    const std::vector<Matrix>& poly_tail() const { return tail_; }

    /// Index of the pole at p (within 1e-10), or -1.
    int find_pole(Complex p) const;
    std::vector<Complex> pole_positions() const;
    PunctureSet punctures(double exclusion_radius = 1e-6) const;

    /// Unchecked evaluation used in inner loops.
    Matrix operator()(Complex z) const;

private:
    AlgebraSpec algebra_;
    std::vector<Pole> poles_;
    std::vector<Matrix> tail_;
};

/// Phi(z); throws ValidationError within 1e-12 of a pole.
AdjointElement potential_eval(const GaugePotential& phi, Complex z);
/// The Laurent coefficient A_{i,k} at the declared pole p.
AdjointElement residue(const GaugePotential& phi, Complex p, int order = 1);
bool is_fuchsian(const GaugePotential& phi);

/// Any matrix field zeta -> Phi(zeta) together with the points it must not
/// be evaluated at. Transport works on this type.
struct PotentialField {
    std::function<Matrix(Complex)> eval;
    PunctureSet punctures;
    int n = 1;

    static PotentialField of(const GaugePotential& phi, double exclusion_radius = 1e-6);
};

/// base + epsilon * direction, pointwise.
class DeformedPotential {
public:
    DeformedPotential(GaugePotential base, std::function<Matrix(Complex)> direction, double epsilon);

    const GaugePotential& base() const { return base_; }
    double epsilon() const { return epsilon_; }
    Matrix operator()(Complex z) const;
    PotentialField field(double exclusion_radius = 1e-6) const;

private:
    GaugePotential base_;
    std::function<Matrix(Complex)> direction_;
    double epsilon_;
};

}  // namespace qgeom
