#pragma once

#include <memory>
#include <vector>

#include "qgeom/quantum_homology.hpp"
#include "qgeom/reg_integral.hpp"

namespace qgeom {

/// The adjoint flat section M_E is normalised by M_E(basepoint) = E and
/// continued to a target z along the straight segment [basepoint, z]. The
/// trajectory Gamma(z) runs from the anchor pole through the route waypoints
/// to z and carries M_E, so its boundary is z (x) M_E(z).
struct EnvelopeSectionSpec {
    GaugePotential phi;
    AdjointElement e;
    Complex anchor_pole;
    std::vector<Complex> route;
    std::vector<Complex> z_targets;
    Complex basepoint;
};

/// Regularised integral of [Phi, M] over the trajectory, cell by cell. Cells
/// clear of the exclusion disks use Gauss-Kronrod quadrature along the
/// transported section; a cell with one endpoint at a pole is regularised
/// there with the order from the Laurent-growth gate.
Matrix counterterm(const QuantumTrajectory& gamma, double tol = 1e-10);

/// The regularised integral for one pole-anchored cell, prepared for
/// evaluation of the counter-termed family at labels q along its path.
class PoleCellIntegral {
public:
    /// `path` starts at the pole p; `germ_value` is the section at path.end().
    PoleCellIntegral(const GaugePotential& phi, Complex p, const ComplexPath& path,
                     const Matrix& germ_value, double tol = 1e-10);

    const PoleGate& gate() const { return gate_; }
    const RegularizedIntegrator& integrator() const { return *integrator_; }
    Matrix value() const { return integrator_->value(); }

private:
    PoleGate gate_;
    std::shared_ptr<const PoleLocalSection> local_;
    std::shared_ptr<const TransportedSection> route_section_;
    std::shared_ptr<const RegularizedIntegrator> integrator_;
};

struct EnvelopeEvaluation {
    Complex z;
    /// M_E(z) by direct transport from the basepoint.
    Matrix transported;
    /// The envelope section: counterterm of Gamma(z).
    Matrix value;
    PoleGate gate;
};

EnvelopeEvaluation evaluate_envelope(const EnvelopeSectionSpec& spec, Complex z, double tol = 1e-10);
Matrix envelope_section(const EnvelopeSectionSpec& spec, Complex z, double tol = 1e-10);

/// Residual norms |d/dq m(zE; q)| of the envelope condition for Gamma(z) at
/// the labels q (points of the route's first segment).
std::vector<double> envelope_residual_scan(const EnvelopeSectionSpec& spec, Complex z,
                                           const std::vector<Complex>& q_values,
                                           double tol = 1e-10);

/// |dM/dz - [Phi(z), M(z)]| / (|dM/dz| + |Phi(z)| |M(z)|) for the envelope
/// section at z, with dM/dz from a Cauchy integral over a circle of radius rho.
double envelope_flatness_residual(const EnvelopeSectionSpec& spec, Complex z, double rho,
                                  double tol = 1e-10);

}  // namespace qgeom
