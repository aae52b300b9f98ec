#pragma once

#include <vector>

#include "qgeom/connection.hpp"
#include "qgeom/ode.hpp"

namespace qgeom {

struct TransportOptions {
    double tol = 1e-10;
    double exclusion_radius = 1e-6;
    int max_steps = 200000;
};

enum class GermKind { fundamental, adjoint };

/// A flat section given by its value at an anchor point.
struct FlatSectionGerm {
    Complex anchor;
    Matrix value;
    GermKind kind = GermKind::adjoint;

    static FlatSectionGerm adjoint(Complex anchor, const AdjointElement& value);
    static FlatSectionGerm fundamental(Complex anchor, const GroupElement& value);
};

struct TransportResult {
    Matrix end_value;
    double flatness_residual = 0.0;
    int steps = 0;
};

/// A flat section along a whole path, with continuous output in the path
/// parameter. Fundamental sections solve V' = Phi(gamma) gamma' V, adjoint
/// ones W' = [Phi(gamma) gamma', W].
class TransportedSection {
public:
    TransportedSection(const PotentialField& field, ComplexPath path, Matrix init, GermKind kind,
                       const TransportOptions& options = {});

    const ComplexPath& path() const { return path_; }
    GermKind kind() const { return kind_; }
    Matrix value(double t) const { return solution_.value(t); }
    /// d/dt of the section.
    Matrix derivative(double t) const { return solution_.derivative(t); }
    const Matrix& end_value() const { return solution_.end_value(); }
    std::vector<double> mesh() const { return solution_.mesh(); }
    double flatness_residual() const { return solution_.flatness_residual(); }
    int steps() const { return static_cast<int>(solution_.size()); }

    TransportResult result() const { return {end_value(), flatness_residual(), steps()}; }

private:
    ComplexPath path_;
    GermKind kind_;
    DenseSolution solution_;
};

/// Rejects paths that meet an exclusion disk.
void require_clear_path(const ComplexPath& path, const PunctureSet& punctures);

TransportResult transport_fundamental(const GaugePotential& phi, const ComplexPath& path,
                                      const GroupElement& init, double tol = 1e-10);
TransportResult transport_fundamental(const PotentialField& field, const ComplexPath& path,
                                      const GroupElement& init, const TransportOptions& options);

/// The germ must be anchored at the path start.
TransportResult transport_adjoint(const GaugePotential& phi, const ComplexPath& path,
                                  const FlatSectionGerm& germ, double tol = 1e-10);
TransportResult transport_adjoint(const PotentialField& field, const ComplexPath& path,
                                  const FlatSectionGerm& germ, const TransportOptions& options);

GroupElement monodromy(const GaugePotential& phi, const ComplexPath& loop, double tol = 1e-10);

/// |W(1) - E|_F for the adjoint transport of E around the loop.
double adjoint_monodromy_check(const GaugePotential& phi, const ComplexPath& loop,
                               const AdjointElement& e, double tol = 1e-10);

struct BasedLoop {
    Complex pole;
    ComplexPath loop;
    Matrix monodromy;
};

/// Lassos from a common basepoint around every pole, listed in the order in
/// which their concatenation is homotopic to one large counterclockwise
/// circle around all poles, and the ordered product of their monodromies.
/// With T(a.b) = T(b) T(a), product = T(loop_m) ... T(loop_1).
struct CompositeMonodromy {
    Complex basepoint;
    std::vector<BasedLoop> loops;
    Matrix product;
};

CompositeMonodromy composite_monodromy(const GaugePotential& phi, double tol = 1e-10);

}  // namespace qgeom
