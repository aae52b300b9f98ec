#pragma once

#include <string>
#include <vector>

#include "qgeom/transport.hpp"

namespace qgeom {

struct DivisorTerm {
    Complex point;
    Matrix coefficient;
};

/// A finite formal sum of points with matrix coefficients. Points closer
/// than the merge radius are identified (coefficients added); exactly zero
/// coefficients are dropped.
class QuantumDivisor {
public:
    explicit QuantumDivisor(double merge_radius = 1e-10) : merge_radius_(merge_radius) {}

    void add(Complex point, const Matrix& coefficient);
    void add(const QuantumDivisor& other, Complex weight = 1.0);

    const std::vector<DivisorTerm>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    /// Sum of Frobenius norms of the coefficients.
    double total_norm() const;
    /// Coefficient at `point` (zero matrix of size n when absent).
    Matrix coefficient_at(Complex point, int n) const;
    /// Largest coefficient-wise distance to `other` over the union of supports.
    double distance(const QuantumDivisor& other) const;

private:
    double merge_radius_;
    std::vector<DivisorTerm> terms_;
};

/// A path with a flat adjoint section, given by its value at one endpoint.
struct Cell {
    Complex weight = 1.0;
    ComplexPath path;
    FlatSectionGerm germ;
};

/// A degree-one chain: weighted paths carrying flat adjoint sections of one
/// gauge potential.
class QuantumTrajectory {
public:
    QuantumTrajectory(GaugePotential phi, std::vector<Cell> cells, double exclusion_radius = 1e-6);

    const GaugePotential& phi() const { return phi_; }
    const PunctureSet& punctures() const { return punctures_; }
    const std::vector<Cell>& cells() const { return cells_; }

    QuantumTrajectory operator+(const QuantumTrajectory& other) const;
    QuantumTrajectory scaled(Complex factor) const;
    /// Every path reversed; the germs are kept.
    QuantumTrajectory reversed() const;

private:
    GaugePotential phi_;
    PunctureSet punctures_;
    std::vector<Cell> cells_;
};

/// The adjoint section of a cell along its whole path, in the cell's own
/// path parameter whichever end the germ is anchored at. Requires the path to
/// avoid all exclusion disks.
class CellSection {
public:
    CellSection(const QuantumTrajectory& gamma, const Cell& cell, double tol = 1e-10);

    Matrix value(double t) const { return section_.value(reversed_ ? 1.0 - t : t); }
    Matrix start_value() const { return value(0.0); }
    Matrix end_value() const { return value(1.0); }
    /// Step boundaries of the transport, increasing in the cell parameter.
    std::vector<double> mesh() const;
    double flatness_residual() const { return section_.flatness_residual(); }

private:
    TransportedSection section_;
    bool reversed_;
};

/// Splits a cell at parameter t; the second cell's germ is the section value
/// at the split point.
std::pair<Cell, Cell> subdivide(const QuantumTrajectory& gamma, const Cell& cell, double t,
                                double tol = 1e-10);

struct DroppedEndpoint {
    Complex point;
    std::string reason;
};

struct BoundaryReport {
    QuantumDivisor divisor;
    std::vector<DroppedEndpoint> dropped;
};

/// Sum over cells of weight * (end (x) sigma(end) - start (x) sigma(start)),
/// dropping endpoints inside an exclusion disk.
BoundaryReport boundary_1(const QuantumTrajectory& gamma, double tol = 1e-10);

struct CycleCheck {
    bool is_cycle = false;
    double residual = 0.0;
};

CycleCheck is_cycle(const QuantumTrajectory& gamma, double tol = 1e-6,
                    double transport_tol = 1e-10);

struct TrivialCycle {
    QuantumTrajectory trajectory;
    /// |M E - E M|_F with M the monodromy of the loop.
    double commutation_residual = 0.0;
};

TrivialCycle trivial_cycle_around(const GaugePotential& phi, Complex p, double radius,
                                  const AdjointElement& e, double tol = 1e-10);

/// Samples of a flat adjoint section near a pole p, obtained by transporting
/// a germ at the far end of a route that leaves p into the crossing point of
/// the route with a circle |zeta - p| = r and then once around that circle.
class PoleLocalSection {
public:
    /// `route` starts at p; `germ_value` is the section at route.end().
    PoleLocalSection(const GaugePotential& phi, Complex p, ComplexPath route, Matrix germ_value,
                     double tol = 1e-10);

    Complex pole() const { return p_; }
    const ComplexPath& route() const { return route_; }
    /// Section values at p + r exp(2 pi i j / n), j = 0..n-1.
    std::vector<Matrix> circle_values(double r, int n) const;
    /// max |W| on the circle of radius r.
    double circle_max(double r) const;
    /// |W after one turn - W before| / |W| on the circle of radius r.
    double circle_defect(double r) const;
    /// Route parameter at which the route leaves the disk of radius r.
    double crossing_parameter(double r) const;
    /// The section on the route portion [t0, 1], transported from route.end();
    /// its own parameter s corresponds to route parameter 1 - s (1 - t0).
    TransportedSection route_section(double t0) const;

private:
    /// Counterclockwise circle of radius r through the route's crossing point.
    TransportedSection circle(double r) const;

    GaugePotential phi_;
    Complex p_;
    ComplexPath route_;
    Matrix germ_;
    TransportOptions options_;
};

/// Result of the Laurent-growth fit of |M| on circles of shrinking radii.
struct PoleGate {
    std::vector<double> radii;
    std::vector<double> norms;
    double slope = 0.0;
    int exponent = 0;
    double monodromy_defect = 0.0;
    /// Exponent d of the regularised integral for [Phi, M] at p:
    /// max(0, pole order - exponent - 1).
    int integrand_order = 0;
};

/// Least-squares slope of log|M| against log r on r, r/2, r/4. Throws
/// NumericalError when the section is multivalued around p or when the slope
/// is not within 0.1 of an integer >= -n.
PoleGate pole_growth_gate(const GaugePotential& phi, const PoleLocalSection& local, double r);
/// Default gate radius for a route from p: a small fraction of the distance
/// to the other poles and of the route's first piece.
double default_gate_radius(const GaugePotential& phi, Complex p, const ComplexPath& route);

struct LocalizedTrajectory {
    QuantumTrajectory trajectory;
    PoleGate gate;
};

/// A single cell running from the pole p through the waypoints to z, with
/// germ E anchored at z; its boundary is {z (x) E} once the endpoint p is
/// dropped by the exclusion rule.
LocalizedTrajectory localized_boundary_trajectory(const GaugePotential& phi, Complex p, Complex z,
                                                  const AdjointElement& e,
                                                  const std::vector<Complex>& route,
                                                  double tol = 1e-10);

}  // namespace qgeom
