#pragma once

#include <functional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "qgeom/core.hpp"

namespace qgeom {

/// Straight segments through consecutive points.
struct Polyline {
    std::vector<Complex> points;
};

/// Circular arc center + radius * e^{i theta}, theta running from
/// `from_angle` to `to_angle` (counterclockwise when to_angle > from_angle).
struct Arc {
    Complex center;
    double radius = 1.0;
    double from_angle = 0.0;
    double to_angle = 0.0;
};

using Segment = std::variant<Polyline, Arc>;

/// One smooth piece of a path with local parameter u in [0, 1].
struct PathPiece {
    enum class Kind { line, arc } kind = Kind::line;
    Complex a, b;                 // line endpoints
    Complex center;               // arc data
    double radius = 0.0, from_angle = 0.0, to_angle = 0.0;

    Complex point(double u) const;
    /// d(point)/du
    Complex derivative(double u) const;
    double length() const;
};

struct PathPoint {
    Complex point;
    Complex velocity;  // d(point)/dt
};

/// A piecewise-smooth path in the affine chart, parameterised over [0, 1]
/// proportionally to arclength.
class ComplexPath {
public:
    explicit ComplexPath(std::vector<Segment> segments);

    static ComplexPath segment(Complex a, Complex b);
    static ComplexPath polyline(std::vector<Complex> points);
    static ComplexPath arc(Complex center, double radius, double from_angle, double to_angle);

    const std::vector<Segment>& segments() const { return segments_; }
    std::span<const PathPiece> pieces() const { return pieces_; }
    /// Parameter value at which piece i starts; size pieces()+1.
    std::span<const double> breakpoints() const { return breaks_; }

    double length() const { return length_; }
    Complex start() const { return pieces_.front().point(0.0); }
    Complex end() const { return pieces_.back().point(1.0); }
    bool is_closed(double gap = 1e-12) const;

    PathPoint eval(double t) const;
    /// Locates t as (piece index, local u).
    std::pair<std::size_t, double> locate(double t) const;

    ComplexPath reversed() const;
    /// This path followed by `next`; endpoints must join within 1e-12.
    ComplexPath then(const ComplexPath& next) const;
    /// Portion between parameters t0 < t1.
    ComplexPath subpath(double t0, double t1) const;
    std::pair<ComplexPath, ComplexPath> split(double t) const;

private:
    struct FromPieces {};
    ComplexPath(FromPieces, std::vector<PathPiece> pieces);
    void index_pieces();

    std::vector<Segment> segments_;
    std::vector<PathPiece> pieces_;
    std::vector<double> breaks_;
    double length_ = 0.0;

};

PathPoint path_eval(const ComplexPath& path, double t);

/// The finite punctures p_1..p_M with their exclusion radius.
class PunctureSet {
public:
    explicit PunctureSet(std::vector<Complex> points = {}, double exclusion_radius = 1e-6);

    const std::vector<Complex>& points() const { return points_; }
    double exclusion_radius() const { return epsilon_; }
    /// Distance from z to the nearest puncture (infinity when empty).
    double distance(Complex z) const;
    bool excludes(Complex z) const { return distance(z) <= epsilon_; }

private:
    std::vector<Complex> points_;
    double epsilon_;
};

/// Counterclockwise circle around p starting at p + radius e^{i angle}.
ComplexPath loop_around(Complex p, double radius, double basepoint_angle);
/// Same, rejecting disks that reach another puncture's exclusion disk.
ComplexPath loop_around(Complex p, double radius, double basepoint_angle,
                        const PunctureSet& punctures);

double distance_to_path(const ComplexPath& path, Complex q);

/// Parameter of the point of the path nearest to q.
double nearest_parameter(const ComplexPath& path, Complex q);

/// First parameter at which |path(t) - center| reaches r, scanning from the
/// start (or, with from_end, the last such parameter scanning from the end).
/// Returns 1 (resp. 0) when the path never reaches r.
double exit_parameter(const ComplexPath& path, Complex center, double r, bool from_end = false);
double min_distance_to_punctures(const ComplexPath& path, const PunctureSet& punctures);

/// The genus-zero third-kind differential (1/(y-x) - 1/(y-o)) dy.
struct ThirdKindForm {
    Complex x;
    Complex o;
    ThirdKindForm(Complex x_, Complex o_);
};

Complex third_kind_eval(const ThirdKindForm& form, Complex y);

/// Adaptive Gauss-Kronrod value of the contour integral of f(zeta) dzeta.
Complex contour_integral(const ComplexPath& path, const std::function<Complex(Complex)>& f,
                         double tol = 1e-13);

/// (1/2 pi i) * contour integral of dzeta / (zeta - p).
Complex winding_number(const ComplexPath& path, Complex p);

/// arg(gamma(t) - p) at t = 1, tracked continuously along the path. When the
/// path starts at p the initial value is the argument of the initial tangent.
double tracked_argument(const ComplexPath& path, Complex p);

}  // namespace qgeom
