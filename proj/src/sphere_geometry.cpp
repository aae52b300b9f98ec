#include "qgeom/sphere_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qgeom/quadrature.hpp"

namespace qgeom {

namespace {

bool joins(Complex a, Complex b) {
    return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a));
}

double segment_distance(Complex a, Complex b, Complex q) {
    const Complex d = b - a;
    const double len2 = std::norm(d);
    if (len2 == 0.0) return std::abs(q - a);
    const double s = std::clamp(std::real((q - a) * std::conj(d)) / len2, 0.0, 1.0);
    return std::abs(q - (a + s * d));
}

// Principal angle difference wrapped into (-pi, pi].
double wrap(double angle) {
    angle = std::remainder(angle, 2.0 * kPi);
    return angle <= -kPi ? angle + 2.0 * kPi : angle;
}

PathPiece line_piece(Complex a, Complex b) {
    PathPiece piece;
    piece.kind = PathPiece::Kind::line;
    piece.a = a;
    piece.b = b;
    return piece;
}

PathPiece arc_piece(Complex center, double radius, double from, double to) {
    PathPiece piece;
    piece.kind = PathPiece::Kind::arc;
    piece.center = center;
    piece.radius = radius;
    piece.from_angle = from;
    piece.to_angle = to;
    return piece;
}

Segment to_segment(const PathPiece& piece) {
    if (piece.kind == PathPiece::Kind::line) return Polyline{{piece.a, piece.b}};
    return Arc{piece.center, piece.radius, piece.from_angle, piece.to_angle};
}

PathPiece restrict_piece(const PathPiece& piece, double u0, double u1) {
    if (piece.kind == PathPiece::Kind::line) return line_piece(piece.point(u0), piece.point(u1));
    const double span = piece.to_angle - piece.from_angle;
    return arc_piece(piece.center, piece.radius, piece.from_angle + span * u0,
                     piece.from_angle + span * u1);
}

PathPiece reverse_piece(const PathPiece& piece) {
    if (piece.kind == PathPiece::Kind::line) return line_piece(piece.b, piece.a);
    return arc_piece(piece.center, piece.radius, piece.to_angle, piece.from_angle);
}

double piece_distance(const PathPiece& piece, Complex q) {
    if (piece.kind == PathPiece::Kind::line) return segment_distance(piece.a, piece.b, q);
    const double lo = std::min(piece.from_angle, piece.to_angle);
    const double hi = std::max(piece.from_angle, piece.to_angle);
    const double endpoints = std::min(std::abs(q - piece.point(0.0)), std::abs(q - piece.point(1.0)));
    const Complex w = q - piece.center;
    if (std::abs(w) == 0.0) return piece.radius;
    if (hi - lo >= 2.0 * kPi) return std::abs(std::abs(w) - piece.radius);
    // bring the polar angle of w into [lo, lo + 2 pi)
    double theta = std::arg(w);
    theta = lo + std::fmod(std::fmod(theta - lo, 2.0 * kPi) + 2.0 * kPi, 2.0 * kPi);
    if (theta <= hi) return std::abs(std::abs(w) - piece.radius);
    return endpoints;
}

}  // namespace

Complex PathPiece::point(double u) const {
    if (kind == Kind::line) return a + u * (b - a);
    return center + radius * std::polar(1.0, from_angle + (to_angle - from_angle) * u);
}

Complex PathPiece::derivative(double u) const {
    if (kind == Kind::line) return b - a;
    const double span = to_angle - from_angle;
    return kI * span * radius * std::polar(1.0, from_angle + span * u);
}

double PathPiece::length() const {
    if (kind == Kind::line) return std::abs(b - a);
    return std::abs(to_angle - from_angle) * radius;
}

ComplexPath::ComplexPath(std::vector<Segment> segments) : segments_(std::move(segments)) {
    for (std::size_t s = 0; s < segments_.size(); ++s) {
        const std::string where = "segments[" + std::to_string(s) + "]";
        if (const auto* poly = std::get_if<Polyline>(&segments_[s])) {
            if (poly->points.size() < 2)
                throw ValidationError(where + ": polyline needs at least two points");
            for (const Complex& z : poly->points)
                if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                    throw ValidationError(where + ": non-finite point");
            for (std::size_t i = 0; i + 1 < poly->points.size(); ++i)
                if (poly->points[i] != poly->points[i + 1])
                    pieces_.push_back(line_piece(poly->points[i], poly->points[i + 1]));
        } else {
            const Arc& arc = std::get<Arc>(segments_[s]);
            if (!(arc.radius > 0.0) || !std::isfinite(arc.radius))
                throw ValidationError(where + ": arc radius must be positive");
            if (!std::isfinite(arc.from_angle) || !std::isfinite(arc.to_angle))
                throw ValidationError(where + ": non-finite arc angle");
            if (arc.from_angle != arc.to_angle)
                pieces_.push_back(arc_piece(arc.center, arc.radius, arc.from_angle, arc.to_angle));
        }
    }
    if (pieces_.empty()) throw ValidationError("path: has zero length");
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i)
        if (!joins(pieces_[i].point(1.0), pieces_[i + 1].point(0.0)))
            throw ValidationError("path: segments do not join continuously at piece " +
                                  std::to_string(i + 1));
    index_pieces();
}

ComplexPath::ComplexPath(FromPieces, std::vector<PathPiece> pieces) : pieces_(std::move(pieces)) {
    std::erase_if(pieces_, [](const PathPiece& p) { return p.length() == 0.0; });
    if (pieces_.empty()) throw ValidationError("path: has zero length");
    segments_.reserve(pieces_.size());
    for (const auto& piece : pieces_) segments_.push_back(to_segment(piece));
    index_pieces();
}

void ComplexPath::index_pieces() {
    length_ = 0.0;
    for (const auto& piece : pieces_) length_ += piece.length();
    if (!(length_ > 0.0)) throw ValidationError("path: has zero length");
    breaks_.assign(pieces_.size() + 1, 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        acc += pieces_[i].length();
        breaks_[i + 1] = acc / length_;
    }
    breaks_.back() = 1.0;
}

ComplexPath ComplexPath::segment(Complex a, Complex b) { return ComplexPath({Polyline{{a, b}}}); }

ComplexPath ComplexPath::polyline(std::vector<Complex> points) {
    return ComplexPath({Polyline{std::move(points)}});
}

ComplexPath ComplexPath::arc(Complex center, double radius, double from_angle, double to_angle) {
    return ComplexPath({Arc{center, radius, from_angle, to_angle}});
}

bool ComplexPath::is_closed(double gap) const { return std::abs(end() - start()) <= gap; }

std::pair<std::size_t, double> ComplexPath::locate(double t) const {
    t = std::clamp(t, 0.0, 1.0);
    auto it = std::upper_bound(breaks_.begin() + 1, breaks_.end() - 1, t);
    const auto i = static_cast<std::size_t>(it - breaks_.begin()) - 1;
    const double width = breaks_[i + 1] - breaks_[i];
    const double u = width > 0.0 ? std::clamp((t - breaks_[i]) / width, 0.0, 1.0) : 0.0;
    return {i, u};
}

PathPoint ComplexPath::eval(double t) const {
    if (!(t >= -1e-14 && t <= 1.0 + 1e-14)) throw ValidationError("path_eval: t outside [0, 1]");
    const auto [i, u] = locate(t);
    const double width = breaks_[i + 1] - breaks_[i];
    return {pieces_[i].point(u), pieces_[i].derivative(u) / width};
}

ComplexPath ComplexPath::reversed() const {
    std::vector<PathPiece> out;
    out.reserve(pieces_.size());
    for (auto it = pieces_.rbegin(); it != pieces_.rend(); ++it) out.push_back(reverse_piece(*it));
    return ComplexPath(FromPieces{}, std::move(out));
}

ComplexPath ComplexPath::then(const ComplexPath& next) const {
    if (!joins(end(), next.start()))
        throw ValidationError("path concatenation: end point does not match next start");
    std::vector<PathPiece> out = pieces_;
    out.insert(out.end(), next.pieces_.begin(), next.pieces_.end());
    return ComplexPath(FromPieces{}, std::move(out));
}

ComplexPath ComplexPath::subpath(double t0, double t1) const {
    if (!(0.0 <= t0 && t0 < t1 && t1 <= 1.0)) throw ValidationError("subpath: need 0 <= t0 < t1 <= 1");
    const auto [i0, u0] = locate(t0);
    auto [i1, u1] = locate(t1);
    if (u1 == 0.0 && i1 > i0) {
        --i1;
        u1 = 1.0;
    }
    std::vector<PathPiece> out;
    for (std::size_t i = i0; i <= i1; ++i) {
        const double a = i == i0 ? u0 : 0.0;
        const double b = i == i1 ? u1 : 1.0;
        if (b > a) out.push_back(restrict_piece(pieces_[i], a, b));
    }
    return ComplexPath(FromPieces{}, std::move(out));
}

std::pair<ComplexPath, ComplexPath> ComplexPath::split(double t) const {
    return {subpath(0.0, t), subpath(t, 1.0)};
}

PathPoint path_eval(const ComplexPath& path, double t) { return path.eval(t); }

PunctureSet::PunctureSet(std::vector<Complex> points, double exclusion_radius)
    : points_(std::move(points)), epsilon_(exclusion_radius) {
    if (!(epsilon_ > 0.0)) throw ValidationError("punctures: exclusion radius must be positive");
    for (std::size_t i = 0; i < points_.size(); ++i)
        for (std::size_t j = i + 1; j < points_.size(); ++j)
            if (std::abs(points_[i] - points_[j]) <= 2.0 * epsilon_)
                throw ValidationError("punctures: points " + std::to_string(i) + " and " +
                                      std::to_string(j) + " closer than twice the exclusion radius");
}

double PunctureSet::distance(Complex z) const {
    double best = std::numeric_limits<double>::infinity();
    for (const Complex& p : points_) best = std::min(best, std::abs(z - p));
    return best;
}

ComplexPath loop_around(Complex p, double radius, double basepoint_angle) {
    if (!(radius > 0.0)) throw ValidationError("loop_around: radius must be positive");
    return ComplexPath::arc(p, radius, basepoint_angle, basepoint_angle + 2.0 * kPi);
}

ComplexPath loop_around(Complex p, double radius, double basepoint_angle,
                        const PunctureSet& punctures) {
    if (radius <= punctures.exclusion_radius())
        throw ValidationError("loop_around: radius inside the exclusion disk");
    for (const Complex& q : punctures.points()) {
        if (std::abs(q - p) <= 1e-12) continue;
        if (std::abs(q - p) <= radius + punctures.exclusion_radius())
            throw ValidationError("loop_around: disk meets the exclusion disk of another puncture");
    }
    return loop_around(p, radius, basepoint_angle);
}

double distance_to_path(const ComplexPath& path, Complex q) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& piece : path.pieces()) best = std::min(best, piece_distance(piece, q));
    return best;
}

double nearest_parameter(const ComplexPath& path, Complex q) {
    constexpr int samples = 2048;
    int best = 0;
    double best_d = std::abs(path.eval(0.0).point - q);
    for (int j = 1; j <= samples; ++j) {
        const double dist = std::abs(path.eval(static_cast<double>(j) / samples).point - q);
        if (dist < best_d) {
            best_d = dist;
            best = j;
        }
    }
    double lo = std::max(0.0, (best - 1.0) / samples), hi = std::min(1.0, (best + 1.0) / samples);
    // golden-section search; the distance is unimodal on this bracket
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 80; ++it) {
        const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
        if (std::abs(path.eval(a).point - q) < std::abs(path.eval(b).point - q))
            hi = b;
        else
            lo = a;
    }
    return 0.5 * (lo + hi);
}

double exit_parameter(const ComplexPath& path, Complex center, double r, bool from_end) {
    auto outside = [&](double t) { return std::abs(path.eval(t).point - center) >= r; };
    constexpr int samples = 4096;
    for (int j = 1; j <= samples; ++j) {
        const double t = from_end ? 1.0 - static_cast<double>(j) / samples
                                  : static_cast<double>(j) / samples;
        if (!outside(t)) continue;
        double lo = from_end ? t + 1.0 / samples : t - 1.0 / samples;  // inside
        double hi = t;                                                // outside
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (outside(mid) ? hi : lo) = mid;
        }
        return hi;
    }
    return from_end ? 0.0 : 1.0;
}

double min_distance_to_punctures(const ComplexPath& path, const PunctureSet& punctures) {
    double best = std::numeric_limits<double>::infinity();
    for (const Complex& p : punctures.points()) best = std::min(best, distance_to_path(path, p));
    return best;
}

ThirdKindForm::ThirdKindForm(Complex x_, Complex o_) : x(x_), o(o_) {
    if (std::abs(x - o) <= 1e-12) throw ValidationError("third-kind form: x and o must differ");
}

Complex third_kind_eval(const ThirdKindForm& form, Complex y) {
    if (std::abs(y - form.x) <= 1e-300 || std::abs(y - form.o) <= 1e-300)
        throw ValidationError("third_kind_eval: evaluation at a pole");
    return 1.0 / (y - form.x) - 1.0 / (y - form.o);
}

Complex contour_integral(const ComplexPath& path, const std::function<Complex(Complex)>& f,
                         double tol) {
    auto integrand = [&](double t) {
        const PathPoint pt = path.eval(t);
        return f(pt.point) * pt.velocity;
    };
    const auto br = path.breakpoints();
    return quadrature::integrate<Complex>(integrand, std::vector<double>(br.begin(), br.end()),
                                          tol, tol)
        .value;
}

Complex winding_number(const ComplexPath& path, Complex p) {
    if (distance_to_path(path, p) == 0.0) throw ValidationError("winding_number: point on path");
    return contour_integral(path, [p](Complex z) { return 1.0 / (z - p); }) / (2.0 * kPi * kI);
}

double tracked_argument(const ComplexPath& path, Complex p) {
    const double scale = std::max(1.0, std::abs(p));
    const auto pieces = path.pieces();
    std::size_t first = 0;
    double theta = 0.0;
    if (std::abs(path.start() - p) <= 1e-13 * scale) {
        // the first piece leaves p along its initial tangent
        const PathPiece& piece = pieces.front();
        theta = std::arg(piece.derivative(0.0));
        if (piece.kind == PathPiece::Kind::line) {
            first = 1;
        } else {
            // an arc through p: continue from a point slightly past the start
            const Complex w = piece.point(1e-6) - p;
            theta += wrap(std::arg(w) - theta);
            const PathPiece rest = restrict_piece(piece, 1e-6, 1.0);
            const double dist = std::max(piece_distance(rest, p), 1e-300);
            const double span = std::abs(rest.to_angle - rest.from_angle) * rest.radius;
            const int n = static_cast<int>(std::min(1e6, std::ceil(4.0 * span / dist))) + 4;
            Complex prev = rest.point(0.0) - p;
            for (int k = 1; k <= n; ++k) {
                const Complex cur = rest.point(static_cast<double>(k) / n) - p;
                theta += std::arg(cur / prev);
                prev = cur;
            }
            first = 1;
        }
    } else {
        theta = std::arg(path.start() - p);
    }
    for (std::size_t i = first; i < pieces.size(); ++i) {
        const PathPiece& piece = pieces[i];
        const double dist = piece_distance(piece, p);
        if (dist <= 1e-13 * scale)
            throw ValidationError("tracked_argument: path passes through the point");
        if (piece.kind == PathPiece::Kind::line) {
            theta += std::arg((piece.b - p) / (piece.a - p));
            continue;
        }
        const int n = static_cast<int>(std::min(1e6, std::ceil(4.0 * piece.length() / dist))) + 4;
        Complex prev = piece.point(0.0) - p;
        for (int k = 1; k <= n; ++k) {
            const Complex cur = piece.point(static_cast<double>(k) / n) - p;
            theta += std::arg(cur / prev);
            prev = cur;
        }
    }
    return theta;
}

}  // namespace qgeom
