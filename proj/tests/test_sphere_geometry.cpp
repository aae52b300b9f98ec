#include <doctest.h>

#include <cmath>

#include "qgeom/sphere_geometry.hpp"

using namespace qgeom;

TEST_SUITE("sphere_geometry") {

TEST_CASE("path evaluation") {
    const auto seg = ComplexPath::segment(0.0, 1.0);
    const PathPoint mid = seg.eval(0.5);
    CHECK(std::abs(mid.point - 0.5) < 1e-15);
    CHECK(std::abs(mid.velocity - 1.0) < 1e-15);

    const auto circle = ComplexPath::arc(0.0, 1.0, 0.0, 2.0 * kPi);
    const PathPoint q = circle.eval(0.25);
    CHECK(std::abs(q.point - kI) < 1e-14);
    CHECK(std::abs(q.velocity - Complex(-2.0 * kPi, 0.0)) < 1e-12);

    const auto poly = ComplexPath::polyline({0.0, 1.0, Complex(1.0, 1.0)});
    CHECK(std::abs(poly.eval(0.0).point) == 0.0);
    CHECK(std::abs(poly.eval(1.0).point - Complex(1.0, 1.0)) < 1e-15);
    CHECK(std::abs(poly.eval(0.5).point - 1.0) < 1e-15);
    CHECK(poly.length() == doctest::Approx(2.0));
}

TEST_CASE("path operations") {
    const auto poly = ComplexPath::polyline({0.0, 2.0, Complex(2.0, 1.0)});
    const auto rev = poly.reversed();
    for (double t : {0.0, 0.2, 0.7, 1.0}) CHECK(std::abs(rev.eval(t).point - poly.eval(1.0 - t).point) < 1e-14);
    const auto [a, b] = poly.split(0.4);
    CHECK(std::abs(a.end() - b.start()) < 1e-14);
    CHECK(a.length() + b.length() == doctest::Approx(poly.length()));
    const auto joined = a.then(b);
    CHECK(std::abs(joined.eval(0.9).point - poly.eval(0.9).point) < 1e-13);
    const auto sub = poly.subpath(0.2, 0.8);
    CHECK(std::abs(sub.start() - poly.eval(0.2).point) < 1e-14);
    CHECK_THROWS_AS(a.then(ComplexPath::segment(5.0, 6.0)), ValidationError);
    CHECK_THROWS_AS(poly.subpath(0.8, 0.2), ValidationError);
}

TEST_CASE("loops and winding numbers") {
    const auto loop = loop_around(0.0, 1.0, 0.0);
    CHECK(std::abs(loop.start() - 1.0) < 1e-15);
    CHECK(loop.is_closed());
    CHECK(std::abs(winding_number(loop, 0.0) - 1.0) < 1e-12);
    CHECK(std::abs(winding_number(loop, Complex(0.3, -0.4)) - 1.0) < 1e-12);
    CHECK(std::abs(winding_number(loop, 3.0)) < 1e-12);
    const PunctureSet ps({0.0, 0.5});
    CHECK_THROWS_AS(loop_around(0.0, 1.0, 0.0, ps), ValidationError);
    CHECK_NOTHROW(loop_around(0.0, 0.4, 0.0, ps));
}

TEST_CASE("distances") {
    CHECK(distance_to_path(ComplexPath::segment(-1.0, 1.0), kI) == doctest::Approx(1.0));
    CHECK(distance_to_path(ComplexPath::segment(-1.0, 1.0), 0.0) == 0.0);
    const Complex p(0.3, 0.2);
    CHECK(distance_to_path(loop_around(p, 0.25, 1.0), p) == doctest::Approx(0.25));
    CHECK(min_distance_to_punctures(loop_around(p, 0.25, 1.0), PunctureSet({p})) == doctest::Approx(0.25));
    const auto seg = ComplexPath::segment(0.0, 4.0);
    CHECK(nearest_parameter(seg, Complex(1.0, 1.0)) == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(exit_parameter(seg, 0.0, 1.0) == doctest::Approx(0.25).epsilon(1e-9));
    CHECK_THROWS_AS(PunctureSet({0.0, 1e-7}), ValidationError);
}

TEST_CASE("third kind form residues") {
    const ThirdKindForm form(Complex(0.2, 0.1), Complex(-1.0, 2.0));
    auto f = [&](Complex y) { return third_kind_eval(form, y); };
    const Complex rx = contour_integral(loop_around(form.x, 0.3, 0.0), f) / (2.0 * kPi * kI);
    const Complex ro = contour_integral(loop_around(form.o, 0.3, 0.0), f) / (2.0 * kPi * kI);
    CHECK(std::abs(rx - 1.0) < 1e-12);
    CHECK(std::abs(ro + 1.0) < 1e-12);
    const Complex y(1e4, 3e3);
    CHECK(std::abs(f(y) - (form.x - form.o) / (y * y)) < 1e-3 * std::abs((form.x - form.o) / (y * y)));
    CHECK_THROWS_AS(ThirdKindForm(1.0, 1.0), ValidationError);
}

TEST_CASE("tracked argument") {
    const Complex p(0.0, 0.0);
    const auto loop = loop_around(p, 1.0, 0.0);
    CHECK(tracked_argument(loop, p) == doctest::Approx(2.0 * kPi));
    CHECK(tracked_argument(ComplexPath::segment(0.0, kI), 0.0) == doctest::Approx(kPi / 2));
}

}
