#include <doctest.h>

#include "fixtures.hpp"
#include "qgeom/deformation.hpp"
#include "qgeom/quadrature.hpp"

using namespace qgeom;
using testfx::m2;

namespace {

QuantumTrajectory loop_cycle(const GaugePotential& phi, const ComplexPath& loop, const Matrix& germ) {
    return QuantumTrajectory(phi, {Cell{1.0, loop, FlatSectionGerm::adjoint(loop.start(), AdjointElement::general(germ))}});
}

const Complex kO(0.0, 3.0);

}  // namespace

TEST_SUITE("deformation") {

TEST_CASE("central coefficient residue law") {
    const GaugePotential phi = testfx::three_pole();
    const Complex c(0.4, -0.7);
    const auto gamma = loop_cycle(phi, loop_around(-1.0, 0.5, 0.0), Matrix::Identity(2, 2) * c);
    CHECK(deformation_potential(gamma, Complex(0.5, -1.0), kO).norm() < 1e-8);
    CHECK((deformation_potential(gamma, Complex(-1.2, 0.1), kO) - 2.0 * kPi * kI * c * Matrix::Identity(2, 2)).norm() < 1e-8);

    const GaugePotential zero(testfx::kSl2, {});
    const Matrix e = m2(0.3, 1, -2, -0.3);
    const auto flat = loop_cycle(zero, ComplexPath::polyline({0.0, 1.0, Complex(1.0, 1.0), Complex(0.0, 1.0), 0.0}), e);
    CHECK((deformation_potential(flat, Complex(0.4, 0.6), kO) - 2.0 * kPi * kI * e).norm() < 1e-8);
}

TEST_CASE("rejects chains that are not cycles") {
    const GaugePotential phi = testfx::three_pole();
    const auto bad = loop_cycle(phi, loop_around(-1.0, 0.5, 0.0), m2(0, 1, 1, 0));
    CHECK_THROWS_AS(DeformationPotentialField(bad, kO), ValidationError);
}

TEST_CASE("contour invariance") {
    const GaugePotential two = testfx::two_pole();
    const Matrix a = residue(two, -1.0).matrix();
    const auto small = loop_cycle(two, loop_around(-1.0, 0.4, 0.0), a);
    const auto large = loop_cycle(two, loop_around(-1.0, 0.6, 0.0), a);
    for (Complex x : {Complex(-1.1, 0.1), Complex(0.5, 1.5)})
        CHECK(homology_invariance_check(small, large, x, kO) <= 1e-8);

    const auto square = loop_cycle(two, ComplexPath::polyline({Complex(-1.5, -0.5), Complex(-0.5, -0.5), Complex(-0.5, 0.5),
                                                               Complex(-1.5, 0.5), Complex(-1.5, -0.5)}), a);
    CHECK(homology_invariance_check(small, square, Complex(0.5, 1.5), kO) <= 1e-7);
    CHECK(homology_invariance_check(small, square, Complex(-1.1, 0.1), kO) <= 1e-7);

    const Matrix c = Matrix::Identity(2, 2);
    const auto left = loop_cycle(two, loop_around(-1.0, 0.4, 0.0), c);
    const auto right = loop_cycle(two, loop_around(1.0, 0.4, 0.0), c);
    CHECK(homology_invariance_check(left, right, Complex(0.9, 0.1), kO) >= 1e-2);
}

TEST_CASE("reference shift") {
    const GaugePotential phi = testfx::three_pole();
    const auto loop = loop_around(-1.0, 0.5, 0.0);
    const Matrix m = monodromy(phi, loop).matrix();
    const auto gamma = loop_cycle(phi, loop, m - Matrix::Identity(2, 2) * (m.trace() / 2.0));
    const std::vector<Complex> xs = {{-1.2, 0.1}, {-0.8, -0.2}, {0.3, 0.4}, {0.0, -1.0}, {1.5, 0.5}};
    const Complex o2(-2.5, -2.0);
    const auto shift = reference_shift_constant(gamma, kO, o2, xs);
    CHECK(shift.spread <= 1e-8);
    const auto same = reference_shift_constant(gamma, kO, kO, xs);
    CHECK(same.constant.norm() == 0.0);
    CHECK(same.spread == 0.0);

    // the constant is the integral of the third-kind form with poles o2 and o
    const DeformationPotentialField field(gamma, kO);
    const ThirdKindForm form(o2, kO);
    const CellSection section(gamma, gamma.cells()[0]);
    const Matrix direct = quadrature::integrate<Matrix>(
        [&](double t) {
            const PathPoint pt = loop.eval(t);
            return Matrix(section.value(t) * (-third_kind_eval(form, pt.point) * pt.velocity));
        },
        section.mesh(), 1e-13, 1e-12).value;
    CHECK((shift.constant - direct).norm() < 1e-8);
}

TEST_CASE("direction") {
    const GaugePotential phi = testfx::three_pole();
    const auto central = loop_cycle(phi, loop_around(-1.0, 0.5, 0.0), Matrix::Identity(2, 2) * Complex(0.2, 0.3));
    CHECK(deform_direction(central, Complex(0.3, -0.6), kO).norm() < 1e-9);
    CHECK(deform_direction(central, Complex(-1.2, 0.1), kO).norm() < 1e-9);

    const GaugePotential zero(testfx::kSl2, {});
    const Matrix e = m2(0.3, 1, -2, -0.3);
    const auto square = loop_cycle(zero, ComplexPath::polyline({0.0, 1.0, Complex(1.0, 1.0), Complex(0.0, 1.0), 0.0}), e);
    const DeformationPotentialField field(square, kO);
    const Complex x(1.5, 0.4);
    const double h = 1e-3;
    const Matrix fd = (8.0 * (field.value(x + h) - field.value(x - h)) - (field.value(x + 2.0 * h) - field.value(x - 2.0 * h))) / (12.0 * h);
    CHECK((field.direction(x) - fd).norm() <= 1e-6 * fd.norm() + 1e-9);

    const auto loop = loop_around(-1.0, 0.5, 0.0);
    const Matrix m = monodromy(phi, loop).matrix();
    const DeformationPotentialField curved(loop_cycle(phi, loop, m - Matrix::Identity(2, 2) * (m.trace() / 2.0)), kO);
    for (Complex y : {Complex(-0.8, 0.1), Complex(-1.15, -0.2)}) {
        const Matrix d = (8.0 * (curved.value(y + h) - curved.value(y - h)) - (curved.value(y + 2.0 * h) - curved.value(y - 2.0 * h))) / (12.0 * h);
        CHECK((curved.derivative(y) - d).norm() <= 1e-6 * d.norm());
        const Matrix f = curved.value(y), p = phi(y);
        CHECK((curved.direction(y) - (curved.derivative(y) + f * p - p * f)).norm() < 1e-12);
    }
}

TEST_CASE("deformed potential uses the direction field") {
    const GaugePotential phi = testfx::three_pole();
    const auto loop = loop_around(-1.0, 0.5, 0.0);
    const Matrix m = monodromy(phi, loop).matrix();
    const auto gamma = loop_cycle(phi, loop, m - Matrix::Identity(2, 2) * (m.trace() / 2.0));
    const DeformationPotentialField field(gamma, kO);
    const DeformedPotential deformed(phi, field.direction_field(), 1e-3);
    const Complex x(0.4, -0.8);
    CHECK((deformed(x) - (phi(x) + 1e-3 * field.direction(x))).norm() < 1e-14);
}

}
