#include <doctest.h>

#include "fixtures.hpp"
#include "qgeom/envelope_sections.hpp"

using namespace qgeom;
using testfx::m2;

namespace {

EnvelopeSectionSpec sl2_spec(const Matrix& e) {
    const GaugePotential phi = testfx::two_pole();
    return {phi, AdjointElement(e, phi.algebra()), -1.0, {}, {}, Complex(-0.4, 0.6)};
}

const Matrix kE = m2(Complex(0.3, 0.1), 0.7, 0.4, Complex(-0.3, -0.1));
const std::vector<Complex> kGrid = {{-0.5, 0.5}, {-0.3, 0.5}, {-0.5, 0.7}, {-0.7, 0.5}, {-0.4, 0.4}};

}  // namespace

TEST_SUITE("envelope_sections") {

TEST_CASE("counterterm of regular cells") {
    const GaugePotential phi = testfx::three_pole();
    const auto path = ComplexPath::polyline({Complex(-0.5, -0.5), Complex(0.3, -0.2), Complex(0.4, 0.4)});
    const QuantumTrajectory central(phi, {Cell{1.0, path, FlatSectionGerm::adjoint(path.start(),
                                                              AdjointElement::general(Matrix::Identity(2, 2) * 0.7))}});
    CHECK(counterterm(central).norm() < 1e-14);

    const AdjointElement e(kE, phi.algebra());
    const QuantumTrajectory open(phi, {Cell{1.0, path, FlatSectionGerm::adjoint(path.start(), e)}});
    const Matrix end = transport_adjoint(phi, path, FlatSectionGerm::adjoint(path.start(), e)).end_value;
    CHECK((counterterm(open) - (end - kE)).norm() < 1e-8);

    // appending a cycle adds its own integral and leaves the boundary alone
    const auto loop = loop_around(-1.0, 0.5, 0.0);
    const Matrix m = monodromy(phi, loop).matrix();
    const QuantumTrajectory cycle(phi, {Cell{1.0, loop, FlatSectionGerm::adjoint(loop.start(),
                                                         AdjointElement(m - Matrix::Identity(2, 2) * (m.trace() / 2.0), phi.algebra()))}});
    CHECK((counterterm(open + cycle) - counterterm(open) - counterterm(cycle)).norm() < 1e-12);
    CHECK(boundary_1(open + cycle).divisor.distance(boundary_1(open).divisor) < 1e-6);
}

TEST_CASE("envelope minus transported section is constant") {
    const auto spec = sl2_spec(kE);
    Matrix first;
    for (const Complex& z : kGrid) {
        const auto ev = evaluate_envelope(spec, z);
        CHECK(ev.gate.integrand_order == 1);
        const Matrix diff = ev.value - ev.transported;
        if (first.size() == 0) first = diff;
        CHECK((diff - first).norm() <= 1e-7);
    }
}

TEST_CASE("homotopic routes agree") {
    auto spec = sl2_spec(kE);
    auto alt = spec;
    alt.route = {Complex(-1.2, 0.8)};
    auto below = spec;
    below.route = {Complex(-0.9, 0.3), Complex(-0.6, 0.2)};
    for (const Complex& z : {kGrid[0], kGrid[2]}) {
        const Matrix a = envelope_section(spec, z);
        CHECK((a - envelope_section(alt, z)).norm() <= 1e-7);
        CHECK((a - envelope_section(below, z)).norm() <= 1e-7);
    }
}

TEST_CASE("central element gives a constant envelope") {
    const auto spec = sl2_spec(Matrix::Zero(2, 2));
    CHECK(envelope_flatness_residual(spec, kGrid[0], 0.05) <= 1e-10);
    CHECK(envelope_section(spec, kGrid[0]).norm() == 0.0);
}

TEST_CASE("flatness defect is the bracket with the constant offset") {
    // M = M_E + C with C constant, so dM - [Phi, M] = -[Phi, C].
    const auto spec = sl2_spec(kE);
    const Complex z = kGrid[0];
    const double rho = 0.05;
    Matrix derivative = Matrix::Zero(2, 2);
    for (int j = 0; j < 16; ++j) {
        const Complex w = std::polar(1.0, 2.0 * kPi * j / 16);
        derivative += envelope_section(spec, z + rho * w) * std::conj(w);
    }
    derivative /= 16.0 * rho;
    const auto ev = evaluate_envelope(spec, z);
    const Matrix c = ev.value - ev.transported;
    const Matrix phi = spec.phi(z);
    const Matrix defect = derivative - (phi * ev.value - ev.value * phi);
    CHECK((defect + (phi * c - c * phi)).norm() <= 1e-7 * (derivative.norm() + phi.norm() * ev.value.norm()));
}

TEST_CASE("residual scan decreases towards the pole") {
    const auto spec = sl2_spec(kE);
    const Complex z = kGrid[0], p = spec.anchor_pole;
    const auto scan = envelope_residual_scan(spec, z, {p + 0.1 * (z - p), p + 0.03 * (z - p), p + 0.01 * (z - p), p + 0.003 * (z - p)});
    for (std::size_t k = 1; k < scan.size(); ++k) CHECK(scan[k] < scan[k - 1]);
    // truncation-dominated: linear in |q - p|
    CHECK(scan[0] / scan[2] > 5.0);
}

TEST_CASE("anchor must be a pole") {
    const GaugePotential zero(testfx::kSl2, {});
    const EnvelopeSectionSpec spec{zero, AdjointElement(kE, zero.algebra()), 0.0, {}, {}, Complex(0.5, 0.5)};
    CHECK_THROWS_AS(envelope_section(spec, Complex(0.5, 0.3)), ValidationError);
    CHECK_THROWS_AS(envelope_residual_scan(spec, Complex(0.5, 0.3), {Complex(0.01, 0.0)}), ValidationError);
}

}
