#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "qgeom/transport.hpp"

using namespace qgeom;
using testfx::m2;

namespace {

Matrix random_sl2(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Matrix m = m2(Complex(g(rng), g(rng)), Complex(g(rng), g(rng)), Complex(g(rng), g(rng)), 0.0);
    m(1, 1) = -m(0, 0);
    return m;
}

double rel(const Matrix& a, const Matrix& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST_SUITE("transport") {

TEST_CASE("zero potential leaves the initial value") {
    const GaugePotential zero(testfx::kSl2, {});
    const Matrix init = m2(1, 2, 0, 1);
    const auto r = transport_fundamental(zero, ComplexPath::segment(0.0, Complex(1.0, 2.0)), GroupElement(init));
    CHECK((r.end_value - init).norm() < 1e-14);
}

TEST_CASE("constant potential matches the oracle") {
    const AlgebraSpec gl2(Family::gl, 2);
    const Matrix b0 = m2(0.3, 1.0, -0.5, Complex(0.2, 0.4));
    const GaugePotential phi(gl2, {}, {b0});
    for (Complex z1 : {Complex(1.0, 0.5), Complex(-2.0, 1.0), Complex(0.0, -3.0)}) {
        const auto path = ComplexPath::polyline({0.0, Complex(0.5, 1.0), z1});
        const auto r = transport_fundamental(phi, path, GroupElement::identity(2), 1e-10);
        CHECK(rel(r.end_value, oracles::constant_system_oracle(b0, 0.0, z1)) < 1e-9);
    }
}

TEST_CASE("sl2 determinant stays one") {
    const GaugePotential phi = testfx::two_pole();
    const auto path = ComplexPath::polyline({-2.0, Complex(-1.5, 1.5), Complex(1.5, 1.5), 2.0});
    const TransportedSection s(PotentialField::of(phi), path, Matrix::Identity(2, 2), GermKind::fundamental);
    for (int k = 0; k <= 100; ++k) CHECK(std::abs(s.value(k / 100.0).determinant() - 1.0) < 1e-8);
    CHECK(s.flatness_residual() < 1e-8);
}

TEST_CASE("adjoint transport is conjugation by the fundamental solution") {
    const GaugePotential phi = testfx::three_pole();
    const auto path = ComplexPath::polyline({Complex(-2.0, -0.8), Complex(0.0, 0.5), Complex(2.0, -0.3)});
    const Matrix g = transport_fundamental(phi, path, GroupElement::identity(2)).end_value;
    std::mt19937_64 rng(42);
    for (int k = 0; k < 20; ++k) {
        const AdjointElement e(random_sl2(rng), phi.algebra());
        const auto w = transport_adjoint(phi, path, FlatSectionGerm::adjoint(path.start(), e)).end_value;
        CHECK(rel(w, adjoint_action(g, e.matrix())) < 1e-8);
    }
    const AdjointElement zero = AdjointElement::zero(phi.algebra());
    CHECK(transport_adjoint(phi, path, FlatSectionGerm::adjoint(path.start(), zero)).end_value.norm() == 0.0);
    const AdjointElement central = AdjointElement::general(Matrix::Identity(2, 2) * Complex(0.3, 0.1));
    CHECK((transport_adjoint(phi, path, FlatSectionGerm::adjoint(path.start(), central)).end_value -
           central.matrix()).norm() < 1e-14);
    CHECK_THROWS_AS(transport_adjoint(phi, path, FlatSectionGerm::adjoint(path.end(), central)), ValidationError);
}

TEST_CASE("paths must avoid exclusion disks") {
    const GaugePotential phi = testfx::two_pole();
    CHECK_THROWS_AS(transport_fundamental(phi, ComplexPath::segment(-2.0, 0.0), GroupElement::identity(2)),
                    ValidationError);
}

TEST_CASE("monodromy examples") {
    const GaugePotential phi = testfx::three_pole();
    const auto empty = loop_around(Complex(0.0, 2.0), 0.5, 0.0);
    CHECK((monodromy(phi, empty).matrix() - Matrix::Identity(2, 2)).norm() < 1e-8);

    const GaugePotential single(testfx::kSl2, {Pole{0.0, {m2(0.25, 0, 0, -0.25)}}, Pole{3.0, {m2(0, 1, 0, 0)}}});
    const Matrix m = monodromy(single, loop_around(0.0, 0.3, 0.0)).matrix();
    Eigen::ComplexEigenSolver<Matrix> es(m);
    auto ev = es.eigenvalues();
    if (ev(0).imag() < ev(1).imag()) std::swap(ev(0), ev(1));
    CHECK(std::abs(ev(0) - kI) < 1e-6);
    CHECK(std::abs(ev(1) + kI) < 1e-6);
}

TEST_CASE("monodromy is invariant under homotopy and tolerance") {
    const GaugePotential phi = testfx::three_pole();
    const Matrix circle = monodromy(phi, loop_around(-1.0, 0.5, kPi)).matrix();
    const auto square = ComplexPath::polyline({-1.6, Complex(-1.6, -0.6), Complex(-0.4, -0.6), Complex(-0.4, 0.3),
                                               Complex(-1.6, 0.3), -1.6});
    const auto spoke = ComplexPath::segment(-1.5, -1.6);
    const Matrix square_m = monodromy(phi, spoke.then(square).then(spoke.reversed())).matrix();
    CHECK((circle - square_m).norm() < 1e-7);
    const Matrix loose = monodromy(phi, loop_around(-1.0, 0.5, kPi), 1e-6).matrix();
    const Matrix tight = monodromy(phi, loop_around(-1.0, 0.5, kPi), 1e-12).matrix();
    CHECK((loose - tight).norm() < 1e-5);
    CHECK((circle - tight).norm() < 1e-9);
}

TEST_CASE("adjoint monodromy check") {
    const GaugePotential phi = testfx::two_pole();
    const auto loop = loop_around(-1.0, 0.5, 0.0);
    CHECK(adjoint_monodromy_check(phi, loop, AdjointElement::general(Matrix::Identity(2, 2))) < 1e-10);
    CHECK(adjoint_monodromy_check(phi, loop, residue(phi, -1.0)) < 1e-6);

    const GaugePotential three = testfx::three_pole();
    const AdjointElement e(m2(0, 1, 1, 0), three.algebra());
    CHECK(adjoint_monodromy_check(three, loop_around(-1.0, 0.5, 0.0), e) >= 1e-2);
}

TEST_CASE("composite monodromy relation") {
    for (const GaugePotential& phi : {testfx::two_pole(), testfx::three_pole()}) {
        const CompositeMonodromy c = composite_monodromy(phi);
        CHECK(c.loops.size() == phi.poles().size());
        CHECK((c.product - Matrix::Identity(2, 2)).norm() < 1e-6);
        for (const auto& loop : c.loops) CHECK(std::abs(loop.monodromy.determinant() - 1.0) < 1e-8);
    }
    // each loop of the two-pole system is -I
    for (const auto& loop : composite_monodromy(testfx::two_pole()).loops)
        CHECK((loop.monodromy + Matrix::Identity(2, 2)).norm() < 1e-8);
}

}
