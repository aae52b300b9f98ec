#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "qgeom/lie_numerics.hpp"

using namespace qgeom;

namespace {

Matrix m2(Complex a, Complex b, Complex c, Complex d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

}  // namespace

TEST_SUITE("lie_numerics") {

TEST_CASE("commutator examples") {
    const Matrix x = m2(1, 0, 0, -1), y = m2(0, 1, 0, 0);
    CHECK((commutator(x, y) - m2(0, 2, 0, 0)).norm() == 0.0);
    CHECK(commutator(x, x).norm() == 0.0);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    Matrix a(3, 3), b(3, 3);
    for (int i = 0; i < 9; ++i) {
        a(i / 3, i % 3) = Complex(g(rng), g(rng));
        b(i / 3, i % 3) = Complex(g(rng), g(rng));
    }
    CHECK(std::abs(commutator(a, b).trace()) < 1e-13);
    CHECK_THROWS_AS(commutator(a, x), ValidationError);
}

TEST_CASE("adjoint action") {
    const Matrix e = m2(0, 1, 0, 0);
    CHECK((adjoint_action(Matrix::Identity(2, 2), e) - e).norm() < 1e-15);
    CHECK((adjoint_action(m2(2, 0, 0, 0.5), e) - m2(0, 4, 0, 0)).norm() < 1e-14);
    const Matrix g = m2(1, 2, Complex(0, 1), 3);
    const Matrix f = m2(0.3, 1, -2, 0.7);
    CHECK(std::abs(adjoint_action(g, f).trace() - f.trace()) < 1e-13);
    CHECK_THROWS_AS(adjoint_action(m2(1, 1, 1, 1), f), NumericalError);
}

TEST_CASE("algebra validation") {
    const AlgebraSpec sl2(Family::sl, 2);
    CHECK_THROWS_AS(AdjointElement(m2(1, 0, 0, 0), sl2), ValidationError);
    CHECK_NOTHROW(AdjointElement(m2(1, 0, 0, -1), sl2));
    CHECK_THROWS_AS(family_from_string("so"), ValidationError);
    CHECK_THROWS_AS(GroupElement(m2(1, 2, 2, 4)), ValidationError);
}

TEST_CASE("joint commutant dimensions match the dense oracle") {
    const Matrix d = m2(1, 0, 0, 2), swap = m2(0, 1, 1, 0);
    CHECK(joint_commutant(std::vector<GroupElement>{GroupElement::identity(2)}).size() == 4);
    CHECK(joint_commutant(std::vector<GroupElement>{GroupElement(d)}).size() == 2);
    CHECK(joint_commutant(std::vector<GroupElement>{GroupElement(d), GroupElement(swap)}).size() == 1);
    CHECK(joint_commutant(std::vector<GroupElement>{}, 3).size() == 9);

    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + trial % 3;
        std::vector<GroupElement> gs;
        std::vector<oracles::Matrix> ms;
        const int count = 1 + trial % 2;
        for (int k = 0; k < count; ++k) {
            Matrix m(n, n);
            for (int i = 0; i < n * n; ++i) m(i / n, i % n) = Complex(g(rng), g(rng));
            if (trial % 4 == 3) {
                m = Matrix::Identity(n, n);
                m(0, 0) = 2.0;
            }
            gs.emplace_back(m);
            ms.push_back(m);
        }
        const auto basis = joint_commutant(gs, n);
        CHECK(static_cast<int>(basis.size()) == oracles::dense_commutant_oracle(ms).dimension);
        for (const auto& e : basis)
            for (const auto& m : ms) CHECK((m * e.matrix() - e.matrix() * m).norm() < 1e-8);
    }
}

TEST_CASE("matrix exponential") {
    CHECK((matrix_exp(Matrix::Zero(2, 2)) - Matrix::Identity(2, 2)).norm() == 0.0);
    const AdjointElement a(m2(0.25, 0, 0, -0.25), AlgebraSpec(Family::sl, 2));
    const Matrix e = matrix_exp(a, 2.0 * kPi * kI).matrix();
    CHECK((e - m2(kI, 0, 0, -kI)).norm() < 1e-14);
    const Matrix b = m2(0.3, Complex(1, 1), -0.5, Complex(0.2, 0.4));
    CHECK(std::abs(matrix_exp(b).determinant() - std::exp(b.trace())) < 1e-13);
    CHECK((matrix_exp(b) - oracles::constant_system_oracle(b, 0.0, 1.0)).norm() < 1e-13);
    CHECK_THROWS_AS(matrix_exp(m2(1000, 0, 0, 0)), NumericalError);
}

}
