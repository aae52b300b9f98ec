#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qgeom/reg_integral.hpp"

using namespace qgeom;

namespace {

const Complex kP(0.2, -0.1);
const Complex kZ(1.1, 0.6);

std::vector<Complex> exp_series() {
    std::vector<Complex> c;
    double f = 1.0;
    for (int k = 0; k < 40; ++k) {
        if (k > 0) f *= k;
        c.emplace_back(1.0 / f);
    }
    return c;
}

RegIntegralSpec spec_for(std::function<Complex(Complex)> f, int d, Complex p = kP, Complex z = kZ) {
    return {AnalyticFunction::scalar(std::move(f)), p, z, d, ComplexPath::segment(p, z), {}, {}, 1e-13};
}

}  // namespace

TEST_SUITE("reg_integral") {

TEST_CASE("taylor coefficients") {
    auto c = taylor_coefficients(AnalyticFunction::scalar([](Complex) { return Complex(2.5, -1.0); }), kP, 4, 0.5);
    CHECK(std::abs(c[0](0, 0) - Complex(2.5, -1.0)) < 1e-14);
    for (int k = 1; k <= 4; ++k) CHECK(std::abs(c[k](0, 0)) < 1e-14);

    c = taylor_coefficients(AnalyticFunction::scalar([](Complex x) { return std::exp(x - kP); }), kP, 6, 0.5);
    const auto ref = exp_series();
    for (int k = 0; k <= 6; ++k) CHECK(std::abs(c[k](0, 0) - ref[k]) < 1e-10);

    c = taylor_coefficients(AnalyticFunction::scalar([](Complex x) { return 3.0 - 2.0 * x + 0.5 * x * x; }), 0.0, 5, 1.0);
    CHECK(std::abs(c[0](0, 0) - 3.0) < 1e-14);
    CHECK(std::abs(c[1](0, 0) + 2.0) < 1e-14);
    CHECK(std::abs(c[2](0, 0) - 0.5) < 1e-14);
    CHECK(std::abs(c[3](0, 0)) < 1e-14);

    // a pole inside the claimed disk is caught by the radius cross-check
    CHECK_THROWS_AS(taylor_coefficients(AnalyticFunction::scalar([](Complex x) { return 1.0 / (x - 0.3); }), 0.0, 3, 0.5),
                    NumericalError);
}

TEST_CASE("agreement with the series oracle") {
    const std::vector<std::pair<const char*, std::vector<Complex>>> cases = {
        {"one", {1.0}}, {"linear", {0.0, 1.0}}, {"square", {0.0, 0.0, 1.0}}, {"exp", exp_series()}};
    for (const auto& [name, series] : cases) {
        for (int d = 0; d <= 2; ++d) {
            CAPTURE(name);
            CAPTURE(d);
            const auto s = series;
            auto f = [s](Complex x) {
                Complex sum = 0.0, w = 1.0;
                for (const Complex& c : s) {
                    sum += c * w;
                    w *= x - kP;
                }
                return sum;
            };
            const Complex got = regularized_integral(spec_for(f, d))(0, 0);
            CHECK(std::abs(got - oracles::series_regint_oracle(series, kP, kZ, d)) < 1e-10);
        }
    }
}

TEST_CASE("regularisation is inert on integrands vanishing to order d+1") {
    for (int d = 0; d <= 3; ++d) {
        const Complex got = regularized_integral(spec_for([d](Complex x) { return std::pow(x - kP, d + 1); }, d))(0, 0);
        CHECK(std::abs(got - (kZ - kP)) < 1e-10);
    }
}

TEST_CASE("curved path with winding tracks the logarithm branch") {
    // once around p and then to z: ln picks up 2 pi i
    const Complex p = 0.0, z = 1.0;
    const auto path = ComplexPath::segment(p, 0.5).then(loop_around(p, 0.5, 0.0)).then(ComplexPath::segment(0.5, z));
    RegIntegralSpec spec{AnalyticFunction::scalar([](Complex) { return Complex(1.0); }), p, z, 0, path, {}, {}, 1e-13};
    CHECK(std::abs(regularized_integral(spec)(0, 0) - 2.0 * kPi * kI) < 1e-10);
}

TEST_CASE("envelope family tends to the regularised integral") {
    const RegularizedIntegrator one(spec_for([](Complex) { return Complex(1.0); }, 0));
    for (double s : {1e-1, 1e-3}) CHECK(std::abs(one.family(kP + s * (kZ - kP))(0, 0) - std::log(kZ - kP)) < 1e-12);
    const RegularizedIntegrator one_d1(spec_for([](Complex) { return Complex(1.0); }, 1));
    CHECK(std::abs(one_d1.family(kP + 0.01 * (kZ - kP))(0, 0) + 1.0 / (kZ - kP)) < 1e-10);

    for (int d = 0; d <= 2; ++d) {
        const RegularizedIntegrator integ(spec_for([](Complex x) { return std::exp(x - kP); }, d));
        const Matrix value = integ.value();
        const Complex dir = (kZ - kP) / std::abs(kZ - kP);
        std::vector<double> xs, ys;
        for (double s : {1e-3, 1e-2, 1e-1}) {
            xs.push_back(std::log(s));
            ys.push_back(std::log((integ.family(kP + s * dir) - value).norm()));
        }
        const double slope = (ys[2] - ys[0]) / (xs[2] - xs[0]);
        CAPTURE(d);
        CHECK(slope >= 0.9);
    }
}

TEST_CASE("envelope condition residual") {
    const RegularizedIntegrator quad(spec_for([](Complex x) { return 1.0 + (x - kP) + 3.0 * (x - kP) * (x - kP); }, 1));
    for (double s : {1e-1, 1e-2}) CHECK(quad.condition_residual(kP + s * (kZ - kP)).norm() < 1e-8);

    const RegularizedIntegrator integ(spec_for([](Complex x) { return std::exp(x - kP); }, 0));
    const Complex dir = (kZ - kP) / std::abs(kZ - kP);
    for (double s : {1e-3, 1e-2, 1e-1}) {
        const Complex q = kP + s * dir;
        const Complex closed = integ.condition_closed_form(q)(0, 0);
        CHECK(std::abs(integ.condition_residual(q)(0, 0) - closed) < 1e-6 * std::abs(closed));
    }
    const Complex q = kP + 1e-4 * dir;
    CHECK(std::abs(integ.condition_closed_form(q)(0, 0) / (q - kP) + 0.5) < 1e-4);
}

}
