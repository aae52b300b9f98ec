#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "qgeom/sphere_geometry.hpp"

namespace qgeom {

/// A (matrix- or scalar-) valued function analytic on the disk of the given
/// radius around the expansion point it is used with. Scalars are 1x1.
struct AnalyticFunction {
    std::function<Matrix(Complex)> evaluator;
    double radius = std::numeric_limits<double>::infinity();
    /// Relative accuracy of the evaluator's values; sets the stability and
    /// consistency thresholds of the Cauchy sums.
    double accuracy = 1e-15;
    /// Optional fast path: the values at p + r exp(2 pi i j / n), j = 0..n-1.
    std::function<std::vector<Matrix>(double r, int n)> circle_samples;

    static AnalyticFunction scalar(std::function<Complex(Complex)> f,
                                   double radius = std::numeric_limits<double>::infinity());
};

/// f^{(k)}(p)/k! for k = 0..up_to from trapezoid sums of the Cauchy integral
/// on |zeta - p| = radius. The node count starts at max(8 (up_to + 1), 32) and
/// doubles until the coefficients are stable; the result is cross-checked
/// against the same computation at radius / 2. Throws NumericalError when
/// that check fails (f is not analytic on the disk).
std::vector<Matrix> taylor_coefficients(const AnalyticFunction& f, Complex p, int up_to,
                                        double radius);

/// The integral of f(zeta) dzeta / (zeta - p)^{d+1} along `path`, from the
/// singular endpoint p to the regular endpoint z.
struct RegIntegralSpec {
    AnalyticFunction f;
    Complex p;
    Complex z;
    int d = 0;
    ComplexPath path;
    /// Optional f(path(t)); used on the path instead of the evaluator.
    std::function<Matrix(double)> path_values;
    /// Optional extra quadrature breakpoints in the path parameter.
    std::vector<double> mesh;
    double tol = 1e-13;
};

/// Evaluates the regularised integral and its family of counter-termed
/// primitives, sharing one set of Taylor coefficients at p.
class RegularizedIntegrator {
public:
    explicit RegularizedIntegrator(RegIntegralSpec spec);

    const RegIntegralSpec& spec() const { return spec_; }
    /// c_k = f^{(k)}(p)/k!, k = 0..d+1 and beyond (series tail).
    const std::vector<Matrix>& coefficients() const { return c_; }
    /// ln|z - p| + i * (argument tracked along the path).
    Complex log_z() const { return log_z_; }

    /// int (f - T_d f)/(zeta - p)^{d+1} - sum_{k<d} c_k (z-p)^{-(d-k)}/(d-k) + c_d ln(z - p)
    Matrix value() const;
    /// int_q^z f/(zeta - p)^{d+1} - sum_{k<d} c_k (q-p)^{-(d-k)}/(d-k) + c_d ln(q - p)
    ///   + c_{d+1} (q - p)
    Matrix family(Complex q) const;
    /// d/dq of family(q) by Richardson-extrapolated central differences.
    Matrix condition_residual(Complex q) const;
    /// (-f(q) + sum_{k<=d+1} c_k (q-p)^k) / (q-p)^{d+1}
    Matrix condition_closed_form(Complex q) const;

private:
    Matrix eval_f(Complex zeta) const;
    Matrix counterterms(Complex q, Complex log_q) const;
    std::vector<double> breaks(double t0, double t1) const;

    RegIntegralSpec spec_;
    std::vector<Matrix> c_;
    double taylor_radius_ = 0.0;
    double near_radius_ = 0.0;
    double split_t_ = 0.0;
    Complex log_z_;
};

Matrix regularized_integral(const RegIntegralSpec& spec);
Matrix envelope_family(const RegIntegralSpec& spec, Complex q);
Matrix envelope_condition_residual(const RegIntegralSpec& spec, Complex q);

}  // namespace qgeom
