#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "qgeom/core.hpp"

namespace qgeom {

/// Right-hand side y' = f(t, y) of a matrix ODE.
using MatrixRhs = std::function<Matrix(double, const Matrix&)>;

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;  // 0 selects rel_tol * 1e-12
    int max_steps = 200000;
};

/// Accepted steps of a Dormand-Prince 5(4) integration with the stage data
/// needed for its continuous extension.
class DenseSolution {
public:
    struct Step {
        double t = 0.0, h = 0.0;
        Matrix y;
        std::array<Matrix, 7> k;  // stage derivatives, k[6] = f(t + h, y_next)
    };

    double t0() const { return steps_.front().t; }
    double t1() const { return end_t_; }
    const Matrix& end_value() const { return end_y_; }
    std::size_t size() const { return steps_.size(); }
    const std::vector<Step>& steps() const { return steps_; }
    /// Left endpoints of the accepted steps followed by the final time.
    std::vector<double> mesh() const;

    Matrix value(double t) const;
    Matrix derivative(double t) const;

    /// max over steps of h * |y_dense'(mid) - f(mid, y_dense(mid))| / |y_dense(mid)|
    double flatness_residual() const { return residual_; }

    friend DenseSolution integrate_dopri5(const MatrixRhs&, std::span<const double>, Matrix,
                                          const OdeOptions&);

private:
    std::size_t find(double t) const;

    std::vector<Step> steps_;
    double end_t_ = 0.0;
    Matrix end_y_;
    double residual_ = 0.0;
};

/// Integrates over the increasing knots t_0 < ... < t_m, restarting the step
/// sequence at every interior knot (where f may be discontinuous).
/// Throws NumericalError on step-size underflow or when max_steps is exceeded.
DenseSolution integrate_dopri5(const MatrixRhs& f, std::span<const double> knots, Matrix y0,
                               const OdeOptions& options = {});

}  // namespace qgeom
