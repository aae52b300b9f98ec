#include "qgeom/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace qgeom {

namespace {

constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
constexpr double e1 = b1 - 5179.0 / 57600.0, e3 = b3 - 7571.0 / 16695.0, e4 = b4 - 393.0 / 640.0,
                 e5 = b5 + 92097.0 / 339200.0, e6 = b6 - 187.0 / 2100.0, e7 = -1.0 / 40.0;

// Shampine's continuous extension of order 4: y(t + s h) = y + h sum_i w_i(s) k_i.
std::array<double, 7> dense_weights(double s) {
    const double A = s * s * (3.0 - 2.0 * s);
    const double B = s * s * (s - 1.0);
    const double C = s * s * (s - 1.0) * (s - 1.0);
    const double D = s * (s - 1.0) * (s - 1.0);
    const double x1 = 5.0 * (2558722523.0 - 31403016.0 * s) / 11282082432.0;
    const double x3 = 100.0 * (882725551.0 - 15701508.0 * s) / 32700410799.0;
    const double x4 = 25.0 * (443332067.0 - 31403016.0 * s) / 1880347072.0;
    const double x5 = 32805.0 * (23143187.0 - 3489224.0 * s) / 199316789632.0;
    const double x6 = 55.0 * (29972135.0 - 7076736.0 * s) / 822651844.0;
    const double x7 = 10.0 * (7414447.0 - 829305.0 * s) / 29380423.0;
    return {A * b1 - C * x1 + D, 0.0,          A * b3 + C * x3, A * b4 - C * x4,
            A * b5 + C * x5,     A * b6 - C * x6, B + C * x7};
}

// d/ds of dense_weights.
std::array<double, 7> dense_weight_slopes(double s) {
    const double dA = 6.0 * s - 6.0 * s * s;
    const double dB = 3.0 * s * s - 2.0 * s;
    const double C = s * s * (s - 1.0) * (s - 1.0);
    const double dC = 2.0 * s * (s - 1.0) * (s - 1.0) + 2.0 * s * s * (s - 1.0);
    const double dD = (s - 1.0) * (s - 1.0) + 2.0 * s * (s - 1.0);
    const double x1 = 5.0 * (2558722523.0 - 31403016.0 * s) / 11282082432.0,
                 dx1 = -5.0 * 31403016.0 / 11282082432.0;
    const double x3 = 100.0 * (882725551.0 - 15701508.0 * s) / 32700410799.0,
                 dx3 = -100.0 * 15701508.0 / 32700410799.0;
    const double x4 = 25.0 * (443332067.0 - 31403016.0 * s) / 1880347072.0,
                 dx4 = -25.0 * 31403016.0 / 1880347072.0;
    const double x5 = 32805.0 * (23143187.0 - 3489224.0 * s) / 199316789632.0,
                 dx5 = -32805.0 * 3489224.0 / 199316789632.0;
    const double x6 = 55.0 * (29972135.0 - 7076736.0 * s) / 822651844.0,
                 dx6 = -55.0 * 7076736.0 / 822651844.0;
    const double x7 = 10.0 * (7414447.0 - 829305.0 * s) / 29380423.0,
                 dx7 = -10.0 * 829305.0 / 29380423.0;
    return {dA * b1 - dC * x1 - C * dx1 + dD,
            0.0,
            dA * b3 + dC * x3 + C * dx3,
            dA * b4 - dC * x4 - C * dx4,
            dA * b5 + dC * x5 + C * dx5,
            dA * b6 - dC * x6 - C * dx6,
            dB + dC * x7 + C * dx7};
}

}  // namespace

std::vector<double> DenseSolution::mesh() const {
    std::vector<double> out;
    out.reserve(steps_.size() + 1);
    for (const auto& step : steps_) out.push_back(step.t);
    out.push_back(end_t_);
    return out;
}

std::size_t DenseSolution::find(double t) const {
    auto it = std::upper_bound(steps_.begin(), steps_.end(), t,
                               [](double v, const Step& s) { return v < s.t; });
    if (it == steps_.begin()) return 0;
    return static_cast<std::size_t>(it - steps_.begin()) - 1;
}

Matrix DenseSolution::value(double t) const {
    const Step& st = steps_[find(t)];
    const double s = std::clamp((t - st.t) / st.h, 0.0, 1.0);
    const auto w = dense_weights(s);
    Matrix y = st.y;
    for (int i = 0; i < 7; ++i)
        if (w[static_cast<std::size_t>(i)] != 0.0) y += (st.h * w[static_cast<std::size_t>(i)]) * st.k[static_cast<std::size_t>(i)];
    return y;
}

Matrix DenseSolution::derivative(double t) const {
    const Step& st = steps_[find(t)];
    const double s = std::clamp((t - st.t) / st.h, 0.0, 1.0);
    const auto w = dense_weight_slopes(s);
    Matrix dy = Matrix::Zero(st.y.rows(), st.y.cols());
    for (std::size_t i = 0; i < 7; ++i)
        if (w[i] != 0.0) dy += w[i] * st.k[i];
    return dy;
}

DenseSolution integrate_dopri5(const MatrixRhs& f, std::span<const double> knots, Matrix y0,
                               const OdeOptions& options) {
    if (knots.size() < 2) throw ValidationError("ode: need at least two knots");
    if (!(options.rel_tol > 0.0)) throw ValidationError("ode: tolerance must be positive");
    const double rtol = options.rel_tol;
    const double atol = options.abs_tol > 0.0 ? options.abs_tol : rtol * 1e-12;
    constexpr double eps = std::numeric_limits<double>::epsilon();

    DenseSolution sol;
    Matrix y = std::move(y0);
    int total = 0;
    for (std::size_t seg = 0; seg + 1 < knots.size(); ++seg) {
        const double ta = knots[seg], tb = knots[seg + 1];
        if (!(tb > ta)) continue;
        double t = ta;
        Matrix k1 = f(t, y);

        // initial step from the ratio |y| / |y'|
        const double d0 = y.norm(), d1 = k1.norm();
        double h = (d0 > 1e-5 && d1 > 1e-5) ? 0.01 * d0 / d1 : 1e-3 * (tb - ta);
        h = std::min({h, tb - ta, 0.1 * (tb - ta) + 1e-3});
        h = std::max(h, 1e-6 * (tb - ta));

        while (t < tb) {
            if (++total > options.max_steps)
                throw NumericalError("transport: exceeded " + std::to_string(options.max_steps) +
                                     " steps");
            bool last = false;
            if (t + h >= tb || tb - (t + h) < 1e-12 * (tb - ta)) {
                h = tb - t;
                last = true;
            }
            const Matrix k2 = f(t + c2 * h, y + h * (a21 * k1));
            const Matrix k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
            const Matrix k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
            const Matrix k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            const Matrix k6 =
                f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            Matrix y1 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            const Matrix k7 = f(t + h, y1);
            const Matrix delta = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            if (!y1.allFinite())
                throw NumericalError("transport: solution overflow near t = " + std::to_string(t));
            const double scale = atol + rtol * std::max(y.norm(), y1.norm());
            const double err = delta.norm() / scale;
            if (err <= 1.0) {
                DenseSolution::Step step;
                step.t = t;
                step.h = h;
                step.y = y;
                step.k = {k1, k2, k3, k4, k5, k6, k7};
                sol.steps_.push_back(std::move(step));
                t = last ? tb : t + h;
                y = std::move(y1);
                k1 = k7;
                if (last) break;
            }
            const double factor =
                err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            h *= factor;
            if (h < 8.0 * eps * std::max(1.0, std::abs(t)))
                throw NumericalError("transport: step-size underflow near t = " + std::to_string(t));
        }
    }
    if (sol.steps_.empty()) throw ValidationError("ode: empty integration range");
    sol.end_t_ = knots.back();
    sol.end_y_ = y;

    // defect of the continuous extension at step midpoints
    double residual = 0.0;
    for (const auto& step : sol.steps_) {
        const double tm = step.t + 0.5 * step.h;
        const auto w = dense_weights(0.5);
        const auto dw = dense_weight_slopes(0.5);
        Matrix ym = step.y, dym = Matrix::Zero(step.y.rows(), step.y.cols());
        for (std::size_t i = 0; i < 7; ++i) {
            ym += (step.h * w[i]) * step.k[i];
            dym += dw[i] * step.k[i];
        }
        const double denom = std::max(ym.norm(), atol);
        residual = std::max(residual, step.h * (dym - f(tm, ym)).norm() / denom);
    }
    sol.residual_ = residual;
    return sol;
}

}  // namespace qgeom
