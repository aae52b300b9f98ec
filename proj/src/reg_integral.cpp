#include "qgeom/reg_integral.hpp"

#include <algorithm>
#include <cmath>

#include "qgeom/quadrature.hpp"

namespace qgeom {

AnalyticFunction AnalyticFunction::scalar(std::function<Complex(Complex)> f, double radius) {
    AnalyticFunction out;
    out.evaluator = [f = std::move(f)](Complex z) {
        Matrix m(1, 1);
        m(0, 0) = f(z);
        return m;
    };
    out.radius = radius;
    return out;
}

namespace {

std::vector<Matrix> sample_circle(const AnalyticFunction& f, Complex p, double r, int n) {
    if (f.circle_samples) {
        auto out = f.circle_samples(r, n);
        if (static_cast<int>(out.size()) != n)
            throw ValidationError("taylor_coefficients: circle sampler returned the wrong count");
        return out;
    }
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) out.push_back(f.evaluator(p + std::polar(r, 2.0 * kPi * j / n)));
    return out;
}

std::vector<Matrix> cauchy_sums(const std::vector<Matrix>& samples, double r, int up_to) {
    const int n = static_cast<int>(samples.size());
    std::vector<Matrix> c;
    c.reserve(static_cast<std::size_t>(up_to + 1));
    for (int k = 0; k <= up_to; ++k) {
        Matrix acc = Matrix::Zero(samples[0].rows(), samples[0].cols());
        for (int j = 0; j < n; ++j)
            acc += samples[static_cast<std::size_t>(j)] *
                   std::polar(1.0, -2.0 * kPi * static_cast<double>((static_cast<long>(j) * k) % n) / n);
        c.push_back(acc / (static_cast<double>(n) * std::pow(r, k)));
    }
    return c;
}

double sample_max(const std::vector<Matrix>& samples) {
    double m = 0.0;
    for (const auto& s : samples) m = std::max(m, s.norm());
    return m;
}

double scaled_gap(const std::vector<Matrix>& a, const std::vector<Matrix>& b, double r) {
    double gap = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        gap = std::max(gap, (a[k] - b[k]).norm() * std::pow(r, static_cast<double>(k)));
    return gap;
}

// Stable Cauchy coefficients at one radius; returns them with the sample maximum.
std::pair<std::vector<Matrix>, double> stable_coefficients(const AnalyticFunction& f, Complex p,
                                                           int up_to, double r) {
    const double threshold = std::max(1e-12, 10.0 * f.accuracy);
    int n = std::max(8 * (up_to + 1), 32);
    auto samples = sample_circle(f, p, r, n);
    auto coarse = cauchy_sums(samples, r, up_to);
    while (true) {
        std::vector<Matrix> fine_samples;
        if (f.circle_samples) {
            fine_samples = sample_circle(f, p, r, 2 * n);
        } else {
            fine_samples.reserve(static_cast<std::size_t>(2 * n));
            for (int j = 0; j < n; ++j) {
                fine_samples.push_back(samples[static_cast<std::size_t>(j)]);
                fine_samples.push_back(f.evaluator(p + std::polar(r, 2.0 * kPi * (2 * j + 1) / (2 * n))));
            }
        }
        auto fine = cauchy_sums(fine_samples, r, up_to);
        const double fmax = std::max(sample_max(fine_samples), 1e-300);
        if (!std::isfinite(fmax)) throw NumericalError("taylor_coefficients: non-finite samples");
        if (scaled_gap(coarse, fine, r) <= threshold * fmax) return {fine, fmax};
        n *= 2;
        if (n > 8192)
            throw NumericalError("taylor_coefficients: Cauchy sums do not stabilise (f not analytic "
                                 "on the circle?)");
        samples = std::move(fine_samples);
        coarse = std::move(fine);
    }
}

}  // namespace

std::vector<Matrix> taylor_coefficients(const AnalyticFunction& f, Complex p, int up_to,
                                        double radius) {
    if (up_to < 0) throw ValidationError("taylor_coefficients: up_to must be nonnegative");
    if (!(radius > 0.0) || !(radius < f.radius))
        throw ValidationError("taylor_coefficients: radius must lie in (0, analyticity radius)");
    if (!f.evaluator && !f.circle_samples)
        throw ValidationError("taylor_coefficients: function has no evaluator");
    auto [outer, fmax] = stable_coefficients(f, p, up_to, radius);
    auto [inner, inner_max] = stable_coefficients(f, p, up_to, 0.5 * radius);
    const double threshold = std::max(1e-9, 100.0 * f.accuracy);
    if (scaled_gap(outer, inner, 0.5 * radius) > threshold * std::max(fmax, inner_max))
        throw NumericalError("taylor_coefficients: radius-consistency check failed; f is not "
                             "analytic on the declared disk");
    return outer;
}

RegularizedIntegrator::RegularizedIntegrator(RegIntegralSpec spec) : spec_(std::move(spec)) {
    const RegIntegralSpec& s = spec_;
    if (s.d < 0) throw ValidationError("regularized_integral: d must be nonnegative");
    if (!(s.tol > 0.0)) throw ValidationError("regularized_integral: tol must be positive");
    const double scale = std::max(1.0, std::abs(s.p));
    if (std::abs(s.path.start() - s.p) > 1e-10 * scale)
        throw ValidationError("regularized_integral: path must start at p");
    if (std::abs(s.path.end() - s.z) > 1e-10 * std::max(1.0, std::abs(s.z)))
        throw ValidationError("regularized_integral: path must end at z");
    const double zp = std::abs(s.z - s.p);
    if (zp <= 1e-12 * scale) throw ValidationError("regularized_integral: z coincides with p");

    taylor_radius_ = 0.5 * std::min(s.f.radius, zp);
    near_radius_ = 0.25 * taylor_radius_;
    constexpr int tail_terms = 40;
    c_ = taylor_coefficients(s.f, s.p, s.d + 1 + tail_terms, taylor_radius_);

    split_t_ = exit_parameter(s.path, s.p, near_radius_);
    log_z_ = Complex(std::log(zp), tracked_argument(s.path, s.p));
}

Matrix RegularizedIntegrator::eval_f(Complex zeta) const { return spec_.f.evaluator(zeta); }

std::vector<double> RegularizedIntegrator::breaks(double t0, double t1) const {
    std::vector<double> out{t0, t1};
    for (double b : spec_.path.breakpoints())
        if (b > t0 && b < t1) out.push_back(b);
    for (double b : spec_.mesh)
        if (b > t0 && b < t1) out.push_back(b);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](double a, double b) { return b - a < 1e-15; }),
              out.end());
    return out;
}

Matrix RegularizedIntegrator::counterterms(Complex q, Complex log_q) const {
    const int d = spec_.d;
    const Complex w = q - spec_.p;
    Matrix out = c_[static_cast<std::size_t>(d)] * log_q;
    for (int k = 0; k < d; ++k)
        out -= c_[static_cast<std::size_t>(k)] * (std::pow(w, -(d - k)) / static_cast<double>(d - k));
    return out;
}

Matrix RegularizedIntegrator::value() const {
    const RegIntegralSpec& s = spec_;
    const int d = s.d;
    const auto taylor_d = [&](Complex w) {
        Matrix acc = c_[static_cast<std::size_t>(d)];
        for (int k = d - 1; k >= 0; --k) acc = acc * w + c_[static_cast<std::size_t>(k)];
        return acc;
    };

    // near part: termwise antiderivative of the subtracted series
    const Complex w = s.path.eval(split_t_).point - s.p;
    Matrix near = Matrix::Zero(c_[0].rows(), c_[0].cols());
    for (std::size_t k = static_cast<std::size_t>(d) + 1; k < c_.size(); ++k) {
        const int m = static_cast<int>(k) - d;
        near += c_[k] * (std::pow(w, m) / static_cast<double>(m));
    }

    auto integrand = [&](double t) -> Matrix {
        const PathPoint pt = s.path.eval(t);
        const Complex u = pt.point - s.p;
        const Matrix fv = s.path_values ? s.path_values(t) : eval_f(pt.point);
        return (fv - taylor_d(u)) * (pt.velocity / std::pow(u, d + 1));
    };
    const auto far = quadrature::integrate<Matrix>(integrand, breaks(split_t_, 1.0), s.tol * 1e-1,
                                                   s.tol, 20000);
    return near + far.value + counterterms(s.z, log_z_);
}

Matrix RegularizedIntegrator::family(Complex q) const {
    const RegIntegralSpec& s = spec_;
    const int d = s.d;
    const Complex wq = q - s.p;
    if (std::abs(wq) <= 1e-14 * std::max(1.0, std::abs(s.p)))
        throw ValidationError("envelope_family: label q coincides with p");

    const double tq = nearest_parameter(s.path, q);
    const Complex foot = s.path.eval(tq).point;

    Matrix total = Matrix::Zero(c_[0].rows(), c_[0].cols());
    if (tq < 1.0 - 1e-14) {
        const ComplexPath& path = s.path;
        auto integrand = [&](double t) -> Matrix {
            const PathPoint pt = path.eval(t);
            const Matrix fv = s.path_values ? s.path_values(t) : eval_f(pt.point);
            return fv * (pt.velocity / std::pow(pt.point - s.p, d + 1));
        };
        total += quadrature::integrate<Matrix>(integrand, breaks(tq, 1.0), s.tol * 1e-3, s.tol, 20000)
                     .value;
    }
    if (std::abs(q - foot) > 1e-14 * std::max(1.0, std::abs(q))) {
        const Complex h = foot - q;
        auto integrand = [&](double u) -> Matrix {
            const Complex zeta = q + u * h;
            return eval_f(zeta) * (h / std::pow(zeta - s.p, d + 1));
        };
        total += quadrature::integrate<Matrix>(integrand, {0.0, 1.0}, s.tol * 1e-3, s.tol, 20000)
                     .value;
    }

    // ln(q - p) on the branch obtained by following the path to the foot point
    double theta = 0.0;
    if (tq > 1e-12) {
        theta = tracked_argument(s.path.subpath(0.0, tq), s.p);
        theta += std::arg(wq / (foot - s.p));
    } else {
        const Complex tangent = s.path.eval(0.0).velocity;
        theta = std::arg(tangent) + std::arg(wq / tangent);
    }
    const Complex log_q(std::log(std::abs(wq)), theta);
    return total + counterterms(q, log_q) + c_[static_cast<std::size_t>(d) + 1] * wq;
}

Matrix RegularizedIntegrator::condition_residual(Complex q) const {
    const RegIntegralSpec& s = spec_;
    const int d = s.d;
    const Complex wq = q - s.p;
    const double r = std::abs(wq);
    if (r <= 1e-14 * std::max(1.0, std::abs(s.p)))
        throw ValidationError("envelope_condition_residual: label q coincides with p");

    // F(q + h) - F(q - h) = -int_{q-h}^{q+h} f/(zeta-p)^{d+1} + CT(q + h) - CT(q - h)
    auto central = [&](Complex h) -> Matrix {
        const Complex a = q - h;
        const Complex span = 2.0 * h;
        auto integrand = [&](double u) -> Matrix {
            const Complex zeta = a + u * span;
            return eval_f(zeta) * (span / std::pow(zeta - s.p, d + 1));
        };
        Matrix diff =
            -quadrature::integrate<Matrix>(integrand, {0.0, 0.5, 1.0}, 0.0, 1e-15, 4000).value;
        const Complex wp = q + h - s.p, wm = q - h - s.p;
        diff += c_[static_cast<std::size_t>(d)] * std::log(wp / wm);
        for (int k = 0; k < d; ++k)
            diff -= c_[static_cast<std::size_t>(k)] *
                    ((std::pow(wp, -(d - k)) - std::pow(wm, -(d - k))) / static_cast<double>(d - k));
        diff += c_[static_cast<std::size_t>(d) + 1] * span;
        if (!diff.allFinite()) throw NumericalError("envelope_condition_residual: non-finite difference");
        return diff / span;
    };
    const Complex h = 0.25 * wq;
    if (std::abs(h) < 1e-12 * std::max(1.0, std::abs(q)))
        throw NumericalError("envelope_condition_residual: differencing step underflow");
    const Matrix coarse = central(h);
    const Matrix fine = central(0.5 * h);
    return (4.0 * fine - coarse) / 3.0;
}

Matrix RegularizedIntegrator::condition_closed_form(Complex q) const {
    const int d = spec_.d;
    const Complex w = q - spec_.p;
    Matrix taylor = c_[static_cast<std::size_t>(d) + 1];
    for (int k = d; k >= 0; --k) taylor = taylor * w + c_[static_cast<std::size_t>(k)];
    return (taylor - eval_f(q)) / std::pow(w, d + 1);
}

Matrix regularized_integral(const RegIntegralSpec& spec) {
    return RegularizedIntegrator(spec).value();
}

Matrix envelope_family(const RegIntegralSpec& spec, Complex q) {
    return RegularizedIntegrator(spec).family(q);
}

Matrix envelope_condition_residual(const RegIntegralSpec& spec, Complex q) {
    return RegularizedIntegrator(spec).condition_residual(q);
}

}  // namespace qgeom
