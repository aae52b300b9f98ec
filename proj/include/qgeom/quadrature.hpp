#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <tuple>
#include <vector>

#include "qgeom/core.hpp"

namespace qgeom::quadrature {

inline double magnitude(const Complex& v) { return std::abs(v); }
inline double magnitude(const Matrix& v) { return v.norm(); }

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1]. Nodes are
// listed from the outermost inwards; the Gauss nodes are the odd entries.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Result {
    T value;
    double error = 0.0;
    int evaluations = 0;
};

template <class T>
struct Interval {
    double a = 0.0, b = 0.0;
    T value;
    double error = 0.0;
    double scale = 0.0;  // integral of |f|, for the roundoff floor
};

template <class T, class F>
Interval<T> kronrod15(F& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    T center = f(mid);
    T kronrod = center * kKronrodWeights[7];
    T gauss = center * kGaussWeights[3];
    double scale = magnitude(center) * kKronrodWeights[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        T lo = f(mid - dx);
        T hi = f(mid + dx);
        kronrod += (lo + hi) * kKronrodWeights[j];
        scale += (magnitude(lo) + magnitude(hi)) * kKronrodWeights[j];
        if (j % 2 == 1) gauss += (lo + hi) * kGaussWeights[j / 2];
    }
    Interval<T> out;
    out.a = a;
    out.b = b;
    out.value = kronrod * half;
    out.error = magnitude(T((kronrod - gauss) * half));
    out.scale = scale * std::abs(half);
    return out;
}

/// Globally adaptive Gauss-Kronrod integration of f over the partition given
/// by `breaks` (at least two increasing values). Subdivides the interval with
/// the largest error estimate until the total estimate falls below
/// max(abs_tol, rel_tol * |I|) or the roundoff floor of the sum.
template <class T, class F>
Result<T> integrate(F&& f, const std::vector<double>& breaks, double abs_tol, double rel_tol,
                    int max_intervals = 4000) {
    if (breaks.size() < 2) throw ValidationError("quadrature: need at least one interval");
    auto cmp = [](const Interval<T>& x, const Interval<T>& y) { return x.error < y.error; };
    std::priority_queue<Interval<T>, std::vector<Interval<T>>, decltype(cmp)> heap(cmp);

    int evaluations = 0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (breaks[i + 1] <= breaks[i]) continue;
        heap.push(kronrod15<T>(f, breaks[i], breaks[i + 1]));
        evaluations += 15;
    }
    if (heap.empty()) throw ValidationError("quadrature: empty integration range");

    auto totals = [&heap]() {
        auto copy = heap;
        Interval<T> first = copy.top();
        copy.pop();
        T value = first.value;
        double error = first.error, scale = first.scale;
        while (!copy.empty()) {
            value += copy.top().value;
            error += copy.top().error;
            scale += copy.top().scale;
            copy.pop();
        }
        return std::tuple<T, double, double>(value, error, scale);
    };

    // Running sums are recomputed from scratch periodically to avoid drift.
    auto [value, error, scale] = totals();
    int intervals = static_cast<int>(heap.size());
    constexpr double eps = std::numeric_limits<double>::epsilon();
    while (true) {
        const double target = std::max({abs_tol, rel_tol * magnitude(value), 50.0 * eps * scale});
        if (error <= target) break;
        if (intervals >= max_intervals) {
            throw NumericalError("quadrature: no convergence after " + std::to_string(intervals) +
                                 " subintervals (error estimate " + std::to_string(error) +
                                 ", target " + std::to_string(target) + ")");
        }
        Interval<T> worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw NumericalError("quadrature: interval underflow");
        }
        Interval<T> left = kronrod15<T>(f, worst.a, mid);
        Interval<T> right = kronrod15<T>(f, mid, worst.b);
        evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        scale += left.scale + right.scale - worst.scale;
        heap.push(std::move(left));
        heap.push(std::move(right));
        ++intervals;
        if (intervals % 64 == 0) std::tie(value, error, scale) = totals();
    }
    std::tie(value, error, scale) = totals();
    return {value, error, evaluations};
}

/// Fixed n-point Gauss-Legendre rule on [a, b] (nodes via Newton iteration).
template <class T, class F>
T gauss_legendre(F&& f, double a, double b, int n) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    T sum{};
    bool first = true;
    for (int i = 1; i <= (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i - 0.25) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        const bool center = (n % 2 == 1) && i == (n + 1) / 2;
        T term = center ? T(f(mid) * w) : T((f(mid - half * x) + f(mid + half * x)) * w);
        if (first) {
            sum = term;
            first = false;
        } else {
            sum += term;
        }
    }
    return sum * half;
}

}  // namespace qgeom::quadrature
