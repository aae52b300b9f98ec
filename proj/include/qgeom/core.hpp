#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qgeom {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Raised when an input violates a documented precondition: shape mismatches,
/// evaluation on a pole, malformed files. The CLI maps it to exit status 2.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a numerical procedure cannot meet its contract: step-size
/// underflow, quadrature non-convergence, a failed pole-growth gate.
/// The CLI maps it to exit status 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline double frobenius(const Matrix& m) { return m.norm(); }

}  // namespace qgeom
