#include "qgeom/connection.hpp"

#include <cmath>
#include <string>

namespace qgeom {

namespace {

void check_coefficient(const Matrix& m, const AlgebraSpec& algebra, const std::string& where) {
    if (m.rows() != algebra.n || m.cols() != algebra.n)
        throw ValidationError(where + ": expected a " + std::to_string(algebra.n) + "x" +
                              std::to_string(algebra.n) + " matrix");
    if (!m.allFinite()) throw ValidationError(where + ": non-finite entries");
    if (!algebra.contains(m)) throw ValidationError(where + ": trace must vanish for sl");
}

}  // namespace

GaugePotential::GaugePotential(AlgebraSpec algebra, std::vector<Pole> poles,
                               std::vector<Matrix> poly_tail)
    : algebra_(algebra), poles_(std::move(poles)), tail_(std::move(poly_tail)) {
    for (std::size_t i = 0; i < poles_.size(); ++i) {
        const std::string where = "poles[" + std::to_string(i) + "]";
        const Pole& pole = poles_[i];
        if (!std::isfinite(pole.position.real()) || !std::isfinite(pole.position.imag()))
            throw ValidationError(where + ".position: non-finite");
        if (pole.laurent.empty()) throw ValidationError(where + ".laurent: empty");
        for (std::size_t k = 0; k < pole.laurent.size(); ++k)
            check_coefficient(pole.laurent[k], algebra_, where + ".laurent[" + std::to_string(k) + "]");
        if (pole.laurent.back().norm() == 0.0)
            throw ValidationError(where + ".laurent: top coefficient is zero");
        for (std::size_t j = 0; j < i; ++j)
            if (std::abs(poles_[j].position - pole.position) <= 1e-10)
                throw ValidationError(where + ".position: duplicates poles[" + std::to_string(j) + "]");
    }
    for (std::size_t j = 0; j < tail_.size(); ++j)
        check_coefficient(tail_[j], algebra_, "poly_tail[" + std::to_string(j) + "]");
}

int GaugePotential::find_pole(Complex p) const {
    for (std::size_t i = 0; i < poles_.size(); ++i)
        if (std::abs(poles_[i].position - p) <= 1e-10) return static_cast<int>(i);
    return -1;
}

std::vector<Complex> GaugePotential::pole_positions() const {
    std::vector<Complex> out;
    for (const auto& pole : poles_) out.push_back(pole.position);
    return out;
}

PunctureSet GaugePotential::punctures(double exclusion_radius) const {
    return PunctureSet(pole_positions(), exclusion_radius);
}

Matrix GaugePotential::operator()(Complex z) const {
    const int n = algebra_.n;
    Matrix out = Matrix::Zero(n, n);
    for (const auto& pole : poles_) {
        const Complex w = 1.0 / (z - pole.position);
        Complex power = w;
        for (const auto& a : pole.laurent) {
            out += power * a;
            power *= w;
        }
    }
    if (!tail_.empty()) {
        Matrix acc = tail_.back();
        for (auto j = static_cast<std::ptrdiff_t>(tail_.size()) - 2; j >= 0; --j)
            acc = acc * z + tail_[static_cast<std::size_t>(j)];
        out += acc;
    }
    return out;
}

AdjointElement potential_eval(const GaugePotential& phi, Complex z) {
    for (const auto& pole : phi.poles())
        if (std::abs(z - pole.position) <= 1e-12)
            throw ValidationError("potential_eval: z coincides with a pole");
    Matrix value = phi(z);
    if (phi.algebra().family == Family::sl)
        value -= Matrix::Identity(value.rows(), value.cols()) *
                 (value.trace() / static_cast<double>(value.rows()));
    return {std::move(value), phi.algebra()};
}

AdjointElement residue(const GaugePotential& phi, Complex p, int order) {
    const int i = phi.find_pole(p);
    if (i < 0) throw ValidationError("residue: no declared pole at the given point");
    const Pole& pole = phi.poles()[static_cast<std::size_t>(i)];
    if (order < 1 || order > pole.order())
        throw ValidationError("residue: order " + std::to_string(order) + " outside 1.." +
                              std::to_string(pole.order()));
    return {pole.laurent[static_cast<std::size_t>(order - 1)], phi.algebra()};
}

bool is_fuchsian(const GaugePotential& phi) {
    if (!phi.poly_tail().empty()) return false;
    for (const auto& pole : phi.poles())
        if (pole.order() != 1) return false;
    return true;
}

PotentialField PotentialField::of(const GaugePotential& phi, double exclusion_radius) {
    return {[phi](Complex z) { return phi(z); }, phi.punctures(exclusion_radius), phi.dimension()};
}

DeformedPotential::DeformedPotential(GaugePotential base, std::function<Matrix(Complex)> direction,
                                     double epsilon)
    : base_(std::move(base)), direction_(std::move(direction)), epsilon_(epsilon) {
    if (!direction_) throw ValidationError("deformed potential: empty direction field");
}

Matrix DeformedPotential::operator()(Complex z) const {
    return base_(z) + epsilon_ * direction_(z);
}

PotentialField DeformedPotential::field(double exclusion_radius) const {
    return {[self = *this](Complex z) { return self(z); }, base_.punctures(exclusion_radius),
            base_.dimension()};
}

}  // namespace qgeom
