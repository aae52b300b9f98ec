#pragma once

#include "qgeom/connection.hpp"

namespace testfx {

inline qgeom::Matrix m2(qgeom::Complex a, qgeom::Complex b, qgeom::Complex c, qgeom::Complex d) {
    qgeom::Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

inline const qgeom::AlgebraSpec kSl2(qgeom::Family::sl, 2);

/// Residues diag(1/2, -1/2) at -1 and its negative at +1.
inline qgeom::GaugePotential two_pole() {
    const qgeom::Matrix a = m2(0.5, 0, 0, -0.5);
    return {kSl2, {qgeom::Pole{-1.0, {a}}, qgeom::Pole{1.0, {qgeom::Matrix(-a)}}}};
}

/// Non-abelian residues at -1, i, 1 summing to zero.
inline qgeom::GaugePotential three_pole() {
    const qgeom::Matrix a1 = m2(0.25, 0, 0, -0.25), a2 = m2(0, 0.3, 0.2, 0);
    return {kSl2, {qgeom::Pole{-1.0, {a1}}, qgeom::Pole{qgeom::kI, {a2}},
                   qgeom::Pole{1.0, {qgeom::Matrix(-a1 - a2)}}}};
}

}  // namespace testfx
