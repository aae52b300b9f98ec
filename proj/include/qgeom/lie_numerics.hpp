#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "qgeom/core.hpp"

namespace qgeom {

enum class Family { gl, sl };

std::string_view to_string(Family family);
Family family_from_string(std::string_view name);

/// A matrix Lie algebra gl_n or sl_n.
struct AlgebraSpec {
    Family family = Family::gl;
    int n = 1;

    AlgebraSpec() = default;
    AlgebraSpec(Family f, int size);

    /// True when `m` is n x n and, for sl, traceless within
    /// 1e-12 * (1 + ||m||_F).
    bool contains(const Matrix& m) const;

    friend bool operator==(const AlgebraSpec&, const AlgebraSpec&) = default;
};

/// An element of the Lie algebra; entries are validated against the algebra
/// on construction.
class AdjointElement {
public:
    AdjointElement(Matrix entries, AlgebraSpec algebra);

    static AdjointElement zero(AlgebraSpec algebra);
    /// Wraps `m` as a gl_n element (no trace constraint).
    static AdjointElement general(Matrix m);

    const Matrix& matrix() const { return entries_; }
    const AlgebraSpec& algebra() const { return algebra_; }
    int dimension() const { return algebra_.n; }

private:
    Matrix entries_;
    AlgebraSpec algebra_;
};

/// An invertible n x n matrix.
class GroupElement {
public:
    explicit GroupElement(Matrix entries);

    static GroupElement identity(int n);

    const Matrix& matrix() const { return entries_; }
    int dimension() const { return static_cast<int>(entries_.rows()); }
    Complex determinant() const { return entries_.determinant(); }

private:
    Matrix entries_;
};

Matrix commutator(const Matrix& x, const Matrix& y);
AdjointElement commutator(const AdjointElement& x, const AdjointElement& y);

/// g * e * g^{-1}; throws NumericalError when g is numerically singular.
Matrix adjoint_action(const Matrix& g, const Matrix& e);
AdjointElement adjoint_action(const GroupElement& g, const AdjointElement& e);

/// Orthonormal (Frobenius) basis of the joint commutant
/// { E : M_i E - E M_i = 0 for all i } in gl_n. Singular values of the
/// stacked commutation maps below `relative_threshold` times the largest
/// |M_i|_F count as zero. An empty list yields the full gl_n basis, which needs `n`.
std::vector<AdjointElement> joint_commutant(std::span<const GroupElement> ms,
                                            double relative_threshold = 1e-8);
std::vector<AdjointElement> joint_commutant(std::span<const GroupElement> ms, int n,
                                            double relative_threshold = 1e-8);

/// exp(scale * a) by scaling and squaring with a Pade approximant.
Matrix matrix_exp(const Matrix& a);
GroupElement matrix_exp(const AdjointElement& a, Complex scale);

}  // namespace qgeom
