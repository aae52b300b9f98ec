#include "qgeom/lie_numerics.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace qgeom {

std::string_view to_string(Family family) { return family == Family::sl ? "sl" : "gl"; }

Family family_from_string(std::string_view name) {
    if (name == "gl") return Family::gl;
    if (name == "sl") return Family::sl;
    throw ValidationError("algebra.family: expected \"gl\" or \"sl\", got \"" +
                          std::string(name) + "\"");
}

AlgebraSpec::AlgebraSpec(Family f, int size) : family(f), n(size) {
    if (size < 1) throw ValidationError("algebra.n: matrix size must be positive");
}

bool AlgebraSpec::contains(const Matrix& m) const {
    if (m.rows() != n || m.cols() != n) return false;
    if (family == Family::sl) return std::abs(m.trace()) <= 1e-12 * (1.0 + m.norm());
    return true;
}

AdjointElement::AdjointElement(Matrix entries, AlgebraSpec algebra)
    : entries_(std::move(entries)), algebra_(algebra) {
    if (entries_.rows() != algebra_.n || entries_.cols() != algebra_.n)
        throw ValidationError("adjoint element: expected a " + std::to_string(algebra_.n) + "x" +
                              std::to_string(algebra_.n) + " matrix");
    if (!algebra_.contains(entries_))
        throw ValidationError("adjoint element: trace must vanish for sl_" +
                              std::to_string(algebra_.n));
}

AdjointElement AdjointElement::zero(AlgebraSpec algebra) {
    return {Matrix::Zero(algebra.n, algebra.n), algebra};
}

AdjointElement AdjointElement::general(Matrix m) {
    const auto n = static_cast<int>(m.rows());
    if (m.cols() != n) throw ValidationError("adjoint element: matrix must be square");
    return {std::move(m), AlgebraSpec(Family::gl, n)};
}

GroupElement::GroupElement(Matrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() == 0)
        throw ValidationError("group element: matrix must be square and non-empty");
    if (!entries_.allFinite()) throw ValidationError("group element: non-finite entries");
    Eigen::FullPivLU<Matrix> lu(entries_);
    if (!lu.isInvertible()) throw ValidationError("group element: matrix is singular");
}

GroupElement GroupElement::identity(int n) { return GroupElement(Matrix::Identity(n, n)); }

Matrix commutator(const Matrix& x, const Matrix& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw ValidationError("commutator: dimension mismatch");
    return x * y - y * x;
}

AdjointElement commutator(const AdjointElement& x, const AdjointElement& y) {
    if (!(x.algebra() == y.algebra()))
        throw ValidationError("commutator: algebra specs differ");
    Matrix c = commutator(x.matrix(), y.matrix());
    // [X, Y] is traceless for any square X, Y, so the result stays in sl.
    return {std::move(c), x.algebra()};
}

Matrix adjoint_action(const Matrix& g, const Matrix& e) {
    if (g.rows() != e.rows() || g.cols() != e.cols())
        throw ValidationError("adjoint_action: dimension mismatch");
    Eigen::PartialPivLU<Matrix> lu(g);
    if (!(lu.rcond() > 1e-14))
        throw NumericalError("adjoint_action: group element is numerically singular");
    // X g = g e  <=>  g^T X^T = (g e)^T
    const Matrix ge = g * e;
    Eigen::PartialPivLU<Matrix> lut(g.transpose());
    return lut.solve(ge.transpose()).transpose();
}

AdjointElement adjoint_action(const GroupElement& g, const AdjointElement& e) {
    if (g.dimension() != e.dimension())
        throw ValidationError("adjoint_action: dimension mismatch");
    Matrix x = adjoint_action(g.matrix(), e.matrix());
    if (e.algebra().family == Family::sl) {
        // conjugation preserves the trace; strip rounding drift
        x -= Matrix::Identity(x.rows(), x.cols()) * (x.trace() / static_cast<double>(x.rows()));
    }
    return {std::move(x), e.algebra()};
}

namespace {

std::vector<AdjointElement> full_basis(int n) {
    std::vector<AdjointElement> basis;
    basis.reserve(static_cast<std::size_t>(n * n));
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            Matrix e = Matrix::Zero(n, n);
            e(i, j) = 1.0;
            basis.push_back(AdjointElement::general(std::move(e)));
        }
    return basis;
}

}  // namespace

std::vector<AdjointElement> joint_commutant(std::span<const GroupElement> ms, int n,
                                            double relative_threshold) {
    if (ms.empty()) return full_basis(n);
    for (const auto& m : ms)
        if (m.dimension() != n) throw ValidationError("joint_commutant: matrices differ in size");

    // vec(M E - E M) = (I (x) M - M^T (x) I) vec(E), column-major vec.
    const Matrix id = Matrix::Identity(n, n);
    const auto nn = static_cast<Eigen::Index>(n) * n;
    Matrix stacked(nn * static_cast<Eigen::Index>(ms.size()), nn);
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const Matrix& m = ms[i].matrix();
        stacked.middleRows(static_cast<Eigen::Index>(i) * nn, nn) =
            Eigen::kroneckerProduct(id, m).eval() - Eigen::kroneckerProduct(m.transpose(), id).eval();
    }

    Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    // relative to the size of the matrices, not of the map: a nearly scalar
    // M has only tiny singular values
    double scale = 0.0;
    for (const auto& m : ms) scale = std::max(scale, m.matrix().norm());
    const double cutoff = relative_threshold * scale;

    std::vector<AdjointElement> basis;
    const Matrix& v = svd.matrixV();
    for (Eigen::Index k = 0; k < nn; ++k) {
        const double s = k < sv.size() ? sv(k) : 0.0;
        if (s > cutoff) continue;
        Matrix e = Eigen::Map<const Matrix>(v.col(k).data(), n, n);
        basis.push_back(AdjointElement::general(std::move(e)));
    }
    return basis;
}

std::vector<AdjointElement> joint_commutant(std::span<const GroupElement> ms,
                                            double relative_threshold) {
    if (ms.empty())
        throw ValidationError("joint_commutant: empty list needs an explicit matrix size");
    return joint_commutant(ms, ms.front().dimension(), relative_threshold);
}

Matrix matrix_exp(const Matrix& a) {
    if (!a.allFinite()) throw ValidationError("matrix_exp: non-finite entries");
    // 2^1000 is far beyond any useful scale; the squaring phase would overflow.
    if (a.cwiseAbs().rowwise().sum().maxCoeff() > 700.0)
        throw NumericalError("matrix_exp: norm too large, result would overflow");
    Matrix result = a.exp();
    if (!result.allFinite()) throw NumericalError("matrix_exp: overflow");
    return result;
}

GroupElement matrix_exp(const AdjointElement& a, Complex scale) {
    return GroupElement(matrix_exp(Matrix(scale * a.matrix())));
}

}  // namespace qgeom
