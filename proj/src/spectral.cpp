#include "hyplab/spectral.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "hyplab/errors.hpp"

namespace hyplab {

namespace {

using Cplx = std::complex<double>;

// Swaps the adjacent diagonal entries (i, i+1) of the upper-triangular S by a
// unitary similarity, updating U accordingly.
void swap_adjacent(Eigen::MatrixXcd& S, Eigen::MatrixXcd& U, int i) {
    const Cplx a = S(i, i), b = S(i, i + 1), d = S(i + 1, i + 1);
    const Cplx v0 = b, v1 = d - a;  // eigenvector of [[a, b], [0, d]] for d
    const double nrm = std::sqrt(std::norm(v0) + std::norm(v1));
    if (nrm == 0.0) return;  // equal entries, nothing to reorder
    Eigen::Matrix2cd G;
    G << v0 / nrm, -std::conj(v1) / nrm, v1 / nrm, std::conj(v0) / nrm;
    S.middleCols(i, 2) = (S.middleCols(i, 2) * G).eval();
    S.middleRows(i, 2) = (G.adjoint() * S.middleRows(i, 2)).eval();
    U.middleCols(i, 2) = (U.middleCols(i, 2) * G).eval();
    S(i + 1, i) = 0.0;
}

}  // namespace

std::optional<SpectralSplit> split_at_unit_circle(const Eigen::MatrixXd& T, double gap_tol) {
    const int dim = static_cast<int>(T.rows());
    if (dim == 0 || T.rows() != T.cols()) throw NumericalError("spectral split needs a square matrix");
    if (!T.allFinite()) throw NumericalError("matrix has non-finite entries");

    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(T.cast<Cplx>(), true);
    if (schur.info() != Eigen::Success) throw NumericalError("Schur decomposition failed");
    Eigen::MatrixXcd S = schur.matrixT();
    Eigen::MatrixXcd U = schur.matrixU();

    SpectralSplit split;
    split.eigenvalues.reserve(dim);
    double gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < dim; ++i) {
        const Cplx lam = S(i, i);
        if (!std::isfinite(lam.real()) || !std::isfinite(lam.imag()))
            throw NumericalError("non-finite eigenvalue");
        split.eigenvalues.push_back(lam);
        gap = std::min(gap, std::abs(std::log(std::max(std::abs(lam), kRhoCap))));
    }
    split.gap = gap;
    if (gap < gap_tol) return std::nullopt;

    // Order the outside-circle cluster first.
    std::vector<bool> outside(dim);
    for (int i = 0; i < dim; ++i) outside[i] = std::abs(S(i, i)) > 1.0;
    bool moved = true;
    while (moved) {
        moved = false;
        for (int i = 0; i + 1 < dim; ++i) {
            if (!outside[i] && outside[i + 1]) {
                swap_adjacent(S, U, i);
                std::swap(outside[i], outside[i + 1]);
                moved = true;
            }
        }
    }
    const int r = static_cast<int>(std::count(outside.begin(), outside.end(), true));
    split.rank = r;
    if (r == 0) {
        split.P = Eigen::MatrixXd::Zero(dim, dim);
        return split;
    }
    if (r == dim) {
        split.P = Eigen::MatrixXd::Identity(dim, dim);
        return split;
    }

    // Triangular Sylvester solve S11 Y - Y S22 = S12; the projection in the
    // Schur basis is [[I, Y], [0, 0]].
    const auto S11 = S.topLeftCorner(r, r);
    const auto S22 = S.bottomRightCorner(dim - r, dim - r);
    const auto S12 = S.topRightCorner(r, dim - r);
    Eigen::MatrixXcd Y(r, dim - r);
    for (int c = 0; c < dim - r; ++c) {
        Eigen::VectorXcd rhs = S12.col(c);
        for (int cp = 0; cp < c; ++cp) rhs += Y.col(cp) * S22(cp, c);
        // Back-substitute (S11 - S22(c, c) I) y = rhs.
        const Cplx shift = S22(c, c);
        for (int i = r - 1; i >= 0; --i) {
            Cplx acc = rhs(i);
            for (int k = i + 1; k < r; ++k) acc -= S11(i, k) * Y(k, c);
            const Cplx piv = S11(i, i) - shift;
            if (std::abs(piv) < 1e-14)
                throw NumericalError("clusters too close for a stable spectral projection");
            Y(i, c) = acc / piv;
        }
    }
    Eigen::MatrixXcd Z(dim, dim);
    Z.leftCols(r) = U.leftCols(r);
    Z.rightCols(dim - r) = U.leftCols(r) * Y;
    Eigen::MatrixXcd Pc = Z * U.adjoint();
    if (Pc.imag().cwiseAbs().maxCoeff() > 1e-8)
        throw NumericalError("spectral projection of a real matrix came out complex");
    split.P = Pc.real();

    const double idem = (split.P * split.P - split.P).cwiseAbs().maxCoeff();
    if (idem > 1e-10)
        throw NumericalError("spectral projection failed the idempotency bound");
    const double trace_err = std::abs(split.P.trace() - r);
    if (trace_err > 1e-8) throw NumericalError("projection trace does not match the cluster size");
    return split;
}

}  // namespace hyplab
