#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace hyplab {

/// Spectral splitting of a real matrix at the unit circle.
struct SpectralSplit {
    Eigen::MatrixXd P;  // spectral projection onto the outside-circle invariant subspace
    int rank = 0;
    std::vector<std::complex<double>> eigenvalues;
    double gap = 0.0;  // min over eigenvalues of |log max(|lambda|, rho_cap)|
};

inline constexpr double kRhoCap = 1e-10;  // numerical-zero radius for eigenvalues
inline constexpr double kGapTolDefault = 0.05;

/// Unitary Schur form ordered with the outside-unit-circle cluster first,
/// followed by a triangular Sylvester solve for the spectral projection.
/// Returns nullopt when some eigenvalue sits within gap_tol of the circle in
/// log-modulus (no clean split). Throws NumericalError on non-finite
/// eigenvalues or a projection failing the idempotency bound.
std::optional<SpectralSplit> split_at_unit_circle(const Eigen::MatrixXd& T, double gap_tol);

}  // namespace hyplab
