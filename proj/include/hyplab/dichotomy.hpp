#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "hyplab/evolution.hpp"
#include "hyplab/spectral.hpp"

namespace hyplab {

/// Hyperbolic splitting of a period map: projection onto the expanding
/// invariant subspace, shared exponent and bound of the two-sided decay
/// estimates, and the spectral margin at the unit circle.
struct DichotomyEstimate {
    Eigen::MatrixXd P;
    int rank = 0;
    double beta = 0.0;     // min over both clusters of |log|lambda|| / period
    double bound_M = 1.0;  // smallest constant validating the decay bounds over the fit window
    double gap = 0.0;      // min |log|lambda|| (not divided by the period)
    double period_length = 0.0;  // 2d
    Eigen::MatrixXd monodromy;   // the period map the estimate was derived from
    std::vector<std::complex<double>> eigenvalues;
};

/// Number of periods over which the bound constant is fitted.
inline constexpr int kBoundFitPeriods = 10;

/// Period maps T_i = U(t0 + 2d(i+1), t0 + 2d i) at shared resolution.
std::vector<EvolutionMatrix> monodromy_sequence(const Scenario& spec, double eps, double t0,
                                                double d, int count, int N,
                                                const EvolveOptions& opts = {});

/// Relative spread max_i ||T_i - T_0|| / ||T_0|| of a monodromy sequence.
double monodromy_spread(const std::vector<EvolutionMatrix>& seq);

/// Spectral detection on a single period map (autonomous or period-aligned
/// case). Returns nullopt when no eigenvalue margin of at least gap_tol
/// exists at the unit circle. The period is taken from the matrix metadata.
std::optional<DichotomyEstimate> detect_dichotomy(const EvolutionMatrix& T,
                                                  double gap_tol = kGapTolDefault);

/// Same detection guarded by a constancy check of the sequence: the spread
/// must stay within split_tol (UnsupportedError otherwise).
std::optional<DichotomyEstimate> detect_dichotomy(const std::vector<EvolutionMatrix>& seq,
                                                  double split_tol,
                                                  double gap_tol = kGapTolDefault);

struct DichotomyVerification {
    double commutation = 0.0;        // projection/period-map commutation, relative
    double inversion = 0.0;          // subspace inversion residual on range(P)
    double forward = 0.0;            // relative slack of the forward decay bound
    double backward = 0.0;           // relative slack of the backward decay bound
    double subspace_condition = 0.0; // condition number of the restricted map
};

/// Checks the four dichotomy properties on sampled period multiples up to
/// horizon_periods, with the projection transported by the period map itself.
/// Throws NumericalError when the restricted map is ill-conditioned (> 1e12).
DichotomyVerification verify_dichotomy(const DichotomyEstimate& est, int horizon_periods = 15);

/// ||U0(s + 2d, s) - Ueps(s + 2d, s)|| at shared resolution; d is derived
/// from the structural nilpotency degree and the sampled transit bound.
double perturbation_gap(const Scenario& spec, double eps, double s, int N,
                        const EvolveOptions& opts = {});

struct SweepRow {
    double eps = 0.0;
    double gap = 0.0;
    bool found = false;
    int rank = -1;
    double beta = 0.0;
    double bound_M = 0.0;
    std::string error;
};

struct SweepTable {
    std::vector<SweepRow> rows;
    int baseline_rank = 0;
    double baseline_beta = 0.0;
    double d = 0.0;
    /// Smallest index such that every row from it on is found with the
    /// baseline rank; rows.size() if none.
    int threshold_index = 0;
};

/// Robustness experiment: baseline detection at eps = 0, then per-eps gap and
/// detection verdicts at shared resolution. The baseline must split
/// (PreconditionError otherwise).
SweepTable robustness_sweep(const Scenario& spec, const std::vector<double>& eps_list, double s,
                            int N, const EvolveOptions& opts = {});

/// Smoothing time from the structural reflection chain: k * transit_max.
/// PreconditionError when the chain does not terminate.
double smoothing_time(const Scenario& spec);

}  // namespace hyplab
