#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hyplab/operators.hpp"
#include "hyplab/solver.hpp"

namespace hyplab {

/// Discretized evolution operator acting on nodal values: column g holds the
/// solution at time t started from the hat profile of component g / (N+1) at
/// x-node g % (N+1) at time s. Row indices use the same layout.
struct EvolutionMatrix {
    Eigen::MatrixXd entries;
    std::string scenario_id;
    double eps = 0.0, s = 0.0, t = 0.0;
    int N = 0;

    int dim() const { return static_cast<int>(entries.rows()); }
    /// Induced sup norm: max absolute row sum.
    double inf_norm() const {
        return entries.rows() == 0 ? 0.0 : entries.cwiseAbs().rowwise().sum().maxCoeff();
    }
};

struct EvolveOptions {
    double tol = 1e-9;
    int max_iter = 200;
    std::optional<int> M_override;
    int column_block = 256;  // columns propagated per batch
    ExecConfig exec{};
};

/// Assembles the evolution matrix by running the solver's fixed-point
/// iteration on every hat-profile column (in lockstep blocks; the linear
/// iteration never couples columns). Throws ConvergenceError with the worst
/// column index on failure.
EvolutionMatrix evolution_matrix(const Scenario& spec, double eps, double s, double t, int N,
                                 const EvolveOptions& opts = {});

/// Max induced norm over the sampled initial times and horizons
/// t - s in {0.25, 0.5, 0.75, 1}.
double bound_check(const Scenario& spec, double eps, const std::vector<double>& s_samples, int N,
                   const EvolveOptions& opts = {});

struct SmoothingReport {
    int k = 0;                 // verified nilpotency degree
    double transit_max = 0.0;  // sampled bound for the slowest full crossing
    double d = 0.0;            // smoothing-time estimate k * transit_max
    /// (t, max_x |second difference| / dx) for t = s + j*d/4, j = 0..8.
    std::vector<std::pair<double, double>> c1_profile;
    double threshold = 0.0;  // 10x the max roughness of a smooth reference run
    std::optional<double> first_smooth_time;
};

struct SmoothingOptions {
    double tol = 1e-9;
    int max_iter = 200;
    int nilpotency_k_max = 6;
    ExecConfig exec{};
};

/// Propagates a deliberately rough profile (off-center hat, incompatible
/// corners) and tracks the scaled-second-difference roughness against a
/// smooth compatible reference. Requires a finite nilpotency degree with
/// agreeing structural and numerical verdicts.
SmoothingReport smoothing_analysis(const Scenario& spec, double eps, double s, int N,
                                   const SmoothingOptions& opts = {});

/// Roughness indicator used by the smoothing analysis.
double roughness_at(const GridFunction& u, double t);

}  // namespace hyplab
