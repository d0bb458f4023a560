#pragma once

#include <optional>
#include <string>

#include "hyplab/field.hpp"

namespace hyplab {

struct SolveOptions {
    int N = 200;
    double tol = 1e-9;
    int max_iter = 200;
    /// Time-step count override; by default dt is tied to dx via the sampled
    /// maximum speed and M = round(T / dt).
    std::optional<int> M_override;
    /// Alternative first iterate (uniqueness experiments); defaults to the
    /// t-constant extension of phi.
    const GridFunction* initial_iterate = nullptr;
    ExecConfig exec{};
};

struct SolveReport {
    GridFunction solution;
    int iterations = 0;
    double residual = 0.0;       // sup norm of the fixed-point defect
    double apriori_ratio = 0.0;  // sup|u| / sup|phi|, 0 for phi == 0
    bool compatibility_warning = false;
    double compatibility_residual = 0.0;
    std::string scenario_id;
};

/// Picard iteration for the integral fixed-point form of the initial-boundary
/// value problem: u^{p+1} = (transport o data)(u^p) + coupling-integral(u^p),
/// started from the t-constant extension of phi, stopped when consecutive
/// iterates differ by at most tol in sup norm. The reported residual is an
/// independent re-evaluation of the fixed-point defect of the final iterate.
/// Incompatible corner data is accepted and flagged, not rejected.
SolveReport solve_ibvp(const Scenario& spec, double eps, double s, double T,
                       const InitialProfile& phi, const SolveOptions& opts = {});

/// Same iteration on a caller-provided field (shared geometry).
SolveReport solve_on_field(const Scenario& spec, const CharacteristicField& field,
                           const InitialProfile& phi, const SolveOptions& opts);

/// Amplification guard: true iff the report's sup|u| / sup|phi| is within the
/// frozen per-scenario cap for horizon T. Vacuously true for phi == 0.
bool apriori_check(const SolveReport& report, double T);

/// Grid for a strip [s, s+T]: dt approximately dx / max sampled speed.
StripGrid make_strip_grid(const Scenario& spec, double s, double T, int N,
                          std::optional<int> M_override = std::nullopt);

}  // namespace hyplab
