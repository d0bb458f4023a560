#pragma once

#include <optional>
#include <vector>

#include "hyplab/exec.hpp"
#include "hyplab/grid.hpp"
#include "hyplab/scenario.hpp"

namespace hyplab {

/// Boundary/initial data field produced by the data operator: the lateral
/// edges carry the reflected edge values (a function of t only per component),
/// the strip floor carries the initial profile.
struct BoundaryField {
    int n_comp = 0;
    StripGrid grid;
    std::vector<std::vector<double>> lateral;  // [comp][level]
    InitialProfile floor;

    /// Value consumed by the transport operator at an exit point: time
    /// interpolation of the lateral profile for lateral exits, space
    /// interpolation of the floor profile for initial-line exits.
    double eval_lateral(int comp, double tau) const;
    double eval_floor(int comp, double xi) const { return floor.eval(comp, xi); }
};

/// Reflected boundary values at time t: row j combines the other components'
/// outflow-edge values with the p-row (j < m) or q-row (j >= m) coefficients.
std::vector<double> apply_R(const Scenario& spec, const BoundaryTrace& trace, double t);

/// Builds the boundary/initial data field from u's edge values and phi.
BoundaryField apply_S(const Scenario& spec, const GridFunction& u, const InitialProfile& phi);

/// Transport-to-exit operator: at each node, follows the backward
/// characteristic to its exit and multiplies the exit value of v by the
/// accumulated zero-order weight.
GridFunction apply_B(const Scenario& spec, const GridFunction& v, double eps,
                     const ExecConfig& exec = {});
GridFunction apply_B(const Scenario& spec, const BoundaryField& data, double eps,
                     const ExecConfig& exec = {});

/// Composition of the transport operator with the data operator.
GridFunction apply_BS(const Scenario& spec, const GridFunction& u, const InitialProfile& phi,
                      double eps, const ExecConfig& exec = {});

/// Composition with the reflection operator alone: lateral exits read the
/// reflected edge values of u, initial-line exits contribute zero.
GridFunction apply_BR(const Scenario& spec, const GridFunction& u, double eps,
                      const ExecConfig& exec = {});

/// Volterra coupling term: minus the weighted integral of the off-diagonal
/// zero-order coupling along the backward characteristic of each node.
GridFunction apply_D(const Scenario& spec, const GridFunction& w, double eps,
                     const ExecConfig& exec = {});

/// Source-term integral along the backward characteristic (no sum, no sign flip).
GridFunction apply_F(const Scenario& spec, const GridFunction& f, double eps,
                     const ExecConfig& exec = {});

/// Corner residuals |phi_j(inflow edge) - (R phi)_j(s)| per component.
std::vector<double> check_compatibility(const Scenario& spec, const InitialProfile& phi, double s);

/// Longest path length + 1 of the boundary coupling digraph (edge k -> j iff
/// the (j, k) reflection coefficient is not identically zero); nullopt when
/// the digraph has a cycle.
std::optional<int> structural_nilpotency(const Scenario& spec);

struct NilpotencyReport {
    std::optional<int> structural;  // longest reflection-chain length + 1, none if cyclic
    std::optional<int> numerical;   // first power with sup norm <= 1e-10, none if > k_max
    bool agree = false;

    std::optional<int> k() const { return numerical; }
};

struct NilpotencyOptions {
    int grid_N = 48;
    double zero_tol = 1e-10;
    ExecConfig exec{};
};

/// Two independent verdicts on when the reflected-transport composition dies:
/// a reachability bound on the boundary coupling digraph (edge k -> j iff the
/// (j, k) reflection coefficient is not identically zero) and a numerical
/// power check on nodal basis fields over a strip of height 2 * k_max * transit.
NilpotencyReport nilpotency_degree(const Scenario& spec, double eps, double s, int k_max,
                                   const NilpotencyOptions& opts = {});

}  // namespace hyplab
