#pragma once

#include <cstdint>
#include <vector>

#include "hyplab/operators.hpp"

namespace hyplab {

/// Precomputed characteristic geometry of one (scenario, eps, strip, grid)
/// combination: per component and grid node, the backward exit record and the
/// quadrature stencil of the coupling integral. Everything stored here is
/// independent of the field being transported, so one build serves any number
/// of operator applications, Picard sweeps, and matrix columns.
///
/// The quadrature lattice coincides with the grid's x-nodes (the trace step
/// equals dx), so every interior quadrature point needs only a two-point
/// t-interpolation; the exit endpoint is folded into the same layout.
class CharacteristicField {
public:
    struct Options {
        bool quadrature = true;      // build the coupling-integral stencils
        bool plain_weights = false;  // also store d_j weights (source integrals)
        ExecConfig exec{};
    };

    enum Parts : unsigned { kBS = 1u, kD = 2u };

    CharacteristicField(const Scenario& spec, double eps, StripGrid grid);
    CharacteristicField(const Scenario& spec, double eps, StripGrid grid, Options opts);

    const StripGrid& grid() const { return grid_; }
    double eps() const { return eps_; }
    int components() const { return n_; }

    /// out = [BS-part] + [D-part] of the fixed-point right-hand side, node by
    /// node. phi may be null when parts excludes kBS or the floor term is zero.
    void sweep(const GridFunction& u, const InitialProfile* phi, GridFunction& out,
               unsigned parts) const;

    /// Transport of an arbitrary grid function's own boundary values.
    void apply_B_grid(const GridFunction& v, GridFunction& out) const;
    /// Transport of a boundary/initial data field.
    void apply_B_data(const BoundaryField& data, GridFunction& out) const;
    /// Reflection-then-transport; initial-line exits contribute zero.
    void apply_BR(const GridFunction& u, GridFunction& out) const;
    /// Source integral; requires plain_weights.
    void apply_F_grid(const GridFunction& f, GridFunction& out) const;

    /// Batched variant over C solution columns stored row-major per node
    /// ([node][col]). Hat initial data: column g = hat at x-node (g mod (N+1))
    /// of component (g div (N+1)), shifted by col0 into the block.
    void sweep_batched(const double* u_in, double* u_out, int C, int col0, unsigned parts) const;

    std::size_t node_count() const { return node_exit_.size() / static_cast<std::size_t>(n_); }
    std::size_t total_nodes() const { return node_exit_.size(); }

    struct ExitRecord {
        std::uint8_t lateral;  // 1 lateral, 0 initial line
        float pad;
        double xi, tau;  // exit point
        double cstar;    // transport weight at the exit
        std::int32_t ibase;  // lateral: t-level of tau; floor: x-cell of xi
        double frac;         // matching interpolation fraction
    };
    const ExitRecord& exit_record(int comp, int ix, int il) const {
        return node_exit_[flat(comp, ix, il)];
    }

private:
    std::size_t flat(int comp, int ix, int il) const {
        return (static_cast<std::size_t>(comp) * (grid_.M + 1) + il) * (grid_.N + 1) + ix;
    }

    void build();

    const Scenario& spec_;
    double eps_;
    StripGrid grid_;
    Options opts_;
    int n_;
    bool b_offdiag_zero_;

    std::vector<ExitRecord> node_exit_;
    std::vector<double> node_rho_;  // [node][k]: reflection row at the exit ordinate

    // Quadrature pools, indexed per node by [q_off_[node], q_off_[node + 1]).
    // A point's value for component k is (1-frac) * u[k @ base0] + frac * u[k @ base1]
    // with base* flat per-component node indices (level * (N+1) + ix).
    std::vector<std::uint64_t> q_off_;
    std::vector<std::int32_t> q_base_;   // 2 entries per point
    std::vector<double> q_frac_;         // interpolation fraction
    std::vector<double> q_coeff_;        // (n-1) coupling coefficients per point
    std::vector<double> q_dw_;           // source-integral weights (plain_weights)
};

}  // namespace hyplab
