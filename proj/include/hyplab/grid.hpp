#pragma once

#include <string>
#include <vector>

#include "hyplab/errors.hpp"

namespace hyplab {

/// Uniform space-time lattice on [0,1] x [s, s+T]: x_i = i/N, t_l = s + l*dt.
struct StripGrid {
    int N = 0;  // x intervals
    int M = 0;  // t intervals
    double s = 0.0;
    double T = 0.0;

    double dx() const { return 1.0 / N; }
    double dt() const { return T / M; }
    double x(int i) const { return static_cast<double>(i) / N; }
    double t(int l) const { return s + T * static_cast<double>(l) / M; }
    bool operator==(const StripGrid&) const = default;
};

/// n-component nodal field on a StripGrid; off-grid evaluation is bilinear,
/// so the stored values define a continuous piecewise-linear surrogate.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(int n_comp, StripGrid grid);

    int components() const { return n_; }
    const StripGrid& grid() const { return grid_; }

    double& at(int comp, int ix, int il) { return v_[index(comp, ix, il)]; }
    double at(int comp, int ix, int il) const { return v_[index(comp, ix, il)]; }

    /// Bilinear interpolation; (x, t) is clamped to the strip closure.
    double eval(int comp, double x, double t) const;

    double sup_norm() const;
    bool all_finite() const;

    GridFunction& operator+=(const GridFunction& other);
    GridFunction& operator-=(const GridFunction& other);
    GridFunction& operator*=(double factor);

    const std::vector<double>& raw() const { return v_; }
    std::vector<double>& raw() { return v_; }

    std::size_t index(int comp, int ix, int il) const {
        return (static_cast<std::size_t>(comp) * (grid_.M + 1) + il) * (grid_.N + 1) + ix;
    }

    /// CSV with header component,xIndex,tIndex,value (all indices 0-based).
    std::string to_csv() const;
    static GridFunction from_csv(const std::string& text, StripGrid grid, int n_comp);

private:
    int n_ = 0;
    StripGrid grid_;
    std::vector<double> v_;
};

/// Edge values u_k(0, t) and u_k(1, t) sampled on the t-nodes of a grid.
struct BoundaryTrace {
    int n_comp = 0;
    double s = 0.0;
    double T = 0.0;
    std::vector<std::vector<double>> left;   // [comp][level]
    std::vector<std::vector<double>> right;  // [comp][level]

    static BoundaryTrace from_grid(const GridFunction& u);
    int levels() const { return left.empty() ? 0 : static_cast<int>(left[0].size()); }
    double dt() const { return T / (levels() - 1); }
    /// Linear interpolation in t; throws DomainError outside [s, s+T].
    double eval(int comp, bool right_edge, double t) const;
};

/// Initial profile: n components sampled on the x-nodes.
struct InitialProfile {
    int n_comp = 0;
    int N = 0;
    std::vector<double> values;  // [comp][ix] flattened

    InitialProfile() = default;
    InitialProfile(int n, int N_) : n_comp(n), N(N_), values(static_cast<std::size_t>(n) * (N_ + 1), 0.0) {}
    double& at(int comp, int ix) { return values[static_cast<std::size_t>(comp) * (N + 1) + ix]; }
    double at(int comp, int ix) const { return values[static_cast<std::size_t>(comp) * (N + 1) + ix]; }
    /// Piecewise-linear evaluation, x clamped to [0,1].
    double eval(int comp, double x) const;
    double sup_norm() const;
};

}  // namespace hyplab
