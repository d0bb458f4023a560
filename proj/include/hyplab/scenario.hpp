#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hyplab/series.hpp"

namespace hyplab {

/// One concrete problem instance: n transport components on the unit interval,
/// the first m moving right (a_j > 0) and the rest moving left (a_j < 0),
/// coupled by a zero-order matrix b and by boundary reflection rows p (into the
/// left edge, components j < m) and q (into the right edge, components j >= m).
///
/// Off-diagonal b entries are never stored directly: they are defined as
/// b_jk = gamma_jk * (a_k - a_j), all factors at the same (x, t, eps), which
/// makes that factorization exact by construction. The companion factor
/// beta_jk must satisfy b_jk(x,t,0) = beta_jk(x,t,eps) * (a_k(x,t,eps) - a_j(x,t,0));
/// the validator samples this residual.
///
/// Component indices are 0-based everywhere in code; scenario files use 1-based
/// j, k to match the usual mathematical numbering.
struct Scenario {
    std::string id = "custom";
    int n = 0;
    int m = 0;
    double eps0 = 0.0;

    std::vector<CoefficientSeries> a;       // n speeds
    std::vector<CoefficientSeries> b_diag;  // n diagonal zero-order entries
    std::map<std::pair<int, int>, CoefficientSeries> gamma;  // off-diagonal factors
    std::map<std::pair<int, int>, CoefficientSeries> beta;   // off-diagonal factors
    std::vector<std::vector<CoefficientSeries>> p;  // m rows, n columns, t only
    std::vector<std::vector<CoefficientSeries>> q;  // n-m rows, n columns, t only

    bool rightward(int j) const { return j < m; }
    /// Edge where component k leaves the interval (1 for rightward, 0 for leftward).
    double outflow_edge(int k) const { return rightward(k) ? 1.0 : 0.0; }
    /// Edge where component j receives boundary data.
    double inflow_edge(int j) const { return rightward(j) ? 0.0 : 1.0; }

    double a_eval(int j, double x, double t, double eps) const { return a[j].eval(x, t, eps); }
    double a_dx(int j, double x, double t, double eps) const { return a[j].dx(x, t, eps); }
    double a_dt(int j, double x, double t, double eps) const { return a[j].dt(x, t, eps); }
    double a_deps(int j, double x, double t) const { return a[j].deps(x, t); }

    double b_eval(int j, int k, double x, double t, double eps) const;
    double b_dt(int j, int k, double x, double t, double eps) const;
    double b_deps(int j, int k, double x, double t, double eps) const;

    const CoefficientSeries* gamma_at(int j, int k) const;
    const CoefficientSeries* beta_at(int j, int k) const;

    /// Boundary reflection coefficient of row j against the outflow value of
    /// component k: p_jk for j < m, q_jk otherwise.
    double reflection_coeff(int j, int k, double t) const;
    /// True if the (j, k) reflection coefficient is not identically zero.
    bool reflection_nonzero(int j, int k) const;
    bool reflection_all_zero() const;
    bool b_offdiag_all_zero() const;

    /// Largest coefficient period, 0 if none.
    double max_period() const;

    /// Throws StructuralError naming the offending field if shapes disagree.
    void check_structure() const;
};

/// One assumption check: the extremal value seen on the sample grid and the
/// verdict. For sup-type bounds `pass` is finiteness of the sampled bound.
struct AssumptionCheck {
    std::string name;
    std::string detail;
    double extremal = 0.0;
    bool pass = false;
};

struct ValidationReport {
    std::vector<AssumptionCheck> checks;
    bool pass = false;
    int sample_density = 0;
    double t_window = 0.0;  // t sampled over [0, t_window]
    std::vector<double> eps_samples;

    std::string to_text() const;
};

/// Samples every structural assumption on a uniform (x, t, eps) grid:
/// sign and separation of the speeds, boundedness of all coefficients and
/// their derivatives, and both factorization residuals for off-diagonal b.
ValidationReport validate(const Scenario& spec, int sample_density);

/// Sampled upper bound for max_j of the full-interval transit time
/// int_0^1 dxi / |a_j|, maximized pointwise over the (t, eps) samples.
double transit_max(const Scenario& spec, int sample_density = 10);

/// Sampled maximum of |a_j| over the validation grid.
double max_speed(const Scenario& spec, int sample_density = 10);

/// Built-in scenario families. Known names: decoupled-extinction,
/// feedback-2x2, periodic-dichotomy, kinetics-2x2.
Scenario catalog(const std::string& name);
std::vector<std::string> catalog_names();

/// Frozen per-scenario cap for the amplification sup|u| / sup|phi| over a
/// horizon T, measured once at reference resolution. Throws LookupError for
/// scenarios without a recorded cap.
double apriori_cap(const std::string& scenario_id, double T);

/// JSON scenario file I/O. The parser rejects unknown keys.
Scenario load_scenario_file(const std::string& path);
void save_scenario_file(const Scenario& spec, const std::string& path);
Scenario scenario_from_json_text(const std::string& text);
std::string scenario_to_json_text(const Scenario& spec);

/// Resolves a catalog name or a path to a scenario file.
Scenario resolve_scenario(const std::string& name_or_path);

}  // namespace hyplab
