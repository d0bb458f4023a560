#include "hyplab/solver.hpp"

#include <algorithm>
#include <cmath>

namespace hyplab {

StripGrid make_strip_grid(const Scenario& spec, double s, double T, int N,
                          std::optional<int> M_override) {
    if (!(T > 0.0)) throw DomainError("strip height must be positive");
    StripGrid grid;
    grid.N = N;
    grid.s = s;
    grid.T = T;
    if (M_override) {
        grid.M = *M_override;
    } else {
        const double dt_target = grid.dx() / max_speed(spec);
        grid.M = std::max(1, static_cast<int>(std::lround(T / dt_target)));
    }
    return grid;
}

namespace {

double sup_diff(const GridFunction& a, const GridFunction& b) {
    double r = 0.0;
    const auto& av = a.raw();
    const auto& bv = b.raw();
    for (std::size_t i = 0; i < av.size(); ++i) r = std::max(r, std::abs(av[i] - bv[i]));
    return r;
}

}  // namespace

SolveReport solve_on_field(const Scenario& spec, const CharacteristicField& field,
                           const InitialProfile& phi, const SolveOptions& opts) {
    const StripGrid& grid = field.grid();
    if (phi.N != grid.N || phi.n_comp != spec.n)
        throw StructuralError("phi", "initial profile does not match the grid");

    SolveReport report;
    report.scenario_id = spec.id;
    const auto comp_res = check_compatibility(spec, phi, grid.s);
    report.compatibility_residual =
        *std::max_element(comp_res.begin(), comp_res.end());
    report.compatibility_warning = report.compatibility_residual > 1e-10;

    GridFunction u(spec.n, grid), next(spec.n, grid);
    if (opts.initial_iterate != nullptr) {
        if (opts.initial_iterate->grid() != grid)
            throw StructuralError("initial_iterate", "grid mismatch");
        u = *opts.initial_iterate;
    } else {
        for (int c = 0; c < spec.n; ++c)
            for (int l = 0; l <= grid.M; ++l)
                for (int i = 0; i <= grid.N; ++i) u.at(c, i, l) = phi.at(c, i);
    }

    constexpr unsigned parts = CharacteristicField::kBS | CharacteristicField::kD;
    double diff = 0.0;
    bool converged = false;
    for (int it = 1; it <= opts.max_iter; ++it) {
        field.sweep(u, &phi, next, parts);
        diff = sup_diff(u, next);
        std::swap(u, next);
        report.iterations = it;
        if (diff <= opts.tol) {
            converged = true;
            break;
        }
    }

    field.sweep(u, &phi, next, parts);
    report.residual = sup_diff(u, next);
    if (!converged)
        throw ConvergenceError("fixed-point iteration did not reach tolerance after " +
                                   std::to_string(opts.max_iter) + " sweeps",
                               report.residual);

    const double phi_norm = phi.sup_norm();
    report.apriori_ratio = phi_norm > 0.0 ? u.sup_norm() / phi_norm : 0.0;
    report.solution = std::move(u);
    return report;
}

SolveReport solve_ibvp(const Scenario& spec, double eps, double s, double T,
                       const InitialProfile& phi, const SolveOptions& opts) {
    const StripGrid grid = make_strip_grid(spec, s, T, opts.N, opts.M_override);
    CharacteristicField::Options fopts;
    fopts.exec = opts.exec;
    CharacteristicField field(spec, eps, grid, fopts);
    return solve_on_field(spec, field, phi, opts);
}

bool apriori_check(const SolveReport& report, double T) {
    if (report.apriori_ratio == 0.0) return true;
    return report.apriori_ratio <= apriori_cap(report.scenario_id, T);
}

}  // namespace hyplab
