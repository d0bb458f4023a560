#include "hyplab/evolution.hpp"

#include <algorithm>
#include <cmath>

namespace hyplab {

namespace {

// Lockstep fixed-point propagation of one block of hat columns.
// u buffers are [node][col] row-major over the block.
void propagate_block(const CharacteristicField& field, int col0, int C,
                     const EvolveOptions& opts, std::vector<double>& cur,
                     std::vector<double>& nxt, Eigen::MatrixXd& out) {
    const StripGrid& grid = field.grid();
    const int N = grid.N, M = grid.M;
    const int n = field.components();
    const std::size_t rows = field.total_nodes();
    cur.assign(rows * C, 0.0);
    nxt.assign(rows * C, 0.0);

    // First iterate: hat profiles extended constant in t.
    const std::size_t per_comp = static_cast<std::size_t>(N + 1) * (M + 1);
    for (int c = 0; c < C; ++c) {
        const int g = col0 + c;
        const int comp = g / (N + 1);
        const int ix = g % (N + 1);
        for (int l = 0; l <= M; ++l) {
            const std::size_t f = comp * per_comp + static_cast<std::size_t>(l) * (N + 1) + ix;
            cur[f * C + c] = 1.0;
        }
    }

    constexpr unsigned parts = CharacteristicField::kBS | CharacteristicField::kD;
    bool converged = false;
    double diff = 0.0;
    for (int it = 1; it <= opts.max_iter; ++it) {
        field.sweep_batched(cur.data(), nxt.data(), C, col0, parts);
        diff = 0.0;
        for (std::size_t i = 0; i < cur.size(); ++i)
            diff = std::max(diff, std::abs(cur[i] - nxt[i]));
        std::swap(cur, nxt);
        if (diff <= opts.tol) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw ConvergenceError("evolution matrix column block starting at " +
                                   std::to_string(col0) + " did not converge",
                               diff, col0);

    // Top-level values become the matrix columns.
    for (int comp = 0; comp < n; ++comp)
        for (int ix = 0; ix <= N; ++ix) {
            const std::size_t f = comp * per_comp + static_cast<std::size_t>(M) * (N + 1) + ix;
            const int row = comp * (N + 1) + ix;
            for (int c = 0; c < C; ++c) out(row, col0 + c) = cur[f * C + c];
        }
}

}  // namespace

EvolutionMatrix evolution_matrix(const Scenario& spec, double eps, double s, double t, int N,
                                 const EvolveOptions& opts) {
    if (t < s) throw DomainError("evolution requires t >= s");
    EvolutionMatrix out;
    out.scenario_id = spec.id;
    out.eps = eps;
    out.s = s;
    out.t = t;
    out.N = N;
    const int dim = spec.n * (N + 1);
    out.entries = Eigen::MatrixXd::Identity(dim, dim);
    if (t == s) return out;

    SolveOptions sopts;
    const StripGrid grid = make_strip_grid(spec, s, t - s, N, opts.M_override);
    CharacteristicField::Options fopts;
    fopts.exec = opts.exec;
    CharacteristicField field(spec, eps, grid, fopts);

    std::vector<double> cur, nxt;
    const int block = std::max(1, opts.column_block);
    for (int col0 = 0; col0 < dim; col0 += block) {
        const int C = std::min(block, dim - col0);
        propagate_block(field, col0, C, opts, cur, nxt, out.entries);
    }
    return out;
}

double bound_check(const Scenario& spec, double eps, const std::vector<double>& s_samples, int N,
                   const EvolveOptions& opts) {
    double worst = 0.0;
    for (double s : s_samples)
        for (double horizon : {0.25, 0.5, 0.75, 1.0}) {
            const EvolutionMatrix U = evolution_matrix(spec, eps, s, s + horizon, N, opts);
            worst = std::max(worst, U.inf_norm());
        }
    return std::max(worst, 1.0);  // the identity at t = s is always included
}

double roughness_at(const GridFunction& u, double t) {
    const StripGrid& grid = u.grid();
    const double dx = grid.dx();
    double worst = 0.0;
    for (int c = 0; c < u.components(); ++c)
        for (int i = 1; i < grid.N; ++i) {
            const double second = u.eval(c, grid.x(i - 1), t) - 2.0 * u.eval(c, grid.x(i), t) +
                                  u.eval(c, grid.x(i + 1), t);
            worst = std::max(worst, std::abs(second) / dx);
        }
    return worst;
}

SmoothingReport smoothing_analysis(const Scenario& spec, double eps, double s, int N,
                                   const SmoothingOptions& opts) {
    NilpotencyOptions nopts;
    nopts.exec = opts.exec;
    const NilpotencyReport nil = nilpotency_degree(spec, eps, s, opts.nilpotency_k_max, nopts);
    if (!nil.structural || !nil.numerical)
        throw UnsupportedError(
            "smoothing analysis requires a terminating reflection chain (nilpotent coupling)");
    if (*nil.structural != *nil.numerical)
        throw UnsupportedError("structural and numerical nilpotency degrees disagree (" +
                               std::to_string(*nil.structural) + " vs " +
                               std::to_string(*nil.numerical) + ")");

    SmoothingReport report;
    report.k = *nil.structural;
    report.transit_max = transit_max(spec);
    report.d = report.k * report.transit_max;

    SolveOptions sopts;
    sopts.N = N;
    sopts.tol = opts.tol;
    sopts.max_iter = opts.max_iter;
    sopts.exec = opts.exec;

    // Rough profile: hat with its peak off-center, nonzero at the edges it
    // feeds, so the corner data is incompatible whenever a reflection row is
    // nonzero. Smooth reference: compatible C^1 bump vanishing at both edges.
    InitialProfile rough(spec.n, N), smooth(spec.n, N);
    for (int c = 0; c < spec.n; ++c)
        for (int i = 0; i <= N; ++i) {
            const double x = static_cast<double>(i) / N;
            rough.at(c, i) = std::max(0.0, 1.0 - 2.0 * std::abs(x - 0.4));
            smooth.at(c, i) = 16.0 * x * x * (1.0 - x) * (1.0 - x);
        }

    const double horizon = 2.0 * report.d;
    const SolveReport rough_run = solve_ibvp(spec, eps, s, horizon, rough, sopts);
    const SolveReport smooth_run = solve_ibvp(spec, eps, s, horizon, smooth, sopts);

    double smooth_worst = 0.0;
    for (int jstep = 0; jstep <= 8; ++jstep) {
        const double t = s + jstep * report.d / 4.0;
        report.c1_profile.emplace_back(t, roughness_at(rough_run.solution, t));
        smooth_worst = std::max(smooth_worst, roughness_at(smooth_run.solution, t));
    }
    report.threshold = 10.0 * smooth_worst;
    for (const auto& [t, r] : report.c1_profile)
        if (r <= report.threshold) {
            report.first_smooth_time = t;
            break;
        }
    return report;
}

}  // namespace hyplab
