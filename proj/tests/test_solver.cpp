#include <doctest.h>

#include <cmath>
#include <random>

#include "hyplab/operators.hpp"
#include "hyplab/solver.hpp"

using namespace hyplab;

TEST_SUITE_BEGIN("solver");

namespace {

InitialProfile sine_profile(int n, int N, int comp = -1) {
    InitialProfile phi(n, N);
    for (int c = 0; c < n; ++c) {
        if (comp >= 0 && c != comp) continue;
        for (int i = 0; i <= N; ++i)
            phi.at(c, i) = std::sin(M_PI * static_cast<double>(i) / N);
    }
    return phi;
}

// Exact solution of one-way transport with unit speed, zero inflow, zero b.
double shifted_sine(double x, double t_minus_s) {
    const double y = x - t_minus_s;
    return y >= 0.0 && y <= 1.0 ? std::sin(M_PI * y) : 0.0;
}

}  // namespace

TEST_CASE("zero data solves to zero in one sweep") {
    const Scenario s = catalog("decoupled-extinction");
    InitialProfile zero(2, 50);
    SolveOptions opts;
    opts.N = 50;
    const SolveReport rep = solve_ibvp(s, 0.0, 0.0, 1.0, zero, opts);
    CHECK(rep.iterations == 1);
    CHECK(rep.residual == 0.0);
    CHECK(rep.solution.sup_norm() == 0.0);
    CHECK(rep.apriori_ratio == 0.0);
    CHECK(apriori_check(rep, 1.0));
}

TEST_CASE("pure transport reproduces the shifted profile at second order") {
    // dt deliberately incommensurate with dx so the floor exits fall between
    // x-nodes and the interpolation error is actually exercised; with the
    // default aligned step this solve is exact to rounding.
    const Scenario s = catalog("decoupled-extinction");
    double errors[2];
    int idx = 0;
    for (int N : {50, 100}) {
        SolveOptions opts;
        opts.N = N;
        opts.M_override = static_cast<int>(std::lround(N * 1.37));
        const SolveReport rep = solve_ibvp(s, 0.0, 0.0, 1.0, sine_profile(2, N, 0), opts);
        const StripGrid& g = rep.solution.grid();
        double err = 0.0;
        for (int i = 0; i <= g.N; ++i)
            for (int l = 0; l <= g.M; ++l)
                err = std::max(err, std::abs(rep.solution.at(0, i, l) -
                                             shifted_sine(g.x(i), g.t(l))));
        errors[idx++] = err;
        CHECK(rep.apriori_ratio <= 1.0 + 1e-12);
        CHECK(apriori_check(rep, 1.0));
    }
    const double order = std::log2(errors[0] / errors[1]);
    CHECK(order >= 1.8);
}

TEST_CASE("coupled scenario converges with a small defect") {
    const Scenario s = catalog("kinetics-2x2");
    SolveOptions opts;
    opts.N = 80;
    const SolveReport rep = solve_ibvp(s, 0.05, 0.0, 1.5, sine_profile(2, 80), opts);
    CHECK(rep.residual <= opts.tol);
    CHECK(rep.solution.all_finite());
    CHECK(apriori_check(rep, 1.5));
}

TEST_CASE("incompatible corners are accepted with a warning") {
    const Scenario s = catalog("feedback-2x2");
    InitialProfile phi(2, 40);
    for (int i = 0; i <= 40; ++i) phi.at(0, i) = 1.0;  // phi_1(0) = 1 != 0.5 phi_2(0)
    SolveOptions opts;
    opts.N = 40;
    const SolveReport rep = solve_ibvp(s, 0.0, 0.0, 1.0, phi, opts);
    CHECK(rep.compatibility_warning);
    CHECK(rep.compatibility_residual == doctest::Approx(1.0));
    CHECK(rep.residual <= opts.tol);
}

TEST_CASE("solution is linear in the initial data") {
    const Scenario s = catalog("kinetics-2x2");
    SolveOptions opts;
    opts.N = 48;
    const double alpha = 0.6;
    InitialProfile phi1 = sine_profile(2, 48, 0);
    InitialProfile phi2(2, 48);
    for (int i = 0; i <= 48; ++i) {
        const double x = i / 48.0;
        phi2.at(1, i) = x * (1.0 - x);
    }
    InitialProfile combo(2, 48);
    for (std::size_t i = 0; i < combo.values.size(); ++i)
        combo.values[i] = alpha * phi1.values[i] + phi2.values[i];

    const GridFunction u1 = solve_ibvp(s, 0.05, 0.0, 1.0, phi1, opts).solution;
    const GridFunction u2 = solve_ibvp(s, 0.05, 0.0, 1.0, phi2, opts).solution;
    GridFunction uc = solve_ibvp(s, 0.05, 0.0, 1.0, combo, opts).solution;
    for (std::size_t i = 0; i < uc.raw().size(); ++i)
        uc.raw()[i] -= alpha * u1.raw()[i] + u2.raw()[i];
    CHECK(uc.sup_norm() <= 10.0 * opts.tol);
}

TEST_CASE("fixed-point defect of a reference solution drops under grid refinement") {
    // The exact transport field sampled on two grids; the defect of the
    // discrete fixed-point equations should fall at least by 3 per halving.
    const Scenario s = catalog("decoupled-extinction");
    double defects[2];
    int idx = 0;
    for (int N : {40, 80}) {
        StripGrid g = make_strip_grid(s, 0.0, 1.0, N, static_cast<int>(std::lround(N * 1.37)));
        GridFunction uref(2, g);
        for (int i = 0; i <= g.N; ++i)
            for (int l = 0; l <= g.M; ++l)
                uref.at(0, i, l) = shifted_sine(g.x(i), g.t(l) - g.s);
        InitialProfile phi = sine_profile(2, N, 0);
        GridFunction rhs = apply_BS(s, uref, phi, 0.0);
        rhs += apply_D(s, uref, 0.0);
        rhs -= uref;
        defects[idx++] = rhs.sup_norm();
    }
    CHECK(defects[0] / defects[1] >= 3.0);
}

TEST_CASE("solution is causal: extending the horizon changes nothing below") {
    const Scenario s = catalog("kinetics-2x2");
    SolveOptions opts;
    opts.N = 40;
    const InitialProfile phi = sine_profile(2, 40);
    opts.M_override = 20;  // dt = 1/40 on both horizons, so the levels nest
    const SolveReport short_run = solve_ibvp(s, 0.05, 0.0, 0.5, phi, opts);
    opts.M_override = 40;
    const SolveReport long_run = solve_ibvp(s, 0.05, 0.0, 1.0, phi, opts);
    const StripGrid& gs = short_run.solution.grid();
    double diff = 0.0;
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i <= gs.N; ++i)
            for (int l = 0; l <= gs.M; ++l)
                diff = std::max(diff, std::abs(short_run.solution.at(c, i, l) -
                                               long_run.solution.at(c, i, l)));
    CHECK(diff <= 10.0 * opts.tol);
}

TEST_CASE("different first iterates reach the same fixed point") {
    const Scenario s = catalog("kinetics-2x2");
    SolveOptions opts;
    opts.N = 40;
    const InitialProfile phi = sine_profile(2, 40);
    const SolveReport base = solve_ibvp(s, 0.1, 0.0, 1.0, phi, opts);

    StripGrid g = make_strip_grid(s, 0.0, 1.0, 40);
    GridFunction start(2, g);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double& x : start.raw()) x = dist(rng);
    SolveOptions opts2 = opts;
    opts2.initial_iterate = &start;
    const SolveReport other = solve_ibvp(s, 0.1, 0.0, 1.0, phi, opts2);

    GridFunction diff = base.solution;
    diff -= other.solution;
    CHECK(diff.sup_norm() <= 10.0 * opts.tol);
}

TEST_CASE("operator identity relating perturbed and unperturbed solutions") {
    const Scenario s = catalog("kinetics-2x2");
    const double eps = s.eps0 / 4.0;
    SolveOptions opts;
    opts.N = 60;
    const InitialProfile phi = sine_profile(2, 60);
    const SolveReport run0 = solve_ibvp(s, 0.0, 0.0, 1.0, phi, opts);
    SolveOptions optse = opts;
    optse.M_override = run0.solution.grid().M;  // shared grid for both runs
    const SolveReport runE = solve_ibvp(s, eps, 0.0, 1.0, phi, optse);

    GridFunction w = run0.solution;
    w -= runE.solution;
    InitialProfile zero_phi(2, 60);
    GridFunction rhs = apply_BS(s, w, zero_phi, 0.0);
    rhs += apply_BS(s, runE.solution, phi, 0.0);
    GridFunction bse = apply_BS(s, runE.solution, phi, eps);
    rhs -= bse;
    rhs += apply_D(s, w, 0.0);
    rhs += apply_D(s, runE.solution, 0.0);
    GridFunction de = apply_D(s, runE.solution, eps);
    rhs -= de;
    GridFunction residual = w;
    residual -= rhs;
    CHECK(residual.sup_norm() <= 10.0 * opts.tol);
}

TEST_SUITE_END();
