#include <doctest.h>

#include <cmath>
#include <random>

#include "hyplab/evolution.hpp"

using namespace hyplab;

TEST_SUITE_BEGIN("evolution");

TEST_CASE("the evolution matrix at t = s is the identity") {
    const Scenario s = catalog("kinetics-2x2");
    const EvolutionMatrix U = evolution_matrix(s, 0.1, 0.5, 0.5, 8);
    CHECK(U.entries.isIdentity(0.0));
    CHECK(U.inf_norm() == 1.0);
}

TEST_CASE("zero-inflow transport goes extinct after the transit window") {
    // k = 1, transit 1: after t - s = 2 every backward characteristic exits
    // laterally with zero boundary data.
    const Scenario s = catalog("decoupled-extinction");
    const EvolutionMatrix U = evolution_matrix(s, 0.0, 0.0, 2.0, 60);
    CHECK(U.inf_norm() <= 1e-9);
}

TEST_CASE("matrix columns agree with direct solves") {
    const Scenario s = catalog("kinetics-2x2");
    const int N = 32;
    const double T = 0.8;
    EvolveOptions eopts;
    const EvolutionMatrix U = evolution_matrix(s, 0.05, 0.0, T, N, eopts);

    InitialProfile phi(2, N);
    for (int i = 0; i <= N; ++i) {
        const double x = static_cast<double>(i) / N;
        phi.at(0, i) = std::sin(M_PI * x);
        phi.at(1, i) = x * (1.0 - x) * 2.0;
    }
    SolveOptions sopts;
    sopts.N = N;
    const SolveReport rep = solve_ibvp(s, 0.05, 0.0, T, phi, sopts);

    Eigen::VectorXd v(U.dim());
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i <= N; ++i) v(c * (N + 1) + i) = phi.at(c, i);
    const Eigen::VectorXd top = U.entries * v;
    double diff = 0.0;
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i <= N; ++i)
            diff = std::max(diff, std::abs(top(c * (N + 1) + i) -
                                           rep.solution.at(c, i, rep.solution.grid().M)));
    CHECK(diff <= 10.0 * sopts.tol);
}

TEST_CASE("cocycle law holds to rounding on the aligned default grid") {
    // With dt = dx * max|a| and constant speeds every characteristic passes
    // through lattice points, so composing through the seam loses nothing.
    const Scenario s = catalog("kinetics-2x2");
    const EvolutionMatrix Uts = evolution_matrix(s, 0.05, 0.25, 0.5, 32);
    const EvolutionMatrix Usr = evolution_matrix(s, 0.05, 0.0, 0.25, 32);
    const EvolutionMatrix Utr = evolution_matrix(s, 0.05, 0.0, 0.5, 32);
    const Eigen::MatrixXd prod = Uts.entries * Usr.entries;
    const double defect =
        (Utr.entries - prod).cwiseAbs().rowwise().sum().maxCoeff() / Utr.inf_norm();
    CHECK(defect <= 1e-8);  // fixed-point tolerance scale, not discretization scale
}

TEST_CASE("cocycle defect stays within bounds and shrinks off the aligned lattice") {
    const Scenario s = catalog("kinetics-2x2");
    double defect[2];
    int idx = 0;
    for (int N : {24, 48}) {
        EvolveOptions half;
        half.M_override = static_cast<int>(std::lround(N * 0.25 * 1.37));
        EvolveOptions full;
        full.M_override = 2 * *half.M_override;
        const EvolutionMatrix Uts = evolution_matrix(s, 0.05, 0.25, 0.5, N, half);
        const EvolutionMatrix Usr = evolution_matrix(s, 0.05, 0.0, 0.25, N, half);
        const EvolutionMatrix Utr = evolution_matrix(s, 0.05, 0.0, 0.5, N, full);
        const Eigen::MatrixXd prod = Uts.entries * Usr.entries;
        defect[idx++] = (Utr.entries - prod).cwiseAbs().rowwise().sum().maxCoeff() /
                        Utr.inf_norm();
    }
    CHECK(defect[0] <= 0.02);
    CHECK(defect[1] < defect[0]);
}

TEST_CASE("unit-horizon norms of the transport family stay near one") {
    const Scenario s = catalog("decoupled-extinction");
    const double bound = bound_check(s, 0.0, {0.0, 0.3}, 40);
    CHECK(bound >= 1.0);
    CHECK(bound <= 1.0 + 1e-9);
}

TEST_CASE("roughness of a kinked profile collapses after the smoothing time") {
    const Scenario s = catalog("feedback-2x2");
    const SmoothingReport rep = smoothing_analysis(s, 0.0, 0.0, 100);
    CHECK(rep.k == 2);
    CHECK(rep.transit_max == doctest::Approx(1.0));
    CHECK(rep.d == doctest::Approx(2.0));
    CHECK(rep.d >= rep.transit_max);
    REQUIRE(rep.c1_profile.size() == 9);
    const double rough0 = rep.c1_profile.front().second;
    CHECK(rough0 > 1.0);  // the kink is visible at t = s
    for (const auto& [t, r] : rep.c1_profile)
        if (t >= rep.d - 1e-12) CHECK(r <= rough0 / 10.0);
    REQUIRE(rep.first_smooth_time.has_value());
    CHECK(*rep.first_smooth_time <= rep.d + 1e-12);
}

TEST_CASE("smoothing analysis rejects non-terminating reflection chains") {
    Scenario s = catalog("feedback-2x2");
    s.p[0][0] = CoefficientSeries::constant(0.9);
    CHECK_THROWS_AS(smoothing_analysis(s, 0.0, 0.0, 32), UnsupportedError);
}

TEST_CASE("extinction scenario is exactly flat after the smoothing time") {
    const Scenario s = catalog("decoupled-extinction");
    const SmoothingReport rep = smoothing_analysis(s, 0.0, 0.0, 64);
    CHECK(rep.k == 1);
    for (const auto& [t, r] : rep.c1_profile)
        if (t >= 2.0 * rep.d) CHECK(r == 0.0);
}

TEST_SUITE_END();
