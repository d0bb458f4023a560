#include <doctest.h>

#include <cmath>
#include <random>

#include "hyplab/characteristics.hpp"
#include "hyplab/dichotomy.hpp"
#include "hyplab/field.hpp"
#include "hyplab/operators.hpp"

using namespace hyplab;

TEST_SUITE_BEGIN("operators");

namespace {

GridFunction random_grid(int n, StripGrid g, unsigned seed) {
    GridFunction u(n, g);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double& x : u.raw()) x = dist(rng);
    return u;
}

Scenario coupled_constant() {
    // a = (1, -1); constant off-diagonal coupling via gamma; no reflection.
    Scenario s;
    s.id = "coupled-constant";
    s.n = 2;
    s.m = 1;
    s.eps0 = 0.1;
    s.a = {CoefficientSeries::constant(1.0), CoefficientSeries::constant(-1.0)};
    s.b_diag = {CoefficientSeries(), CoefficientSeries()};
    s.gamma[{0, 1}] = CoefficientSeries::constant(0.3);
    s.gamma[{1, 0}] = CoefficientSeries::constant(-0.2);
    s.beta[{0, 1}] = CoefficientSeries::constant(0.3);
    s.beta[{1, 0}] = CoefficientSeries::constant(-0.2);
    s.p.assign(1, std::vector<CoefficientSeries>(2));
    s.q.assign(1, std::vector<CoefficientSeries>(2));
    return s;
}

}  // namespace

TEST_CASE("reflection operator: zero rows give the zero vector") {
    const Scenario s = catalog("decoupled-extinction");
    StripGrid g{8, 8, 0.0, 1.0};
    const GridFunction u = random_grid(2, g, 1);
    const auto r = apply_R(s, BoundaryTrace::from_grid(u), 0.5);
    CHECK(r[0] == 0.0);
    CHECK(r[1] == 0.0);
}

TEST_CASE("reflection operator: single coupling row") {
    const Scenario s = catalog("feedback-2x2");  // p_12 = 0.5
    StripGrid g{8, 8, 0.0, 1.0};
    GridFunction u(2, g);
    for (int l = 0; l <= 8; ++l) u.at(1, 0, l) = 2.0;  // u_2(0, t) = 2
    const auto r = apply_R(s, BoundaryTrace::from_grid(u), 0.25);
    CHECK(r[0] == doctest::Approx(1.0));
    CHECK(r[1] == 0.0);
    CHECK_THROWS_AS(apply_R(s, BoundaryTrace::from_grid(u), 5.0), DomainError);
}

TEST_CASE("reflection operator: time-varying coefficient in closed form") {
    Scenario s = catalog("feedback-2x2");
    SeriesTerm cost;
    cost.kind = TermKind::PolyCos;
    cost.ct = 1;
    cost.period = 2.0 * M_PI;
    cost.coeff0 = 1.0;
    s.p[0][1] = CoefficientSeries({cost});
    StripGrid g{8, 8, 0.0, 1.0};
    GridFunction u(2, g);
    for (int l = 0; l <= 8; ++l) u.at(1, 0, l) = 3.0;
    const auto r = apply_R(s, BoundaryTrace::from_grid(u), 0.0);
    CHECK(r[0] == doctest::Approx(3.0));
}

TEST_CASE("transport operator reproduces constants when the diagonal is zero") {
    const Scenario s = catalog("decoupled-extinction");
    StripGrid g{16, 16, 0.0, 1.0};
    GridFunction v(2, g);
    for (double& x : v.raw()) x = 0.75;
    const GridFunction bv = apply_B(s, v, 0.0);
    for (double x : bv.raw()) CHECK(x == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("transport operator reads the exit ordinate") {
    // v_1(x, t) = t; backward exit of (0.5, s + 0.2) sits on the initial line.
    const Scenario s = catalog("decoupled-extinction");
    const double floor_s = 2.0;
    StripGrid g{20, 20, floor_s, 1.0};
    GridFunction v(2, g);
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i <= 20; ++i)
            for (int l = 0; l <= 20; ++l) v.at(c, i, l) = g.t(l);
    const GridFunction bv = apply_B(s, v, 0.0);
    // node (0.5, s + 0.2): i = 10, l = 4
    CHECK(bv.at(0, 10, 4) == doctest::Approx(floor_s).epsilon(1e-10));
}

TEST_CASE("field exits agree with standalone traces") {
    const Scenario s = catalog("kinetics-2x2");
    StripGrid g{24, 30, 0.5, 1.25};
    CharacteristicField field(s, 0.1, g);
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> pick_i(0, g.N), pick_l(0, g.M), pick_c(0, 1);
    for (int trial = 0; trial < 25; ++trial) {
        const int c = pick_c(rng), i = pick_i(rng), l = pick_l(rng);
        const auto& er = field.exit_record(c, i, l);
        const auto path = trace(s, c, g.x(i), g.t(l), 0.1, g.s);
        CHECK((er.lateral == 1) == (path.exit != ExitKind::InitialLine));
        CHECK(er.xi == doctest::Approx(path.exit_abscissa).epsilon(5e-7));
        CHECK(er.tau == doctest::Approx(path.exit_ordinate).epsilon(5e-7));
        const double cw = weight_c(s, c, path.exit_abscissa, g.x(i), g.t(l), 0.1, &path);
        CHECK(er.cstar == doctest::Approx(cw).epsilon(5e-6));
    }
}

TEST_CASE("data operator: floor carries phi, lateral edges carry the reflection") {
    const Scenario s = catalog("feedback-2x2");
    StripGrid g{8, 8, 0.0, 1.0};
    GridFunction u(2, g);
    InitialProfile phi(2, 8);
    for (int i = 0; i <= 8; ++i) phi.at(0, i) = 1.0 + i;
    SUBCASE("zero u pushes phi to the floor only") {
        const BoundaryField f = apply_S(s, u, phi);
        CHECK(f.eval_floor(0, 0.5) == doctest::Approx(5.0));
        for (int l = 0; l <= 8; ++l) {
            CHECK(f.lateral[0][l] == 0.0);
            CHECK(f.lateral[1][l] == 0.0);
        }
    }
    SUBCASE("zero phi and zero rows give the zero field") {
        const Scenario dec = catalog("decoupled-extinction");
        InitialProfile zero(2, 8);
        const BoundaryField f = apply_S(dec, random_grid(2, g, 7), zero);
        for (int l = 0; l <= 8; ++l) CHECK(f.lateral[0][l] == 0.0);
        CHECK(f.eval_floor(0, 0.3) == 0.0);
    }
}

TEST_CASE("compatible corner data keeps the data field continuous") {
    const Scenario s = catalog("feedback-2x2");  // u_1(0,t) = 0.5 u_2(0,t)
    const int N = 16;
    InitialProfile phi(2, N);
    for (int i = 0; i <= N; ++i) {
        const double x = static_cast<double>(i) / N;
        phi.at(1, i) = 1.0 - x;        // phi_2(0) = 1, phi_2(1) = 0
        phi.at(0, i) = 0.5 + 0.3 * x;  // phi_1(0) = 0.5 = p_12 phi_2(0)
    }
    const auto residuals = check_compatibility(s, phi, 0.0);
    CHECK(residuals[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(residuals[1] == doctest::Approx(0.0).epsilon(1e-14));  // q rows are zero and phi_2(1) = 0
}

TEST_CASE("compatibility residuals for trivial cases") {
    const Scenario dec = catalog("decoupled-extinction");
    InitialProfile zero(2, 8);
    for (double r : check_compatibility(dec, zero, 0.0)) CHECK(r == 0.0);
    InitialProfile one(2, 8);
    for (int i = 0; i <= 8; ++i) one.at(0, i) = 1.0;
    const auto res = check_compatibility(dec, one, 0.0);
    CHECK(res[0] == doctest::Approx(1.0));  // zero rows cannot match phi_1(0) = 1
}

TEST_CASE("coupling integral vanishes without off-diagonal coupling or input") {
    const Scenario dec = catalog("decoupled-extinction");
    StripGrid g{16, 16, 0.0, 1.0};
    const GridFunction w = random_grid(2, g, 11);
    CHECK(apply_D(dec, w, 0.0).sup_norm() == 0.0);
    const Scenario cc = coupled_constant();
    GridFunction zero(2, g);
    CHECK(apply_D(cc, zero, 0.0).sup_norm() == 0.0);
}

TEST_CASE("coupling integral against the constant-coefficient closed form") {
    const Scenario s = coupled_constant();
    StripGrid g{64, 64, 0.0, 1.0};
    GridFunction ones(2, g);
    for (double& x : ones.raw()) x = 1.0;
    const GridFunction dw = apply_D(s, ones, 0.0);
    // (Dw)_j = -(sum_k b_jk / a_j) (x - exit abscissa), c = 1
    for (int i = 0; i <= g.N; i += 8)
        for (int l = 0; l <= g.M; l += 8) {
            const double x = g.x(i), t = g.t(l);
            const double exit1 = std::max(0.0, x - t);
            const double b12 = s.b_eval(0, 1, x, t, 0.0);  // -0.6
            CHECK(dw.at(0, i, l) ==
                  doctest::Approx(-b12 * (x - exit1)).epsilon(1e-8));
            const double exit2 = std::min(1.0, x + t);
            const double b21 = s.b_eval(1, 0, x, t, 0.0);  // 0.4
            CHECK(dw.at(1, i, l) ==
                  doctest::Approx(-(b21 / -1.0) * (x - exit2)).epsilon(1e-8));
        }
}

TEST_CASE("source integral: zero input, closed form, exact linearity") {
    const Scenario dec = catalog("decoupled-extinction");
    StripGrid g{48, 48, 0.0, 1.0};
    GridFunction zero(2, g);
    CHECK(apply_F(dec, zero, 0.0).sup_norm() == 0.0);

    GridFunction ones(2, g);
    for (double& x : ones.raw()) x = 1.0;
    const GridFunction ff = apply_F(dec, ones, 0.0);
    // a_1 = 1, zero diagonal: (Ff)_1(x,t) = x - exit abscissa
    for (int i = 0; i <= g.N; i += 6)
        for (int l = 0; l <= g.M; l += 6) {
            const double x = g.x(i), t = g.t(l);
            CHECK(ff.at(0, i, l) == doctest::Approx(x - std::max(0.0, x - t)).epsilon(1e-9));
        }

    const GridFunction u = random_grid(2, g, 21), v = random_grid(2, g, 22);
    GridFunction combo = u;
    combo *= 0.7;
    combo += v;
    GridFunction expect = apply_F(dec, u, 0.0);
    expect *= 0.7;
    expect += apply_F(dec, v, 0.0);
    GridFunction got = apply_F(dec, combo, 0.0);
    got -= expect;
    CHECK(got.sup_norm() <= 1e-12);
}

TEST_CASE("all grid operators are linear") {
    const Scenario s = catalog("periodic-dichotomy");
    StripGrid g{20, 40, 0.0, 0.75};
    const GridFunction u = random_grid(2, g, 31), v = random_grid(2, g, 32);
    const double alpha = -1.7;
    InitialProfile zero_phi(2, g.N);

    auto combine = [&](const GridFunction& a, const GridFunction& b) {
        GridFunction c = a;
        c *= alpha;
        c += b;
        return c;
    };
    const GridFunction combo = combine(u, v);
    auto check_linear = [&](auto&& op) {
        GridFunction expect = combine(op(u), op(v));
        GridFunction got = op(combo);
        got -= expect;
        CHECK(got.sup_norm() <= 1e-12);
    };
    check_linear([&](const GridFunction& w) { return apply_D(s, w, 0.05); });
    check_linear([&](const GridFunction& w) { return apply_B(s, w, 0.05); });
    check_linear([&](const GridFunction& w) { return apply_BR(s, w, 0.05); });
    check_linear([&](const GridFunction& w) { return apply_BS(s, w, zero_phi, 0.05); });
}

TEST_CASE("coupling integral powers decay at least geometrically") {
    const Scenario s = catalog("periodic-dichotomy");
    const double T = transit_max(s);
    StripGrid g{64, 0, 0.0, T};
    g.M = std::max(1, static_cast<int>(std::lround(T * max_speed(s) / g.dx())));
    GridFunction w = random_grid(2, g, 41);
    w *= 1.0 / w.sup_norm();
    std::vector<double> norms;
    for (int p = 1; p <= 6; ++p) {
        w = apply_D(s, w, 0.0);
        norms.push_back(w.sup_norm());
    }
    for (std::size_t p = 1; p < norms.size(); ++p) CHECK(norms[p] < norms[p - 1]);
    CHECK(std::pow(norms[5] / norms[1], 0.25) <= 0.75);
    CHECK(norms[5] <= 5e-2 * norms[0]);
}

TEST_CASE("transport operator agrees with its refined-grid oracle at second order") {
    // Variable speed so the exits fall between nodes at every resolution.
    Scenario s = catalog("decoupled-extinction");
    const double eps = 0.2;
    auto smooth = [](double x, double t) { return std::sin(M_PI * x) * std::cos(0.7 * t); };
    double errs[2];
    int idx = 0;
    for (int N : {24, 48}) {
        StripGrid g{N, 2 * N, 0.0, 1.0};
        GridFunction v(2, g);
        for (int c = 0; c < 2; ++c)
            for (int i = 0; i <= g.N; ++i)
                for (int l = 0; l <= g.M; ++l) v.at(c, i, l) = smooth(g.x(i), g.t(l));
        const GridFunction bv = apply_B(s, v, eps);

        StripGrid gf{4 * N, 8 * N, 0.0, 1.0};
        GridFunction vf(2, gf);
        for (int c = 0; c < 2; ++c)
            for (int i = 0; i <= gf.N; ++i)
                for (int l = 0; l <= gf.M; ++l) vf.at(c, i, l) = smooth(gf.x(i), gf.t(l));
        const GridFunction bvf = apply_B(s, vf, eps);

        double err = 0.0;
        for (int c = 0; c < 2; ++c)
            for (int i = 0; i <= g.N; ++i)
                for (int l = 0; l <= g.M; ++l)
                    err = std::max(err, std::abs(bv.at(c, i, l) -
                                                 bvf.at(c, 4 * i, 4 * l)));
        errs[idx++] = err;
    }
    CHECK(errs[1] <= 0.35 * errs[0]);  // at least order ~1.5 observed, expect 2
}

TEST_CASE("robustness sweep refuses a non-terminating reflection chain") {
    Scenario s = catalog("feedback-2x2");
    s.p[0][0] = CoefficientSeries::constant(1.0);
    CHECK_THROWS_AS((void)robustness_sweep(s, {0.05}, 0.0, 16), PreconditionError);
}

TEST_CASE("coupling integral is Lipschitz in eps with slope near one") {
    const Scenario s = catalog("kinetics-2x2");
    StripGrid g{32, 32, 0.0, 1.0};
    const GridFunction v = random_grid(2, g, 51);
    const GridFunction d0 = apply_D(s, v, 0.0);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int k = 4; k <= 10; ++k) {
        const double eps = s.eps0 * std::pow(2.0, -k);
        GridFunction diff = apply_D(s, v, eps);
        diff -= d0;
        const double lx = std::log(eps), ly = std::log(diff.sup_norm());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++cnt;
    }
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    CHECK(slope >= 0.9);
}

TEST_CASE("nilpotency: no reflection at all dies in one power") {
    const auto rep = nilpotency_degree(catalog("decoupled-extinction"), 0.0, 0.0, 3);
    REQUIRE(rep.structural.has_value());
    REQUIRE(rep.numerical.has_value());
    CHECK(*rep.structural == 1);
    CHECK(*rep.numerical == 1);
    CHECK(rep.agree);
}

TEST_CASE("nilpotency: terminating feedback chain dies in two powers") {
    NilpotencyOptions opts;
    opts.grid_N = 32;
    const auto rep = nilpotency_degree(catalog("feedback-2x2"), 0.0, 0.0, 4, opts);
    REQUIRE(rep.structural.has_value());
    REQUIRE(rep.numerical.has_value());
    CHECK(*rep.structural == 2);
    CHECK(*rep.numerical == 2);
    CHECK(rep.agree);
}

TEST_CASE("nilpotency: full reflection never dies") {
    Scenario s = catalog("feedback-2x2");
    s.p[0][0] = CoefficientSeries::constant(0.8);  // self-loop via the opposite edge
    NilpotencyOptions opts;
    opts.grid_N = 24;
    const auto rep = nilpotency_degree(s, 0.0, 0.0, 3, opts);
    CHECK_FALSE(rep.structural.has_value());
    CHECK_FALSE(rep.numerical.has_value());
    CHECK(rep.agree);
}

TEST_SUITE_END();
