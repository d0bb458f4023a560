#include <doctest.h>

#include <cmath>

#include "hyplab/series.hpp"

using namespace hyplab;

TEST_SUITE_BEGIN("series");

TEST_CASE("constant series evaluates and differentiates") {
    auto s = CoefficientSeries::constant(2.5, -0.5);
    CHECK(s.eval(0.3, 7.0, 0.0) == 2.5);
    CHECK(s.eval(0.3, 7.0, 0.2) == doctest::Approx(2.4).epsilon(1e-15));
    CHECK(s.dx(0.3, 7.0, 0.2) == 0.0);
    CHECK(s.dt(0.3, 7.0, 0.2) == 0.0);
    CHECK(s.deps(0.3, 7.0) == -0.5);
    CHECK_FALSE(s.eps_independent());
    CHECK(s.x_independent());
}

TEST_CASE("polynomial term powers") {
    SeriesTerm t;
    t.cx = 2;
    t.ct = 1;
    t.coeff0 = 3.0;
    CoefficientSeries s({t});
    CHECK(s.eval(0.5, 4.0, 0.0) == doctest::Approx(3.0 * 0.25 * 4.0));
    CHECK(s.dx(0.5, 4.0, 0.0) == doctest::Approx(3.0 * 2.0 * 0.5 * 4.0));
    CHECK(s.dt(0.5, 4.0, 0.0) == doctest::Approx(3.0 * 0.25));
}

TEST_CASE("trigonometric terms use the harmonic of the period") {
    SeriesTerm t;
    t.kind = TermKind::PolyCos;
    t.ct = 1;
    t.period = 2.0 * M_PI;  // plain cos(t)
    t.coeff0 = 1.0;
    CoefficientSeries s({t});
    CHECK(s.eval(0.0, 0.0, 0.0) == doctest::Approx(1.0));
    CHECK(s.eval(0.0, M_PI / 2.0, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s.dt(0.0, 0.0, 0.0) == doctest::Approx(0.0));
    CHECK(s.dt(0.0, M_PI / 2.0, 0.0) == doctest::Approx(-1.0));
    CHECK(s.max_period() == 2.0 * M_PI);
}

TEST_CASE("derivatives match central differences at random points") {
    SeriesTerm t1;
    t1.cx = 1;
    t1.ct = 2;
    t1.coeff0 = 0.7;
    t1.coeff_eps = 0.3;
    SeriesTerm t2;
    t2.kind = TermKind::PolySin;
    t2.cx = 2;
    t2.ct = 3;
    t2.period = 1.5;
    t2.coeff0 = -0.4;
    t2.coeff_eps = 0.1;
    CoefficientSeries s({t1, t2});

    const double delta = 1e-6;
    for (double x : {0.1, 0.5, 0.9})
        for (double tt : {0.0, 0.3, 2.7}) {
            const double eps = 0.05;
            const double fd_x = (s.eval(x + delta, tt, eps) - s.eval(x - delta, tt, eps)) / (2 * delta);
            const double fd_t = (s.eval(x, tt + delta, eps) - s.eval(x, tt - delta, eps)) / (2 * delta);
            const double fd_e = (s.eval(x, tt, eps + delta) - s.eval(x, tt, eps - delta)) / (2 * delta);
            CHECK(s.dx(x, tt, eps) == doctest::Approx(fd_x).epsilon(1e-7));
            CHECK(s.dt(x, tt, eps) == doctest::Approx(fd_t).epsilon(1e-7));
            CHECK(s.deps(x, tt) == doctest::Approx(fd_e).epsilon(1e-7));
        }
}

TEST_CASE("evaluation is bit-stable across calls") {
    SeriesTerm t;
    t.kind = TermKind::PolyCos;
    t.cx = 3;
    t.ct = 2;
    t.period = 0.7;
    t.coeff0 = 1.234567;
    t.coeff_eps = -0.9;
    CoefficientSeries s({t});
    const double v1 = s.eval(0.123, 4.567, 0.089);
    for (int i = 0; i < 10; ++i) CHECK(s.eval(0.123, 4.567, 0.089) == v1);
}

TEST_CASE("structural validation of terms") {
    SeriesTerm bad;
    bad.kind = TermKind::PolySin;
    bad.period = 0.0;
    CHECK_THROWS_AS(CoefficientSeries({bad}), StructuralError);
    CHECK_THROWS_AS(term_kind_from_string("fourier"), ParseError);
}

TEST_SUITE_END();
