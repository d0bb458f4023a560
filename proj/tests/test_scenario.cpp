#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "hyplab/scenario.hpp"

using namespace hyplab;

TEST_SUITE_BEGIN("scenario");

namespace {

Scenario two_constant_speeds(double a1, double a2) {
    Scenario s;
    s.n = 2;
    s.m = 1;
    s.eps0 = 0.1;
    s.a = {CoefficientSeries::constant(a1), CoefficientSeries::constant(a2)};
    s.b_diag = {CoefficientSeries(), CoefficientSeries()};
    s.p.assign(1, std::vector<CoefficientSeries>(2));
    s.q.assign(1, std::vector<CoefficientSeries>(2));
    return s;
}

}  // namespace

TEST_CASE("constant-coefficient pair passes all checks") {
    const Scenario s = two_constant_speeds(1.0, -1.0);
    const ValidationReport r = validate(s, 10);
    CHECK(r.pass);
    for (const auto& c : r.checks) {
        CAPTURE(c.name);
        CHECK(c.pass);
        if (c.name == "speed_separation") CHECK(c.extremal == doctest::Approx(1.0));
    }
}

TEST_CASE("sign violation is reported for the offending component") {
    const Scenario s = two_constant_speeds(1.0, +1.0);
    const ValidationReport r = validate(s, 10);
    CHECK_FALSE(r.pass);
    bool found = false;
    for (const auto& c : r.checks)
        if (c.name == "speed_sign") {
            found = true;
            CHECK_FALSE(c.pass);
            CHECK(c.detail.find("j=2") != std::string::npos);
        }
    CHECK(found);
}

TEST_CASE("constructive factorization has zero residual") {
    Scenario s = two_constant_speeds(1.0, -1.0);
    SeriesTerm lin;
    lin.cx = 1;
    lin.coeff0 = 0.5;
    s.a[0] = CoefficientSeries({SeriesTerm{0, 0, TermKind::PolyPoly, 1.0, 0.0, 0.0}, lin});
    s.gamma[{0, 1}] = CoefficientSeries::constant(0.3);
    s.beta[{0, 1}] = CoefficientSeries::constant(0.3);
    const ValidationReport r = validate(s, 10);
    CHECK(r.pass);
    for (const auto& c : r.checks)
        if (c.name == "factorization_gamma" || c.name == "factorization_beta")
            CHECK(c.extremal <= 1e-12);
    // b_12 really is gamma * (a_2 - a_1)
    CHECK(s.b_eval(0, 1, 0.5, 0.0, 0.0) == doctest::Approx(0.3 * (-1.0 - 1.25)));
}

TEST_CASE("dimension mismatch names the field") {
    Scenario s = two_constant_speeds(1.0, -1.0);
    s.p.clear();
    try {
        validate(s, 5);
        FAIL("expected StructuralError");
    } catch (const StructuralError& e) {
        CHECK(e.field() == "p");
    }
}

TEST_CASE("catalog entries validate and carry the documented structure") {
    for (const auto& name : catalog_names()) {
        CAPTURE(name);
        const Scenario s = catalog(name);
        CHECK(s.id == name);
        CHECK(validate(s, 10).pass);
    }
    const Scenario dec = catalog("decoupled-extinction");
    CHECK(dec.reflection_all_zero());
    CHECK(dec.b_offdiag_all_zero());
    const Scenario fb = catalog("feedback-2x2");
    CHECK(fb.reflection_nonzero(0, 1));
    CHECK_FALSE(fb.reflection_nonzero(0, 0));
    CHECK_FALSE(fb.reflection_nonzero(1, 0));
    CHECK_FALSE(fb.reflection_nonzero(1, 1));
    CHECK_THROWS_AS(catalog("unknown"), LookupError);
}

TEST_CASE("factorization residual holds at all eps samples") {
    const Scenario s = catalog("kinetics-2x2");
    for (double eps : {0.0, s.eps0 / 2.0, s.eps0})
        for (double x : {0.0, 0.3, 1.0})
            for (double t : {0.0, 0.7}) {
                const double b0 = s.b_eval(0, 1, x, t, 0.0);
                const double beta = s.beta_at(0, 1)->eval(x, t, eps);
                const double res =
                    std::abs(b0 - beta * (s.a_eval(1, x, t, eps) - s.a_eval(0, x, t, 0.0)));
                CHECK(res <= 1e-12);
            }
}

TEST_CASE("JSON round trip preserves evaluation") {
    const Scenario s = catalog("periodic-dichotomy");
    const std::string text = scenario_to_json_text(s);
    const Scenario back = scenario_from_json_text(text);
    CHECK(back.n == s.n);
    CHECK(back.m == s.m);
    CHECK(back.eps0 == s.eps0);
    for (double x : {0.0, 0.25, 1.0})
        for (double t : {0.0, 0.9, 1.7})
            for (double eps : {0.0, 0.1}) {
                for (int j = 0; j < s.n; ++j)
                    CHECK(back.a_eval(j, x, t, eps) == s.a_eval(j, x, t, eps));
                for (int j = 0; j < s.n; ++j)
                    for (int k = 0; k < s.n; ++k)
                        CHECK(back.b_eval(j, k, x, t, eps) == s.b_eval(j, k, x, t, eps));
            }
}

TEST_CASE("parser rejects unknown keys and malformed terms") {
    CHECK_THROWS_AS(scenario_from_json_text("{\"n\": 1, \"shape\": 3}"), ParseError);
    CHECK_THROWS_AS(scenario_from_json_text("not json"), ParseError);
    const std::string with_extra = R"({
        "n": 1, "m": 1, "eps0": 0.1,
        "a": [[{"cx":0,"ct":0,"kind":"poly_poly","coeff0":1.0,"coeffEps":0.0,"surprise":1}]],
        "b_diag": [[]], "p": [[[]]], "q": []
    })";
    CHECK_THROWS_AS(scenario_from_json_text(with_extra), ParseError);
    const std::string poly_with_period = R"({
        "n": 1, "m": 1, "eps0": 0.1,
        "a": [[{"cx":0,"ct":0,"kind":"poly_poly","coeff0":1.0,"coeffEps":0.0,"period":2.0}]],
        "b_diag": [[]], "p": [[[]]], "q": []
    })";
    CHECK_THROWS_AS(scenario_from_json_text(poly_with_period), ParseError);
}

TEST_CASE("transit bound and speed bound for the catalog") {
    const Scenario dec = catalog("decoupled-extinction");
    CHECK(transit_max(dec) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(max_speed(dec) == doctest::Approx(1.075).epsilon(1e-12));
    const Scenario pd = catalog("periodic-dichotomy");
    CHECK(transit_max(pd) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(max_speed(pd) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_SUITE_END();
