#include "hyplab/series.hpp"

#include <algorithm>

namespace hyplab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double ipow(double v, int p) {
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= v;
    return r;
}

// Time factor and its t-derivative.
double time_factor(const SeriesTerm& term, double t) {
    switch (term.kind) {
        case TermKind::PolyPoly:
            return ipow(t, term.ct);
        case TermKind::PolyCos:
            return std::cos(kTwoPi * term.ct * t / term.period);
        case TermKind::PolySin:
            return std::sin(kTwoPi * term.ct * t / term.period);
    }
    return 0.0;
}

double time_factor_dt(const SeriesTerm& term, double t) {
    switch (term.kind) {
        case TermKind::PolyPoly:
            return term.ct == 0 ? 0.0 : term.ct * ipow(t, term.ct - 1);
        case TermKind::PolyCos: {
            const double w = kTwoPi * term.ct / term.period;
            return -w * std::sin(w * t);
        }
        case TermKind::PolySin: {
            const double w = kTwoPi * term.ct / term.period;
            return w * std::cos(w * t);
        }
    }
    return 0.0;
}

}  // namespace

std::string to_string(TermKind k) {
    switch (k) {
        case TermKind::PolyPoly: return "poly_poly";
        case TermKind::PolyCos: return "poly_cos";
        case TermKind::PolySin: return "poly_sin";
    }
    return "?";
}

TermKind term_kind_from_string(const std::string& s) {
    if (s == "poly_poly") return TermKind::PolyPoly;
    if (s == "poly_cos") return TermKind::PolyCos;
    if (s == "poly_sin") return TermKind::PolySin;
    throw ParseError("unknown term kind '" + s + "'");
}

CoefficientSeries::CoefficientSeries(std::vector<SeriesTerm> terms) : terms_(std::move(terms)) {
    for (const auto& term : terms_) {
        if (term.cx < 0 || term.ct < 0)
            throw StructuralError("terms", "cx and ct must be non-negative");
        if (term.kind != TermKind::PolyPoly && term.period <= 0.0)
            throw StructuralError("terms", "trigonometric term requires a positive period");
    }
}

CoefficientSeries CoefficientSeries::constant(double c0, double c_eps) {
    SeriesTerm term;
    term.coeff0 = c0;
    term.coeff_eps = c_eps;
    return CoefficientSeries({term});
}

double CoefficientSeries::eval(double x, double t, double eps) const {
    double acc = 0.0;
    for (const auto& term : terms_)
        acc += (term.coeff0 + eps * term.coeff_eps) * ipow(x, term.cx) * time_factor(term, t);
    return acc;
}

double CoefficientSeries::dx(double x, double t, double eps) const {
    double acc = 0.0;
    for (const auto& term : terms_) {
        if (term.cx == 0) continue;
        acc += (term.coeff0 + eps * term.coeff_eps) * term.cx * ipow(x, term.cx - 1) *
               time_factor(term, t);
    }
    return acc;
}

double CoefficientSeries::dt(double x, double t, double eps) const {
    double acc = 0.0;
    for (const auto& term : terms_)
        acc += (term.coeff0 + eps * term.coeff_eps) * ipow(x, term.cx) * time_factor_dt(term, t);
    return acc;
}

double CoefficientSeries::deps(double x, double t) const {
    double acc = 0.0;
    for (const auto& term : terms_)
        acc += term.coeff_eps * ipow(x, term.cx) * time_factor(term, t);
    return acc;
}

bool CoefficientSeries::is_zero() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const SeriesTerm& term) {
        return term.coeff0 == 0.0 && term.coeff_eps == 0.0;
    });
}

bool CoefficientSeries::eps_independent() const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const SeriesTerm& term) { return term.coeff_eps == 0.0; });
}

bool CoefficientSeries::x_independent() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const SeriesTerm& term) {
        return term.cx == 0 || (term.coeff0 == 0.0 && term.coeff_eps == 0.0);
    });
}

double CoefficientSeries::max_period() const {
    double p = 0.0;
    for (const auto& term : terms_)
        if (term.kind != TermKind::PolyPoly) p = std::max(p, term.period);
    return p;
}

CoefficientSeries CoefficientSeries::at_eps_zero() const {
    std::vector<SeriesTerm> out = terms_;
    for (auto& term : out) term.coeff_eps = 0.0;
    return CoefficientSeries(std::move(out));
}

}  // namespace hyplab
