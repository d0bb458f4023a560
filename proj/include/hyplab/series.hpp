#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hyplab/errors.hpp"

namespace hyplab {

/// Time factor of one series term. Polynomial terms use t^ct; trigonometric
/// terms use cos/sin(2*pi*ct*t/period), so ct is the harmonic index.
enum class TermKind : std::uint8_t { PolyPoly, PolyCos, PolySin };

std::string to_string(TermKind k);
TermKind term_kind_from_string(const std::string& s);

struct SeriesTerm {
    int cx = 0;            // power of x, >= 0
    int ct = 0;            // power of t (poly) or harmonic index (trig), >= 0
    TermKind kind = TermKind::PolyPoly;
    double coeff0 = 0.0;   // coefficient at eps = 0
    double coeff_eps = 0.0;// linear-in-eps part of the coefficient
    double period = 0.0;   // > 0 required for trig kinds, unused for poly
};

/// Closed-form coefficient: sum of terms (coeff0 + eps*coeff_eps) * x^cx * psi(t).
/// Evaluation and all first partials (x, t, eps) are exact; nothing is tabulated.
class CoefficientSeries {
public:
    CoefficientSeries() = default;
    explicit CoefficientSeries(std::vector<SeriesTerm> terms);

    /// A one-term series constant in x and t.
    static CoefficientSeries constant(double c0, double c_eps = 0.0);

    double eval(double x, double t, double eps) const;
    double dx(double x, double t, double eps) const;
    double dt(double x, double t, double eps) const;
    double deps(double x, double t) const;

    bool is_zero() const;
    bool eps_independent() const;
    bool x_independent() const;
    /// Largest period among trig terms, 0 if the series has none.
    double max_period() const;

    const std::vector<SeriesTerm>& terms() const { return terms_; }

    /// Returns a copy with every coeff_eps dropped (the eps = 0 restriction
    /// promoted to an eps-independent series).
    CoefficientSeries at_eps_zero() const;

private:
    std::vector<SeriesTerm> terms_;
};

}  // namespace hyplab
