#pragma once

#include "hyplab/scenario.hpp"

namespace hyplab::detail {

inline double char_slope(const Scenario& spec, int j, double xi, double tau, double eps) {
    return 1.0 / spec.a_eval(j, xi, tau, eps);
}

/// One classical 4th-order step of d tau / d xi = 1 / a_j from (xi0, tau0).
inline double char_rk4(const Scenario& spec, int j, double eps, double xi0, double tau0,
                       double h) {
    const double k1 = char_slope(spec, j, xi0, tau0, eps);
    const double k2 = char_slope(spec, j, xi0 + 0.5 * h, tau0 + 0.5 * h * k1, eps);
    const double k3 = char_slope(spec, j, xi0 + 0.5 * h, tau0 + 0.5 * h * k2, eps);
    const double k4 = char_slope(spec, j, xi0 + h, tau0 + h * k3, eps);
    return tau0 + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline constexpr double kFloorTol = 1e-12;

}  // namespace hyplab::detail
