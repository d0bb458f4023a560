#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "hyplab/scenario.hpp"

namespace hyplab {

enum class ExitKind { LateralLeft, LateralRight, InitialLine };
enum class Partial { X, T, Eps };

/// Default fixed step of the one-step integrator for standalone traces.
inline constexpr double kTraceStep = 1.0 / 1024.0;

/// A sampled characteristic curve tau = omega_j(xi; x, t, eps) over the whole
/// interval xi in [0, 1], with the exit of its backward (smaller-ordinate)
/// branch against the strip floor t = s.
struct CharacteristicPath {
    int j = 0;
    double anchor_x = 0.0, anchor_t = 0.0, eps = 0.0;
    double strip_floor = 0.0;
    double h_char = kTraceStep;
    /// Monotone-in-xi samples on the uniform xi lattice plus the anchor.
    std::vector<std::pair<double, double>> samples;
    ExitKind exit = ExitKind::InitialLine;
    double exit_abscissa = 0.0;
    double exit_ordinate = 0.0;

    /// Linear interpolation between stored samples.
    double tau_at(double xi) const;
};

/// Integrates the characteristic ODE d tau / d xi = 1 / a_j(xi, tau, eps)
/// through (x, t) over all of [0, 1] with a classical 4th-order one-step
/// method on a fixed lattice, and locates the backward exit point against the
/// boundary of the strip t >= s (floor crossings found to |tau - s| <= 1e-12).
/// A curve hitting a strip corner exactly is classified as an initial-line exit.
CharacteristicPath trace(const Scenario& spec, int j, double x, double t, double eps, double s,
                         double h_char = kTraceStep);

/// Recomputes tau at an arbitrary abscissa with a single integrator substep
/// from the nearest stored sample (integrator-order accurate, unlike tau_at).
double precise_tau(const Scenario& spec, const CharacteristicPath& path, double xi);

/// c_j(xi, x, t, eps) = exp integral_x^xi (b_jj / a_j) along the curve,
/// composite trapezoid on the trace lattice.
double weight_c(const Scenario& spec, int j, double xi, double x, double t, double eps,
                const CharacteristicPath* path = nullptr);
/// d_j = c_j / a_j(xi, tau(xi), eps).
double weight_d(const Scenario& spec, int j, double xi, double x, double t, double eps,
                const CharacteristicPath* path = nullptr);

/// Closed-form partial derivatives of omega_j(xi; x, t, eps) with respect to
/// the anchor coordinates and eps, evaluated by quadrature along the curve.
double d_omega(const Scenario& spec, int j, double xi, double x, double t, double eps,
               Partial which, const CharacteristicPath* path = nullptr);

/// Abscissa where the j-curve through (x, t) at eps = 0 meets the k-curve
/// launched from (0, s) for k < m / (1, s) for k >= m at the given eps.
/// Empty if the curves do not cross inside [0, 1]; multiple crossings raise
/// UnsupportedError.
std::optional<double> intersection_xjk(const Scenario& spec, int j, int k, double x, double t,
                                       double eps, double s, double h_char = kTraceStep);

/// eps-derivative of the floor-exit abscissa x_k(xi, omega_j(xi; x, t), eps)
/// of the k-curve through (xi, omega_j(xi; x, t, 0)). The exit must lie on
/// the initial line (DomainError otherwise).
double d_eps_exit(const Scenario& spec, int j, int k, double xi, double x, double t, double eps,
                  double s, double h_char = kTraceStep);

/// eps-derivative of the intersection abscissa found by intersection_xjk.
/// Raises SingularityError when the dividing factor a_k^eps - a_j vanishes at
/// the crossing.
double d_eps_intersection(const Scenario& spec, int j, int k, double x, double t, double eps,
                          double s, double h_char = kTraceStep);

}  // namespace hyplab
