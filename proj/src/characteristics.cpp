#include "hyplab/characteristics.hpp"

#include <algorithm>
#include <cmath>

namespace hyplab {

namespace {

constexpr double kFloorHitTol = 1e-12;

double slope(const Scenario& spec, int j, double xi, double tau, double eps) {
    return 1.0 / spec.a_eval(j, xi, tau, eps);
}

// One classical 4th-order step of d tau / d xi from (xi0, tau0) to xi0 + h.
double rk4_step(const Scenario& spec, int j, double eps, double xi0, double tau0, double h) {
    const double k1 = slope(spec, j, xi0, tau0, eps);
    const double k2 = slope(spec, j, xi0 + 0.5 * h, tau0 + 0.5 * h * k1, eps);
    const double k3 = slope(spec, j, xi0 + 0.5 * h, tau0 + 0.5 * h * k2, eps);
    const double k4 = slope(spec, j, xi0 + h, tau0 + h * k3, eps);
    return tau0 + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Index of the stored sample closest to xi.
std::size_t nearest_sample(const CharacteristicPath& path, double xi) {
    const auto& ss = path.samples;
    auto it = std::lower_bound(ss.begin(), ss.end(), xi,
                               [](const std::pair<double, double>& s, double v) { return s.first < v; });
    if (it == ss.end()) return ss.size() - 1;
    if (it == ss.begin()) return 0;
    const std::size_t hi = static_cast<std::size_t>(it - ss.begin());
    return (xi - ss[hi - 1].first <= ss[hi].first - xi) ? hi - 1 : hi;
}

// Ordered list of abscissae between lo and hi: both endpoints plus every
// stored lattice sample strictly inside. Used as quadrature nodes.
std::vector<double> quadrature_nodes(const CharacteristicPath& path, double lo, double hi) {
    std::vector<double> nodes;
    nodes.push_back(lo);
    for (const auto& [xi, tau] : path.samples) {
        (void)tau;
        if (xi > lo + 1e-15 && xi < hi - 1e-15) nodes.push_back(xi);
    }
    if (hi > lo + 1e-15) nodes.push_back(hi);
    return nodes;
}

}  // namespace

double CharacteristicPath::tau_at(double xi) const {
    const auto& ss = samples;
    if (xi <= ss.front().first) return ss.front().second;
    if (xi >= ss.back().first) return ss.back().second;
    auto it = std::lower_bound(ss.begin(), ss.end(), xi,
                               [](const std::pair<double, double>& s, double v) { return s.first < v; });
    const std::size_t hi = static_cast<std::size_t>(it - ss.begin());
    const auto& [x0, t0] = ss[hi - 1];
    const auto& [x1, t1] = ss[hi];
    const double w = (xi - x0) / (x1 - x0);
    return (1 - w) * t0 + w * t1;
}

double precise_tau(const Scenario& spec, const CharacteristicPath& path, double xi) {
    const std::size_t i = nearest_sample(path, xi);
    const auto& [x0, t0] = path.samples[i];
    if (xi == x0) return t0;
    return rk4_step(spec, path.j, path.eps, x0, t0, xi - x0);
}

CharacteristicPath trace(const Scenario& spec, int j, double x, double t, double eps, double s,
                         double h_char) {
    if (j < 0 || j >= spec.n) throw DomainError("component index out of range");
    if (x < 0.0 || x > 1.0) throw DomainError("anchor abscissa outside [0, 1]");
    if (t < s - kFloorHitTol) throw DomainError("anchor ordinate below the strip floor");

    CharacteristicPath path;
    path.j = j;
    path.anchor_x = x;
    path.anchor_t = t;
    path.eps = eps;
    path.strip_floor = s;

    const int Q = std::max(1, static_cast<int>(std::ceil(1.0 / h_char - 1e-9)));
    const double h = 1.0 / Q;
    path.h_char = h;

    // March from the anchor to both interval ends, sampling the xi lattice.
    std::vector<std::pair<double, double>> below, above;
    {
        double xi = x, tau = t;
        int q = static_cast<int>(std::floor(x * Q + 1e-12));
        if (std::abs(q * h - x) > 1e-14) {
            tau = rk4_step(spec, j, eps, xi, tau, q * h - xi);
            xi = q * h;
            below.emplace_back(xi, tau);
        } else {
            // anchor sits on the lattice; record once below to seed the walk
            below.emplace_back(xi, tau);
        }
        while (q > 0) {
            tau = rk4_step(spec, j, eps, xi, tau, -h);
            --q;
            xi = q * h;
            below.emplace_back(xi, tau);
        }
    }
    {
        double xi = x, tau = t;
        int q = static_cast<int>(std::ceil(x * Q - 1e-12));
        if (std::abs(q * h - x) > 1e-14) {
            tau = rk4_step(spec, j, eps, xi, tau, q * h - xi);
            xi = q * h;
            above.emplace_back(xi, tau);
        }
        while (q < Q) {
            tau = rk4_step(spec, j, eps, xi, tau, h);
            ++q;
            xi = q * h;
            above.emplace_back(xi, tau);
        }
    }
    path.samples.reserve(below.size() + above.size() + 1);
    for (auto it = below.rbegin(); it != below.rend(); ++it) path.samples.push_back(*it);
    if (std::abs(path.samples.empty() ? -1.0 : path.samples.back().first - x) > 1e-14)
        path.samples.emplace_back(x, t);
    for (const auto& sample : above) path.samples.push_back(sample);

    // Backward branch: decreasing xi for rightward components, increasing for
    // leftward ones. Walk until tau drops below the floor or the edge is hit.
    const bool backward_is_left = spec.rightward(j);
    const double edge = backward_is_left ? 0.0 : 1.0;

    double prev_xi = x, prev_tau = t;
    bool found_floor = false;
    auto scan = [&](double xi, double tau) {
        if (tau < s - kFloorHitTol) {
            // Bracketed floor crossing in [prev, current]; bisect with
            // integrator substeps from the bracket endpoint above the floor.
            double lo = prev_xi, hi = xi;
            double tau_lo = prev_tau;
            for (int iter = 0; iter < 200; ++iter) {
                const double mid = 0.5 * (lo + hi);
                const double tau_mid = rk4_step(spec, j, eps, lo, tau_lo, mid - lo);
                if (std::abs(tau_mid - s) <= kFloorHitTol) {
                    lo = mid;
                    tau_lo = tau_mid;
                    break;
                }
                if (tau_mid > s) {
                    lo = mid;
                    tau_lo = tau_mid;
                } else {
                    hi = mid;
                }
                if (std::abs(hi - lo) < 1e-15) break;
            }
            path.exit = ExitKind::InitialLine;
            path.exit_abscissa = lo;
            path.exit_ordinate = s;
            found_floor = true;
            return true;
        }
        prev_xi = xi;
        prev_tau = tau;
        return false;
    };

    if (t - s <= kFloorHitTol) {
        path.exit = ExitKind::InitialLine;
        path.exit_abscissa = x;
        path.exit_ordinate = s;
        return path;
    }

    if (backward_is_left) {
        for (auto it = std::make_reverse_iterator(
                 std::lower_bound(path.samples.begin(), path.samples.end(), std::make_pair(x, t)));
             it != path.samples.rend(); ++it) {
            if (it->first >= x) continue;
            if (scan(it->first, it->second)) break;
        }
    } else {
        for (auto it = std::upper_bound(path.samples.begin(), path.samples.end(), std::make_pair(x, t));
             it != path.samples.end(); ++it) {
            if (it->first <= x) continue;
            if (scan(it->first, it->second)) break;
        }
    }

    if (!found_floor) {
        const double tau_edge = prev_tau;  // last scanned sample is the edge
        if (tau_edge - s <= kFloorHitTol) {
            // Corner hit: treated as an initial-line exit.
            path.exit = ExitKind::InitialLine;
            path.exit_abscissa = edge;
            path.exit_ordinate = s;
        } else {
            path.exit = backward_is_left ? ExitKind::LateralLeft : ExitKind::LateralRight;
            path.exit_abscissa = edge;
            path.exit_ordinate = tau_edge;
        }
    }
    return path;
}

double weight_c(const Scenario& spec, int j, double xi, double x, double t, double eps,
                const CharacteristicPath* path) {
    CharacteristicPath own;
    if (path == nullptr) {
        own = trace(spec, j, x, t, eps, std::min(t, 0.0) - 1.0);  // floor irrelevant here
        path = &own;
    }
    if (spec.b_diag[j].is_zero()) return 1.0;
    const double lo = std::min(x, xi), hi = std::max(x, xi);
    const auto nodes = quadrature_nodes(*path, lo, hi);
    double integral = 0.0;
    double prev_xi = nodes.front();
    double prev_g = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double tau = precise_tau(spec, *path, nodes[i]);
        const double g = spec.b_diag[j].eval(nodes[i], tau, eps) / spec.a_eval(j, nodes[i], tau, eps);
        if (i > 0) integral += 0.5 * (prev_g + g) * (nodes[i] - prev_xi);
        prev_xi = nodes[i];
        prev_g = g;
    }
    if (xi < x) integral = -integral;
    return std::exp(integral);
}

double weight_d(const Scenario& spec, int j, double xi, double x, double t, double eps,
                const CharacteristicPath* path) {
    CharacteristicPath own;
    if (path == nullptr) {
        own = trace(spec, j, x, t, eps, std::min(t, 0.0) - 1.0);
        path = &own;
    }
    const double tau = precise_tau(spec, *path, xi);
    return weight_c(spec, j, xi, x, t, eps, path) / spec.a_eval(j, xi, tau, eps);
}

double d_omega(const Scenario& spec, int j, double xi, double x, double t, double eps,
               Partial which, const CharacteristicPath* path) {
    CharacteristicPath own;
    if (path == nullptr) {
        own = trace(spec, j, x, t, eps, std::min(t, 0.0) - 1.0);
        path = &own;
    }
    const double lo = std::min(x, xi), hi = std::max(x, xi);
    const auto nodes = quadrature_nodes(*path, lo, hi);

    // Cumulative G(eta) = integral_x^eta of d_t a_j / a_j^2 along the curve.
    std::vector<double> taus(nodes.size()), g(nodes.size()), G(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        taus[i] = precise_tau(spec, *path, nodes[i]);
        const double aj = spec.a_eval(j, nodes[i], taus[i], eps);
        g[i] = spec.a_dt(j, nodes[i], taus[i], eps) / (aj * aj);
    }
    // G over the node list oriented left->right, then re-anchored at x.
    G[0] = 0.0;
    for (std::size_t i = 1; i < nodes.size(); ++i)
        G[i] = G[i - 1] + 0.5 * (g[i - 1] + g[i]) * (nodes[i] - nodes[i - 1]);
    const double G_at_x = (xi >= x) ? G.front() : G.back();
    for (double& v : G) v -= G_at_x;
    const double G_at_xi = (xi >= x) ? G.back() : G.front();

    const double decay = std::exp(-G_at_xi);  // exp of integral_xi^x
    switch (which) {
        case Partial::T:
            return decay;
        case Partial::X:
            return -decay / spec.a_eval(j, x, t, eps);
        case Partial::Eps: {
            // integral_xi^x of (d_eps a_j / a_j^2)(eta) * exp(G(eta)) d eta.
            double integral = 0.0;
            for (std::size_t i = 1; i < nodes.size(); ++i) {
                auto f = [&](std::size_t idx) {
                    const double aj = spec.a_eval(j, nodes[idx], taus[idx], eps);
                    return spec.a_deps(j, nodes[idx], taus[idx]) / (aj * aj) * std::exp(G[idx]);
                };
                integral += 0.5 * (f(i - 1) + f(i)) * (nodes[i] - nodes[i - 1]);
            }
            if (xi > x) integral = -integral;
            return decay * integral;
        }
    }
    return 0.0;
}

std::optional<double> intersection_xjk(const Scenario& spec, int j, int k, double x, double t,
                                       double eps, double s, double h_char) {
    if (j == k) throw DomainError("intersection needs two distinct components");
    const CharacteristicPath pj = trace(spec, j, x, t, 0.0, s, h_char);
    const double launch = spec.rightward(k) ? 0.0 : 1.0;
    const CharacteristicPath pk = trace(spec, k, launch, s, eps, s, h_char);

    // Shared lattice scan for sign changes of omega_j - omega_k.
    const int Q = static_cast<int>(std::lround(1.0 / pj.h_char));
    auto diff_at = [&](double xi) { return precise_tau(spec, pj, xi) - precise_tau(spec, pk, xi); };
    std::vector<double> xs(Q + 1), f(Q + 1);
    for (int qidx = 0; qidx <= Q; ++qidx) {
        xs[qidx] = static_cast<double>(qidx) / Q;
        f[qidx] = pj.tau_at(xs[qidx]) - pk.tau_at(xs[qidx]);
    }
    int crossings = 0;
    int bracket = -1;
    for (int qidx = 0; qidx < Q; ++qidx) {
        if (f[qidx] == 0.0 || f[qidx] * f[qidx + 1] < 0.0) {
            ++crossings;
            if (bracket < 0) bracket = qidx;
        }
    }
    if (f[Q] == 0.0) ++crossings;
    if (crossings == 0) return std::nullopt;
    if (crossings > 1)
        throw UnsupportedError("multiple characteristic crossings detected on [0, 1]");

    double lo = xs[bracket], hi = xs[bracket + 1];
    double flo = diff_at(lo);
    if (flo == 0.0) return lo;
    if (diff_at(hi) == 0.0) return hi;
    for (int iter = 0; iter < 100 && hi - lo > 1e-13; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = diff_at(mid);
        if (fmid == 0.0) return mid;
        if ((flo < 0) == (fmid < 0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double d_eps_exit(const Scenario& spec, int j, int k, double xi, double x, double t, double eps,
                  double s, double h_char) {
    const CharacteristicPath pj = trace(spec, j, x, t, 0.0, s, h_char);
    const double tau = precise_tau(spec, pj, xi);
    const CharacteristicPath pk = trace(spec, k, xi, tau, eps, s, h_char);
    if (pk.exit != ExitKind::InitialLine)
        throw DomainError("the k-curve through (xi, omega_j(xi)) does not exit at the initial line");
    const double xk = pk.exit_abscissa;
    if (xk <= 1e-12 || xk >= 1.0 - 1e-12)
        throw DomainError("floor exit lies at a strip corner");
    const double domega = d_omega(spec, k, xk, xi, tau, eps, Partial::Eps, &pk);
    return -spec.a_eval(k, xk, s, eps) * domega;
}

double d_eps_intersection(const Scenario& spec, int j, int k, double x, double t, double eps,
                          double s, double h_char) {
    const auto xjk = intersection_xjk(spec, j, k, x, t, eps, s, h_char);
    if (!xjk) throw DomainError("the characteristics do not intersect");
    const CharacteristicPath pj = trace(spec, j, x, t, 0.0, s, h_char);
    const double tau = precise_tau(spec, pj, *xjk);

    const double aj = spec.a_eval(j, *xjk, tau, 0.0);
    const double ak = spec.a_eval(k, *xjk, tau, eps);
    if (std::abs(ak - aj) < 1e-10 * (std::abs(aj) + std::abs(ak)))
        throw SingularityError("speeds coincide at the characteristic crossing");
    const double factor = (ak - aj) / (aj * ak);

    const double launch = spec.rightward(k) ? 0.0 : 1.0;
    const CharacteristicPath pk = trace(spec, k, launch, s, eps, s, h_char);
    const double domega = d_omega(spec, k, *xjk, launch, s, eps, Partial::Eps, &pk);
    return domega / factor;
}

}  // namespace hyplab
