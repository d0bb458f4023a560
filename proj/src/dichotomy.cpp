#include "hyplab/dichotomy.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>
#include <Eigen/SVD>

namespace hyplab {

namespace {

double inf_norm(const Eigen::MatrixXd& A) {
    return A.rows() == 0 ? 0.0 : A.cwiseAbs().rowwise().sum().maxCoeff();
}

// Orthonormal basis of range(P) and the restriction A = Q^T T Q of the period
// map to it, with its condition number.
struct Restriction {
    Eigen::MatrixXd Q, A;
    double condition = 0.0;
};

Restriction restrict_to_range(const Eigen::MatrixXd& T, const Eigen::MatrixXd& P, int rank) {
    Restriction res;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(P);
    Eigen::MatrixXd Qfull = qr.householderQ();
    res.Q = Qfull.leftCols(rank);
    res.A = res.Q.transpose() * T * res.Q;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(res.A);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    res.condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    return res;
}

}  // namespace

double smoothing_time(const Scenario& spec) {
    const auto k = structural_nilpotency(spec);
    if (!k)
        throw PreconditionError(
            "the reflection chain does not terminate; no smoothing time exists");
    return *k * transit_max(spec);
}

std::vector<EvolutionMatrix> monodromy_sequence(const Scenario& spec, double eps, double t0,
                                                double d, int count, int N,
                                                const EvolveOptions& opts) {
    if (count < 1) throw DomainError("count must be >= 1");
    if (!(d > 0.0)) throw DomainError("smoothing time must be positive");
    std::vector<EvolutionMatrix> seq;
    seq.reserve(count);
    for (int i = 0; i < count; ++i) {
        const double lo = t0 + 2.0 * d * i;
        seq.push_back(evolution_matrix(spec, eps, lo, lo + 2.0 * d, N, opts));
    }
    return seq;
}

double monodromy_spread(const std::vector<EvolutionMatrix>& seq) {
    if (seq.empty()) throw DomainError("empty monodromy sequence");
    const double base = inf_norm(seq[0].entries);
    double spread = 0.0;
    for (std::size_t i = 1; i < seq.size(); ++i)
        spread = std::max(spread, inf_norm(seq[i].entries - seq[0].entries));
    return base > 0.0 ? spread / base : spread;
}

std::optional<DichotomyEstimate> detect_dichotomy(const EvolutionMatrix& T, double gap_tol) {
    const double period = T.t - T.s;
    if (!(period > 0.0)) throw DomainError("period map needs t > s");
    const auto split = split_at_unit_circle(T.entries, gap_tol);
    if (!split) return std::nullopt;

    DichotomyEstimate est;
    est.P = split->P;
    est.rank = split->rank;
    est.gap = split->gap;
    est.beta = split->gap / period;
    est.period_length = period;
    est.monodromy = T.entries;
    est.eigenvalues = split->eigenvalues;

    // Smallest constant validating both decay bounds over the fit window.
    const int dim = T.dim();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(dim, dim);
    double M = 1.0;
    {
        Eigen::MatrixXd power = I;
        for (int i = 0; i <= kBoundFitPeriods; ++i) {
            M = std::max(M, inf_norm(power * (I - est.P)) * std::exp(est.beta * period * i));
            if (i < kBoundFitPeriods) power = (power * T.entries).eval();
        }
    }
    if (est.rank > 0) {
        const Restriction res = restrict_to_range(T.entries, est.P, est.rank);
        if (!std::isfinite(res.condition) || res.condition > 1e12)
            throw NumericalError("expanding subspace restriction is ill-conditioned");
        const Eigen::MatrixXd Ainv = res.A.inverse();
        Eigen::MatrixXd W = res.Q * res.Q.transpose() * est.P;  // = P at power 0
        Eigen::MatrixXd Apow = Eigen::MatrixXd::Identity(est.rank, est.rank);
        for (int i = 0; i <= kBoundFitPeriods; ++i) {
            M = std::max(M, inf_norm(W) * std::exp(est.beta * period * i));
            Apow = (Apow * Ainv).eval();
            W = res.Q * Apow * res.Q.transpose() * est.P;
        }
    }
    est.bound_M = M;
    return est;
}

std::optional<DichotomyEstimate> detect_dichotomy(const std::vector<EvolutionMatrix>& seq,
                                                  double split_tol, double gap_tol) {
    if (monodromy_spread(seq) > split_tol)
        throw UnsupportedError(
            "monodromy sequence is not constant within split_tol; only the "
            "autonomous/periodic case is supported");
    return detect_dichotomy(seq[0], gap_tol);
}

DichotomyVerification verify_dichotomy(const DichotomyEstimate& est, int horizon_periods) {
    if (horizon_periods < 1) throw DomainError("horizon must be >= 1 period");
    const Eigen::MatrixXd& T = est.monodromy;
    const int dim = static_cast<int>(T.rows());
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(dim, dim);
    DichotomyVerification rep;

    // Forward sweep: commutation and the forward decay bound.
    Eigen::MatrixXd power = I;
    for (int i = 0; i <= horizon_periods; ++i) {
        if (i >= 1) {
            const double scale = inf_norm(power);
            if (scale > 1e-14)
                rep.commutation =
                    std::max(rep.commutation, inf_norm(power * est.P - est.P * power) / scale);
        }
        const double decayed = inf_norm(power * (I - est.P));
        const double bound = est.bound_M * std::exp(-est.beta * est.period_length * i);
        rep.forward = std::max(rep.forward, decayed / bound - 1.0);
        if (i < horizon_periods) power = (power * T).eval();
    }
    rep.forward = std::max(rep.forward, 0.0);

    if (est.rank > 0) {
        const Restriction res = restrict_to_range(T, est.P, est.rank);
        rep.subspace_condition = res.condition;
        if (!std::isfinite(res.condition) || res.condition > 1e12)
            throw NumericalError("expanding subspace restriction is ill-conditioned");
        const Eigen::MatrixXd Ainv = res.A.inverse();
        rep.inversion = inf_norm(T * res.Q * Ainv - res.Q);
        Eigen::MatrixXd Apow = Eigen::MatrixXd::Identity(est.rank, est.rank);
        for (int i = 0; i <= horizon_periods; ++i) {
            const Eigen::MatrixXd W = res.Q * Apow * res.Q.transpose() * est.P;
            const double bound = est.bound_M * std::exp(-est.beta * est.period_length * i);
            rep.backward = std::max(rep.backward, inf_norm(W) / bound - 1.0);
            Apow = (Apow * Ainv).eval();
        }
        rep.backward = std::max(rep.backward, 0.0);
    }
    return rep;
}

double perturbation_gap(const Scenario& spec, double eps, double s, int N,
                        const EvolveOptions& opts) {
    const double d = smoothing_time(spec);
    const EvolutionMatrix U0 = evolution_matrix(spec, 0.0, s, s + 2.0 * d, N, opts);
    const EvolutionMatrix Ue = evolution_matrix(spec, eps, s, s + 2.0 * d, N, opts);
    return inf_norm(U0.entries - Ue.entries);
}

SweepTable robustness_sweep(const Scenario& spec, const std::vector<double>& eps_list, double s,
                            int N, const EvolveOptions& opts) {
    SweepTable table;
    table.d = smoothing_time(spec);
    const double period = 2.0 * table.d;

    // Baseline: the unperturbed period map must split, and the sequence must
    // be constant (periodic/autonomous restriction).
    const auto seq0 = monodromy_sequence(spec, 0.0, s, table.d, 2, N, opts);
    std::optional<DichotomyEstimate> base;
    try {
        base = detect_dichotomy(seq0, 0.05);
    } catch (const UnsupportedError&) {
        throw;
    }
    if (!base)
        throw PreconditionError(
            "the unperturbed system has no detected dichotomy; nothing to perturb");
    table.baseline_rank = base->rank;
    table.baseline_beta = base->beta;

    const EvolutionMatrix& U0 = seq0[0];
    for (double eps : eps_list) {
        SweepRow row;
        row.eps = eps;
        try {
            EvolutionMatrix Ue =
                eps == 0.0 ? U0 : evolution_matrix(spec, eps, s, s + period, N, opts);
            row.gap = inf_norm(U0.entries - Ue.entries);
            const auto est = detect_dichotomy(Ue, 0.05);
            if (est) {
                row.found = true;
                row.rank = est->rank;
                row.beta = est->beta;
                row.bound_M = est->bound_M;
            }
        } catch (const Error& e) {
            row.error = e.what();
        }
        table.rows.push_back(row);
    }

    int threshold = static_cast<int>(table.rows.size());
    for (int i = static_cast<int>(table.rows.size()) - 1; i >= 0; --i) {
        if (table.rows[i].found && table.rows[i].rank == table.baseline_rank)
            threshold = i;
        else
            break;
    }
    table.threshold_index = threshold;
    return table;
}

}  // namespace hyplab
