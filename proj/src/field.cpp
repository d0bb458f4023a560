#include "hyplab/field.hpp"

#include <algorithm>
#include <cmath>

#include "hyplab/detail/ode.hpp"

namespace hyplab {

using detail::char_rk4;
using detail::kFloorTol;

namespace {

// Scratch buffers for one node's backward march.
struct NodeScratch {
    std::vector<double> xi, tau, djw;  // abscissa, ordinate, d_j value per point
};

// Per-thread chunk of the pooled stencil data.
struct ChunkPool {
    std::vector<CharacteristicField::ExitRecord> exits;
    std::vector<double> rho;
    std::vector<std::uint32_t> counts;  // quadrature points per node
    std::vector<std::int32_t> base;
    std::vector<double> frac;
    std::vector<double> coeff;
    std::vector<double> dw;
};

}  // namespace

CharacteristicField::CharacteristicField(const Scenario& spec, double eps, StripGrid grid)
    : CharacteristicField(spec, eps, grid, Options()) {}

CharacteristicField::CharacteristicField(const Scenario& spec, double eps, StripGrid grid,
                                         Options opts)
    : spec_(spec), eps_(eps), grid_(grid), opts_(opts), n_(spec.n),
      b_offdiag_zero_(spec.b_offdiag_all_zero()) {
    if (grid_.N < 1 || grid_.M < 1 || !(grid_.T > 0.0))
        throw StructuralError("grid", "invalid strip grid");
    build();
}

void CharacteristicField::build() {
    const int N = grid_.N, M = grid_.M;
    const std::size_t per_comp = static_cast<std::size_t>(N + 1) * (M + 1);
    const std::size_t total = static_cast<std::size_t>(n_) * per_comp;
    const double dx = grid_.dx();
    const double dt = grid_.dt();
    const double s = grid_.s;
    const bool want_quad = opts_.quadrature && !b_offdiag_zero_;
    const bool want_dw = opts_.plain_weights;

    const int nthreads = std::max(1, opts_.exec.threads);
    const std::size_t chunk_size = (total + nthreads - 1) / nthreads;
    std::vector<ChunkPool> pools(nthreads);

    auto worker = [&](int ti) {
        const std::size_t begin = ti * chunk_size;
        const std::size_t end = std::min(total, begin + chunk_size);
        if (begin >= end) return;
        ChunkPool& pool = pools[ti];
        pool.exits.reserve(end - begin);
        pool.rho.reserve((end - begin) * n_);
        pool.counts.reserve(end - begin);
        NodeScratch sc;

        for (std::size_t f = begin; f < end; ++f) {
            const int ix = static_cast<int>(f % (N + 1));
            const int il = static_cast<int>((f / (N + 1)) % (M + 1));
            const int j = static_cast<int>(f / per_comp);
            const double xa = grid_.x(ix);
            const double ta = grid_.t(il);
            const bool right = spec_.rightward(j);
            const double hstep = right ? -dx : dx;

            sc.xi.clear();
            sc.tau.clear();
            sc.djw.clear();

            ExitRecord er{};
            bool exited = false;

            if (ta - s <= kFloorTol) {
                er.lateral = 0;
                er.xi = xa;
                er.tau = s;
                er.cstar = 1.0;
                exited = true;
            } else {
                // Backward march over the x-node lattice; ib accumulates the
                // signed integral of b_jj / a_j from the anchor.
                double xi = xa, tau = ta, ib = 0.0;
                double g_prev = spec_.b_diag[j].is_zero()
                                    ? 0.0
                                    : spec_.b_diag[j].eval(xi, tau, eps_) /
                                          spec_.a_eval(j, xi, tau, eps_);
                const bool b_diag_zero = spec_.b_diag[j].is_zero();
                sc.xi.push_back(xi);
                sc.tau.push_back(tau);
                sc.djw.push_back(1.0 / spec_.a_eval(j, xi, tau, eps_));
                int qix = ix;
                while (!exited) {
                    const int q_end = right ? 0 : N;
                    if (qix == q_end) {
                        // Edge reached above the floor: lateral exit, or a
                        // corner (classified as initial line).
                        if (tau - s <= kFloorTol) {
                            er.lateral = 0;
                            er.xi = xi;
                            er.tau = s;
                        } else {
                            er.lateral = 1;
                            er.xi = xi;
                            er.tau = tau;
                        }
                        er.cstar = std::exp(ib);
                        exited = true;
                        break;
                    }
                    const double xi_next = grid_.x(qix + (right ? -1 : 1));
                    double tau_next = char_rk4(spec_, j, eps_, xi, tau, xi_next - xi);
                    if (tau_next < s - kFloorTol) {
                        // Floor crossing inside this step; bisect from the
                        // still-above endpoint.
                        double lo = xi, hi = xi_next, tau_lo = tau;
                        for (int it = 0; it < 200; ++it) {
                            const double mid = 0.5 * (lo + hi);
                            const double tm = char_rk4(spec_, j, eps_, lo, tau_lo, mid - lo);
                            if (std::abs(tm - s) <= kFloorTol) {
                                lo = mid;
                                tau_lo = tm;
                                break;
                            }
                            if (tm > s) {
                                lo = mid;
                                tau_lo = tm;
                            } else {
                                hi = mid;
                            }
                            if (std::abs(hi - lo) < 1e-15) break;
                        }
                        const double g_exit =
                            b_diag_zero ? 0.0
                                        : spec_.b_diag[j].eval(lo, s, eps_) /
                                              spec_.a_eval(j, lo, s, eps_);
                        ib += 0.5 * (g_prev + g_exit) * (lo - xi);
                        er.lateral = 0;
                        er.xi = lo;
                        er.tau = s;
                        er.cstar = std::exp(ib);
                        // Exit endpoint joins the quadrature stencil.
                        sc.xi.push_back(lo);
                        sc.tau.push_back(s);
                        sc.djw.push_back(std::exp(ib) / spec_.a_eval(j, lo, s, eps_));
                        exited = true;
                        break;
                    }
                    if (tau_next < s + kFloorTol) tau_next = s;  // exact lattice floor hit
                    const double g_next =
                        b_diag_zero ? 0.0
                                    : spec_.b_diag[j].eval(xi_next, tau_next, eps_) /
                                          spec_.a_eval(j, xi_next, tau_next, eps_);
                    ib += 0.5 * (g_prev + g_next) * (xi_next - xi);
                    xi = xi_next;
                    tau = tau_next;
                    g_prev = g_next;
                    qix += right ? -1 : 1;
                    sc.xi.push_back(xi);
                    sc.tau.push_back(tau);
                    sc.djw.push_back(std::exp(ib) / spec_.a_eval(j, xi, tau, eps_));
                    if (tau == s) {
                        er.lateral = 0;
                        er.xi = xi;
                        er.tau = s;
                        er.cstar = std::exp(ib);
                        exited = true;
                    }
                }
            }

            // Interpolation anchors of the exit record.
            if (er.lateral) {
                const double ft = std::clamp((er.tau - s) / dt, 0.0, static_cast<double>(M));
                er.ibase = std::min(static_cast<int>(ft), M - 1);
                er.frac = ft - er.ibase;
            } else {
                const double fx = std::clamp(er.xi, 0.0, 1.0) * N;
                er.ibase = std::min(static_cast<int>(fx), N - 1);
                er.frac = fx - er.ibase;
            }
            pool.exits.push_back(er);
            for (int k = 0; k < n_; ++k)
                pool.rho.push_back(er.lateral ? spec_.reflection_coeff(j, k, er.tau) : 0.0);

            // Quadrature stencil: signed trapezoid along the march, which
            // realizes the orientation of the coupling integral directly.
            std::uint32_t cnt = 0;
            const std::size_t P = sc.xi.size();
            if ((want_quad || want_dw) && P >= 2) {
                for (std::size_t pt = 0; pt < P; ++pt) {
                    const double gap_prev = pt == 0 ? 0.0 : sc.xi[pt] - sc.xi[pt - 1];
                    const double gap_next = pt + 1 == P ? 0.0 : sc.xi[pt + 1] - sc.xi[pt];
                    const double w = 0.5 * (gap_prev + gap_next);
                    // Interpolation corners of the point.
                    std::int32_t b0, b1;
                    double fr;
                    if (pt + 1 == P && er.lateral == 0 && P >= 2 && sc.tau[pt] == s &&
                        std::abs(sc.xi[pt] * N - std::round(sc.xi[pt] * N)) > 1e-9) {
                        // Off-lattice floor exit: interpolate along the floor row.
                        const double fx = std::clamp(sc.xi[pt], 0.0, 1.0) * N;
                        const int c = std::min(static_cast<int>(fx), N - 1);
                        b0 = c;
                        b1 = c + 1;
                        fr = fx - c;
                    } else {
                        // Lattice point: two-level interpolation in time.
                        const int cix = static_cast<int>(std::lround(sc.xi[pt] * N));
                        const double ft =
                            std::clamp((sc.tau[pt] - s) / dt, 0.0, static_cast<double>(M));
                        const int lev = std::min(static_cast<int>(ft), M - 1);
                        b0 = lev * (N + 1) + cix;
                        b1 = (lev + 1) * (N + 1) + cix;
                        fr = ft - lev;
                    }
                    if (want_quad) {
                        bool any = false;
                        double cbuf[16];
                        int kk = 0;
                        for (int k = 0; k < n_; ++k) {
                            if (k == j) continue;
                            const double bjk = spec_.b_eval(j, k, sc.xi[pt], sc.tau[pt], eps_);
                            cbuf[kk] = w * sc.djw[pt] * bjk;
                            any = any || cbuf[kk] != 0.0;
                            ++kk;
                        }
                        pool.base.push_back(b0);
                        pool.base.push_back(b1);
                        pool.frac.push_back(fr);
                        for (int q = 0; q < n_ - 1; ++q) pool.coeff.push_back(cbuf[q]);
                        if (want_dw) pool.dw.push_back(-w * sc.djw[pt]);
                        ++cnt;
                        (void)any;
                    } else {  // want_dw only
                        pool.base.push_back(b0);
                        pool.base.push_back(b1);
                        pool.frac.push_back(fr);
                        pool.dw.push_back(-w * sc.djw[pt]);
                        ++cnt;
                    }
                }
            }
            pool.counts.push_back(cnt);
        }
    };

    if (nthreads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> threads;
        for (int ti = 0; ti < nthreads; ++ti) threads.emplace_back(worker, ti);
        for (auto& th : threads) th.join();
    }

    // Merge chunk pools.
    node_exit_.clear();
    node_rho_.clear();
    q_off_.assign(total + 1, 0);
    std::size_t pts_total = 0;
    for (const auto& pool : pools) pts_total += pool.frac.size();
    node_exit_.reserve(total);
    node_rho_.reserve(total * n_);
    q_base_.clear();
    q_base_.reserve(2 * pts_total);
    q_frac_.clear();
    q_frac_.reserve(pts_total);
    q_coeff_.clear();
    if (want_quad) q_coeff_.reserve(pts_total * (n_ - 1));
    q_dw_.clear();
    if (want_dw) q_dw_.reserve(pts_total);

    std::size_t node = 0;
    for (const auto& pool : pools) {
        node_exit_.insert(node_exit_.end(), pool.exits.begin(), pool.exits.end());
        node_rho_.insert(node_rho_.end(), pool.rho.begin(), pool.rho.end());
        for (std::uint32_t c : pool.counts) {
            q_off_[node + 1] = q_off_[node] + c;
            ++node;
        }
        q_base_.insert(q_base_.end(), pool.base.begin(), pool.base.end());
        q_frac_.insert(q_frac_.end(), pool.frac.begin(), pool.frac.end());
        q_coeff_.insert(q_coeff_.end(), pool.coeff.begin(), pool.coeff.end());
        q_dw_.insert(q_dw_.end(), pool.dw.begin(), pool.dw.end());
    }
}

void CharacteristicField::sweep(const GridFunction& u, const InitialProfile* phi,
                                GridFunction& out, unsigned parts) const {
    const int N = grid_.N, M = grid_.M;
    const std::size_t per_comp = static_cast<std::size_t>(N + 1) * (M + 1);
    const std::size_t total = total_nodes();
    const double* uraw = u.raw().data();
    double* oraw = out.raw().data();
    const bool do_bs = (parts & kBS) != 0;
    const bool do_d = (parts & kD) != 0 && !q_coeff_.empty();

    parallel_for(total, opts_.exec, [&](std::size_t begin, std::size_t end) {
        for (std::size_t f = begin; f < end; ++f) {
            const int j = static_cast<int>(f / per_comp);
            const ExitRecord& er = node_exit_[f];
            double acc = 0.0;
            if (do_bs) {
                if (er.lateral) {
                    const double* rho = &node_rho_[f * n_];
                    const int lev = er.ibase;
                    double sum = 0.0;
                    for (int k = 0; k < n_; ++k) {
                        if (rho[k] == 0.0) continue;
                        const int edge_ix = spec_.rightward(k) ? N : 0;
                        const std::size_t b = k * per_comp + lev * (N + 1) + edge_ix;
                        sum += rho[k] * ((1.0 - er.frac) * uraw[b] + er.frac * uraw[b + (N + 1)]);
                    }
                    acc = er.cstar * sum;
                } else if (phi != nullptr) {
                    const int i0 = er.ibase;
                    acc = er.cstar *
                          ((1.0 - er.frac) * phi->at(j, i0) + er.frac * phi->at(j, i0 + 1));
                }
            }
            if (do_d) {
                const std::size_t koff = static_cast<std::size_t>(n_ - 1);
                for (std::size_t p = q_off_[f]; p < q_off_[f + 1]; ++p) {
                    const std::int32_t b0 = q_base_[2 * p], b1 = q_base_[2 * p + 1];
                    const double fr = q_frac_[p];
                    int kk = 0;
                    for (int k = 0; k < n_; ++k) {
                        if (k == j) continue;
                        const double c = q_coeff_[p * koff + kk];
                        ++kk;
                        if (c == 0.0) continue;
                        const std::size_t kb = k * per_comp;
                        acc += c * ((1.0 - fr) * uraw[kb + b0] + fr * uraw[kb + b1]);
                    }
                }
            }
            oraw[f] = acc;
        }
    });
}

void CharacteristicField::apply_B_grid(const GridFunction& v, GridFunction& out) const {
    const std::size_t per_comp = static_cast<std::size_t>(grid_.N + 1) * (grid_.M + 1);
    parallel_for(total_nodes(), opts_.exec, [&](std::size_t begin, std::size_t end) {
        for (std::size_t f = begin; f < end; ++f) {
            const int j = static_cast<int>(f / per_comp);
            const ExitRecord& er = node_exit_[f];
            out.raw()[f] = er.cstar * v.eval(j, er.xi, er.tau);
        }
    });
}

void CharacteristicField::apply_B_data(const BoundaryField& data, GridFunction& out) const {
    const std::size_t per_comp = static_cast<std::size_t>(grid_.N + 1) * (grid_.M + 1);
    parallel_for(total_nodes(), opts_.exec, [&](std::size_t begin, std::size_t end) {
        for (std::size_t f = begin; f < end; ++f) {
            const int j = static_cast<int>(f / per_comp);
            const ExitRecord& er = node_exit_[f];
            out.raw()[f] = er.cstar * (er.lateral ? data.eval_lateral(j, er.tau)
                                                  : data.eval_floor(j, er.xi));
        }
    });
}

void CharacteristicField::apply_BR(const GridFunction& u, GridFunction& out) const {
    sweep(u, nullptr, out, kBS);
}

void CharacteristicField::apply_F_grid(const GridFunction& f_fn, GridFunction& out) const {
    if (!opts_.plain_weights)
        throw Error("field was built without source-integral weights");
    const std::size_t per_comp = static_cast<std::size_t>(grid_.N + 1) * (grid_.M + 1);
    const double* fraw = f_fn.raw().data();
    parallel_for(total_nodes(), opts_.exec, [&](std::size_t begin, std::size_t end) {
        for (std::size_t f = begin; f < end; ++f) {
            const int j = static_cast<int>(f / per_comp);
            const std::size_t jb = j * per_comp;
            double acc = 0.0;
            for (std::size_t p = q_off_[f]; p < q_off_[f + 1]; ++p) {
                const double fr = q_frac_[p];
                acc += q_dw_[p] * ((1.0 - fr) * fraw[jb + q_base_[2 * p]] +
                                   fr * fraw[jb + q_base_[2 * p + 1]]);
            }
            out.raw()[f] = acc;
        }
    });
}

void CharacteristicField::sweep_batched(const double* u_in, double* u_out, int C, int col0,
                                        unsigned parts) const {
    const int N = grid_.N, M = grid_.M;
    const std::size_t per_comp = static_cast<std::size_t>(N + 1) * (M + 1);
    const std::size_t total = total_nodes();
    const bool do_bs = (parts & kBS) != 0;
    const bool do_d = (parts & kD) != 0 && !q_coeff_.empty();

    parallel_for(total, opts_.exec, [&](std::size_t begin, std::size_t end) {
        for (std::size_t f = begin; f < end; ++f) {
            const int j = static_cast<int>(f / per_comp);
            const ExitRecord& er = node_exit_[f];
            double* out_row = u_out + f * C;
            std::fill(out_row, out_row + C, 0.0);
            if (do_bs) {
                if (er.lateral) {
                    const double* rho = &node_rho_[f * n_];
                    for (int k = 0; k < n_; ++k) {
                        if (rho[k] == 0.0) continue;
                        const int edge_ix = spec_.rightward(k) ? N : 0;
                        const std::size_t b = k * per_comp + er.ibase * (N + 1) + edge_ix;
                        const double w0 = er.cstar * rho[k] * (1.0 - er.frac);
                        const double w1 = er.cstar * rho[k] * er.frac;
                        const double* r0 = u_in + b * C;
                        const double* r1 = u_in + (b + (N + 1)) * C;
                        for (int c = 0; c < C; ++c) out_row[c] += w0 * r0[c] + w1 * r1[c];
                    }
                } else {
                    // Hat initial data: exactly two basis columns contribute.
                    const int g0 = j * (N + 1) + er.ibase;
                    if (g0 >= col0 && g0 < col0 + C) out_row[g0 - col0] += er.cstar * (1.0 - er.frac);
                    const int g1 = g0 + 1;
                    if (er.ibase + 1 <= N && g1 >= col0 && g1 < col0 + C)
                        out_row[g1 - col0] += er.cstar * er.frac;
                }
            }
            if (do_d) {
                const std::size_t koff = static_cast<std::size_t>(n_ - 1);
                for (std::size_t p = q_off_[f]; p < q_off_[f + 1]; ++p) {
                    const std::int32_t b0 = q_base_[2 * p], b1 = q_base_[2 * p + 1];
                    const double fr = q_frac_[p];
                    int kk = 0;
                    for (int k = 0; k < n_; ++k) {
                        if (k == j) continue;
                        const double cw = q_coeff_[p * koff + kk];
                        ++kk;
                        if (cw == 0.0) continue;
                        const std::size_t kb = k * per_comp;
                        const double w0 = cw * (1.0 - fr);
                        const double w1 = cw * fr;
                        const double* r0 = u_in + (kb + b0) * C;
                        const double* r1 = u_in + (kb + b1) * C;
                        for (int c = 0; c < C; ++c) out_row[c] += w0 * r0[c] + w1 * r1[c];
                    }
                }
            }
        }
    });
}

}  // namespace hyplab
