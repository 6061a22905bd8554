#include "myl/star.hpp"

#include "myl/fft.hpp"

#include <algorithm>
#include <cmath>

namespace myl {

namespace {

// Omega sampled on the grid band, with overflow gates for both Omega and
// 1/Omega (real-exponent families grow off the diagonal of the band).
struct WeightTable {
    std::vector<cplx> omega, inv_omega;

    WeightTable(const WeightFunction& w, const PhaseGrid& g) {
        const BandReport rep = weight_band_report(w, g);
        if (rep.max_log_omega > 700.0)
            throw audit_error("star kernel overflow: log|Omega|max = " +
                              std::to_string(rep.max_log_omega) + " on the band");
        if (-rep.min_log_omega > 700.0)
            throw audit_error("star kernel overflow: log|1/Omega|max = " +
                              std::to_string(-rep.min_log_omega) + " on the band");
        omega.resize(g.size());
        inv_omega.resize(g.size());
        for (size_t a = 0; a < g.n_q; ++a)
            for (size_t b = 0; b < g.n_p; ++b) {
                const cplx lg = w.log_omega(g.eta(a), g.xi(b));
                omega[a * g.n_p + b] = std::exp(lg);
                inv_omega[a * g.n_p + b] = std::exp(-lg);
            }
    }
};

// exp(+nu * eta_a * xi_d) and exp(-...) tables indexed [eta index][xi index].
struct TwistTables {
    std::vector<cplx> plus, minus;

    TwistTables(cplx nu, const PhaseGrid& g) {
        double worst = 0;
        for (size_t a : {size_t(0), g.n_q - 1})
            for (size_t d : {size_t(0), g.n_p - 1})
                worst = std::max(worst, std::abs(nu.real() * g.eta(a) * g.xi(d)));
        if (worst > 700.0)
            throw audit_error("star kernel overflow: twist exponent " + std::to_string(worst));
        plus.resize(g.size());
        minus.resize(g.size());
        for (size_t a = 0; a < g.n_q; ++a)
            for (size_t d = 0; d < g.n_p; ++d) {
                const cplx e = std::exp(nu * (g.eta(a) * g.xi(d)));
                plus[a * g.n_p + d] = e;
                minus[a * g.n_p + d] = 1.0 / e;
            }
    }
};

enum class Kernel { star_exp, bracket_sinh, anti_cosh };

// Direct O(N^2) mode-pair sum. Output row a is independent work; the d loop
// runs in fixed order so results are reproducible.
GridFunction direct_twisted(const GridFunction& f, const GridFunction& g,
                            const WeightFunction& w, cplx nu, Kernel kind) {
    require(f.grid.same_geometry(g.grid), "star: grid mismatch");
    const PhaseGrid& G = f.grid;
    const size_t nq = G.n_q, np = G.n_p;
    const size_t hq = nq / 2, hp = np / 2;

    const WeightTable wt(w, G);
    const TwistTables tw(nu, G);

    SpectralFunction F = forward_ft(f), H = forward_ft(g);
    for (size_t i = 0; i < F.v.size(); ++i) {
        F.v[i] *= wt.omega[i];
        H.v[i] *= wt.omega[i];
    }

    const bool need_minus = kind != Kernel::star_exp;
    SpectralFunction out(G);
    const double cell = G.deta() * G.dxi() / (2.0 * pi);

    // the algebra lives on the symmetric sub-band: the unpaired most-negative
    // row/column (index 0, no sign partner) neither sources nor receives.
    parallel_for(nq, [&](size_t a_lo, size_t a_hi) {
        std::vector<cplx> fa_p(nq * np), fa_m(need_minus ? nq * np : 0);
        for (size_t a = std::max<size_t>(a_lo, 1); a < a_hi; ++a) {
            // fa[b][d] = Fhat[b][d] * exp(+/- nu eta_a xi_d)
            for (size_t b = 0; b < nq; ++b)
                for (size_t d = 0; d < np; ++d) {
                    fa_p[b * np + d] = F.v[b * np + d] * tw.plus[a * np + d];
                    if (need_minus) fa_m[b * np + d] = F.v[b * np + d] * tw.minus[a * np + d];
                }
            const size_t b_lo = std::max<size_t>((a + 1 > hq) ? a + 1 - hq : 0, 1);
            const size_t b_hi = std::min(nq, a + hq);  // a-b+hq in [1,nq)
            for (size_t c = 1; c < np; ++c) {
                const size_t d_lo = std::max<size_t>((c + 1 > hp) ? c + 1 - hp : 0, 1);
                const size_t d_hi = std::min(np, c + hp);
                cplx acc_p(0), acc_m(0);
                for (size_t b = b_lo; b < b_hi; ++b) {
                    const cplx* hrow = &H.v[(a - b + hq) * np + (c + hp)];
                    const cplx* fp = &fa_p[b * np];
                    cplx s_p(0);
                    for (size_t d = d_lo; d < d_hi; ++d) s_p += fp[d] * hrow[-ptrdiff_t(d)];
                    acc_p += tw.minus[b * np + c] * s_p;
                    if (need_minus) {
                        const cplx* fm = &fa_m[b * np];
                        cplx s_m(0);
                        for (size_t d = d_lo; d < d_hi; ++d) s_m += fm[d] * hrow[-ptrdiff_t(d)];
                        acc_m += tw.plus[b * np + c] * s_m;
                    }
                }
                cplx val(0);
                switch (kind) {
                    case Kernel::star_exp: val = acc_p; break;
                    case Kernel::bracket_sinh: val = (acc_p - acc_m) / (2.0 * nu); break;
                    case Kernel::anti_cosh: val = acc_p + acc_m; break;
                }
                out.v[a * np + c] = val * cell * wt.inv_omega[a * np + c];
            }
        }
    });
    return inverse_ft(out);
}

}  // namespace

GridFunction star(const GridFunction& f, const GridFunction& g, const WeightFunction& w) {
    return direct_twisted(f, g, w, w.mu(), Kernel::star_exp);
}

GridFunction bracket(const GridFunction& f, const GridFunction& g, const WeightFunction& w) {
    return direct_twisted(f, g, w, w.mu(), Kernel::bracket_sinh);
}

GridFunction anti_bracket(const GridFunction& f, const GridFunction& g,
                          const WeightFunction& w) {
    return direct_twisted(f, g, w, w.mu(), Kernel::anti_cosh);
}

GridFunction lambda_star(const GridFunction& f, const GridFunction& g, cplx lambda, cplx nu) {
    WeightFunction w = lambda_weight(lambda);
    return direct_twisted(f, g, w, nu, Kernel::star_exp);
}

GridFunction u_map(const GridFunction& f, const WeightFunction& w) {
    const WeightTable wt(w, f.grid);
    SpectralFunction F = forward_ft(f);
    for (size_t i = 0; i < F.v.size(); ++i) F.v[i] *= wt.omega[i];
    return inverse_ft(F);
}

GridFunction u_inv(const GridFunction& f, const WeightFunction& w) {
    const WeightTable wt(w, f.grid);
    SpectralFunction F = forward_ft(f);
    for (size_t i = 0; i < F.v.size(); ++i) F.v[i] *= wt.inv_omega[i];
    return inverse_ft(F);
}

StarOp make_star_op(const WeightFunction& w) {
    return [w](const GridFunction& a, const GridFunction& b) { return star(a, b, w); };
}

// ---------------------------------------------------------------------------
// Triple kernels
// ---------------------------------------------------------------------------

namespace {

struct Freq {
    double eta, xi;
};

inline double wedge(const Freq& u, const Freq& v) { return u.eta * v.xi - v.eta * u.xi; }

GridFunction triple_direct(const GridFunction& f, const GridFunction& g, const GridFunction& h,
                           const WeightFunction& w,
                           const std::function<cplx(double, double)>& kernel) {
    require(f.grid.same_geometry(g.grid) && f.grid.same_geometry(h.grid),
            "triple op: grid mismatch");
    const PhaseGrid& G = f.grid;
    require(G.n_q <= 16 && G.n_p <= 16,
            "triple op: direct O(N^3) kernel is gated at 16x16 modes; use the nested "
            "pairwise route for larger grids");
    const size_t nq = G.n_q, np = G.n_p, hq = nq / 2, hp = np / 2;

    const WeightTable wt(w, G);
    SpectralFunction Fw = forward_ft(f), Gw = forward_ft(g), Hw = forward_ft(h);
    for (size_t i = 0; i < Fw.v.size(); ++i) {
        Fw.v[i] *= wt.omega[i];
        Gw.v[i] *= wt.omega[i];
        Hw.v[i] *= wt.omega[i];
    }

    SpectralFunction out(G);
    const double cell2 = std::pow(G.deta() * G.dxi() / (2.0 * pi), 2);

    parallel_for(nq, [&](size_t a_lo, size_t a_hi) {
        for (size_t a = std::max<size_t>(a_lo, 1); a < a_hi; ++a)
            for (size_t c = 1; c < np; ++c) {
                cplx acc(0);
                for (size_t b1 = 1; b1 < nq; ++b1)
                    for (size_t d1 = 1; d1 < np; ++d1) {
                        const cplx fv = Fw.v[b1 * np + d1];
                        if (fv == cplx(0)) continue;
                        const Freq s1{G.eta(b1), G.xi(d1)};
                        // eta indices satisfy b1 + b2 + b3 - 3 hq = a - hq
                        for (size_t b2 = 1; b2 < nq; ++b2) {
                            const size_t b3 = a + 2 * hq >= b1 + b2 ? a + 2 * hq - b1 - b2 : nq;
                            if (b3 == 0 || b3 >= nq) continue;
                            for (size_t d2 = 1; d2 < np; ++d2) {
                                const size_t d3 =
                                    c + 2 * hp >= d1 + d2 ? c + 2 * hp - d1 - d2 : np;
                                if (d3 == 0 || d3 >= np) continue;
                                const Freq s2{G.eta(b2), G.xi(d2)};
                                const Freq s3{G.eta(b3), G.xi(d3)};
                                const Freq s23{s2.eta + s3.eta, s2.xi + s3.xi};
                                acc += fv * Gw.v[b2 * np + d2] * Hw.v[b3 * np + d3] *
                                       kernel(wedge(s3, s2), wedge(s23, s1));
                            }
                        }
                    }
                out.v[a * np + c] = acc * cell2 * wt.inv_omega[a * np + c];
            }
    });
    return inverse_ft(out);
}

}  // namespace

GridFunction triple_star(const GridFunction& f, const GridFunction& g, const GridFunction& h,
                         const WeightFunction& w) {
    const double half_h = 0.5 * w.hbar;
    // exp(mu [(sigma'+sigma'')^sigma + sigma''^sigma']), mu = i hbar/2
    return triple_direct(f, g, h, w, [half_h](double w_inner, double w_outer) {
        return std::exp(cplx(0, half_h * (w_inner + w_outer)));
    });
}

GridFunction nested_ops(TripleKind kind, const GridFunction& f, const GridFunction& g,
                        const GridFunction& h, const WeightFunction& w) {
    const double half_h = 0.5 * w.hbar;
    switch (kind) {
        case TripleKind::comm_comm:
            // 2 sinh(mu w1) * 2 sinh(mu w2) = -4 sin sin
            return triple_direct(f, g, h, w, [half_h](double w1, double w2) {
                return cplx(-4.0 * std::sin(half_h * w1) * std::sin(half_h * w2), 0);
            });
        case TripleKind::comm_anti:
            // 2 cosh(mu w1) * 2 sinh(mu w2) = 4 i cos sin
            return triple_direct(f, g, h, w, [half_h](double w1, double w2) {
                return cplx(0, 4.0 * std::cos(half_h * w1) * std::sin(half_h * w2));
            });
        case TripleKind::anti_comm:
            return triple_direct(f, g, h, w, [half_h](double w1, double w2) {
                return cplx(0, 4.0 * std::sin(half_h * w1) * std::cos(half_h * w2));
            });
    }
    throw error("nested_ops: bad kind");
}

GridFunction nested_ops_pairwise(TripleKind kind, const GridFunction& f, const GridFunction& g,
                                 const GridFunction& h, const WeightFunction& w) {
    const cplx two_mu = 2.0 * w.mu();
    switch (kind) {
        case TripleKind::comm_comm:
            return two_mu * two_mu * bracket(f, bracket(g, h, w), w);
        case TripleKind::comm_anti:
            return two_mu * bracket(f, anti_bracket(g, h, w), w);
        case TripleKind::anti_comm:
            return two_mu * anti_bracket(f, bracket(g, h, w), w);
    }
    throw error("nested_ops_pairwise: bad kind");
}

// ---------------------------------------------------------------------------
// FixedStar / RhoTables: mixed-representation fast application
// ---------------------------------------------------------------------------

namespace {

// Y[m] = sum_d X[d] exp(i xi_d (p_m + shift)), p_m on the doubled momentum
// grid (n_pp = 2 n_p points). Batched over rows.
void synth_rows_fine(const PhaseGrid& g, const cplx* rows, size_t nrows, double shift,
                     cplx* out /* nrows x n_pp */) {
    const size_t np = g.n_p, npp = 2 * np;
    for (size_t r = 0; r < nrows; ++r) {
        cplx* dst = out + r * npp;
        const cplx* src = rows + r * np;
        for (size_t d = 0; d < np; ++d)
            dst[d] = src[d] * std::exp(cplx(0, g.xi(d) * (shift + g.p_min)));
        std::fill(dst + np, dst + npp, cplx(0));
    }
    fft_rows(out, npp, nrows, true);
    // the (d - n_p/2) frequency offset becomes a (-i)^m factor
    static const cplx ph[4] = {cplx(1, 0), cplx(0, -1), cplx(-1, 0), cplx(0, 1)};
    for (size_t r = 0; r < nrows; ++r) {
        cplx* dst = out + r * npp;
        for (size_t m = 0; m < npp; ++m) dst[m] *= ph[m % 4];
    }
}

}  // namespace

RhoTables::RhoTables(const SpectralFunction& rho, const WeightFunction& w) : grid(rho.grid) {
    const size_t nq = grid.n_q, np = grid.n_p;
    n_pp = 2 * np;
    const WeightTable wt(w, grid);
    std::vector<cplx> rho_hat(rho.v);
    for (size_t i = 0; i < rho_hat.size(); ++i) rho_hat[i] *= wt.omega[i];
    // unpaired most-negative row/column stays outside the algebra
    for (size_t d = 0; d < np; ++d) rho_hat[d] = cplx(0);
    for (size_t b = 0; b < nq; ++b) rho_hat[b * np] = cplx(0);

    tab_minus.resize(nq * nq * n_pp);
    tab_plus.resize(nq * nq * n_pp);
    const double half_h = 0.5 * w.hbar;
    parallel_for(nq, [&](size_t lo, size_t hi) {
        for (size_t b = lo; b < hi; ++b) {
            const double s = half_h * grid.eta(b);
            synth_rows_fine(grid, rho_hat.data(), nq, -s, &tab_minus[b * nq * n_pp]);
            synth_rows_fine(grid, rho_hat.data(), nq, +s, &tab_plus[b * nq * n_pp]);
        }
    });
}

RhoTables::RhoTables(const GridFunction& rho, const WeightFunction& w)
    : RhoTables(forward_ft(rho), w) {}

struct FixedStar::Impl {
    PhaseGrid grid;
    WeightFunction w;
    size_t n_pp;
    std::vector<cplx> inv_omega;
    // f_plus[b][r][m]: Omega-weighted f row b synthesized at p_m + hbar eta_r / 2
    std::vector<cplx> f_plus, f_minus;

    Impl(const GridFunction& f, const WeightFunction& w_) : grid(f.grid), w(w_) {
        const size_t nq = grid.n_q, np = grid.n_p;
        n_pp = 2 * np;
        const WeightTable wt(w, grid);
        inv_omega = wt.inv_omega;
        SpectralFunction F = forward_ft(f);
        for (size_t i = 0; i < F.v.size(); ++i) F.v[i] *= wt.omega[i];
        for (size_t d = 0; d < np; ++d) F.v[d] = cplx(0);
        for (size_t b = 0; b < nq; ++b) F.v[b * np] = cplx(0);

        f_plus.resize(nq * nq * n_pp);
        f_minus.resize(nq * nq * n_pp);
        std::vector<cplx> syn(nq * n_pp);
        const double half_h = 0.5 * w.hbar;
        // index as [b][r][m]: row b of f, shift from rho row r
        for (size_t r = 0; r < nq; ++r) {
            const double s = half_h * grid.eta(r);
            synth_rows_fine(grid, F.v.data(), nq, +s, syn.data());
            for (size_t b = 0; b < nq; ++b)
                std::copy(&syn[b * n_pp], &syn[(b + 1) * n_pp], &f_plus[(b * nq + r) * n_pp]);
            synth_rows_fine(grid, F.v.data(), nq, -s, syn.data());
            for (size_t b = 0; b < nq; ++b)
                std::copy(&syn[b * n_pp], &syn[(b + 1) * n_pp], &f_minus[(b * nq + r) * n_pp]);
        }
    }

    SpectralFunction apply(const RhoTables& rho, Mode mode) const {
        require(grid.same_geometry(rho.grid), "FixedStar: grid mismatch");
        const size_t nq = grid.n_q, np = grid.n_p, hq = nq / 2;
        const bool want_left = mode != Mode::right;
        const bool want_right = mode != Mode::left;

        // acc[u][m], u = output eta index; per-thread buffers merged in order
        const int nt = std::max(1, std::min<int>(thread_count(), int(nq)));
        std::vector<std::vector<cplx>> acc_l(nt), acc_r(nt);
        for (int t = 0; t < nt; ++t) {
            if (want_left) acc_l[t].assign(nq * n_pp, cplx(0));
            if (want_right) acc_r[t].assign(nq * n_pp, cplx(0));
        }
        const size_t chunk = (nq + nt - 1) / nt;
        parallel_for(nt, [&](size_t t_lo, size_t t_hi) {
            for (size_t t = t_lo; t < t_hi; ++t) {
                const size_t b_lo = t * chunk, b_hi = std::min(nq, b_lo + chunk);
                for (size_t b = b_lo; b < b_hi; ++b)
                    for (size_t r = 1; r < nq; ++r) {
                        const size_t u = b + r >= hq ? b + r - hq : nq;
                        if (u == 0 || u >= nq) continue;
                        const size_t off = (b * nq + r) * n_pp;
                        if (want_left) {
                            cplx* a = &acc_l[t][u * n_pp];
                            const cplx* fp = &f_plus[off];
                            const cplx* rm = &rho.tab_minus[off];
                            for (size_t m = 0; m < n_pp; ++m) a[m] += fp[m] * rm[m];
                        }
                        if (want_right) {
                            cplx* a = &acc_r[t][u * n_pp];
                            const cplx* fm = &f_minus[off];
                            const cplx* rp = &rho.tab_plus[off];
                            for (size_t m = 0; m < n_pp; ++m) a[m] += fm[m] * rp[m];
                        }
                    }
            }
        });
        for (int t = 1; t < nt; ++t) {
            if (want_left)
                for (size_t i = 0; i < acc_l[0].size(); ++i) acc_l[0][i] += acc_l[t][i];
            if (want_right)
                for (size_t i = 0; i < acc_r[0].size(); ++i) acc_r[0][i] += acc_r[t][i];
        }

        auto extract = [&](std::vector<cplx>& acc) {
            for (size_t u = 0; u < nq; ++u) {
                cplx* row = &acc[u * n_pp];
                for (size_t m = 1; m < n_pp; m += 2) row[m] = -row[m];
            }
            fft_rows(acc.data(), n_pp, nq, false);
        };
        if (want_left) extract(acc_l[0]);
        if (want_right) extract(acc_r[0]);

        SpectralFunction out(grid);
        const double cell = grid.deta() * grid.dxi() / (2.0 * pi);
        const cplx two_mu = 2.0 * w.mu();
        for (size_t u = 1; u < nq; ++u)
            for (size_t d = 1; d < np; ++d) {
                const size_t W = d + np / 2;  // fine-band index of xi_d
                const double xi = grid.xi(d);
                const cplx post = std::exp(cplx(0, -xi * grid.p_min)) / double(n_pp);
                cplx val(0);
                switch (mode) {
                    case Mode::left: val = acc_l[0][u * n_pp + W]; break;
                    case Mode::right: val = acc_r[0][u * n_pp + W]; break;
                    case Mode::bracket:
                        val = (acc_l[0][u * n_pp + W] - acc_r[0][u * n_pp + W]) / two_mu;
                        break;
                    case Mode::anti:
                        val = acc_l[0][u * n_pp + W] + acc_r[0][u * n_pp + W];
                        break;
                }
                out.v[u * np + d] = val * post * cell * inv_omega[u * np + d];
            }
        return out;
    }
};

FixedStar::FixedStar(const GridFunction& f, const WeightFunction& w)
    : impl_(std::make_unique<Impl>(f, w)) {}
FixedStar::~FixedStar() = default;
FixedStar::FixedStar(FixedStar&&) noexcept = default;
FixedStar& FixedStar::operator=(FixedStar&&) noexcept = default;

SpectralFunction FixedStar::apply(const RhoTables& rho, Mode mode) const {
    return impl_->apply(rho, mode);
}

GridFunction FixedStar::apply(const GridFunction& rho, Mode mode) const {
    RhoTables tabs(rho, impl_->w);
    return inverse_ft(impl_->apply(tabs, mode));
}

const PhaseGrid& FixedStar::grid() const { return impl_->grid; }

}  // namespace myl
