#include "myl/bipartite.hpp"

#include <cmath>

namespace myl {

namespace {

GridFunction unit_function(const PhaseGrid& g) {
    GridFunction one(g);
    for (cplx& z : one.v) z = 1.0;
    return one;
}

cplx l2_inner(const GridFunction& a, const GridFunction& b) {
    cplx acc(0);
    for (size_t i = 0; i < a.v.size(); ++i) acc += std::conj(a.v[i]) * b.v[i];
    return acc * (a.grid.dq() * a.grid.dp());
}

}  // namespace

BipartiteFunction separable(const GridFunction& u, const GridFunction& v) {
    return BipartiteFunction{u.grid, v.grid, {u}, {v}};
}

BipartiteFunction sys_only(const GridFunction& u, const PhaseGrid& gr) {
    return separable(u, unit_function(gr));
}

BipartiteFunction res_only(const PhaseGrid& gs, const GridFunction& v) {
    return separable(unit_function(gs), v);
}

BipartiteFunction operator+(const BipartiteFunction& a, const BipartiteFunction& b) {
    require(a.gs.same_geometry(b.gs) && a.gr.same_geometry(b.gr), "bipartite: grid mismatch");
    BipartiteFunction r = a;
    r.sys.insert(r.sys.end(), b.sys.begin(), b.sys.end());
    r.res.insert(r.res.end(), b.res.begin(), b.res.end());
    return r;
}

BipartiteFunction operator-(const BipartiteFunction& a, const BipartiteFunction& b) {
    return a + (cplx(-1) * b);
}

BipartiteFunction operator*(cplx s, const BipartiteFunction& a) {
    BipartiteFunction r = a;
    for (GridFunction& u : r.sys) u = s * u;
    return r;
}

BipartiteFunction conj_bi(const BipartiteFunction& f) {
    BipartiteFunction r{f.gs, f.gr, {}, {}};
    for (size_t k = 0; k < f.rank(); ++k) {
        r.sys.push_back(conj(f.sys[k]));
        r.res.push_back(conj(f.res[k]));
    }
    return r;
}

void compress(BipartiteFunction& f, double rel_tol) {
    if (f.rank() == 0) return;
    std::vector<double> norms(f.rank());
    double top = 0;
    for (size_t k = 0; k < f.rank(); ++k) {
        norms[k] = l2_norm(f.sys[k]) * l2_norm(f.res[k]);
        top = std::max(top, norms[k]);
    }
    BipartiteFunction out{f.gs, f.gr, {}, {}};
    for (size_t k = 0; k < f.rank(); ++k)
        if (norms[k] > rel_tol * top) {
            out.sys.push_back(std::move(f.sys[k]));
            out.res.push_back(std::move(f.res[k]));
        }
    f = std::move(out);
}

double l2_norm_bi(const BipartiteFunction& f) {
    // ||f||^2 = sum_kl <u_k,u_l><v_k,v_l>
    cplx acc(0);
    for (size_t k = 0; k < f.rank(); ++k)
        for (size_t l = 0; l < f.rank(); ++l)
            acc += l2_inner(f.sys[k], f.sys[l]) * l2_inner(f.res[k], f.res[l]);
    return std::sqrt(std::max(0.0, acc.real()));
}

double l2_dist_bi(const BipartiteFunction& a, const BipartiteFunction& b) {
    return l2_norm_bi(a - b);
}

cplx integrate_bi(const BipartiteFunction& f) {
    cplx acc(0);
    for (size_t k = 0; k < f.rank(); ++k) acc += integrate(f.sys[k]) * integrate(f.res[k]);
    return acc;
}

GridFunction integrate_res(const BipartiteFunction& f) {
    GridFunction acc(f.gs);
    for (size_t k = 0; k < f.rank(); ++k) {
        const cplx w = integrate(f.res[k]);
        if (w == cplx(0)) continue;
        acc = acc + w * f.sys[k];
    }
    return acc;
}

BipartiteFunction star_bi(const BipartiteFunction& f, const BipartiteFunction& g,
                          const WeightFunction& ws, const WeightFunction& wr) {
    require(f.gs.same_geometry(g.gs) && f.gr.same_geometry(g.gr), "star_bi: grid mismatch");
    BipartiteFunction out{f.gs, f.gr, {}, {}};
    for (size_t k = 0; k < f.rank(); ++k)
        for (size_t l = 0; l < g.rank(); ++l) {
            out.sys.push_back(star(f.sys[k], g.sys[l], ws));
            out.res.push_back(star(f.res[k], g.res[l], wr));
        }
    compress(out);
    return out;
}

BipartiteFunction comm_bi(const BipartiteFunction& f, const BipartiteFunction& g,
                          const WeightFunction& ws, const WeightFunction& wr) {
    return star_bi(f, g, ws, wr) - star_bi(g, f, ws, wr);
}

cplx pairing_bi(const BipartiteFunction& A, const BipartiteFunction& rho,
                const WeightFunction& ws, const WeightFunction& wr) {
    const BipartiteFunction Ac = conj_bi(A);
    cplx acc(0);
    for (size_t k = 0; k < Ac.rank(); ++k)
        for (size_t l = 0; l < rho.rank(); ++l)
            acc += integrate(star(Ac.sys[k], rho.sys[l], ws)) *
                   integrate(star(Ac.res[k], rho.res[l], wr));
    return acc;
}

// ---------------------------------------------------------------------------
// projection suite
// ---------------------------------------------------------------------------

BipartiteFunction project(const BipartiteFunction& rho, const ProjectionConfig& cfg) {
    const GridFunction f_sigma = integrate_res(rho);
    return star_bi(res_only(rho.gs, cfg.rho_R), sys_only(f_sigma, rho.gr), cfg.ws, cfg.wr);
}

BipartiteFunction project_adjoint(const BipartiteFunction& A, const ProjectionConfig& cfg) {
    const BipartiteFunction prod = star_bi(res_only(A.gs, cfg.rho_R), A, cfg.ws, cfg.wr);
    return sys_only(integrate_res(prod), A.gr);
}

namespace {

// full phase-space Liouvillian L = (i/2mu) [H, .] with H = H_S + H_R + l H_I
BipartiteFunction liouville(const BipartiteFunction& H, const BipartiteFunction& f,
                            const ProjectionConfig& cfg) {
    const cplx scale = iu / (2.0 * cfg.ws.mu());
    return scale * comm_bi(H, f, cfg.ws, cfg.wr);
}

double rel(double num, double den) { return num / std::max(den, 1e-300); }

}  // namespace

ProjectionReport projection_checks(const ProjectionConfig& cfg, const BipartiteFunction& rho,
                                   const BipartiteFunction& obs) {
    require(check_factorization(cfg.joint, cfg.ws, cfg.wr),
            "projection_checks: joint weight does not factorize");
    {
        const GridFunction hr_br = bracket(cfg.H_R, cfg.rho_R, cfg.wr);
        const double defect = l2_norm(hr_br);
        require(defect <= 1e-8 * std::max(1.0, l2_norm(cfg.rho_R)),
                "projection_checks: [H_R, rho_R] does not vanish (residual " +
                    std::to_string(defect) + ")");
    }
    require(std::abs(integrate(cfg.rho_R) - 1.0) <= 1e-8,
            "projection_checks: rho_R must integrate to 1");

    const PhaseGrid& gs = rho.gs;
    const PhaseGrid& gr = rho.gr;
    const double rho_scale = l2_norm_bi(rho);

    ProjectionReport rep{};

    // P P = P and the reduction P rho = f_S (x) rho_R
    const BipartiteFunction p1 = project(rho, cfg);
    const BipartiteFunction p2 = project(p1, cfg);
    rep.p_idempotent = rel(l2_dist_bi(p2, p1), rho_scale);
    const BipartiteFunction plain = separable(integrate_res(rho), cfg.rho_R);
    rep.p_reduction = rel(l2_dist_bi(p1, plain), rho_scale);

    // A_S * A_R = A_S A_R for factorizing weights
    {
        const GridFunction& a_s = rho.sys[0];
        const GridFunction& a_r = rho.res[0];
        const BipartiteFunction lhs =
            star_bi(sys_only(a_s, gr), res_only(gs, a_r), cfg.ws, cfg.wr);
        rep.sep_product = rel(l2_dist_bi(lhs, separable(a_s, a_r)), l2_norm_bi(lhs));
    }

    const BipartiteFunction Hs = sys_only(cfg.H_S, gr);
    const BipartiteFunction Hr = res_only(gs, cfg.H_R);

    // (4.8a): P L_S = L_S P
    {
        const BipartiteFunction ls_rho = liouville(Hs, rho, cfg);
        const BipartiteFunction lhs = project(ls_rho, cfg);
        const BipartiteFunction rhs = liouville(Hs, project(rho, cfg), cfg);
        rep.commute_sys = rel(l2_dist_bi(lhs, rhs), std::max(l2_norm_bi(ls_rho), rho_scale));
    }
    // (4.8b): P L_R = L_R P = 0
    {
        const BipartiteFunction lr_rho = liouville(Hr, rho, cfg);
        const double scale = std::max(l2_norm_bi(Hr) * rho_scale, rho_scale);
        rep.annihilate_res_left = rel(l2_norm_bi(project(lr_rho, cfg)), scale);
        rep.annihilate_res_right = rel(l2_norm_bi(liouville(Hr, project(rho, cfg), cfg)), scale);
    }
    // (4.13): Int H_S * rho dz_R = H_S * Int rho dz_R
    {
        const GridFunction lhs = integrate_res(star_bi(Hs, rho, cfg.ws, cfg.wr));
        const GridFunction rhs = star(cfg.H_S, integrate_res(rho), cfg.ws);
        rep.h_integral = rel(l2_dist(lhs, rhs), std::max(l2_norm(rhs), 1.0));
    }
    // adjoint identity
    {
        const cplx lhs = pairing_bi(project_adjoint(obs, cfg), rho, cfg.ws, cfg.wr);
        const cplx rhs = pairing_bi(obs, project(rho, cfg), cfg.ws, cfg.wr);
        rep.adjoint_identity = rel(std::abs(lhs - rhs), std::max(std::abs(rhs), 1.0));
    }
    // full Liouville self-adjointness and commutation with P
    {
        BipartiteFunction H = Hs + Hr;
        if (cfg.lambda != 0.0) H = H + cplx(cfg.lambda) * cfg.H_I;
        const BipartiteFunction l_rho = liouville(H, rho, cfg);
        const cplx lhs = pairing_bi(obs, l_rho, cfg.ws, cfg.wr);
        const cplx rhs = pairing_bi(liouville(H, obs, cfg), rho, cfg.ws, cfg.wr);
        rep.liouville_selfadjoint = rel(std::abs(lhs - rhs), std::max(std::abs(lhs), 1.0));

        const BipartiteFunction pl = project(l_rho, cfg);
        const BipartiteFunction lp = liouville(H, project(rho, cfg), cfg);
        rep.full_commute = rel(l2_dist_bi(pl, lp), std::max(l2_norm_bi(l_rho), rho_scale));
    }
    return rep;
}

}  // namespace myl
