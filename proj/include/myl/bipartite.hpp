#pragma once

#include "myl/grid.hpp"
#include "myl/star.hpp"
#include "myl/weights.hpp"

namespace myl {

// ---------------------------------------------------------------------------
// Functions on a bipartite phase space (system x reservoir), held as sums of
// separable terms f = sum_k u_k(z_S) (x) v_k(z_R). With a factorizing weight
// the star product acts factor by factor, so every identity below is
// evaluated on the full 4-d grid without ever materializing it.
// ---------------------------------------------------------------------------

struct BipartiteFunction {
    PhaseGrid gs, gr;
    std::vector<GridFunction> sys;
    std::vector<GridFunction> res;

    size_t rank() const { return sys.size(); }
};

BipartiteFunction separable(const GridFunction& u, const GridFunction& v);
/// u(z_S) as a joint function (tensor with the constant 1 on gr).
BipartiteFunction sys_only(const GridFunction& u, const PhaseGrid& gr);
BipartiteFunction res_only(const PhaseGrid& gs, const GridFunction& v);

BipartiteFunction operator+(const BipartiteFunction& a, const BipartiteFunction& b);
BipartiteFunction operator-(const BipartiteFunction& a, const BipartiteFunction& b);
BipartiteFunction operator*(cplx s, const BipartiteFunction& a);
BipartiteFunction conj_bi(const BipartiteFunction& f);

/// Drop separable terms below rel_tol of the largest term norm.
void compress(BipartiteFunction& f, double rel_tol = 1e-15);

double l2_norm_bi(const BipartiteFunction& f);
double l2_dist_bi(const BipartiteFunction& a, const BipartiteFunction& b);

cplx integrate_bi(const BipartiteFunction& f);
/// Int f dz_R as a function of z_S.
GridFunction integrate_res(const BipartiteFunction& f);

/// Star product under the factorized weight ws (x) wr.
BipartiteFunction star_bi(const BipartiteFunction& f, const BipartiteFunction& g,
                          const WeightFunction& ws, const WeightFunction& wr);

/// Star commutator f*g - g*f.
BipartiteFunction comm_bi(const BipartiteFunction& f, const BipartiteFunction& g,
                          const WeightFunction& ws, const WeightFunction& wr);

/// <A, rho> = Int conj(A) * rho over both factors.
cplx pairing_bi(const BipartiteFunction& A, const BipartiteFunction& rho,
                const WeightFunction& ws, const WeightFunction& wr);

// ---------------------------------------------------------------------------
// Reservoir-trace projection and the open-system identity suite.
// ---------------------------------------------------------------------------

struct ProjectionConfig {
    WeightFunction ws, wr;      // per-factor weights (joint = tensor product)
    BipartiteWeight joint;      // gated by the factorization predicate
    GridFunction rho_R;         // reservoir reference state, Int rho_R dz_R = 1
    GridFunction H_S, H_R;      // subsystem Hamiltonian symbols
    BipartiteFunction H_I;      // interaction symbol
    double lambda = 1.0;
};

/// P rho = rho_R (star) Int rho dz_R.
BipartiteFunction project(const BipartiteFunction& rho, const ProjectionConfig& cfg);

/// P^+ A = Int rho_R (star) A dz_R (as a system-only joint function).
BipartiteFunction project_adjoint(const BipartiteFunction& A, const ProjectionConfig& cfg);

struct ProjectionReport {
    double p_idempotent;          // ||P P rho - P rho||
    double p_reduction;           // ||P rho - f_S (x) rho_R||  (star vs plain product)
    double sep_product;           // ||A_S * A_R - A_S A_R||
    double commute_sys;           // ||(P L_S - L_S P) rho||
    double annihilate_res_left;   // ||P L_R rho||
    double annihilate_res_right;  // ||L_R P rho||
    double h_integral;            // ||Int H_S * rho dz_R - H_S * Int rho dz_R||
    double adjoint_identity;      // |<P^+ A, rho> - <A, P rho>|
    double liouville_selfadjoint; // |<A, L rho> - <L A, rho>|  (full Liouville)
    double full_commute;          // ||(P L - L P) rho||  (meaningful when lambda = 0)
};

/// Evaluates every identity on the supplied test state and observable. All
/// norms are relative to the scale of the quantity tested. Preconditions:
/// the joint weight factorizes and bracket(H_R, rho_R) vanishes.
ProjectionReport projection_checks(const ProjectionConfig& cfg, const BipartiteFunction& rho,
                                   const BipartiteFunction& obs);

}  // namespace myl
