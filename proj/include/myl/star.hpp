#pragma once

#include "myl/grid.hpp"
#include "myl/weights.hpp"

#include <memory>

namespace myl {

// ---------------------------------------------------------------------------
// Twisted-convolution star product on the Fourier side:
//
//   (f*g)~(tau) = (1/2pi) (1/Omega(tau)) Sum_{sigma'}
//                 exp(mu tau^sigma') Omega(sigma') Omega(tau-sigma')
//                 ftilde(sigma') gtilde(tau-sigma') deta dxi
//
// with tau^sigma' = eta_tau xi' - eta' xi_tau. Out-of-band terms are dropped,
// never wrapped; callers supply symbols whose spectra fit within half the
// band. Cost O(N^2) over N = n_q*n_p modes; the mode loop is data-parallel
// with a fixed reduction order.
// ---------------------------------------------------------------------------

GridFunction star(const GridFunction& f, const GridFunction& g, const WeightFunction& w);

/// Generalized Moyal bracket (f*g - g*f)/(2 mu), computed from its own
/// sinh kernel rather than by subtracting star products.
GridFunction bracket(const GridFunction& f, const GridFunction& g, const WeightFunction& w);

/// Full anticommutator f*g + g*f via the 2 cosh kernel.
GridFunction anti_bracket(const GridFunction& f, const GridFunction& g, const WeightFunction& w);

/// U f: spectrum multiplied by Omega. Maps the Omega-algebra onto the plain
/// Moyal algebra.
GridFunction u_map(const GridFunction& f, const WeightFunction& w);
/// Inverse: spectrum divided by Omega (gated on 1/Omega overflow).
GridFunction u_inv(const GridFunction& f, const WeightFunction& w);

/// Star product of the lambda family with the exterior kernel parameter nu
/// decoupled from mu: equals star(f, g, lambda_weight(lambda)) when nu = mu.
/// nu = 0 gives the commutative-but-not-pointwise product.
GridFunction lambda_star(const GridFunction& f, const GridFunction& g, cplx lambda, cplx nu);

/// Convenience star-op closure for pairing().
StarOp make_star_op(const WeightFunction& w);

// ---------------------------------------------------------------------------
// Direct triple-product kernels (small-grid oracles; gated at 16x16 modes).
// Nested kinds use the full anticommutator {.,.} = f*g + g*f.
// ---------------------------------------------------------------------------

enum class TripleKind {
    comm_comm,  // [f,[g,h]]
    comm_anti,  // [f,{g,h}]
    anti_comm,  // {f,[g,h]}
};

GridFunction triple_star(const GridFunction& f, const GridFunction& g, const GridFunction& h,
                         const WeightFunction& w);

GridFunction nested_ops(TripleKind kind, const GridFunction& f, const GridFunction& g,
                        const GridFunction& h, const WeightFunction& w);

/// Same nested objects assembled from pairwise star/bracket ops (the
/// reference route for the direct kernels).
GridFunction nested_ops_pairwise(TripleKind kind, const GridFunction& f, const GridFunction& g,
                                 const GridFunction& h, const WeightFunction& w);

// ---------------------------------------------------------------------------
// Fast application of star operations with one fixed factor, used by the
// kinetic generator. Mixed-representation algorithm: rows in the position
// frequency index, columns on a doubled momentum grid so dropped modes stay
// dropped. Produces results identical (to roundoff) to the direct loops.
// ---------------------------------------------------------------------------

struct RhoTables;  // per-state shifted-row tables, reusable across multipliers

class FixedStar {
  public:
    FixedStar(const GridFunction& f, const WeightFunction& w);
    ~FixedStar();
    FixedStar(FixedStar&&) noexcept;
    FixedStar& operator=(FixedStar&&) noexcept;

    enum class Mode { left, right, bracket, anti };

    SpectralFunction apply(const RhoTables& rho, Mode mode) const;
    GridFunction apply(const GridFunction& rho, Mode mode) const;

    const PhaseGrid& grid() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct RhoTables {
    RhoTables(const SpectralFunction& rho, const WeightFunction& w);
    RhoTables(const GridFunction& rho, const WeightFunction& w);

    PhaseGrid grid;
    size_t n_pp;
    // tab_minus[b][r][m]: Omega-weighted rho row r synthesized at p_m - hbar*eta_b/2
    // tab_plus:  same with + shift. Layout [b * n_q + r] * n_pp + m.
    std::vector<cplx> tab_minus, tab_plus;
};

}  // namespace myl
