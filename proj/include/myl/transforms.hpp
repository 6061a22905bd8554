#pragma once

#include "myl/grid.hpp"
#include "myl/operator.hpp"
#include "myl/weights.hpp"

namespace myl {

// ---------------------------------------------------------------------------
// Ordering <-> Weyl symbol conversions (Fourier-side multiplication by
// Omega). Every quantization/dequantization routes through the Weyl symbol;
// the direct complex-shifted kernels are treated as identities, not
// implementation paths.
// ---------------------------------------------------------------------------

/// Weyl symbol of the operator whose Omega-symbol is f: spectrum * Omega.
GridFunction to_weyl_symbol(const GridFunction& f, const WeightFunction& w);

/// Inverse: spectrum / Omega. Errors when 1/Omega is unbounded on the band
/// (max |1/Omega| above 1e12), e.g. gauss(kappa<0) on wide bands.
GridFunction from_weyl_symbol(const GridFunction& f_w, const WeightFunction& w);

// ---------------------------------------------------------------------------
// Quantization to a position-basis kernel matrix and back.
//
// Geometry contract: the basis spacing satisfies 2 dq / dx = R for an even
// integer R, the offset (q_min - x_min) is a multiple of dx/2, and the basis
// covers the grid's q extent. Midpoints (x+x')/2 then live on the q axis
// refined by R and are reached by band-limited zero-padding interpolation.
// The basis momentum band pi*hbar/dx must cover the grid's p extent. Kernel
// entries with midpoints outside the grid, or beyond the alias-free
// off-diagonal distance pi*hbar/(dp dx), are zero.
// ---------------------------------------------------------------------------

/// Basis aligned with the grid: dx = 2 dq / R, extended margin_cells points
/// beyond each end of the q extent.
PositionBasis matched_basis(const PhaseGrid& grid, size_t R = 4, size_t margin_cells = 0);

struct QuantizeReport {
    double interp_residual = 0;  // q-band-edge spectral magnitude, relative
    bool flagged = false;        // residual above 1e-6
};

OperatorMatrix quantize(const GridFunction& f, const WeightFunction& w,
                        const PositionBasis& basis, QuantizeReport* report = nullptr);

GridFunction dequantize(const OperatorMatrix& M, const WeightFunction& w, const PhaseGrid& grid,
                        QuantizeReport* report = nullptr);

// ---------------------------------------------------------------------------
// Trace formulas
// ---------------------------------------------------------------------------

/// Tr(Omega(f) Omega(g)) = (Omega(0) / 2 pi hbar) Int f*g dz.
cplx trace_pair(const GridFunction& f, const GridFunction& g, const WeightFunction& w);

/// Tr(Omega(f)) = (1 / 2 pi hbar) Int f dz.
cplx trace_one(const GridFunction& f, const WeightFunction& w);

// ---------------------------------------------------------------------------
// Marginals. Precondition: the weight satisfies the marginal condition
// Omega(eta,0) = Omega(0,xi) = 1, otherwise the integrals are not densities.
// For a pure state the position marginal equals 2 pi hbar |psi(q)|^2.
// ---------------------------------------------------------------------------

struct Marginals {
    std::vector<cplx> position;  // Int rho dp, indexed by q
    std::vector<cplx> momentum;  // Int rho dq, indexed by p
};

Marginals marginals(const GridFunction& rho_sym, const WeightFunction& w);

// ---------------------------------------------------------------------------
// Positivity witness: symbols of two pure-state projectors plus their
// overlap. For weights conserving hermiticity and the plain trace formula,
// orthogonal states force at least one symbol negative somewhere.
// ---------------------------------------------------------------------------

struct PositivityWitness {
    cplx state_overlap;      // <phi|psi>
    double min_symbol_psi;   // grid minimum of Re(symbol of |psi><psi|)
    double min_symbol_phi;
    cplx symbol_product_integral;  // Int symbol_psi * symbol_phi dz
};

PositivityWitness positivity_witness(const PureState& psi, const PureState& phi,
                                     const WeightFunction& w, const PhaseGrid& grid);

}  // namespace myl
