#pragma once

#include "myl/common.hpp"

#include <functional>

namespace myl {

// ---------------------------------------------------------------------------
// Phase-space grid. Points are node-centered: q_j = q_min + j*dq, j < n_q
// (q_max itself excluded, consistent with the periodic trigonometric
// interpolant). Dual frequencies are centered on zero with the usual even-n
// asymmetry: eta_a = (a - n_q/2)*d_eta.
// ---------------------------------------------------------------------------
struct PhaseGrid {
    double q_min = 0, q_max = 0, p_min = 0, p_max = 0;
    size_t n_q = 0, n_p = 0;

    double dq() const { return (q_max - q_min) / double(n_q); }
    double dp() const { return (p_max - p_min) / double(n_p); }
    double deta() const { return 2.0 * pi / (double(n_q) * dq()); }
    double dxi() const { return 2.0 * pi / (double(n_p) * dp()); }

    double q(size_t j) const { return q_min + double(j) * dq(); }
    double p(size_t k) const { return p_min + double(k) * dp(); }
    double eta(size_t a) const { return (double(a) - double(n_q) / 2.0) * deta(); }
    double xi(size_t b) const { return (double(b) - double(n_p) / 2.0) * dxi(); }

    size_t size() const { return n_q * n_p; }
    bool same_geometry(const PhaseGrid& o) const;
};

PhaseGrid make_grid(double q_min, double q_max, size_t n_q, double p_min, double p_max,
                    size_t n_p);

/// Square grid (-L,L)^2 with n points per axis.
inline PhaseGrid make_grid(double L, size_t n) { return make_grid(-L, L, n, -L, L, n); }

// ---------------------------------------------------------------------------
// Sampled symbol A(q_j, p_k), row-major over q.
// ---------------------------------------------------------------------------
struct GridFunction {
    PhaseGrid grid;
    std::vector<cplx> v;

    GridFunction() = default;
    explicit GridFunction(const PhaseGrid& g) : grid(g), v(g.size(), cplx(0)) {}

    cplx& at(size_t j, size_t k) { return v[j * grid.n_p + k]; }
    const cplx& at(size_t j, size_t k) const { return v[j * grid.n_p + k]; }
};

/// Spectral samples \tilde A(eta_a, xi_b) in the 1/(2*pi) Fourier convention,
/// row-major over eta, frequencies in physical ascending order.
struct SpectralFunction {
    PhaseGrid grid;
    std::vector<cplx> v;

    SpectralFunction() = default;
    explicit SpectralFunction(const PhaseGrid& g) : grid(g), v(g.size(), cplx(0)) {}

    cplx& at(size_t a, size_t b) { return v[a * grid.n_p + b]; }
    const cplx& at(size_t a, size_t b) const { return v[a * grid.n_p + b]; }
};

/// \tilde A(eta,xi) = (1/2pi) Int dq dp exp(-i(eta q + xi p)) A(q,p),
/// discretized as the Riemann sum on the grid. Rejects non-finite input.
SpectralFunction forward_ft(const GridFunction& f);

/// Exact inverse of forward_ft.
GridFunction inverse_ft(const SpectralFunction& F);

/// Riemann integral Sum f * dq * dp.
cplx integrate(const GridFunction& f);

struct IntegrateReport {
    cplx value;
    double boundary_ratio = 0;  // max |f| on the boundary ring / max |f|
    bool boundary_warning = false;
};

/// integrate() plus the domain-too-small check: warns when the boundary
/// magnitude exceeds 1e-6 * max|f|.
IntegrateReport integrate_report(const GridFunction& f);

/// <a, b> = integrate(conj(a) [star] b) for a caller-supplied star operation.
using StarOp = std::function<GridFunction(const GridFunction&, const GridFunction&)>;
cplx pairing(const GridFunction& a, const GridFunction& b, const StarOp& star);

// -- elementwise helpers ----------------------------------------------------

GridFunction conj(const GridFunction& f);
GridFunction operator+(const GridFunction& a, const GridFunction& b);
GridFunction operator-(const GridFunction& a, const GridFunction& b);
GridFunction operator*(cplx s, const GridFunction& a);
GridFunction multiply(const GridFunction& a, const GridFunction& b);

double l2_norm(const GridFunction& f);                              // sqrt(Int |f|^2)
double l2_dist(const GridFunction& a, const GridFunction& b);       // ||a-b||_2
double rel_l2(const GridFunction& a, const GridFunction& b);        // ||a-b||/||b||
double max_abs(const GridFunction& f);
double max_imag(const GridFunction& f);

/// Sample a callable A(q,p) onto the grid.
GridFunction sample(const PhaseGrid& g, const std::function<cplx(double, double)>& f);

/// Smooth radial roll-off, = 1 well inside radius rc, -> 0 at the boundary.
/// Used to keep polynomial symbols periodization-clean on finite grids.
double taper(double q, double p, double rc, double w);

/// Sample f * taper. Default taper covers ~70% of the smaller half-extent.
GridFunction sample_tapered(const PhaseGrid& g, const std::function<cplx(double, double)>& f,
                            double rc = 0, double w = 0);

}  // namespace myl
