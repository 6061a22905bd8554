#include "myl/transforms.hpp"

#include "myl/fft.hpp"
#include "myl/star.hpp"

#include <algorithm>
#include <cmath>

namespace myl {

namespace {

constexpr double kInvOmegaGate = 1e12;

void scale_spectrum(SpectralFunction& F, const WeightFunction& w, bool invert) {
    const PhaseGrid& g = F.grid;
    const BandReport rep = weight_band_report(w, g);
    const double worst = invert ? -rep.min_log_omega : rep.max_log_omega;
    if (worst > std::log(kInvOmegaGate))
        throw audit_error(std::string(invert ? "from_weyl_symbol" : "to_weyl_symbol") +
                          ": |" + (invert ? "1/Omega" : "Omega") +
                          "| reaches exp(" + std::to_string(worst) +
                          ") on this band; domain too wide for this weight");
    for (size_t a = 0; a < g.n_q; ++a)
        for (size_t b = 0; b < g.n_p; ++b) {
            const cplx lg = w.log_omega(g.eta(a), g.xi(b));
            F.at(a, b) *= std::exp(invert ? -lg : lg);
        }
}

}  // namespace

GridFunction to_weyl_symbol(const GridFunction& f, const WeightFunction& w) {
    SpectralFunction F = forward_ft(f);
    scale_spectrum(F, w, false);
    return inverse_ft(F);
}

GridFunction from_weyl_symbol(const GridFunction& f_w, const WeightFunction& w) {
    SpectralFunction F = forward_ft(f_w);
    // the unpaired most-negative row/column sits outside the symmetric band
    // the star algebra works on; dividing by Omega there only amplifies junk
    for (size_t b = 0; b < F.grid.n_p; ++b) F.at(0, b) = cplx(0);
    for (size_t a = 0; a < F.grid.n_q; ++a) F.at(a, 0) = cplx(0);
    scale_spectrum(F, w, true);
    return inverse_ft(F);
}

// ---------------------------------------------------------------------------
// quantize / dequantize
// ---------------------------------------------------------------------------

PositionBasis matched_basis(const PhaseGrid& grid, size_t R, size_t margin_cells) {
    require(R >= 2 && R % 2 == 0, "matched_basis: refinement R must be even and >= 2");
    const double dx = 2.0 * grid.dq() / double(R);
    const double x_min = grid.q_min - double(margin_cells) * dx;
    const size_t n_x = R * grid.n_q / 2 + 2 * margin_cells;
    return make_basis(x_min, x_min + double(n_x) * dx, n_x);
}

namespace {

struct KernelGeometry {
    size_t refine;  // 2 dq / dx
    size_t offset;  // (q_min - x_min) / (dx/2)
};

KernelGeometry check_compatibility(const PhaseGrid& g, const PositionBasis& b, double hbar) {
    const double r = 2.0 * g.dq() / b.dx();
    require(std::abs(r - std::round(r)) < 1e-9 && std::round(r) >= 2,
            "quantize: need 2*dq/dx to be an integer >= 2");
    const double off = (g.q_min - b.x_min) / (0.5 * b.dx());
    require(off > -1e-9 && std::abs(off - std::round(off)) < 1e-9,
            "quantize: basis must start at or before q_min on the dx/2 lattice");
    require(b.x_max >= g.q_max - 1e-12, "quantize: basis must cover the grid q extent");
    // kernel antidiagonals sample t = (x'-x)/2 on the dx lattice, so the
    // representable momentum band is half the state band pi*hbar/dx
    const double band = 0.5 * b.p_band(hbar);
    require(band >= std::max(std::abs(g.p_min), std::abs(g.p_max)) - 1e-12,
            "quantize: half the basis momentum band must cover the grid p extent");
    return KernelGeometry{size_t(std::llround(r)), size_t(std::llround(off))};
}

// The kernel pipeline works under the band-limitation contract: content in
// the outer quarter of the frequency band is treated as empty. Zeroing it
// makes every quadrature fold in the kernel transforms land on zeros.
void guard_band(SpectralFunction& F) {
    const size_t nq = F.grid.n_q, np = F.grid.n_p, hq = nq / 2, hp = np / 2;
    for (size_t a = 0; a < nq; ++a)
        for (size_t b = 0; b < np; ++b) {
            const size_t da = a > hq ? a - hq : hq - a;
            const size_t db = b > hp ? b - hp : hp - b;
            if (4 * da > 3 * hq || 4 * db > 3 * hp || a == 0 || b == 0) F.at(a, b) = cplx(0);
        }
}

// Upsample f along q by integer factor R via spectral zero padding, applying
// the guard ring.
GridFunction upsample_q_guarded(const GridFunction& f, size_t R) {
    const PhaseGrid& g = f.grid;
    SpectralFunction F = forward_ft(f);
    guard_band(F);
    PhaseGrid fine = g;
    fine.n_q = g.n_q * R;
    SpectralFunction Ff(fine);
    const size_t off = (fine.n_q - g.n_q) / 2;
    for (size_t a = 0; a < g.n_q; ++a)
        for (size_t c = 0; c < g.n_p; ++c) Ff.at(a + off, c) = F.at(a, c);
    return inverse_ft(Ff);
}

double band_edge_residual(const GridFunction& f) {
    SpectralFunction F = forward_ft(f);
    const size_t nq = F.grid.n_q, np = F.grid.n_p;
    double edge = 0, peak = 0;
    for (size_t a = 0; a < nq; ++a)
        for (size_t c = 0; c < np; ++c) {
            const double v = std::abs(F.at(a, c));
            peak = std::max(peak, v);
            if (a == 0 || a == nq - 1 || c == 0 || c == np - 1) edge = std::max(edge, v);
        }
    return peak > 0 ? edge / peak : 0.0;
}

// exp(i p_l * delta * dx / hbar) indexed [l][delta + (n_x - 1)]
std::vector<cplx> phase_table(const PhaseGrid& g, const PositionBasis& b, double hbar) {
    const size_t np = g.n_p, nx = b.n_x;
    std::vector<cplx> T(np * (2 * nx - 1));
    for (size_t l = 0; l < np; ++l)
        for (size_t d = 0; d < 2 * nx - 1; ++d) {
            const double delta = double(ptrdiff_t(d) - ptrdiff_t(nx - 1));
            T[l * (2 * nx - 1) + d] = std::exp(cplx(0, g.p(l) * delta * b.dx() / hbar));
        }
    return T;
}

// Largest off-diagonal index the momentum grid can represent: beyond it the
// tone exp(i p (x - x')/hbar) falls outside the p band and the quadrature
// would alias. Kernels of band-limited symbols have decayed there.
size_t alias_free_distance(const PhaseGrid& g, const PositionBasis& b, double hbar) {
    const double lim = pi * hbar / (g.dp() * b.dx());
    return lim <= 1.0 ? 0 : size_t(lim) - 1;
}

}  // namespace

OperatorMatrix quantize(const GridFunction& f, const WeightFunction& w,
                        const PositionBasis& basis, QuantizeReport* report) {
    const PhaseGrid& g = f.grid;
    const KernelGeometry geo = check_compatibility(g, basis, w.hbar);

    GridFunction gw = to_weyl_symbol(f, w);
    if (report) {
        report->interp_residual = band_edge_residual(gw);
        report->flagged = report->interp_residual > 1e-6;
    }

    // midpoints (x_j + x_k)/2 = x_min + (j+k) dx/2; in-grid midpoints sit on
    // the q axis refined by `refine`, everything outside the grid is zero
    GridFunction fine = upsample_q_guarded(gw, geo.refine);
    const size_t fine_rows = g.n_q * geo.refine;

    const size_t nx = basis.n_x, np = g.n_p;
    const std::vector<cplx> T = phase_table(g, basis, w.hbar);
    const size_t dmax = alias_free_distance(g, basis, w.hbar);
    const double scale = g.dp() / (2.0 * pi * w.hbar);

    OperatorMatrix M(basis);
    parallel_for(nx, [&](size_t j_lo, size_t j_hi) {
        for (size_t j = j_lo; j < j_hi; ++j)
            for (size_t k = 0; k < nx; ++k) {
                const size_t dist = j > k ? j - k : k - j;
                if (dist > dmax) continue;
                if (j + k < geo.offset) continue;
                const size_t s = j + k - geo.offset;  // fine row of the midpoint
                if (s >= fine_rows) continue;
                const cplx* grow = &fine.v[s * np];
                const cplx* ph = &T[(nx - 1 + j - k)];
                cplx acc(0);
                for (size_t l = 0; l < np; ++l) acc += grow[l] * ph[l * (2 * nx - 1)];
                M.at(j, k) = acc * scale;
            }
    });
    return M;
}

GridFunction dequantize(const OperatorMatrix& M, const WeightFunction& w, const PhaseGrid& grid,
                        QuantizeReport* report) {
    const PositionBasis& b = M.basis;
    const KernelGeometry geo = check_compatibility(grid, b, w.hbar);

    const size_t nx = b.n_x, nq = grid.n_q, np = grid.n_p;
    const std::vector<cplx> T = phase_table(grid, b, w.hbar);
    const size_t dmax = alias_free_distance(grid, b, w.hbar);

    GridFunction Aw(grid);
    parallel_for(nq, [&](size_t j_lo, size_t j_hi) {
        for (size_t j = j_lo; j < j_hi; ++j) {
            // q_j sits on the basis antidiagonal s
            const size_t s = geo.offset + j * geo.refine;
            size_t a_lo = s + 1 > nx ? s + 1 - nx : 0;
            size_t a_hi = std::min(s, nx - 1);
            // stay within the alias-free off-diagonal distance |b - a| <= dmax
            if (s > dmax) a_lo = std::max(a_lo, (s - dmax + 1) / 2);
            a_hi = std::min(a_hi, (s + dmax) / 2);
            for (size_t l = 0; l < np; ++l) {
                cplx acc(0);
                // t = (x_b - x_a)/2, phase exp(2 i p t / hbar) = T[l][b - a]
                for (size_t a = a_lo; a <= a_hi; ++a) {
                    const size_t bb = s - a;
                    acc += M.at(a, bb) * T[l * (2 * nx - 1) + (nx - 1 + bb - a)];
                }
                Aw.v[j * np + l] = 2.0 * acc * b.dx();
            }
        }
    });
    if (report) {
        report->interp_residual = band_edge_residual(Aw);
        report->flagged = report->interp_residual > 1e-6;
    }
    SpectralFunction F = forward_ft(Aw);
    guard_band(F);
    scale_spectrum(F, w, true);
    return inverse_ft(F);
}

// ---------------------------------------------------------------------------
// traces, marginals, positivity
// ---------------------------------------------------------------------------

cplx trace_pair(const GridFunction& f, const GridFunction& g, const WeightFunction& w) {
    require(f.grid.same_geometry(g.grid), "trace_pair: grid mismatch");
    const cplx omega0 = std::exp(w.log_omega(0, 0));
    return omega0 / (2.0 * pi * w.hbar) * integrate(star(f, g, w));
}

cplx trace_one(const GridFunction& f, const WeightFunction& w) {
    return integrate(f) / (2.0 * pi * w.hbar);
}

Marginals marginals(const GridFunction& rho_sym, const WeightFunction& w) {
    require(check_marginal_condition(w, &rho_sym.grid),
            "marginals: weight violates the marginal condition Omega(eta,0)=Omega(0,xi)=1");
    const PhaseGrid& g = rho_sym.grid;
    Marginals m;
    m.position.assign(g.n_q, cplx(0));
    m.momentum.assign(g.n_p, cplx(0));
    for (size_t j = 0; j < g.n_q; ++j)
        for (size_t k = 0; k < g.n_p; ++k) {
            m.position[j] += rho_sym.at(j, k) * g.dp();
            m.momentum[k] += rho_sym.at(j, k) * g.dq();
        }
    return m;
}

PositivityWitness positivity_witness(const PureState& psi, const PureState& phi,
                                     const WeightFunction& w, const PhaseGrid& grid) {
    require(check_trace_pairing(w, &grid) && check_hermiticity(w, &grid),
            "positivity_witness: weight must satisfy the trace-pairing and hermiticity "
            "conditions");
    const GridFunction sym_psi = dequantize(projector(psi), w, grid);
    const GridFunction sym_phi = dequantize(projector(phi), w, grid);

    auto grid_min = [](const GridFunction& f) {
        double m = f.v.empty() ? 0.0 : f.v[0].real();
        for (const cplx& z : f.v) m = std::min(m, z.real());
        return m;
    };

    PositivityWitness out;
    out.state_overlap = overlap(phi, psi);
    out.min_symbol_psi = grid_min(sym_psi);
    out.min_symbol_phi = grid_min(sym_phi);
    out.symbol_product_integral = integrate(multiply(sym_psi, sym_phi));
    return out;
}

}  // namespace myl
