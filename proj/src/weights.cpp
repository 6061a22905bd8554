#include "myl/weights.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace myl {

cplx WeightFunction::log_omega(double eta, double xi) const {
    switch (family) {
        case WeightFamily::weyl: return cplx(0);
        case WeightFamily::lambda: return lambda * (xi * eta);
        case WeightFamily::gauss: return cplx(kappa * (eta * eta + xi * xi));
        case WeightFamily::product: return lambda * (xi * eta) + kappa * (eta * eta + xi * xi);
    }
    return cplx(0);
}

WeightFunction WeightFunction::scaled_hbar(double s) const {
    WeightFunction w = *this;
    w.hbar = hbar * s;
    if (scaling == HbarScaling::linear) {
        w.lambda = lambda * s;
        w.kappa = kappa * s;
    }
    return w;
}

WeightFunction weyl_weight(double hbar) { return WeightFunction{WeightFamily::weyl, 0, 0, hbar}; }

WeightFunction lambda_weight(cplx lambda, double hbar, HbarScaling scaling) {
    return WeightFunction{WeightFamily::lambda, lambda, 0, hbar, scaling};
}

WeightFunction gauss_weight(double kappa, double hbar, HbarScaling scaling) {
    return WeightFunction{WeightFamily::gauss, 0, kappa, hbar, scaling};
}

WeightFunction product_weight(cplx lambda, double kappa, double hbar, HbarScaling scaling) {
    return WeightFunction{WeightFamily::product, lambda, kappa, hbar, scaling};
}

static constexpr double kExpOverflow = 700.0;

cplx eval_weight(const WeightFunction& w, double eta, double xi) {
    require(std::isfinite(eta) && std::isfinite(xi), "eval_weight: non-finite frequency");
    const cplx lg = w.log_omega(eta, xi);
    if (std::abs(lg.real()) > kExpOverflow) {
        std::ostringstream os;
        os << "eval_weight: |log Omega| = " << lg.real() << " at (eta,xi)=(" << eta << "," << xi
           << ") exceeds double range";
        throw audit_error(os.str());
    }
    return std::exp(lg);
}

BandReport weight_band_report(const WeightFunction& w, const PhaseGrid& grid) {
    BandReport r;
    bool first = true;
    for (size_t a = 0; a < grid.n_q; ++a)
        for (size_t b = 0; b < grid.n_p; ++b) {
            const double lg = w.log_omega(grid.eta(a), grid.xi(b)).real();
            if (first) {
                r.max_log_omega = r.min_log_omega = lg;
                first = false;
            } else {
                r.max_log_omega = std::max(r.max_log_omega, lg);
                r.min_log_omega = std::min(r.min_log_omega, lg);
            }
        }
    return r;
}

GridFunction inverse_kernel_omega(const WeightFunction& w, const PhaseGrid& grid) {
    const BandReport rep = weight_band_report(w, grid);
    if (-rep.min_log_omega > kExpOverflow)
        throw audit_error("inverse_kernel_omega: 1/Omega overflows on the band, log|1/Omega|max = " +
                          std::to_string(-rep.min_log_omega));
    SpectralFunction F(grid);
    for (size_t a = 0; a < grid.n_q; ++a)
        for (size_t b = 0; b < grid.n_p; ++b)
            F.at(a, b) = std::exp(-w.log_omega(grid.eta(a), grid.xi(b)));
    return inverse_ft(F);
}

// ---------------------------------------------------------------------------
// Predicates
// ---------------------------------------------------------------------------

namespace {

constexpr double kPredicateTol = 1e-12;

std::vector<double> band_axis(const PhaseGrid* grid, bool eta_axis) {
    std::vector<double> xs;
    if (grid) {
        if (eta_axis)
            for (size_t a = 0; a < grid->n_q; ++a) xs.push_back(grid->eta(a));
        else
            for (size_t b = 0; b < grid->n_p; ++b) xs.push_back(grid->xi(b));
    } else {
        const int n = 25;
        for (int i = 0; i < n; ++i) xs.push_back(-6.0 + 12.0 * double(i) / double(n - 1));
    }
    return xs;
}

cplx safe_omega(const WeightFunction& w, double eta, double xi) {
    const cplx lg = w.log_omega(eta, xi);
    if (std::abs(lg.real()) > kExpOverflow) return cplx(std::nan(""), 0);
    return std::exp(lg);
}

}  // namespace

bool check_trace_pairing(const WeightFunction& w, const PhaseGrid* grid) {
    const cplx w0 = safe_omega(w, 0, 0);
    for (double eta : band_axis(grid, true))
        for (double xi : band_axis(grid, false)) {
            const cplx v = safe_omega(w, eta, xi) * safe_omega(w, -eta, -xi);
            if (!(std::abs(v - w0) <= kPredicateTol)) return false;
        }
    return true;
}

bool check_hermiticity(const WeightFunction& w, const PhaseGrid* grid) {
    for (double eta : band_axis(grid, true))
        for (double xi : band_axis(grid, false)) {
            const cplx v = safe_omega(w, eta, xi) - std::conj(safe_omega(w, -eta, -xi));
            if (!(std::abs(v) <= kPredicateTol)) return false;
        }
    return true;
}

bool check_marginal_condition(const WeightFunction& w, const PhaseGrid* grid) {
    for (double eta : band_axis(grid, true))
        if (!(std::abs(safe_omega(w, eta, 0) - 1.0) <= kPredicateTol)) return false;
    for (double xi : band_axis(grid, false))
        if (!(std::abs(safe_omega(w, 0, xi) - 1.0) <= kPredicateTol)) return false;
    return true;
}

// Omega is evaluated at hbar scales {1, 1/2, 1/4, 1/8}. Omega -> 1 pointwise
// iff log Omega -> 0; with parameters linear in hbar the median |log Omega|
// halves exactly per step, with fixed parameters it stays put.
bool check_classical_limit(const WeightFunction& w, const PhaseGrid* grid) {
    const double scales[4] = {1.0, 0.5, 0.25, 0.125};
    double med[4];
    for (int s = 0; s < 4; ++s) {
        std::vector<double> devs;
        const WeightFunction ws = w.scaled_hbar(scales[s]);
        for (double eta : band_axis(grid, true))
            for (double xi : band_axis(grid, false))
                devs.push_back(std::abs(ws.log_omega(eta, xi)));
        std::nth_element(devs.begin(), devs.begin() + devs.size() / 2, devs.end());
        med[s] = devs[devs.size() / 2];
    }
    if (med[0] <= kPredicateTol) return true;  // already the Weyl family
    for (int s = 1; s < 4; ++s)
        if (!(med[s] <= 0.55 * med[s - 1] + kPredicateTol)) return false;
    return true;
}

BipartiteWeight tensor_weight(const WeightFunction& sys, const WeightFunction& res) {
    return BipartiteWeight{[sys, res](double es, double xs, double er, double xr) {
        return sys.log_omega(es, xs) + res.log_omega(er, xr);
    }};
}

bool check_factorization(const BipartiteWeight& joint, const WeightFunction& sys,
                         const WeightFunction& res, const PhaseGrid* grid) {
    const auto etas = band_axis(grid, true);
    const auto xis = band_axis(grid, false);
    // Coarsen the 4-d scan; the identities are pointwise so a stride is enough.
    const size_t stride = std::max<size_t>(1, etas.size() / 9);
    for (size_t i = 0; i < etas.size(); i += stride)
        for (size_t j = 0; j < xis.size(); j += stride)
            for (size_t k = 0; k < etas.size(); k += stride)
                for (size_t l = 0; l < xis.size(); l += stride) {
                    const double es = etas[i], xs = xis[j], er = etas[k], xr = xis[l];
                    const cplx full = joint.log_omega(es, xs, er, xr);
                    const cplx split = joint.log_omega(es, xs, 0, 0) + joint.log_omega(0, 0, er, xr);
                    if (std::abs(std::exp(full) - std::exp(split)) > kPredicateTol) return false;
                    const cplx sys_part = sys.log_omega(es, xs);
                    const cplx res_part = res.log_omega(er, xr);
                    if (std::abs(std::exp(joint.log_omega(es, xs, 0, 0)) - std::exp(sys_part)) >
                        kPredicateTol)
                        return false;
                    if (std::abs(std::exp(joint.log_omega(0, 0, er, xr)) - std::exp(res_part)) >
                        kPredicateTol)
                        return false;
                }
    return true;
}

}  // namespace myl
