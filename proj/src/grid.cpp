#include "myl/grid.hpp"

#include "myl/fft.hpp"

#include <algorithm>
#include <cmath>

namespace myl {

bool PhaseGrid::same_geometry(const PhaseGrid& o) const {
    return q_min == o.q_min && q_max == o.q_max && p_min == o.p_min && p_max == o.p_max &&
           n_q == o.n_q && n_p == o.n_p;
}

PhaseGrid make_grid(double q_min, double q_max, size_t n_q, double p_min, double p_max,
                    size_t n_p) {
    require(std::isfinite(q_min) && std::isfinite(q_max) && std::isfinite(p_min) &&
                std::isfinite(p_max),
            "make_grid: bounds must be finite");
    require(q_min < q_max && p_min < p_max, "make_grid: bounds must be ordered");
    require(n_q >= 4 && n_p >= 4, "make_grid: counts must be >= 4");
    require(n_q % 2 == 0 && n_p % 2 == 0, "make_grid: counts must be even");
    return PhaseGrid{q_min, q_max, p_min, p_max, n_q, n_p};
}

static void check_finite(const std::vector<cplx>& v, const char* who) {
    for (const cplx& z : v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw error(std::string(who) + ": non-finite entry");
}

// forward_ft reduces to a standard DFT after pulling out the grid-offset
// phases:
//   eta_a q_j = eta_a q_min + (a - h) j * 2pi/n,    h = n/2
// so with x_j = (-1)^j f_j,  Ftilde[a] = (dq dp / 2pi) e^{-i eta_a q_min} DFT[x]_a
// and the same factorization in p.
SpectralFunction forward_ft(const GridFunction& f) {
    check_finite(f.v, "forward_ft");
    const PhaseGrid& g = f.grid;
    const size_t nq = g.n_q, np = g.n_p;
    SpectralFunction F(g);

    for (size_t j = 0; j < nq; ++j) {
        const double sj = (j % 2 == 0) ? 1.0 : -1.0;
        for (size_t k = 0; k < np; ++k) {
            const double s = (k % 2 == 0) ? sj : -sj;
            F.v[j * np + k] = s * f.v[j * np + k];
        }
    }
    fft_rows(F.v.data(), np, nq, false);
    fft_cols(F.v.data(), nq, np, false);

    const double scale = g.dq() * g.dp() / (2.0 * pi);
    for (size_t a = 0; a < nq; ++a) {
        const cplx ph_a = std::exp(cplx(0, -g.eta(a) * g.q_min));
        for (size_t b = 0; b < np; ++b) {
            F.v[a * np + b] *= scale * ph_a * std::exp(cplx(0, -g.xi(b) * g.p_min));
        }
    }
    return F;
}

GridFunction inverse_ft(const SpectralFunction& F) {
    const PhaseGrid& g = F.grid;
    const size_t nq = g.n_q, np = g.n_p;
    GridFunction f(g);

    for (size_t a = 0; a < nq; ++a) {
        const cplx ph_a = std::exp(cplx(0, g.eta(a) * g.q_min));
        for (size_t b = 0; b < np; ++b) {
            f.v[a * np + b] = F.v[a * np + b] * ph_a * std::exp(cplx(0, g.xi(b) * g.p_min));
        }
    }
    fft_rows(f.v.data(), np, nq, true);
    fft_cols(f.v.data(), nq, np, true);

    const double scale = g.deta() * g.dxi() / (2.0 * pi);
    for (size_t j = 0; j < nq; ++j) {
        const double sj = (j % 2 == 0) ? 1.0 : -1.0;
        for (size_t k = 0; k < np; ++k) {
            const double s = (k % 2 == 0) ? sj : -sj;
            f.v[j * np + k] *= s * scale;
        }
    }
    return f;
}

cplx integrate(const GridFunction& f) {
    cplx acc(0);
    for (const cplx& z : f.v) acc += z;
    return acc * (f.grid.dq() * f.grid.dp());
}

IntegrateReport integrate_report(const GridFunction& f) {
    IntegrateReport r;
    r.value = integrate(f);
    const size_t nq = f.grid.n_q, np = f.grid.n_p;
    double mx = 0, bd = 0;
    for (size_t j = 0; j < nq; ++j)
        for (size_t k = 0; k < np; ++k) {
            const double a = std::abs(f.v[j * np + k]);
            mx = std::max(mx, a);
            if (j == 0 || j == nq - 1 || k == 0 || k == np - 1) bd = std::max(bd, a);
        }
    r.boundary_ratio = mx > 0 ? bd / mx : 0.0;
    r.boundary_warning = r.boundary_ratio > 1e-6;
    return r;
}

cplx pairing(const GridFunction& a, const GridFunction& b, const StarOp& star) {
    require(a.grid.same_geometry(b.grid), "pairing: grid mismatch");
    return integrate(star(conj(a), b));
}

GridFunction conj(const GridFunction& f) {
    GridFunction r(f.grid);
    for (size_t i = 0; i < f.v.size(); ++i) r.v[i] = std::conj(f.v[i]);
    return r;
}

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
    require(a.grid.same_geometry(b.grid), "grid mismatch");
    GridFunction r(a.grid);
    for (size_t i = 0; i < a.v.size(); ++i) r.v[i] = a.v[i] + b.v[i];
    return r;
}

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
    require(a.grid.same_geometry(b.grid), "grid mismatch");
    GridFunction r(a.grid);
    for (size_t i = 0; i < a.v.size(); ++i) r.v[i] = a.v[i] - b.v[i];
    return r;
}

GridFunction operator*(cplx s, const GridFunction& a) {
    GridFunction r(a.grid);
    for (size_t i = 0; i < a.v.size(); ++i) r.v[i] = s * a.v[i];
    return r;
}

GridFunction multiply(const GridFunction& a, const GridFunction& b) {
    require(a.grid.same_geometry(b.grid), "grid mismatch");
    GridFunction r(a.grid);
    for (size_t i = 0; i < a.v.size(); ++i) r.v[i] = a.v[i] * b.v[i];
    return r;
}

double l2_norm(const GridFunction& f) {
    double acc = 0;
    for (const cplx& z : f.v) acc += std::norm(z);
    return std::sqrt(acc * f.grid.dq() * f.grid.dp());
}

double l2_dist(const GridFunction& a, const GridFunction& b) {
    require(a.grid.same_geometry(b.grid), "grid mismatch");
    double acc = 0;
    for (size_t i = 0; i < a.v.size(); ++i) acc += std::norm(a.v[i] - b.v[i]);
    return std::sqrt(acc * a.grid.dq() * a.grid.dp());
}

double rel_l2(const GridFunction& a, const GridFunction& b) {
    const double nb = l2_norm(b);
    return nb > 0 ? l2_dist(a, b) / nb : l2_dist(a, b);
}

double max_abs(const GridFunction& f) {
    double m = 0;
    for (const cplx& z : f.v) m = std::max(m, std::abs(z));
    return m;
}

double max_imag(const GridFunction& f) {
    double m = 0;
    for (const cplx& z : f.v) m = std::max(m, std::abs(z.imag()));
    return m;
}

GridFunction sample(const PhaseGrid& g, const std::function<cplx(double, double)>& f) {
    GridFunction r(g);
    for (size_t j = 0; j < g.n_q; ++j)
        for (size_t k = 0; k < g.n_p; ++k) r.v[j * g.n_p + k] = f(g.q(j), g.p(k));
    return r;
}

double taper(double q, double p, double rc, double w) {
    const double r = std::sqrt(q * q + p * p);
    return 0.5 * std::erfc((r - rc) / w);
}

GridFunction sample_tapered(const PhaseGrid& g, const std::function<cplx(double, double)>& f,
                            double rc, double w) {
    const double half = 0.5 * std::min(g.q_max - g.q_min, g.p_max - g.p_min);
    // the roll width must track the grid resolution or the tapered symbol's
    // spectrum does not decay within the band
    if (w <= 0) w = std::max(half / 18.0, 3.2 * std::max(g.dq(), g.dp()));
    if (rc <= 0) rc = half - 3.4 * w;
    GridFunction r(g);
    for (size_t j = 0; j < g.n_q; ++j)
        for (size_t k = 0; k < g.n_p; ++k) {
            const double q = g.q(j), p = g.p(k);
            r.v[j * g.n_p + k] = f(q, p) * taper(q, p, rc, w);
        }
    return r;
}

}  // namespace myl
