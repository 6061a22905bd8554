#pragma once

#include "myl/grid.hpp"
#include "myl/weights.hpp"

#include <cmath>
#include <random>

namespace myl {
namespace testutil {

// Gaussian symbol amp * exp(-(q-q0)^2/(2 sq^2) - (p-p0)^2/(2 sp^2))
inline GridFunction gaussian(const PhaseGrid& g, double amp, double q0, double p0,
                             double sq = 1.0, double sp = 1.0) {
    return sample(g, [=](double q, double p) {
        return cplx(amp * std::exp(-0.5 * std::pow((q - q0) / sq, 2) -
                                   0.5 * std::pow((p - p0) / sp, 2)),
                    0.0);
    });
}

// Random band-limited symbol: a handful of Gaussians at moderate centers with
// unit-ish widths, optionally complex weights. Spectra stay well inside half
// the band on the desk-scale grids.
inline GridFunction random_symbol(const PhaseGrid& g, unsigned seed, bool complex_valued = true,
                                  double center_spread = 1.5, double width = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    struct Bump {
        cplx a;
        double q0, p0, sq, sp;
    };
    std::vector<Bump> bumps;
    for (int i = 0; i < 5; ++i) {
        cplx a = complex_valued ? cplx(n01(rng), n01(rng)) : cplx(n01(rng), 0.0);
        bumps.push_back({a, center_spread * n01(rng), center_spread * n01(rng),
                         width * (0.8 + 0.15 * std::abs(n01(rng))),
                         width * (0.8 + 0.15 * std::abs(n01(rng)))});
    }
    return sample(g, [bumps](double q, double p) {
        cplx v(0);
        for (const Bump& b : bumps)
            v += b.a * std::exp(-0.5 * std::pow((q - b.q0) / b.sq, 2) -
                                0.5 * std::pow((p - b.p0) / b.sp, 2));
        return v;
    });
}

// Deeply contained symbol: centers within +-0.8, widths in [0.85, 1.0], so
// grid-boundary values stay below ~1e-11 and transform pipelines are clean
// even under 1/Omega amplification.
inline GridFunction contained_symbol(const PhaseGrid& g, unsigned seed,
                                     bool complex_valued = true) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uc(-0.8, 0.8), uw(0.85, 1.0), ua(-1.0, 1.0);
    struct Bump {
        cplx a;
        double q0, p0, sq, sp;
    };
    std::vector<Bump> bumps;
    for (int i = 0; i < 4; ++i) {
        cplx a = complex_valued ? cplx(ua(rng), ua(rng)) : cplx(ua(rng), 0.0);
        bumps.push_back({a, uc(rng), uc(rng), uw(rng), uw(rng)});
    }
    return sample(g, [bumps](double q, double p) {
        cplx v(0);
        for (const Bump& b : bumps)
            v += b.a * std::exp(-0.5 * std::pow((q - b.q0) / b.sq, 2) -
                                0.5 * std::pow((p - b.p0) / b.sp, 2));
        return v;
    });
}

// Centered narrow symbol with mild tone modulation: grid-boundary values
// below ~1e-15, spectral corners empty at the 1e-20 level. Required where
// 1/Omega amplification meets band-edge modes (round trips of the
// real-exponent families).
inline GridFunction centered_symbol(const PhaseGrid& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uc(-0.3, 0.3), uw(0.85, 0.95), ua(-1.0, 1.0),
        um(-0.5, 0.5);
    struct Bump {
        cplx a;
        double q0, p0, sq, sp, mq, mp;
    };
    std::vector<Bump> bumps;
    for (int i = 0; i < 3; ++i)
        bumps.push_back({cplx(ua(rng), ua(rng)), uc(rng), uc(rng), uw(rng), uw(rng), um(rng),
                         um(rng)});
    return sample(g, [bumps](double q, double p) {
        cplx v(0);
        for (const Bump& b : bumps)
            v += b.a *
                 std::exp(cplx(-0.5 * std::pow((q - b.q0) / b.sq, 2) -
                                   0.5 * std::pow((p - b.p0) / b.sp, 2),
                               b.mq * q + b.mp * p));
        return v;
    });
}

// Pure on-grid plane wave exp(i(eta_a q + xi_b p)).
inline GridFunction tone(const PhaseGrid& g, size_t a, size_t b) {
    const double eta = g.eta(a), xi = g.xi(b);
    return sample(g, [=](double q, double p) { return std::exp(cplx(0, eta * q + xi * p)); });
}

// Strictly band-limited symbol: random spectrum on modes within `radius`
// bins of zero frequency. real_valued enforces the conjugate symmetry.
inline GridFunction random_bandlimited(const PhaseGrid& g, unsigned seed, size_t radius,
                                       bool real_valued = false) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    SpectralFunction F(g);
    const size_t hq = g.n_q / 2, hp = g.n_p / 2;
    for (size_t a = hq - radius; a <= hq + radius; ++a)
        for (size_t b = hp - radius; b <= hp + radius; ++b) F.at(a, b) = cplx(n01(rng), n01(rng));
    if (real_valued) {
        SpectralFunction S(g);
        for (size_t a = 1; a < g.n_q; ++a)
            for (size_t b = 1; b < g.n_p; ++b)
                S.at(a, b) = 0.5 * (F.at(a, b) + std::conj(F.at(g.n_q - a, g.n_p - b)));
        F = S;
    }
    return inverse_ft(F);
}

// coordinate symbol with a one-dimensional roll-off in its own variable:
// q * w(|q|) resp. p * w(|p|); derivatives in the other variable vanish
// exactly, so first-order star identities stay clean on the interior.
inline GridFunction tapered_coordinate(const PhaseGrid& g, bool position, double rc, double w) {
    return sample(g, [=](double q, double p) {
        const double x = position ? q : p;
        return cplx(x * 0.5 * std::erfc((std::abs(x) - rc) / w), 0.0);
    });
}

// Spectral partial derivatives (exact for band-limited samples); the Poisson
// oracle for classical-limit checks.
inline GridFunction spectral_dq(const GridFunction& f) {
    SpectralFunction F = forward_ft(f);
    for (size_t a = 0; a < F.grid.n_q; ++a)
        for (size_t b = 0; b < F.grid.n_p; ++b) F.at(a, b) *= cplx(0, F.grid.eta(a));
    return inverse_ft(F);
}

inline GridFunction spectral_dp(const GridFunction& f) {
    SpectralFunction F = forward_ft(f);
    for (size_t a = 0; a < F.grid.n_q; ++a)
        for (size_t b = 0; b < F.grid.n_p; ++b) F.at(a, b) *= cplx(0, F.grid.xi(b));
    return inverse_ft(F);
}

inline GridFunction poisson_grid(const GridFunction& f, const GridFunction& g) {
    return multiply(spectral_dq(f), spectral_dp(g)) - multiply(spectral_dp(f), spectral_dq(g));
}

// zero the unpaired most-negative frequency row/column (the star algebra is
// restricted to the symmetric sub-band)
inline GridFunction band_project(const GridFunction& f) {
    SpectralFunction F = forward_ft(f);
    for (size_t b = 0; b < F.grid.n_p; ++b) F.at(0, b) = cplx(0);
    for (size_t a = 0; a < F.grid.n_q; ++a) F.at(a, 0) = cplx(0);
    return inverse_ft(F);
}

// max |a - b| over an interior box |q| <= box_q, |p| <= box_p
inline double max_err_box(const GridFunction& a, const GridFunction& b, double box_q,
                          double box_p) {
    double m = 0;
    const PhaseGrid& g = a.grid;
    for (size_t j = 0; j < g.n_q; ++j)
        for (size_t k = 0; k < g.n_p; ++k)
            if (std::abs(g.q(j)) <= box_q && std::abs(g.p(k)) <= box_p)
                m = std::max(m, std::abs(a.at(j, k) - b.at(j, k)));
    return m;
}

// slow O(N^2) reference for the discrete Fourier convention
inline SpectralFunction slow_forward_ft(const GridFunction& f) {
    const PhaseGrid& g = f.grid;
    SpectralFunction F(g);
    for (size_t a = 0; a < g.n_q; ++a)
        for (size_t b = 0; b < g.n_p; ++b) {
            cplx acc(0);
            for (size_t j = 0; j < g.n_q; ++j)
                for (size_t k = 0; k < g.n_p; ++k)
                    acc += f.at(j, k) *
                           std::exp(cplx(0, -(g.eta(a) * g.q(j) + g.xi(b) * g.p(k))));
            F.at(a, b) = acc * (g.dq() * g.dp() / (2.0 * pi));
        }
    return F;
}

}  // namespace testutil
}  // namespace myl
