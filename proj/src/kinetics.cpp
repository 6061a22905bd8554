#include "myl/kinetics.hpp"

#include "myl/fft.hpp"

#include <cblas.h>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace myl {

// ---------------------------------------------------------------------------
// correlation data and spectra
// ---------------------------------------------------------------------------

CorrelationData make_correlation_data(size_t n_alpha, std::vector<double> s_grid,
                                      std::vector<std::vector<cplx>> h, double tol) {
    require(n_alpha >= 1, "correlation data: need at least one index");
    require(s_grid.size() == h.size() && !h.empty(), "correlation data: size mismatch");
    const size_t n = s_grid.size();
    require(n >= 3 && n % 2 == 1, "correlation data: need an odd-length symmetric s grid");
    const double ds = s_grid[1] - s_grid[0];
    for (size_t i = 0; i + 1 < n; ++i)
        require(std::abs(s_grid[i + 1] - s_grid[i] - ds) < 1e-12 * std::abs(ds),
                "correlation data: s grid must be uniform");
    require(std::abs(s_grid[n / 2]) < 1e-12, "correlation data: s grid must be symmetric about 0");

    double peak = 0;
    for (const auto& row : h) {
        require(row.size() == n_alpha * n_alpha, "correlation data: matrix size mismatch");
        for (const cplx& z : row) peak = std::max(peak, std::abs(z));
    }
    // stationarity: h_ab(s) = conj(h_ba(-s))
    for (size_t i = 0; i < n; ++i) {
        const size_t ir = n - 1 - i;
        for (size_t a = 0; a < n_alpha; ++a)
            for (size_t b = 0; b < n_alpha; ++b) {
                const cplx d = h[i][a * n_alpha + b] - std::conj(h[ir][b * n_alpha + a]);
                if (std::abs(d) > tol * std::max(1.0, peak))
                    throw error("correlation data: stationarity h_ab(s) = conj(h_ba(-s)) "
                                "violated by " +
                                std::to_string(std::abs(d)));
            }
    }
    return CorrelationData{n_alpha, std::move(s_grid), std::move(h)};
}

namespace {

// composite Newton-Cotes weights on a uniform grid (Simpson, 3/8 patch for an
// odd interval count)
std::vector<double> quad_weights(size_t n_points, double h) {
    std::vector<double> w(n_points, 0.0);
    if (n_points < 2) return w;
    if (n_points == 2) {
        w[0] = w[1] = 0.5 * h;
        return w;
    }
    size_t simpson_points = n_points;  // covers [0, simpson_points-1]
    if ((n_points - 1) % 2 != 0) {
        // odd interval count: 3/8 rule on the last three intervals
        const double c = 3.0 * h / 8.0;
        const size_t s = n_points - 4;
        w[s] += c;
        w[s + 1] += 3 * c;
        w[s + 2] += 3 * c;
        w[s + 3] += c;
        simpson_points = n_points - 3;
    }
    for (size_t i = 0; i + 2 < simpson_points; i += 2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    return w;
}

void small_herm_eig(std::vector<cplx> a, size_t n, std::vector<double>& evals,
                    std::vector<cplx>& evecs) {
    evals.resize(n);
    evecs = std::move(a);
    const int info = LAPACKE_zheevd(LAPACK_ROW_MAJOR, 'V', 'U', int(n),
                                    reinterpret_cast<lapack_complex_double*>(evecs.data()),
                                    int(n), evals.data());
    if (info != 0) throw error("herm eig failed, info=" + std::to_string(info));
}

double herm_defect_small(const std::vector<cplx>& a, size_t n) {
    double d = 0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i; j < n; ++j)
            d = std::max(d, std::abs(a[i * n + j] - std::conj(a[j * n + i])));
    return d;
}

}  // namespace

CorrelationSpectrum correlation_spectrum(const CorrelationData& data,
                                         const std::vector<double>& omegas) {
    const size_t n = data.s_grid.size(), na = data.n_alpha;
    const size_t mid = n / 2;
    const double ds = data.s_grid[1] - data.s_grid[0];

    double peak = 0, edge = 0;
    for (size_t i = 0; i < n; ++i)
        for (const cplx& z : data.h[i]) {
            peak = std::max(peak, std::abs(z));
            if (i == 0 || i == n - 1) edge = std::max(edge, std::abs(z));
        }
    if (peak > 0 && edge > 1e-8 * peak)
        throw error("correlation_spectrum: samples have not decayed at the window edge "
                    "(ratio " +
                    std::to_string(edge / peak) + ")");

    // Simpson on each half line separately; the kink at s=0 stays on a
    // segment boundary.
    const size_t nh = mid + 1;
    const std::vector<double> wh = quad_weights(nh, ds);

    CorrelationSpectrum out;
    out.omegas = omegas;
    out.h_tilde.assign(omegas.size(), std::vector<cplx>(na * na, cplx(0)));
    out.s_mat.assign(omegas.size(), std::vector<cplx>(na * na, cplx(0)));

    for (size_t io = 0; io < omegas.size(); ++io) {
        const double om = omegas[io];
        std::vector<cplx> half_plus(na * na, cplx(0));  // Int_0^S
        std::vector<cplx> half_minus(na * na, cplx(0)); // Int_{-S}^0
        for (size_t i = 0; i < nh; ++i) {
            const double sp = data.s_grid[mid + i];
            const cplx php = std::exp(cplx(0, om * sp)) * wh[i];
            const double sm = data.s_grid[mid - i];
            const cplx phm = std::exp(cplx(0, om * sm)) * wh[i];
            for (size_t e = 0; e < na * na; ++e) {
                half_plus[e] += php * data.h[mid + i][e];
                half_minus[e] += phm * data.h[mid - i][e];
            }
        }
        for (size_t e = 0; e < na * na; ++e)
            out.h_tilde[io][e] = half_plus[e] + half_minus[e];
        // s = (hbar - hbar^+)/(2i) with hbar_ab = Int_0^inf e^{i om s} h_ab
        for (size_t a = 0; a < na; ++a)
            for (size_t b = 0; b < na; ++b)
                out.s_mat[io][a * na + b] =
                    (half_plus[a * na + b] - std::conj(half_plus[b * na + a])) / (2.0 * iu);
    }
    return out;
}

bool psd_check(const std::vector<cplx>& h_tilde, size_t n) {
    require(h_tilde.size() == n * n, "psd_check: size mismatch");
    double scale = 0;
    for (const cplx& z : h_tilde) scale = std::max(scale, std::abs(z));
    require(herm_defect_small(h_tilde, n) <= 1e-10 * std::max(1.0, scale),
            "psd_check: input is not hermitian");
    std::vector<double> evals;
    std::vector<cplx> evecs;
    small_herm_eig(h_tilde, n, evals, evecs);
    return evals.empty() || evals.front() >= -1e-10;
}

std::vector<cplx> factor_correlation(const std::vector<cplx>& h_tilde, size_t n) {
    require(h_tilde.size() == n * n, "factor_correlation: size mismatch");
    std::vector<double> evals;
    std::vector<cplx> evecs;
    small_herm_eig(h_tilde, n, evals, evecs);
    if (!evals.empty() && evals.front() < -1e-10)
        throw audit_error("factor_correlation: matrix is not PSD, min eigenvalue " +
                          std::to_string(evals.front()));
    // k = diag(sqrt(l)) V^+, so k^+ k = V diag(l) V^+ = h
    std::vector<cplx> k(n * n, cplx(0));
    for (size_t g = 0; g < n; ++g) {
        const double l = std::max(0.0, evals[g]);
        const double root = std::sqrt(l);
        for (size_t b = 0; b < n; ++b) k[g * n + b] = root * std::conj(evecs[b * n + g]);
    }
    return k;
}

// ---------------------------------------------------------------------------
// Bohr decomposition
// ---------------------------------------------------------------------------

std::vector<BohrComponent> bohr_decompose(const OperatorMatrix& Q, const OperatorMatrix& H,
                                          double hbar, double degeneracy_tol,
                                          double max_energy) {
    require(Q.basis.same_geometry(H.basis), "bohr_decompose: basis mismatch");
    require(H.hermitian(1e-8 * std::max(1.0, op_max_abs(H))),
            "bohr_decompose: H is not hermitian");
    const size_t n = H.basis.n_x;
    const double dx = H.basis.dx();

    const HermEig eig = herm_eig(H);
    double emax = 0;
    for (double e : eig.evals) emax = std::max(emax, std::abs(e));
    const double tol = degeneracy_tol > 0 ? degeneracy_tol : 1e-9 * std::max(1.0, emax);

    std::vector<size_t> kept;
    for (size_t i = 0; i < n; ++i)
        if (max_energy <= 0 || eig.evals[i] <= max_energy) kept.push_back(i);

    // Q in the eigenbasis: Qe = U^+ (Q dx) U
    std::vector<cplx> ql2(n * n);
    for (size_t i = 0; i < n * n; ++i) ql2[i] = Q.m[i] * dx;
    std::vector<cplx> tmp(n * n), qe(n * n);
    const cplx one(1, 0), zero(0, 0);
    cblas_zgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, int(n), int(n), int(n), &one,
                ql2.data(), int(n), eig.evecs.data(), int(n), &zero, tmp.data(), int(n));
    cblas_zgemm(CblasRowMajor, CblasConjTrans, CblasNoTrans, int(n), int(n), int(n), &one,
                eig.evecs.data(), int(n), tmp.data(), int(n), &zero, qe.data(), int(n));

    struct Pair {
        double omega;
        size_t a, b;
    };
    std::vector<Pair> pairs;
    pairs.reserve(kept.size() * kept.size());
    for (size_t a : kept)
        for (size_t b : kept) pairs.push_back({(eig.evals[b] - eig.evals[a]) / hbar, a, b});
    std::sort(pairs.begin(), pairs.end(),
              [](const Pair& x, const Pair& y) { return x.omega < y.omega; });

    std::vector<BohrComponent> comps;
    size_t i = 0;
    while (i < pairs.size()) {
        size_t j = i + 1;
        double omega_sum = pairs[i].omega;
        while (j < pairs.size() && pairs[j].omega - pairs[j - 1].omega <= tol / hbar) {
            omega_sum += pairs[j].omega;
            ++j;
        }
        // V(omega) in the eigenbasis, then back to the position kernel
        std::vector<cplx> ve(n * n, cplx(0));
        for (size_t k = i; k < j; ++k) ve[pairs[k].a * n + pairs[k].b] = qe[pairs[k].a * n + pairs[k].b];
        cblas_zgemm(CblasRowMajor, CblasNoTrans, CblasConjTrans, int(n), int(n), int(n), &one,
                    ve.data(), int(n), eig.evecs.data(), int(n), &zero, tmp.data(), int(n));
        std::vector<cplx> vk(n * n);
        cblas_zgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, int(n), int(n), int(n), &one,
                    eig.evecs.data(), int(n), tmp.data(), int(n), &zero, vk.data(), int(n));
        BohrComponent c;
        c.omega = omega_sum / double(j - i);
        c.V = OperatorMatrix(H.basis);
        for (size_t e = 0; e < n * n; ++e) c.V.m[e] = vk[e] / dx;
        comps.push_back(std::move(c));
        i = j;
    }
    return comps;
}

// ---------------------------------------------------------------------------
// Generator
// ---------------------------------------------------------------------------

Generator::Generator(const LindbladModel& model)
    : grid_(model.hamiltonian.grid), w_(model.w) {
    const double l = model.lambda_coupling;
    diss_scale_ = l * l / (w_.hbar * w_.hbar);

    GridFunction heff = model.hamiltonian;
    if (model.has_lamb_shift) {
        require(model.lamb_shift.grid.same_geometry(grid_), "generator: lamb shift grid mismatch");
        heff = heff + (l * l) * model.lamb_shift;
    }
    heff_sym_ = heff;
    ham_ = std::make_unique<FixedStar>(heff, w_);

    if (!model.jumps.empty()) {
        GridFunction gram(grid_);
        for (const GridFunction& a : model.jumps) {
            require(a.grid.same_geometry(grid_), "generator: jump grid mismatch");
            jump_syms_.push_back(a);
            jumps_.push_back(Jump{FixedStar(a, w_), FixedStar(conj(a), w_)});
            gram = gram + star(conj(a), a, w_);
        }
        gram_sym_ = gram;
        gram_ = std::make_unique<FixedStar>(gram, w_);
    }
}

SpectralFunction Generator::apply(const SpectralFunction& rho) const {
    RhoTables tabs(rho, w_);
    SpectralFunction out = ham_->apply(tabs, FixedStar::Mode::bracket);
    if (gram_) {
        SpectralFunction anti = gram_->apply(tabs, FixedStar::Mode::anti);
        for (size_t i = 0; i < out.v.size(); ++i) out.v[i] -= 0.5 * diss_scale_ * anti.v[i];
        for (const Jump& j : jumps_) {
            SpectralFunction x = j.a.apply(tabs, FixedStar::Mode::left);
            RhoTables xt(x, w_);
            SpectralFunction y = j.a_conj.apply(xt, FixedStar::Mode::right);
            for (size_t i = 0; i < out.v.size(); ++i) out.v[i] += diss_scale_ * y.v[i];
        }
    }
    return out;
}

GridFunction Generator::apply(const GridFunction& rho) const {
    return inverse_ft(apply(forward_ft(rho)));
}

namespace {

// Dense spectral matrix of rho -> f * rho (left) or rho -> rho * f (right).
std::vector<cplx> multiplier_matrix(const GridFunction& f, const WeightFunction& w, bool left) {
    const PhaseGrid& g = f.grid;
    const size_t nq = g.n_q, np = g.n_p, N = nq * np;
    const size_t hq = nq / 2, hp = np / 2;
    SpectralFunction F = forward_ft(f);

    std::vector<cplx> omega(N), inv_omega(N);
    for (size_t a = 0; a < nq; ++a)
        for (size_t b = 0; b < np; ++b) {
            const cplx lg = w.log_omega(g.eta(a), g.xi(b));
            if (std::abs(lg.real()) > 700.0) throw audit_error("multiplier_matrix: Omega overflow");
            omega[a * np + b] = std::exp(lg);
            inv_omega[a * np + b] = std::exp(-lg);
        }

    const cplx mu = w.mu();
    const double cell = g.deta() * g.dxi() / (2.0 * pi);
    std::vector<cplx> M(N * N, cplx(0));
    parallel_for(nq, [&](size_t lo, size_t hi) {
        for (size_t a = std::max<size_t>(lo, 1); a < hi; ++a)
            for (size_t c = 1; c < np; ++c) {
                const size_t tau = a * np + c;
                for (size_t br = 1; br < nq; ++br)
                    for (size_t dr = 1; dr < np; ++dr) {
                        const size_t bf = a + hq - br, df = c + hp - dr;
                        if (bf == 0 || bf >= nq || df == 0 || df >= np) continue;
                        const size_t sig_r = br * np + dr, sig_f = bf * np + df;
                        // wedge(rho, f) for left, wedge(f, rho) for right
                        const double wedge = g.eta(br) * g.xi(df) - g.eta(bf) * g.xi(dr);
                        const cplx tw = std::exp(mu * (left ? wedge : -wedge));
                        M[tau * N + sig_r] += cell * inv_omega[tau] * tw * omega[sig_f] *
                                              omega[sig_r] * F.v[sig_f];
                    }
            }
    });
    return M;
}

void mat_mul(size_t n, const std::vector<cplx>& A, const std::vector<cplx>& B,
             std::vector<cplx>& C) {
    const cplx one(1, 0), zero(0, 0);
    C.assign(n * n, cplx(0));
    cblas_zgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, int(n), int(n), int(n), &one,
                A.data(), int(n), B.data(), int(n), &zero, C.data(), int(n));
}

// exactly real, exactly band-limited probe (spectrum within half the band,
// conjugate-symmetrized)
GridFunction random_real_symbol(const PhaseGrid& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist;
    const size_t hq = g.n_q / 2, hp = g.n_p / 2;
    const size_t rq = std::max<size_t>(1, hq / 2), rp = std::max<size_t>(1, hp / 2);
    SpectralFunction F(g);
    for (size_t a = hq - rq; a <= hq + rq; ++a)
        for (size_t b = hp - rp; b <= hp + rp; ++b) {
            const double da = (double(a) - double(hq)) / double(rq);
            const double db = (double(b) - double(hp)) / double(rp);
            const double envelope = std::exp(-6.0 * (da * da + db * db));
            F.at(a, b) = envelope * cplx(dist(rng), dist(rng));
        }
    SpectralFunction S(g);
    for (size_t a = 1; a < g.n_q; ++a)
        for (size_t b = 1; b < g.n_p; ++b)
            S.at(a, b) = 0.5 * (F.at(a, b) + std::conj(F.at(g.n_q - a, g.n_p - b)));
    return inverse_ft(S);
}

}  // namespace

std::vector<cplx> Generator::dense_matrix() const {
    const size_t N = grid_.size();
    require(N <= 4096, "dense_matrix: grid too large for the dense generator path");
    const cplx two_mu = 2.0 * w_.mu();

    // Hamiltonian part: (L - R)/(2 mu) for the effective Hamiltonian
    std::vector<cplx> ML = multiplier_matrix(heff_sym_, w_, true);
    std::vector<cplx> MR = multiplier_matrix(heff_sym_, w_, false);
    std::vector<cplx> M(N * N);
    for (size_t i = 0; i < N * N; ++i) M[i] = (ML[i] - MR[i]) / two_mu;

    if (!jump_syms_.empty()) {
        // -(c/2) {R, rho}
        ML = multiplier_matrix(gram_sym_, w_, true);
        MR = multiplier_matrix(gram_sym_, w_, false);
        for (size_t i = 0; i < N * N; ++i) M[i] -= 0.5 * diss_scale_ * (ML[i] + MR[i]);
        // + c A rho A^c, composed right-to-left
        std::vector<cplx> T;
        for (const GridFunction& a : jump_syms_) {
            ML = multiplier_matrix(a, w_, true);
            MR = multiplier_matrix(conj(a), w_, false);
            mat_mul(N, MR, ML, T);
            for (size_t i = 0; i < N * N; ++i) M[i] += diss_scale_ * T[i];
        }
    }
    return M;
}

double Generator::spectral_radius_estimate(int iters) const {
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> dist;
    SpectralFunction v(grid_);
    for (cplx& z : v.v) z = cplx(dist(rng), dist(rng));
    double radius = 0;
    for (int it = 0; it < iters; ++it) {
        double nrm = 0;
        for (const cplx& z : v.v) nrm += std::norm(z);
        nrm = std::sqrt(nrm);
        if (nrm == 0) return 0;
        for (cplx& z : v.v) z /= nrm;
        v = apply(v);
        double nrm2 = 0;
        for (const cplx& z : v.v) nrm2 += std::norm(z);
        radius = std::sqrt(nrm2);
    }
    return radius;
}

double Generator::reality_defect() const {
    GridFunction r = random_real_symbol(grid_, 777);
    GridFunction out = apply(r);
    const double scale = std::max(1e-300, max_abs(out));
    return max_imag(out) / scale;
}

// ---------------------------------------------------------------------------
// Fourier-side dissipator and the nested reference
// ---------------------------------------------------------------------------

GridFunction dissipator_fourier(const std::vector<GridFunction>& B, const std::vector<cplx>& h,
                                const GridFunction& rho, const WeightFunction& w,
                                double lambda_coupling) {
    require(!B.empty(), "dissipator_fourier: need at least one coupling symbol");
    const PhaseGrid& g = rho.grid;
    require(g.n_q <= 16 && g.n_p <= 16,
            "dissipator_fourier: direct O(N^3) kernel gated at 16x16 modes");
    const size_t nb = B.size();
    require(h.size() == nb * nb, "dissipator_fourier: h matrix size mismatch");
    const size_t nq = g.n_q, np = g.n_p, N = nq * np, hq = nq / 2, hp = np / 2;

    // Weyl-side transforms
    std::vector<SpectralFunction> Bw, Bw_conj;
    for (const GridFunction& b : B) {
        require(b.grid.same_geometry(g), "dissipator_fourier: grid mismatch");
        GridFunction bw = to_weyl_symbol(b, w);
        Bw.push_back(forward_ft(bw));
        Bw_conj.push_back(forward_ft(conj(bw)));
    }
    SpectralFunction rho_w = forward_ft(to_weyl_symbol(rho, w));

    // bilinear B(sigma', sigma) = sum_nm conj-side_n(sigma') h_nm side_m(sigma)
    std::vector<cplx> bil(N * N, cplx(0));
    for (size_t n = 0; n < nb; ++n)
        for (size_t m = 0; m < nb; ++m) {
            const cplx hnm = h[n * nb + m];
            if (hnm == cplx(0)) continue;
            for (size_t sp = 0; sp < N; ++sp)
                for (size_t s = 0; s < N; ++s)
                    bil[sp * N + s] += Bw_conj[n].v[sp] * hnm * Bw[m].v[s];
        }

    std::vector<cplx> inv_omega(N);
    for (size_t a = 0; a < nq; ++a)
        for (size_t b = 0; b < np; ++b)
            inv_omega[a * np + b] = std::exp(-w.log_omega(g.eta(a), g.xi(b)));

    const double half_h = 0.5 * w.hbar;
    const double cell2 = std::pow(g.deta() * g.dxi() / (2.0 * pi), 2);
    SpectralFunction Y(g);

    parallel_for(nq, [&](size_t lo, size_t hi) {
        for (size_t at = std::max<size_t>(lo, 1); at < hi; ++at)
            for (size_t ct = 1; ct < np; ++ct) {
                cplx acc(0);
                for (size_t a1 = 1; a1 < nq; ++a1)
                    for (size_t c1 = 1; c1 < np; ++c1) {  // sigma (B_m side)
                        for (size_t a2 = 1; a2 < nq; ++a2) {
                            const size_t a3 = at + 2 * hq >= a1 + a2 ? at + 2 * hq - a1 - a2 : nq;
                            if (a3 == 0 || a3 >= nq) continue;
                            for (size_t c2 = 1; c2 < np; ++c2) {  // sigma' (conj side)
                                const size_t c3 =
                                    ct + 2 * hp >= c1 + c2 ? ct + 2 * hp - c1 - c2 : np;
                                if (c3 == 0 || c3 >= np) continue;
                                const double e1 = g.eta(a1), x1 = g.xi(c1);
                                const double e2 = g.eta(a2), x2 = g.xi(c2);
                                const double e3 = g.eta(a3), x3 = g.xi(c3);
                                // sinh(mu sigma^(sigma'+sigma'')) e^{mu sigma'^sigma''}
                                const double w_outer = e1 * (x2 + x3) - (e2 + e3) * x1;
                                const double w_inner = e2 * x3 - e3 * x2;
                                const cplx kern =
                                    cplx(0, std::sin(half_h * w_outer)) *
                                    std::exp(cplx(0, half_h * w_inner));
                                acc += bil[(a2 * np + c2) * N + (a1 * np + c1)] *
                                       rho_w.v[a3 * np + c3] * kern;
                            }
                        }
                    }
                Y.v[at * np + ct] = acc * cell2 * inv_omega[at * np + ct];
            }
    });

    GridFunction y = inverse_ft(Y);
    const double scale = -2.0 * lambda_coupling * lambda_coupling / (w.hbar * w.hbar);
    GridFunction out(g);
    for (size_t i = 0; i < y.v.size(); ++i) out.v[i] = scale * y.v[i].real();
    return out;
}

GridFunction dissipator_nested(const std::vector<GridFunction>& B, const std::vector<cplx>& h,
                               const GridFunction& rho, const WeightFunction& w,
                               double lambda_coupling) {
    const size_t nb = B.size();
    require(h.size() == nb * nb, "dissipator_nested: h matrix size mismatch");
    const double c = lambda_coupling * lambda_coupling / (w.hbar * w.hbar);
    GridFunction out(rho.grid);
    for (size_t n = 0; n < nb; ++n)
        for (size_t m = 0; m < nb; ++m) {
            const cplx hnm = h[n * nb + m];
            if (hnm == cplx(0)) continue;
            const GridFunction bn_c = conj(B[n]);
            GridFunction sandwich = star(star(B[m], rho, w), bn_c, w);
            GridFunction gram = star(bn_c, B[m], w);
            GridFunction half = anti_bracket(gram, rho, w);
            out = out + (c * hnm) * (sandwich - 0.5 * half);
        }
    return out;
}

// ---------------------------------------------------------------------------
// evolve
// ---------------------------------------------------------------------------

namespace {

struct SpectralAudit {
    const PhaseGrid& g;
    cplx trace0;
    double scale0;

    SpectralAudit(const PhaseGrid& grid, const SpectralFunction& v0) : g(grid) {
        trace0 = trace_of(v0);
        double m = 0;
        for (const cplx& z : v0.v) m = std::max(m, std::abs(z));
        scale0 = std::max(m, 1e-300);
    }

    cplx trace_of(const SpectralFunction& v) const {
        return 2.0 * pi * v.v[(g.n_q / 2) * g.n_p + g.n_p / 2];
    }

    double reality_defect(const SpectralFunction& v) const {
        // real symbols satisfy vtilde(-sigma) = conj(vtilde(sigma))
        double d = 0;
        for (size_t a = 1; a < g.n_q; ++a)
            for (size_t b = 1; b < g.n_p; ++b) {
                const cplx z1 = v.v[a * g.n_p + b];
                const cplx z2 = v.v[(g.n_q - a) * g.n_p + (g.n_p - b)];
                d = std::max(d, std::abs(z1 - std::conj(z2)));
            }
        return 0.5 * d;
    }
};

}  // namespace

EvolveResult evolve(const GridFunction& rho0, const Generator& gen, const EvolveOptions& opt) {
    require(rho0.grid.same_geometry(gen.grid()), "evolve: grid mismatch");
    require(opt.dt > 0 && opt.t_end >= 0, "evolve: bad time range");

    const double radius = gen.spectral_radius_estimate();
    const double bound = 0.5 * 2.828 / std::max(radius, 1e-300);
    if (opt.dt > bound) {
        std::ostringstream os;
        os << "evolve: dt = " << opt.dt << " exceeds the stability bound " << bound
           << " (spectral radius estimate " << radius << ")";
        throw error(os.str());
    }

    const bool reality = opt.audit_reality && check_hermiticity(gen.weight()) &&
                         max_imag(rho0) <= 1e-10 * std::max(1.0, max_abs(rho0));

    const size_t n_steps = size_t(std::llround(opt.t_end / opt.dt));
    SpectralFunction v = forward_ft(rho0);
    SpectralAudit audit(rho0.grid, v);

    EvolveResult res;
    // per-step conservation audit; aborts on a breach beyond audit_tol
    auto record = [&](size_t step, const SpectralFunction& state) {
        const double t = double(step) * opt.dt;
        AuditRow row;
        row.t = t;
        row.trace_drift = std::abs(audit.trace_of(state) - audit.trace0);
        row.imag_leak = reality ? audit.reality_defect(state) / audit.scale0 : 0.0;
        res.audit.push_back(row);
        if (row.trace_drift > opt.audit_tol * std::max(1.0, std::abs(audit.trace0)) ||
            row.imag_leak > opt.audit_tol) {
            std::ostringstream os;
            os << "evolve: conservation audit breached at t = " << t << " (trace drift "
               << row.trace_drift << ", imag leak " << row.imag_leak << ")";
            throw audit_error(os.str());
        }
        if (opt.snap_every > 0 && (step % opt.snap_every == 0 || step == n_steps)) {
            res.times.push_back(t);
            res.snapshots.push_back(inverse_ft(state));
        }
    };

    const size_t N = rho0.grid.size();
    if (N <= 1024) {
        // exact dense RK4 step: P = I + hM (I + hM/2 (I + hM/3 (I + hM/4)))
        const std::vector<cplx> M = gen.dense_matrix();
        auto add_identity = [N](std::vector<cplx>& A) {
            for (size_t i = 0; i < N; ++i) A[i * N + i] += 1.0;
        };
        std::vector<cplx> hM(N * N);
        for (size_t i = 0; i < N * N; ++i) hM[i] = opt.dt * M[i];
        std::vector<cplx> C = hM, T;
        for (int k = 4; k >= 2; --k) {
            for (cplx& z : C) z /= double(k);
            add_identity(C);
            if (k > 2) {
                mat_mul(N, hM, C, T);
                C.swap(T);
            }
        }
        std::vector<cplx> P;
        mat_mul(N, hM, C, P);
        add_identity(P);

        SpectralFunction state(rho0.grid);
        std::vector<cplx> nxt(N);
        state.v = v.v;
        const cplx one(1, 0), zero(0, 0);
        for (size_t s = 1; s <= n_steps; ++s) {
            cblas_zgemv(CblasRowMajor, CblasNoTrans, int(N), int(N), &one, P.data(), int(N),
                        state.v.data(), 1, &zero, nxt.data(), 1);
            state.v.swap(nxt);
            record(s, state);
        }
        v.v = state.v;
    } else {
        SpectralFunction tmp(rho0.grid);
        for (size_t s = 1; s <= n_steps; ++s) {
            SpectralFunction k1 = gen.apply(v);
            for (size_t i = 0; i < N; ++i) tmp.v[i] = v.v[i] + 0.5 * opt.dt * k1.v[i];
            SpectralFunction k2 = gen.apply(tmp);
            for (size_t i = 0; i < N; ++i) tmp.v[i] = v.v[i] + 0.5 * opt.dt * k2.v[i];
            SpectralFunction k3 = gen.apply(tmp);
            for (size_t i = 0; i < N; ++i) tmp.v[i] = v.v[i] + opt.dt * k3.v[i];
            SpectralFunction k4 = gen.apply(tmp);
            for (size_t i = 0; i < N; ++i)
                v.v[i] += opt.dt / 6.0 * (k1.v[i] + 2.0 * k2.v[i] + 2.0 * k3.v[i] + k4.v[i]);
            record(s, v);
        }
    }
    res.final_state = inverse_ft(v);
    return res;
}

// ---------------------------------------------------------------------------
// matrix oracle
// ---------------------------------------------------------------------------

MatrixEvolveResult oracle_evolve_matrix(const OperatorMatrix& rho0, const OperatorMatrix& H,
                                        const std::vector<OperatorMatrix>& jumps,
                                        double lambda_coupling, double hbar, double dt,
                                        double t_end, size_t eig_audits) {
    require(rho0.basis.n_x <= 192, "oracle_evolve_matrix: basis too large");
    const double c = lambda_coupling * lambda_coupling / (hbar * hbar);

    std::vector<OperatorMatrix> adj;
    OperatorMatrix gram(rho0.basis);
    for (const OperatorMatrix& a : jumps) {
        adj.push_back(adjoint(a));
        gram = gram + compose(adj.back(), a);
    }

    auto rhs = [&](const OperatorMatrix& r) {
        OperatorMatrix out = (-iu / hbar) * (compose(H, r) - compose(r, H));
        if (!jumps.empty()) {
            OperatorMatrix half = compose(gram, r) + compose(r, gram);
            out = out - (0.5 * c) * half;
            for (size_t n = 0; n < jumps.size(); ++n)
                out = out + c * compose(compose(jumps[n], r), adj[n]);
        }
        return out;
    };

    const size_t n_steps = size_t(std::llround(t_end / dt));
    const size_t eig_stride = eig_audits > 0 ? std::max<size_t>(1, n_steps / eig_audits) : 0;

    MatrixEvolveResult res;
    res.min_eigenvalue = 0;
    OperatorMatrix r = rho0;
    const cplx tr0 = op_trace(rho0);
    for (size_t s = 1; s <= n_steps; ++s) {
        OperatorMatrix k1 = rhs(r);
        OperatorMatrix k2 = rhs(r + (0.5 * dt) * k1);
        OperatorMatrix k3 = rhs(r + (0.5 * dt) * k2);
        OperatorMatrix k4 = rhs(r + dt * k3);
        r = r + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        res.max_trace_drift = std::max(res.max_trace_drift, std::abs(op_trace(r) - tr0));
        res.max_herm_defect = std::max(res.max_herm_defect, r.herm_defect());
        if (eig_stride > 0 && (s % eig_stride == 0 || s == n_steps))
            res.min_eigenvalue = std::min(res.min_eigenvalue, min_eigenvalue(r));
    }
    res.final_state = std::move(r);
    return res;
}

// ---------------------------------------------------------------------------
// diagram
// ---------------------------------------------------------------------------

DiagramReport diagram_commutes(const GridFunction& f0, const LindbladModel& model,
                               const PositionBasis& basis, double t_end, double dt) {
    const Generator gen(model);
    const WeightFunction& w = model.w;

    EvolveOptions opt;
    opt.dt = dt;
    opt.t_end = t_end;
    opt.audit_tol = 1e-3;  // the diagram test reports residuals, audits stay loose
    EvolveResult phase = evolve(f0, gen, opt);

    GridFunction heff = model.hamiltonian;
    if (model.has_lamb_shift)
        heff = heff + (model.lambda_coupling * model.lambda_coupling) * model.lamb_shift;
    OperatorMatrix Hm = quantize(heff, w, basis);
    std::vector<OperatorMatrix> Am;
    for (const GridFunction& a : model.jumps) Am.push_back(quantize(a, w, basis));
    OperatorMatrix r0 = quantize(f0, w, basis);
    MatrixEvolveResult mat =
        oracle_evolve_matrix(r0, Hm, Am, model.lambda_coupling, w.hbar, dt, t_end, 0);

    DiagramReport rep;
    GridFunction back = dequantize(mat.final_state, w, f0.grid);
    rep.state_residual = l2_dist(back, phase.final_state) / std::max(l2_norm(f0), 1e-300);

    // expectation flow: d/dt <A, rho> = <A, L rho> across one step from f0
    GridFunction a_obs = sample_tapered(f0.grid, [](double q, double p) {
        return cplx(q + 0.3 * p + 0.2 * q * q, 0);
    });
    EvolveOptions one;
    one.dt = dt;
    one.t_end = dt;
    one.audit_tol = 1e-3;
    GridFunction f1 = evolve(f0, gen, one).final_state;
    const cplx lhs = (trace_pair(a_obs, f1, w) - trace_pair(a_obs, f0, w)) / dt;
    GridFunction mid = 0.5 * (f0 + f1);
    const cplx rhs = trace_pair(a_obs, gen.apply(mid), w);
    rep.expectation_residual = std::abs(lhs - rhs);
    return rep;
}

// ---------------------------------------------------------------------------
// weak-coupling assembly
// ---------------------------------------------------------------------------

LindbladModel assemble_weak_coupling_model(const std::vector<OperatorMatrix>& couplings,
                                           const OperatorMatrix& H_matrix,
                                           const CorrelationData& data, const WeightFunction& w,
                                           const PhaseGrid& grid,
                                           const WeakCouplingOptions& opt) {
    require(!couplings.empty(), "assemble: need at least one coupling");
    require(couplings.size() == data.n_alpha, "assemble: couplings vs correlation labels");
    const size_t na = couplings.size();

    // Bohr components per coupling, then merge the frequency lists
    std::vector<std::vector<BohrComponent>> comps;
    double scale = 0;
    for (const OperatorMatrix& q : couplings) {
        comps.push_back(bohr_decompose(q, H_matrix, w.hbar, opt.degeneracy_tol, opt.max_energy));
        scale = std::max(scale, op_max_abs(q));
    }
    std::vector<double> omegas;
    for (const auto& list : comps)
        for (const auto& c : list) omegas.push_back(c.omega);
    std::sort(omegas.begin(), omegas.end());
    const double wtol = 1e-7 * std::max(1.0, std::abs(omegas.empty() ? 0.0 : omegas.back()));
    std::vector<double> merged;
    for (double om : omegas)
        if (merged.empty() || om - merged.back() > wtol) merged.push_back(om);

    auto component_at = [&](size_t alpha, double om) -> OperatorMatrix {
        for (const auto& c : comps[alpha])
            if (std::abs(c.omega - om) <= wtol) return c.V;
        return OperatorMatrix(H_matrix.basis);
    };

    const CorrelationSpectrum spec = correlation_spectrum(data, merged);

    LindbladModel model;
    model.w = w;
    model.hamiltonian = dequantize(H_matrix, w, grid);
    OperatorMatrix F(H_matrix.basis);
    std::vector<OperatorMatrix> candidates;
    for (size_t io = 0; io < merged.size(); ++io) {
        const double om = merged[io];
        std::vector<OperatorMatrix> V;
        for (size_t a = 0; a < na; ++a) V.push_back(component_at(a, om));

        if (!psd_check(spec.h_tilde[io], na))
            throw audit_error("assemble: correlation spectrum not PSD at omega = " +
                              std::to_string(om));
        const std::vector<cplx> k = factor_correlation(spec.h_tilde[io], na);
        for (size_t gma = 0; gma < na; ++gma) {
            OperatorMatrix U(H_matrix.basis);
            for (size_t b = 0; b < na; ++b) U = U + k[gma * na + b] * V[b];
            candidates.push_back(std::move(U));
        }
        for (size_t a = 0; a < na; ++a)
            for (size_t b = 0; b < na; ++b) {
                const cplx s_ab = spec.s_mat[io][a * na + b];
                if (s_ab != cplx(0)) F = F + (-s_ab / w.hbar) * compose(adjoint(V[a]), V[b]);
            }
    }
    // keep jumps by Hilbert-Schmidt weight relative to the strongest one
    double top = 0;
    std::vector<double> norms;
    const OperatorMatrix zero(H_matrix.basis);
    for (const OperatorMatrix& u : candidates) {
        norms.push_back(op_l2_dist(u, zero));
        top = std::max(top, norms.back());
    }
    for (size_t i = 0; i < candidates.size(); ++i)
        if (norms[i] > opt.jump_drop_tol * top)
            model.jumps.push_back(dequantize(candidates[i], w, grid));

    model.lamb_shift = dequantize(F, w, grid);
    if (max_abs(model.lamb_shift) > 1e-14) model.has_lamb_shift = true;
    return model;
}

}  // namespace myl
