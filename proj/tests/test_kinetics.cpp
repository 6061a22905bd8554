#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "myl/kinetics.hpp"
#include "myl/transforms.hpp"
#include "test_models.hpp"

#include <cmath>
#include <random>

using namespace myl;
using namespace myl::testutil;

namespace {

CorrelationData exp_decay_data(double S, size_t half_n) {
    std::vector<double> s_grid;
    std::vector<std::vector<cplx>> h;
    const size_t n = 2 * half_n + 1;
    for (size_t i = 0; i < n; ++i) {
        const double s = -S + 2.0 * S * double(i) / double(n - 1);
        s_grid.push_back(s);
        h.push_back({cplx(std::exp(-std::abs(s)), 0)});
    }
    return make_correlation_data(1, s_grid, h);
}

// stationary correlation data from a random finite-dimensional bath:
// h_ab(s) = Tr(rho W_a^+ W_b(s)) with rho = exp(-beta H)/Z, gaussian-windowed
// so the samples decay inside the window.
CorrelationData random_bath_data(unsigned seed, size_t dim, size_t n_alpha) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    std::vector<double> evals(dim);
    for (double& e : evals) e = 2.0 * n01(rng);
    const double beta = 0.3 + 0.5 * std::abs(n01(rng));
    std::vector<double> rho(dim);
    double z = 0;
    for (size_t a = 0; a < dim; ++a) {
        rho[a] = std::exp(-beta * evals[a]);
        z += rho[a];
    }
    for (double& r : rho) r /= z;

    std::vector<std::vector<cplx>> W(n_alpha, std::vector<cplx>(dim * dim));
    for (auto& w : W)
        for (cplx& v : w) v = cplx(n01(rng), n01(rng));

    const double S = 14.0, tau = 2.0;
    const size_t half_n = 600;
    std::vector<double> s_grid;
    std::vector<std::vector<cplx>> h;
    for (size_t i = 0; i < 2 * half_n + 1; ++i) {
        const double s = -S + 2.0 * S * double(i) / double(2 * half_n);
        s_grid.push_back(s);
        std::vector<cplx> row(n_alpha * n_alpha, cplx(0));
        const double window = std::exp(-s * s / (2.0 * tau * tau));
        for (size_t al = 0; al < n_alpha; ++al)
            for (size_t be = 0; be < n_alpha; ++be) {
                cplx acc(0);
                for (size_t a = 0; a < dim; ++a)
                    for (size_t b = 0; b < dim; ++b)
                        acc += rho[a] * std::conj(W[al][b * dim + a]) * W[be][b * dim + a] *
                               std::exp(cplx(0, (evals[b] - evals[a]) * s));
                row[al * n_alpha + be] = acc * window;
            }
        h.push_back(std::move(row));
    }
    return make_correlation_data(n_alpha, s_grid, h);
}

}  // namespace

TEST_CASE("correlation spectrum of exp(-|s|)") {
    CorrelationData data = exp_decay_data(22.0, 2200);
    std::vector<double> omegas = {0.0, 0.5, 1.0, 2.0};
    CorrelationSpectrum spec = correlation_spectrum(data, omegas);
    for (size_t i = 0; i < omegas.size(); ++i) {
        const double om = omegas[i];
        CHECK(std::abs(spec.h_tilde[i][0] - 2.0 / (1.0 + om * om)) < 1e-6);
        // half-line transform of e^{-s} is 1/(1 - i om); s = its imaginary part
        CHECK(std::abs(spec.s_mat[i][0] - om / (1.0 + om * om)) < 1e-6);
        CHECK(std::abs(spec.h_tilde[i][0].imag()) < 1e-10);
    }

    // stationarity violation rejected
    std::vector<double> s_grid = {-1, 0, 1};
    std::vector<std::vector<cplx>> bad = {{cplx(0.3, 0.2)}, {cplx(1, 0)}, {cplx(0.3, 0.2)}};
    CHECK_THROWS_AS(make_correlation_data(1, s_grid, bad), error);

    // insufficient decay rejected
    CorrelationData shallow = exp_decay_data(4.0, 200);
    CHECK_THROWS_AS(correlation_spectrum(shallow, omegas), error);
}

TEST_CASE("psd check and eigen factorization") {
    CHECK(psd_check({cplx(0.7, 0)}, 1));
    std::vector<cplx> k1 = factor_correlation({cplx(0.49, 0)}, 1);
    CHECK(std::abs(k1[0] - 0.7) < 1e-14);

    std::vector<cplx> m2 = {cplx(2, 0), cplx(1, 0), cplx(1, 0), cplx(2, 0)};
    CHECK(psd_check(m2, 2));
    std::vector<cplx> k2 = factor_correlation(m2, 2);
    for (size_t i = 0; i < 2; ++i)
        for (size_t j = 0; j < 2; ++j) {
            cplx acc(0);
            for (size_t g = 0; g < 2; ++g) acc += std::conj(k2[g * 2 + i]) * k2[g * 2 + j];
            CHECK(std::abs(acc - m2[i * 2 + j]) < 1e-12);
        }

    std::vector<cplx> indef = {cplx(1, 0), cplx(2, 0), cplx(2, 0), cplx(1, 0)};
    CHECK(!psd_check(indef, 2));
    CHECK_THROWS_AS(factor_correlation(indef, 2), audit_error);
    CHECK_THROWS_AS(psd_check({cplx(0, 1)}, 1), error);  // not hermitian
}

TEST_CASE("randomized stationary baths give PSD spectra") {
    std::mt19937_64 seeds(2024);
    for (int it = 0; it < 15; ++it) {
        const size_t n_alpha = 1 + (it % 2);
        CorrelationData data = random_bath_data(unsigned(seeds()), 4 + (it % 3), n_alpha);
        std::vector<double> omegas;
        for (int k = -3; k <= 3; ++k) omegas.push_back(0.7 * k);
        CorrelationSpectrum spec = correlation_spectrum(data, omegas);
        for (const auto& h : spec.h_tilde) CHECK(psd_check(h, n_alpha));
    }
}

TEST_CASE("bohr decomposition of the truncated oscillator") {
    // abstract matrices: unit-spacing basis makes kernels plain matrices
    const size_t n = 12;
    PositionBasis fock = make_basis(0, double(n), n);
    OperatorMatrix H(fock), Q(fock);
    for (size_t a = 0; a < n; ++a) H.at(a, a) = double(a) + 0.5;
    for (size_t a = 0; a + 1 < n; ++a) {
        Q.at(a, a + 1) = std::sqrt(double(a + 1) / 2.0);
        Q.at(a + 1, a) = std::sqrt(double(a + 1) / 2.0);
    }

    std::vector<BohrComponent> comps = bohr_decompose(Q, H, 1.0);
    std::vector<double> found;
    OperatorMatrix sum(fock);
    for (const auto& c : comps) {
        if (op_max_abs(c.V) > 1e-12) found.push_back(c.omega);
        sum = sum + c.V;
    }
    REQUIRE(found.size() == 2);
    CHECK(found[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(found[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(op_l2_dist(sum, Q) < 1e-12);

    // V(+1) is the lowering half
    for (const auto& c : comps)
        if (std::abs(c.omega - 1.0) < 1e-9) {
            for (size_t a = 0; a < n; ++a)
                for (size_t b = 0; b < n; ++b) {
                    const cplx expect = (b == a + 1) ? Q.at(a, b) : cplx(0);
                    CHECK(std::abs(c.V.at(a, b) - expect) < 1e-12);
                }
        }

    // an operator commuting with H has a single zero-frequency component
    OperatorMatrix N(fock);
    for (size_t a = 0; a < n; ++a) N.at(a, a) = double(a);
    std::vector<BohrComponent> nc = bohr_decompose(N, H, 1.0);
    size_t nonzero = 0;
    for (const auto& c : nc)
        if (op_max_abs(c.V) > 1e-12) {
            ++nonzero;
            CHECK(std::abs(c.omega) < 1e-9);
        }
    CHECK(nonzero == 1);

    OperatorMatrix bad = H;
    bad.at(0, 1) += cplx(0, 0.3);
    CHECK_THROWS_AS(bohr_decompose(Q, bad, 1.0), error);
}

TEST_CASE("dense generator matrix agrees with the streaming applier") {
    PhaseGrid g = make_grid(-6, 6, 16, -6, 6, 16);
    for (const WeightFunction& w : {weyl_weight(), lambda_weight(cplx(0.06, 0))}) {
        LindbladModel model = damped_oscillator(g, w, 0.25);
        Generator gen(model);
        std::vector<cplx> M = gen.dense_matrix();
        SpectralFunction rho = forward_ft(random_bandlimited(g, 55, 3, true));
        SpectralFunction lhs = gen.apply(rho);
        const size_t N = g.size();
        std::vector<cplx> rhs(N, cplx(0));
        for (size_t i = 0; i < N; ++i)
            for (size_t j = 0; j < N; ++j) rhs[i] += M[i * N + j] * rho.v[j];
        double m = 0, scale = 0;
        for (size_t i = 0; i < N; ++i) {
            m = std::max(m, std::abs(lhs.v[i] - rhs[i]));
            scale = std::max(scale, std::abs(lhs.v[i]));
        }
        CHECK(m < 1e-12 * std::max(1.0, scale));
    }
}

TEST_CASE("generator preserves reality and trace structurally") {
    PhaseGrid g = make_grid(-8, 8, 64, -8, 8, 64);
    LindbladModel model = damped_oscillator(g, weyl_weight(), 0.1);
    Generator gen(model);
    CHECK(gen.reality_defect() < 1e-9);

    GridFunction rho = displaced_ground(g, 1.0, 0.0);
    GridFunction drho = gen.apply(rho);
    CHECK(std::abs(integrate(drho)) < 1e-10 * std::abs(integrate(rho)));
}

TEST_CASE("evolve: damped oscillator audits and stability gate") {
    PhaseGrid g = make_grid(-8, 8, 32, -8, 8, 32);
    LindbladModel model = damped_oscillator(g, weyl_weight(), 0.1);
    Generator gen(model);
    GridFunction rho0 = displaced_ground(g, 1.0, 0.0);

    EvolveOptions opt;
    opt.dt = 1e-2;
    opt.t_end = 1.0;
    opt.snap_every = 50;
    opt.audit_tol = 1e-5;  // imaginary leakage scales with band-edge content
    EvolveResult res = evolve(rho0, gen, opt);
    REQUIRE(!res.audit.empty());
    double worst_trace = 0, worst_imag = 0;
    for (const AuditRow& row : res.audit) {
        worst_trace = std::max(worst_trace, row.trace_drift);
        worst_imag = std::max(worst_imag, row.imag_leak);
    }
    CHECK(worst_trace < 1e-10 * std::abs(integrate(rho0)));
    CHECK(worst_imag < 5e-6);
    CHECK(res.snapshots.size() == 2);

    // zero generator: constant trajectory
    LindbladModel free_model = damped_oscillator(g, weyl_weight(), 0.0);
    free_model.hamiltonian = GridFunction(g);
    Generator zero_gen(free_model);
    EvolveOptions fopt = opt;
    fopt.audit_tol = 1e-12;
    EvolveResult frozen = evolve(rho0, zero_gen, fopt);
    CHECK(rel_l2(frozen.final_state, rho0) < 1e-12);

    // dt beyond the stability bound is rejected up front
    EvolveOptions wild;
    wild.dt = 1.0;
    wild.t_end = 2.0;
    CHECK_THROWS_AS(evolve(rho0, gen, wild), error);
}

TEST_CASE("pure harmonic evolution rotates rigidly with period 2 pi") {
    // needs the 64^2 resolution: the roll-off must be both smooth on the
    // grid scale and flat across the state
    PhaseGrid g = make_grid(-8, 8, 64, -8, 8, 64);
    LindbladModel model = damped_oscillator(g, weyl_weight(), 0.0);
    Generator gen(model);
    GridFunction rho0 = displaced_ground(g, 0.7, 0.0);

    EvolveOptions opt;
    opt.dt = 2.0 * pi / 512.0;
    opt.t_end = 2.0 * pi;
    EvolveResult res = evolve(rho0, gen, opt);
    CHECK(rel_l2(res.final_state, rho0) < 1e-5);

    // quarter turn maps the q displacement onto -p
    opt.t_end = 0.5 * pi;
    EvolveResult quarter = evolve(rho0, gen, opt);
    CHECK(rel_l2(quarter.final_state, displaced_ground(g, 0.0, -0.7)) < 1e-4);
}

TEST_CASE("fourier dissipator kernel against the nested star assembly") {
    PhaseGrid g = make_grid(-6, 6, 16, -6, 6, 16);
    GridFunction rho = random_bandlimited(g, 91, 2, true);
    std::vector<GridFunction> B = {random_bandlimited(g, 92, 2), random_bandlimited(g, 93, 2)};
    std::vector<cplx> h = {cplx(1.0, 0), cplx(0.3, 0.2), cplx(0.3, -0.2), cplx(0.8, 0)};

    for (const WeightFunction& w :
         {weyl_weight(), lambda_weight(cplx(0.05, 0)), gauss_weight(-0.04)}) {
        GridFunction direct = dissipator_fourier(B, h, rho, w, 1.0);
        GridFunction nested = dissipator_nested(B, h, rho, w, 1.0);
        CHECK(rel_l2(direct, nested) < 1e-8);
        CHECK(max_imag(direct) < 1e-12 * std::max(1.0, max_abs(direct)));

        // h = identity reduces to the plain jump-symbol dissipator
        std::vector<cplx> ident = {cplx(1, 0), cplx(0, 0), cplx(0, 0), cplx(1, 0)};
        GridFunction d1 = dissipator_fourier(B, ident, rho, w, 1.0);
        GridFunction n1 = dissipator_nested(B, ident, rho, w, 1.0);
        CHECK(rel_l2(d1, n1) < 1e-8);
    }

    PhaseGrid big = make_grid(-6, 6, 20, -6, 6, 20);
    CHECK_THROWS_AS(dissipator_fourier({GridFunction(big)}, {cplx(1, 0)}, GridFunction(big),
                                       weyl_weight(), 1.0),
                    error);
}

TEST_CASE("matrix oracle: trace, hermiticity, positivity along the flow") {
    PhaseGrid g = make_grid(-8, 8, 32, -8, 8, 32);
    PositionBasis b = matched_basis(g, 8, 8);
    const WeightFunction w = weyl_weight();
    LindbladModel model = damped_oscillator(g, w, 0.1);

    OperatorMatrix H = quantize(model.hamiltonian, w, b);
    std::vector<OperatorMatrix> jumps = {quantize(model.jumps[0], w, b)};
    PureState psi = make_state(b, [](double x) {
        return cplx(std::exp(-0.5 * (x - 1.0) * (x - 1.0)), 0);
    });
    OperatorMatrix rho0 = projector(psi);

    MatrixEvolveResult res = oracle_evolve_matrix(rho0, H, jumps, 1.0, 1.0, 5e-3, 0.5, 3);
    CHECK(res.max_trace_drift < 1e-10);
    CHECK(res.max_herm_defect < 1e-10);
    CHECK(res.min_eigenvalue > -1e-8);
}

TEST_CASE("commutative diagram: matrix route vs phase-space route") {
    // the guard ring wants the state resolved well inside 3/4 of the band
    PhaseGrid g = make_grid(-8, 8, 64, -8, 8, 64);
    PositionBasis b = matched_basis(g, 4, 16);
    LindbladModel model = damped_oscillator(g, weyl_weight(), 0.1);
    GridFunction f0 = displaced_ground(g, 1.2, 0.0);

    DiagramReport rep = diagram_commutes(f0, model, b, 0.25, 2e-3);
    CHECK(rep.state_residual < 1e-5);
    CHECK(rep.expectation_residual < 1e-6);

    // t = 0: no evolution, only the transform round trip
    DiagramReport zero = diagram_commutes(f0, model, b, 0.0, 2e-3);
    CHECK(zero.state_residual < 1e-12);

    // lambda family, shorter horizon to keep the runtime in check
    LindbladModel ml = damped_oscillator(g, lambda_weight(cplx(0.1, 0)), 0.1);
    DiagramReport repl = diagram_commutes(f0, ml, b, 0.1, 2e-3);
    CHECK(repl.state_residual < 1e-5);
}

TEST_CASE("weak-coupling assembly: flat spectrum gives the two ladder jumps") {
    PhaseGrid g = make_grid(-10, 10, 48, -10, 10, 48);
    PositionBasis b = matched_basis(g, 8, 8);
    const WeightFunction w = weyl_weight();

    GridFunction hsym = sample_tapered(
        g, [](double q, double p) { return cplx(0.5 * (q * q + p * p), 0); });
    GridFunction qsym = sample_tapered(g, [](double q, double) { return cplx(q, 0); });
    OperatorMatrix H = quantize(hsym, w, b);
    OperatorMatrix Q = quantize(qsym, w, b);

    // flat-ish spectrum: narrow gaussian correlation, htilde ~ gamma near the
    // oscillator frequencies
    const double gamma = 0.2, tau = 0.05, S = 0.6;
    std::vector<double> s_grid;
    std::vector<std::vector<cplx>> hdat;
    const size_t half_n = 360;
    for (size_t i = 0; i <= 2 * half_n; ++i) {
        const double s = -S + S * double(i) / double(half_n);
        s_grid.push_back(s);
        hdat.push_back(
            {cplx(gamma / (tau * std::sqrt(2 * pi)) * std::exp(-s * s / (2 * tau * tau)), 0)});
    }
    CorrelationData data = make_correlation_data(1, s_grid, hdat);

    WeakCouplingOptions opt;
    opt.degeneracy_tol = 2e-2;  // taper shifts the low levels by ~1e-3
    opt.max_energy = 6.0;
    opt.jump_drop_tol = 3e-2;
    LindbladModel model = assemble_weak_coupling_model({Q}, H, data, w, g, opt);

    REQUIRE(model.jumps.size() == 2);

    // equal up/down rates heat the oscillator linearly: d<H>/dt = gamma/2
    Generator gen(model);
    GridFunction rho0 = displaced_ground(g, 0.8, 0.0);
    EvolveOptions eo;
    eo.dt = 5e-3;
    eo.t_end = 0.4;
    EvolveResult res = evolve(rho0, gen, eo);
    auto energy = [&](const GridFunction& rho) {
        return (trace_pair(hsym, rho, w) / trace_one(rho, w)).real();
    };
    const double de_dt = (energy(res.final_state) - energy(rho0)) / eo.t_end;
    CHECK(de_dt == doctest::Approx(0.5 * gamma).epsilon(0.02));

    // zero spectrum: purely hamiltonian model
    std::vector<std::vector<cplx>> zero(hdat.size(), std::vector<cplx>{cplx(0, 0)});
    CorrelationData zdata = make_correlation_data(1, s_grid, zero);
    LindbladModel zmodel = assemble_weak_coupling_model({Q}, H, zdata, w, g, opt);
    CHECK(zmodel.jumps.empty());
    CHECK(!zmodel.has_lamb_shift);

    // rank-1 two-label correlation keeps one jump per frequency
    const cplx u0(0.8, 0.0), u1(0.0, 0.6);
    std::vector<std::vector<cplx>> rank1(hdat.size());
    for (size_t i = 0; i < hdat.size(); ++i) {
        const cplx base = hdat[i][0];
        rank1[i] = {std::conj(u0) * u0 * base, std::conj(u0) * u1 * base,
                    std::conj(u1) * u0 * base, std::conj(u1) * u1 * base};
    }
    CorrelationData rdata = make_correlation_data(2, s_grid, rank1);
    LindbladModel rmodel = assemble_weak_coupling_model({Q, Q}, H, rdata, w, g, opt);
    CHECK(rmodel.jumps.size() == 2);
}
