#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "myl/weights.hpp"
#include "test_util.hpp"

#include <cmath>
#include <random>

using namespace myl;

TEST_CASE("eval_weight family formulas") {
    CHECK(eval_weight(weyl_weight(), 3.7, -1.2) == cplx(1, 0));

    const cplx lam(0.3, -0.1);
    const cplx v = eval_weight(lambda_weight(lam), 1.0, 2.0);
    CHECK(std::abs(v - std::exp(lam * 2.0)) < 1e-15);

    const cplx vg = eval_weight(gauss_weight(-0.25), 1.0, 2.0);
    CHECK(std::abs(vg - std::exp(-0.25 * 5.0)) < 1e-15);

    CHECK_THROWS_AS(eval_weight(gauss_weight(10.0), 30.0, 30.0), audit_error);
    CHECK_THROWS_AS(eval_weight(weyl_weight(), std::nan(""), 0.0), error);
}

TEST_CASE("standard ordering weight is lambda(-i hbar/2)") {
    // exp(lambda xi eta) with lambda = -mu must equal exp(-mu eta xi)
    const double hbar = 0.7;
    const WeightFunction w = lambda_weight(-cplx(0, 0.5 * hbar), hbar);
    const cplx mu = w.mu();
    for (double eta : {-2.0, 0.4, 1.7})
        for (double xi : {-1.0, 0.9})
            CHECK(std::abs(eval_weight(w, eta, xi) - std::exp(-mu * eta * xi)) < 1e-14);
}

TEST_CASE("trace pairing condition") {
    CHECK(check_trace_pairing(weyl_weight()));
    CHECK(!check_trace_pairing(lambda_weight(cplx(0.05, 0))));
    CHECK(!check_trace_pairing(lambda_weight(cplx(0, 0.05))));
    CHECK(!check_trace_pairing(gauss_weight(0.01)));
}

TEST_CASE("hermiticity condition") {
    CHECK(check_hermiticity(weyl_weight()));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    for (int i = 0; i < 8; ++i) {
        const double re = u(rng), im = u(rng);
        CHECK(check_hermiticity(lambda_weight(cplx(re, 0))));
        if (std::abs(im) > 1e-3) CHECK(!check_hermiticity(lambda_weight(cplx(re, im))));
    }
    CHECK(check_hermiticity(gauss_weight(-0.1)));
}

TEST_CASE("marginal condition") {
    CHECK(check_marginal_condition(weyl_weight()));
    CHECK(check_marginal_condition(lambda_weight(cplx(0.3, -0.2))));
    CHECK(!check_marginal_condition(gauss_weight(0.05)));
    CHECK(!check_marginal_condition(gauss_weight(-0.05)));
}

TEST_CASE("classical limit depends on the declared hbar scaling") {
    CHECK(check_classical_limit(weyl_weight()));
    CHECK(check_classical_limit(lambda_weight(cplx(0.1, 0), 1.0, HbarScaling::linear)));
    CHECK(!check_classical_limit(lambda_weight(cplx(0.1, 0), 1.0, HbarScaling::fixed)));
    CHECK(check_classical_limit(gauss_weight(-0.25, 1.0, HbarScaling::linear)));
    CHECK(!check_classical_limit(gauss_weight(-0.25, 1.0, HbarScaling::fixed)));
}

TEST_CASE("built-ins are zero-free on the band") {
    PhaseGrid g = make_grid(-8, 8, 32, -8, 8, 32);
    for (const WeightFunction& w :
         {weyl_weight(), lambda_weight(cplx(0.1, 0.05)), gauss_weight(-0.1),
          product_weight(cplx(0.05, 0), -0.05)}) {
        for (size_t a = 0; a < g.n_q; ++a)
            for (size_t b = 0; b < g.n_p; ++b) {
                // zero-free: log Omega finite everywhere on the band
                CHECK(std::isfinite(w.log_omega(g.eta(a), g.xi(b)).real()));
            }
    }
}

TEST_CASE("inverse kernel omega") {
    PhaseGrid g = make_grid(-6, 6, 24, -6, 6, 24);

    // weyl: single-bin 2 pi delta, the convolution route is the identity
    GridFunction om = inverse_kernel_omega(weyl_weight(), g);
    const double peak = 2.0 * pi / (g.dq() * g.dp());
    for (size_t j = 0; j < g.n_q; ++j)
        for (size_t k = 0; k < g.n_p; ++k) {
            const double expect = (g.q(j) == 0.0 && g.p(k) == 0.0) ? peak : 0.0;
            CHECK(std::abs(om.at(j, k) - expect) < 1e-9 * peak);
        }

    // gauss(kappa < 0): 1/Omega grows beyond double range on a wide band
    PhaseGrid wide = make_grid(-20, 20, 512, -20, 20, 512);
    CHECK_THROWS_AS(inverse_kernel_omega(gauss_weight(-0.25), wide), audit_error);

    // small real lambda on a narrow band stays finite
    CHECK_NOTHROW(inverse_kernel_omega(lambda_weight(cplx(0.05, 0)), g));
}

TEST_CASE("bipartite factorization predicate") {
    const WeightFunction ws = lambda_weight(cplx(0.04, 0));
    const WeightFunction wr = gauss_weight(-0.03);
    CHECK(check_factorization(tensor_weight(ws, wr), ws, wr));
    CHECK(check_factorization(tensor_weight(weyl_weight(), weyl_weight()), weyl_weight(),
                              weyl_weight()));

    // a cross-coupled joint weight is rejected
    BipartiteWeight coupled{[&](double es, double xs, double er, double xr) {
        return ws.log_omega(es, xs) + wr.log_omega(er, xr) + cplx(0.01 * es * xr);
    }};
    CHECK(!check_factorization(coupled, ws, wr));
}
