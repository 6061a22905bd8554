#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "myl/grid.hpp"
#include "myl/star.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace myl;
using namespace myl::testutil;

TEST_CASE("make_grid arithmetic and rejection") {
    PhaseGrid g = make_grid(-8, 8, 64, -8, 8, 64);
    CHECK(g.dq() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(g.deta() == doctest::Approx(2.0 * pi / 16.0).epsilon(1e-15));
    // dq * deta * n_q = 2 pi up to a few ulp
    CHECK(std::abs(g.dq() * g.deta() * double(g.n_q) - 2.0 * pi) <= 8e-16 * 2.0 * pi);

    CHECK_NOTHROW(make_grid(-1, 1, 4, -1, 1, 4));
    CHECK_THROWS_AS(make_grid(0, 1, 3, 0, 1, 4), error);
    CHECK_THROWS_AS(make_grid(0, 1, 2, 0, 1, 4), error);
    CHECK_THROWS_AS(make_grid(1, 0, 4, 0, 1, 4), error);
    CHECK_THROWS_AS(make_grid(0, std::nan(""), 4, 0, 1, 4), error);
}

TEST_CASE("forward_ft matches the slow reference") {
    PhaseGrid g = make_grid(-3, 2, 12, -2.5, 2, 8);
    GridFunction f = random_symbol(g, 42, true, 0.5, 0.8);
    SpectralFunction fast = forward_ft(f);
    SpectralFunction slow = slow_forward_ft(f);
    double m = 0;
    for (size_t i = 0; i < fast.v.size(); ++i) m = std::max(m, std::abs(fast.v[i] - slow.v[i]));
    CHECK(m < 1e-12);
}

TEST_CASE("gaussian is self-dual with unit prefactor") {
    PhaseGrid g = make_grid(-8, 8, 64, -8, 8, 64);
    GridFunction f = sample(g, [](double q, double p) {
        return cplx(std::exp(-(q * q + p * p) / 2.0), 0);
    });
    SpectralFunction F = forward_ft(f);
    double m = 0;
    for (size_t a = 0; a < g.n_q; ++a)
        for (size_t b = 0; b < g.n_p; ++b) {
            const double expect = std::exp(-(g.eta(a) * g.eta(a) + g.xi(b) * g.xi(b)) / 2.0);
            m = std::max(m, std::abs(F.at(a, b) - expect));
        }
    CHECK(m < 1e-8);
}

TEST_CASE("zero maps to zero") {
    PhaseGrid g = make_grid(-4, 4, 16, -4, 4, 16);
    GridFunction z(g);
    CHECK(max_abs(inverse_ft(forward_ft(z))) == 0.0);
    CHECK(std::abs(integrate(z)) == 0.0);
}

TEST_CASE("on-grid tone transforms to a single bin of weight 2pi/(deta dxi)") {
    PhaseGrid g = make_grid(-6, 6, 24, -6, 6, 24);
    const size_t a0 = 14, b0 = 9;
    SpectralFunction F = forward_ft(tone(g, a0, b0));
    const double w = 2.0 * pi / (g.deta() * g.dxi());
    for (size_t a = 0; a < g.n_q; ++a)
        for (size_t b = 0; b < g.n_p; ++b) {
            if (a == a0 && b == b0)
                CHECK(std::abs(F.at(a, b) - w) < 1e-9 * w);
            else
                CHECK(std::abs(F.at(a, b)) < 1e-9 * w);
        }
}

TEST_CASE("round trip and linearity") {
    PhaseGrid g = make_grid(-7, 7, 48, -7, 7, 48);
    GridFunction f = random_symbol(g, 7);
    GridFunction back = inverse_ft(forward_ft(f));
    CHECK(rel_l2(back, f) < 1e-12);

    GridFunction h = random_symbol(g, 8);
    const cplx c1(0.3, -1.2), c2(-2.0, 0.7);
    SpectralFunction lhs = forward_ft(c1 * f + c2 * h);
    SpectralFunction f1 = forward_ft(f), f2 = forward_ft(h);
    double m = 0;
    for (size_t i = 0; i < lhs.v.size(); ++i)
        m = std::max(m, std::abs(lhs.v[i] - c1 * f1.v[i] - c2 * f2.v[i]));
    CHECK(m < 1e-12);
}

TEST_CASE("parseval") {
    PhaseGrid g = make_grid(-7, 7, 32, -7, 7, 40);
    GridFunction f = random_symbol(g, 11);
    SpectralFunction F = forward_ft(f);
    double lhs = 0, rhs = 0;
    for (const cplx& z : f.v) lhs += std::norm(z);
    lhs *= g.dq() * g.dp();
    for (const cplx& z : F.v) rhs += std::norm(z);
    rhs *= g.deta() * g.dxi();
    CHECK(std::abs(lhs - rhs) < 1e-10 * lhs);
}

TEST_CASE("integrate: gaussian, zero, boundary warning") {
    PhaseGrid g = make_grid(-8, 8, 128, -8, 8, 128);
    GridFunction f = sample(g, [](double q, double p) {
        return cplx(std::exp(-(q * q + p * p)), 0);
    });
    CHECK(std::abs(integrate(f) - pi) < 1e-8);
    CHECK(!integrate_report(f).boundary_warning);

    // same gaussian on a domain that clips it
    PhaseGrid small = make_grid(-2, 2, 16, -2, 2, 16);
    GridFunction fs = sample(small, [](double q, double p) {
        return cplx(std::exp(-(q * q + p * p)), 0);
    });
    CHECK(integrate_report(fs).boundary_warning);
}

TEST_CASE("pairing: identity element, hermitian form, positivity") {
    PhaseGrid g = make_grid(-8, 8, 32, -8, 8, 32);
    const WeightFunction w = weyl_weight();
    const StarOp op = make_star_op(w);

    GridFunction one = sample(g, [](double, double) { return cplx(1, 0); });
    GridFunction f = random_symbol(g, 3);
    CHECK(std::abs(pairing(one, f, op) - integrate(f)) < 1e-9 * std::abs(integrate(f)) + 1e-12);

    GridFunction h = random_symbol(g, 4);
    CHECK(std::abs(pairing(f, h, op) - std::conj(pairing(h, f, op))) < 1e-9);

    // real f and a hermiticity-conserving weight: <f,f> real and nonnegative
    for (const WeightFunction& wh : {weyl_weight(), lambda_weight(cplx(0.08, 0))}) {
        const StarOp oph = make_star_op(wh);
        GridFunction fr = random_symbol(g, 5, false);
        const cplx v = pairing(fr, fr, oph);
        CHECK(std::abs(v.imag()) < 1e-9 * std::abs(v));
        CHECK(v.real() > -1e-9);
    }

    PhaseGrid g2 = make_grid(-8, 8, 16, -8, 8, 16);
    CHECK_THROWS_AS(pairing(f, GridFunction(g2), op), error);
}
