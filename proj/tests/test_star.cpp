#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "myl/star.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace myl;
using namespace myl::testutil;

namespace {

std::vector<WeightFunction> builtins() {
    return {weyl_weight(), lambda_weight(cplx(0.08, 0.03)), gauss_weight(-0.06),
            product_weight(cplx(0.05, 0), -0.04)};
}

// analytic star of two on-grid tones:
//   e^{i s1 z} * e^{i s2 z} = [Omega(s1) Omega(s2) / Omega(s1+s2)]
//                             exp(mu (s2 ^ s1)) e^{i (s1+s2) z}
GridFunction tone_star_oracle(const PhaseGrid& g, const WeightFunction& w, size_t a1, size_t b1,
                              size_t a2, size_t b2) {
    const double e1 = g.eta(a1), x1 = g.xi(b1), e2 = g.eta(a2), x2 = g.xi(b2);
    const cplx k = std::exp(w.log_omega(e1, x1) + w.log_omega(e2, x2) -
                            w.log_omega(e1 + e2, x1 + x2) + w.mu() * (e2 * x1 - e1 * x2));
    return sample(g, [=](double q, double p) {
        return k * std::exp(cplx(0, (e1 + e2) * q + (x1 + x2) * p));
    });
}

}  // namespace

TEST_CASE("unit symbol is the identity element for every built-in weight") {
    PhaseGrid g = make_grid(-7, 7, 28, -7, 7, 28);
    GridFunction one = sample(g, [](double, double) { return cplx(1, 0); });
    GridFunction f = band_project(random_symbol(g, 5));
    for (const WeightFunction& w : builtins()) {
        CHECK(rel_l2(star(one, f, w), f) < 1e-12);
        CHECK(rel_l2(star(f, one, w), f) < 1e-12);
    }
}

TEST_CASE("star of on-grid tones matches the analytic twisted kernel") {
    PhaseGrid g = make_grid(-5, 5, 20, -5, 5, 20);
    // keep the tone sum inside the band
    const size_t a1 = 12, b1 = 8, a2 = 11, b2 = 13;
    for (const WeightFunction& w : builtins()) {
        GridFunction lhs = star(tone(g, a1, b1), tone(g, a2, b2), w);
        GridFunction rhs = tone_star_oracle(g, w, a1, b1, a2, b2);
        CHECK(rel_l2(lhs, rhs) < 1e-11);
    }
}

TEST_CASE("q * p = qp + i hbar/2 on the interior (symbolic-oracle value)") {
    // tapered coordinate symbols on a wide grid keep the spectra clean
    PhaseGrid g = make_grid(-10, 10, 96, -10, 10, 96);
    GridFunction q = sample_tapered(g, [](double q_, double) { return cplx(q_, 0); }, 7.0, 0.8);
    GridFunction p = sample_tapered(g, [](double, double p_) { return cplx(p_, 0); }, 7.0, 0.8);

    GridFunction qp = star(q, p, weyl_weight());
    GridFunction expect = sample(g, [](double q_, double p_) {
        return cplx(q_ * p_, 0.5);
    });
    CHECK(max_err_box(qp, expect, 2.0, 2.0) < 1e-6);

    // bracket(q, p) = 1 = {q, p} and anti_bracket(q, p) = 2qp
    GridFunction br = bracket(q, p, weyl_weight());
    GridFunction one = sample(g, [](double, double) { return cplx(1, 0); });
    CHECK(max_err_box(br, one, 2.0, 2.0) < 1e-6);

    GridFunction ab = anti_bracket(q, p, weyl_weight());
    GridFunction two_qp = sample(g, [](double q_, double p_) { return cplx(2 * q_ * p_, 0); });
    CHECK(max_err_box(ab, two_qp, 2.0, 2.0) < 1e-6);

    // the same first-order structure holds for every built-in weight
    for (const WeightFunction& w : builtins()) {
        GridFunction b2 = bracket(q, p, w);
        CHECK(max_err_box(b2, one, 2.0, 2.0) < 1e-6);
    }
}

TEST_CASE("bracket antisymmetry and the algebraic splitting of star") {
    PhaseGrid g = make_grid(-6, 6, 24, -6, 6, 24);
    GridFunction f = random_symbol(g, 31), h = random_symbol(g, 32);
    for (const WeightFunction& w : builtins()) {
        CHECK(max_abs(bracket(f, f, w)) < 1e-12 * std::max(1.0, max_abs(f)));
        // star = anti/2 + mu * bracket, termwise identity of the kernels
        GridFunction lhs = star(f, h, w);
        GridFunction rhs = 0.5 * anti_bracket(f, h, w) + w.mu() * bracket(f, h, w);
        CHECK(rel_l2(lhs, rhs) < 1e-10);
    }
}

TEST_CASE("hbar -> 0: bracket converges to the poisson bracket at rate hbar^2") {
    PhaseGrid g = make_grid(-8, 8, 64, -8, 8, 64);
    GridFunction f = gaussian(g, 1.0, 0.8, 0.0), h = gaussian(g, 1.0, 0.0, -0.6);
    GridFunction pb = poisson_grid(f, h);
    double err[3];
    const double hbars[3] = {0.2, 0.1, 0.05};
    for (int i = 0; i < 3; ++i) {
        err[i] = l2_dist(bracket(f, h, weyl_weight(hbars[i])), pb);
    }
    CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.075));
    CHECK(err[1] / err[2] == doctest::Approx(4.0).epsilon(0.075));
}

TEST_CASE("u map: identity at weyl, algebra isomorphism onto the moyal product") {
    PhaseGrid g = make_grid(-8, 8, 64, -8, 8, 64);
    GridFunction f = random_symbol(g, 41, true, 1.2), h = random_symbol(g, 42, true, 1.2);

    CHECK(rel_l2(u_map(f, weyl_weight()), f) < 1e-13);
    CHECK(rel_l2(u_inv(f, weyl_weight()), f) < 1e-13);

    const WeightFunction wl = lambda_weight(cplx(0.1, 0.0));
    CHECK(rel_l2(u_inv(u_map(f, wl), wl), f) < 1e-10);

    const WeightFunction weyl = weyl_weight();
    for (const WeightFunction& w : {wl, lambda_weight(cplx(0.0, 0.07))}) {
        GridFunction lhs = u_map(star(f, h, w), w);
        GridFunction rhs = star(u_map(f, w), u_map(h, w), weyl);
        CHECK(rel_l2(lhs, rhs) < 1e-8);

        // bracket intertwining
        GridFunction bl = bracket(f, h, w);
        GridFunction br = u_inv(bracket(u_map(f, w), u_map(h, w), weyl), w);
        CHECK(rel_l2(bl, br) < 1e-8);
    }

    // gauss family on a band small enough for 1/Omega to stay tame
    PhaseGrid gg = make_grid(-11, 11, 32, -11, 11, 32);
    GridFunction fg = gaussian(gg, 1.0, 0.5, -0.3, 1.6, 1.7);
    GridFunction hg = gaussian(gg, 0.8, -0.6, 0.4, 1.7, 1.6);
    const WeightFunction wg = gauss_weight(-0.25);
    GridFunction lhs = u_map(star(fg, hg, wg), wg);
    GridFunction rhs = star(u_map(fg, wg), u_map(hg, wg), weyl);
    CHECK(rel_l2(lhs, rhs) < 1e-8);
    GridFunction bl = bracket(fg, hg, wg);
    GridFunction br = u_inv(bracket(u_map(fg, wg), u_map(hg, wg), weyl), wg);
    CHECK(rel_l2(bl, br) < 1e-8);
}

TEST_CASE("lambda star: first order, module property, commutative limit") {
    // moderate band: the real-exponent lambda kernel amplifies the spectral
    // noise floor by exp(|lambda| eta xi), so keep |lambda| band^2 small
    PhaseGrid g = make_grid(-10, 10, 64, -10, 10, 64);
    const cplx lam(0.1, 0.0);
    const cplx mu(0, 0.5);

    // q*p = qp + (lambda+nu), p*q = qp + (lambda-nu)
    GridFunction q = tapered_coordinate(g, true, 6.0, 1.05);
    GridFunction p = tapered_coordinate(g, false, 6.0, 1.05);
    for (const cplx nu : {mu, cplx(0.1, 0.2)}) {
        GridFunction qp = lambda_star(q, p, lam, nu);
        GridFunction qp_expect =
            sample(g, [&](double q_, double p_) { return q_ * p_ + (lam + nu); });
        CHECK(max_err_box(qp, qp_expect, 2.0, 2.0) < 1e-6);
        GridFunction pq = lambda_star(p, q, lam, nu);
        GridFunction pq_expect =
            sample(g, [&](double q_, double p_) { return q_ * p_ + (lam - nu); });
        CHECK(max_err_box(pq, pq_expect, 2.0, 2.0) < 1e-6);
    }

    // nu = mu coincides with the lambda-family star
    PhaseGrid gs = make_grid(-7, 7, 32, -7, 7, 32);
    GridFunction f = random_symbol(gs, 51), h = random_symbol(gs, 52);
    CHECK(rel_l2(lambda_star(f, h, lam, mu), star(f, h, lambda_weight(lam))) < 1e-10);

    // module property: f(q) * (g(q) h(p)) = (f(q) * h(p)) g(q); widths keep
    // the spectral tails below the lambda-kernel amplification
    PhaseGrid gm = make_grid(-9, 9, 40, -9, 9, 40);
    GridFunction fq = sample(gm, [](double q_, double) {
        return cplx(std::exp(-q_ * q_ / (2.0 * 1.69)), 0);
    });
    GridFunction gq = sample(gm, [](double q_, double) {
        return cplx(std::exp(-(q_ - 0.4) * (q_ - 0.4) / (2.0 * 1.69)), 0);
    });
    GridFunction hp = sample(gm, [](double, double p_) {
        return cplx(std::exp(-p_ * p_ / (2.0 * 1.69)), 0);
    });
    GridFunction lhs = lambda_star(fq, multiply(gq, hp), lam, mu);
    GridFunction rhs = multiply(lambda_star(fq, hp, lam, mu), gq);
    CHECK(rel_l2(lhs, rhs) < 1e-8);

    // nu = 0: commutative but distinct from the pointwise product (lambda 0.2)
    GridFunction ab = lambda_star(fq, hp, cplx(0.2, 0), cplx(0));
    GridFunction ba = lambda_star(hp, fq, cplx(0.2, 0), cplx(0));
    CHECK(l2_dist(ab, ba) < 1e-10);
    CHECK(l2_dist(ab, multiply(fq, hp)) > 1e-3);
}

TEST_CASE("associativity, conjugation, cyclic integrals, jacobi") {
    PhaseGrid g = make_grid(-8, 8, 48, -8, 8, 48);
    GridFunction f = random_symbol(g, 61, true, 1.0, 0.9);
    GridFunction h = random_symbol(g, 62, true, 1.0, 0.9);
    GridFunction k = random_symbol(g, 63, true, 1.0, 0.9);

    for (const WeightFunction& w : builtins()) {
        GridFunction lhs = star(star(f, h, w), k, w);
        GridFunction rhs = star(f, star(h, k, w), w);
        CHECK(rel_l2(lhs, rhs) < 1e-7);

        // cyclic integral
        const cplx c1 = integrate(star(f, h, w)), c2 = integrate(star(h, f, w));
        CHECK(std::abs(c1 - c2) < 1e-9 * std::max(1.0, std::abs(c1)));
    }

    // conjugation anti-automorphism for hermiticity-conserving weights
    for (const WeightFunction& w :
         {weyl_weight(), lambda_weight(cplx(0.08, 0)), gauss_weight(-0.05)}) {
        GridFunction lhs = conj(star(f, h, w));
        GridFunction rhs = star(conj(h), conj(f), w);
        CHECK(rel_l2(lhs, rhs) < 1e-9);
    }

    // jacobi identity
    const WeightFunction w = lambda_weight(cplx(0.06, 0));
    GridFunction j = bracket(f, bracket(h, k, w), w) + bracket(h, bracket(k, f, w), w) +
                     bracket(k, bracket(f, h, w), w);
    const double scale = max_abs(bracket(f, bracket(h, k, w), w));
    CHECK(max_abs(j) < 1e-7 * std::max(1.0, scale));
}

TEST_CASE("triple kernels agree with the nested pairwise routes") {
    // triples need spectra within a third of the band so no route drops modes
    PhaseGrid g = make_grid(-5, 5, 16, -5, 5, 16);
    GridFunction f = random_bandlimited(g, 71, 2);
    GridFunction h = random_bandlimited(g, 72, 2);
    GridFunction k = random_bandlimited(g, 73, 2);
    GridFunction one = sample(g, [](double, double) { return cplx(1, 0); });

    for (const WeightFunction& w : {weyl_weight(), lambda_weight(cplx(0.05, 0))}) {
        CHECK(rel_l2(triple_star(one, one, f, w), f) < 1e-10);
        CHECK(rel_l2(triple_star(f, h, k, w), star(f, star(h, k, w), w)) < 1e-8);

        for (TripleKind kind :
             {TripleKind::comm_comm, TripleKind::comm_anti, TripleKind::anti_comm}) {
            GridFunction direct = nested_ops(kind, f, h, k, w);
            GridFunction ref = nested_ops_pairwise(kind, f, h, k, w);
            CHECK(rel_l2(direct, ref) < 1e-8);
        }
    }

    PhaseGrid big = make_grid(-5, 5, 20, -5, 5, 20);
    GridFunction fb = random_symbol(big, 74);
    CHECK_THROWS_AS(triple_star(fb, fb, fb, weyl_weight()), error);
}

TEST_CASE("fixed-symbol applier reproduces the direct loops to roundoff") {
    for (const PhaseGrid& g : {make_grid(-5, 4, 16, -4, 5, 12), make_grid(-7, 7, 32, -7, 7, 32)}) {
        GridFunction f = random_symbol(g, 81, true, 0.8);
        GridFunction rho = random_symbol(g, 82, true, 0.8);
        for (const WeightFunction& w : builtins()) {
            FixedStar fs(f, w);
            CHECK(rel_l2(fs.apply(rho, FixedStar::Mode::left), star(f, rho, w)) < 1e-12);
            CHECK(rel_l2(fs.apply(rho, FixedStar::Mode::right), star(rho, f, w)) < 1e-12);
            CHECK(rel_l2(fs.apply(rho, FixedStar::Mode::bracket), bracket(f, rho, w)) < 1e-12);
            CHECK(rel_l2(fs.apply(rho, FixedStar::Mode::anti), anti_bracket(f, rho, w)) < 1e-12);
        }
    }
}
