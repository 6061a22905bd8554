#pragma once

#include "myl/common.hpp"
#include "myl/grid.hpp"

namespace myl {

enum class WeightFamily { weyl, lambda, gauss, product };

/// How the family parameters depend on hbar when taking the classical limit.
/// `linear` means lambda (resp. kappa) is declared proportional to hbar.
enum class HbarScaling { fixed, linear };

// ---------------------------------------------------------------------------
// Ordering weight Omega(eta, xi). All built-ins are entire and zero-free:
//   weyl           Omega = 1
//   lambda(l)      Omega = exp(l * xi * eta)
//   gauss(k)       Omega = exp(k * (eta^2 + xi^2))
//   product        lambda * gauss
// mu = i*hbar/2 is carried here since every kernel needs it together with
// Omega.
// ---------------------------------------------------------------------------
struct WeightFunction {
    WeightFamily family = WeightFamily::weyl;
    cplx lambda{0.0, 0.0};
    double kappa = 0.0;
    double hbar = 1.0;
    HbarScaling scaling = HbarScaling::fixed;

    cplx mu() const { return cplx(0.0, 0.5 * hbar); }

    cplx log_omega(double eta, double xi) const;
    bool is_weyl() const { return family == WeightFamily::weyl; }

    /// Family with hbar -> s*hbar, parameters following their declared scaling.
    WeightFunction scaled_hbar(double s) const;
};

WeightFunction weyl_weight(double hbar = 1.0);
WeightFunction lambda_weight(cplx lambda, double hbar = 1.0,
                             HbarScaling scaling = HbarScaling::fixed);
WeightFunction gauss_weight(double kappa, double hbar = 1.0,
                            HbarScaling scaling = HbarScaling::fixed);
WeightFunction product_weight(cplx lambda, double kappa, double hbar = 1.0,
                              HbarScaling scaling = HbarScaling::fixed);

/// Family formula value; throws with a magnitude report when the real
/// exponent overflows double range.
cplx eval_weight(const WeightFunction& w, double eta, double xi);

/// omega(z) = (1/2pi) Int dsigma exp(i sigma z) / Omega(sigma) sampled via
/// inverse_ft of 1/Omega on the grid band. Errors if 1/Omega overflows the
/// band (the convolution route is then unusable).
GridFunction inverse_kernel_omega(const WeightFunction& w, const PhaseGrid& grid);

/// Largest |log| magnitudes of Omega over a grid band; used by overflow gates.
struct BandReport {
    double max_log_omega = 0;   // max Re log Omega  (|Omega| overflow)
    double min_log_omega = 0;   // min Re log Omega  (|1/Omega| overflow)
};
BandReport weight_band_report(const WeightFunction& w, const PhaseGrid& grid);

// -- structural predicates ---------------------------------------------------
// Pointwise identities sampled on the grid band at 1e-12. When no grid is
// given, a default band |eta|,|xi| <= 6 with 25 points per axis is used.

/// Omega(sigma) * Omega(-sigma) = Omega(0): the pairing reduces to the plain
/// trace formula.
bool check_trace_pairing(const WeightFunction& w, const PhaseGrid* grid = nullptr);

/// Omega(sigma) = conj(Omega(-sigma)): real symbols <-> hermitian operators.
bool check_hermiticity(const WeightFunction& w, const PhaseGrid* grid = nullptr);

/// Omega(0,xi) = Omega(eta,0) = 1: position/momentum marginals meaningful.
bool check_marginal_condition(const WeightFunction& w, const PhaseGrid* grid = nullptr);

/// Omega -> 1 pointwise as hbar is scaled down by {1, 1/2, 1/4, 1/8}; depends
/// on the declared hbar scaling of the family parameters.
bool check_classical_limit(const WeightFunction& w, const PhaseGrid* grid = nullptr);

// -- bipartite weights --------------------------------------------------------

/// Weight over a two-degree-of-freedom band, Omega(sigma_S, sigma_R).
struct BipartiteWeight {
    std::function<cplx(double, double, double, double)> log_omega;  // (etaS,xiS,etaR,xiR)
};

BipartiteWeight tensor_weight(const WeightFunction& sys, const WeightFunction& res);

/// Omega(sigma_S, sigma_R) = Omega(sigma_S, 0) * Omega(0, sigma_R) pointwise,
/// with the marginals matching the given per-subsystem weights.
bool check_factorization(const BipartiteWeight& joint, const WeightFunction& sys,
                         const WeightFunction& res, const PhaseGrid* grid = nullptr);

}  // namespace myl
