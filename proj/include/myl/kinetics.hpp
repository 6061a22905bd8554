#pragma once

#include "myl/grid.hpp"
#include "myl/operator.hpp"
#include "myl/star.hpp"
#include "myl/transforms.hpp"
#include "myl/weights.hpp"

namespace myl {

// ---------------------------------------------------------------------------
// Stationary bath correlations h_{ab}(s) = <W_a^+ W_b(s)> and their spectra.
// ---------------------------------------------------------------------------

struct CorrelationData {
    size_t n_alpha = 0;
    // uniform symmetric time grid s in [-S, S]
    std::vector<double> s_grid;
    // h[sample][a * n_alpha + b]
    std::vector<std::vector<cplx>> h;
};

/// Validates the stationarity constraint h_ab(s) = conj(h_ba(-s)).
CorrelationData make_correlation_data(size_t n_alpha, std::vector<double> s_grid,
                                      std::vector<std::vector<cplx>> h, double tol = 1e-8);

struct CorrelationSpectrum {
    std::vector<double> omegas;
    // per omega: hermitian n x n matrices, row-major
    std::vector<std::vector<cplx>> h_tilde;  // full-line transform
    std::vector<std::vector<cplx>> s_mat;    // (hbar_half - hbar_half^+) / 2i
};

/// Windowed quadrature of the full-line transform plus the half-line
/// transform for the Lamb matrices. Errors when the samples have not decayed
/// below 1e-8 of their peak at the window edge.
CorrelationSpectrum correlation_spectrum(const CorrelationData& data,
                                         const std::vector<double>& omegas);

/// Eigenvalue floor >= -1e-10 for a hermitian matrix (row-major, n x n).
bool psd_check(const std::vector<cplx>& h_tilde, size_t n);

/// Eigen square root k with k^+ k = h_tilde (rank-deficient allowed). Errors
/// with the most negative eigenvalue when the input is not PSD.
std::vector<cplx> factor_correlation(const std::vector<cplx>& h_tilde, size_t n);

// ---------------------------------------------------------------------------
// Bohr decomposition of a coupling operator under a hermitian Hamiltonian.
// ---------------------------------------------------------------------------

struct BohrComponent {
    double omega;
    OperatorMatrix V;
};

/// V(omega) = Sum_{E_b - E_a = hbar omega} |a><a| Q |b><b|, frequencies
/// clustered within degeneracy_tol (default 1e-9 * max|E|). The components
/// sum to Q exactly. Optionally restricts to the eigen-subspace with
/// E <= max_energy (discrete-spectrum truncation).
std::vector<BohrComponent> bohr_decompose(const OperatorMatrix& Q, const OperatorMatrix& H,
                                          double hbar, double degeneracy_tol = 0,
                                          double max_energy = 0);

// ---------------------------------------------------------------------------
// Lindblad model in phase-space form
// ---------------------------------------------------------------------------

struct LindbladModel {
    WeightFunction w;
    double lambda_coupling = 1.0;
    GridFunction hamiltonian;            // H_Sigma symbol, real
    std::vector<GridFunction> jumps;     // A_n symbols; adjoints are conjugates
    GridFunction lamb_shift;             // optional F symbol (real)
    bool has_lamb_shift = false;
};

// ---------------------------------------------------------------------------
// Generator d rho/dt = L(rho):
//   L(rho) = bracket(H + l^2 F, rho)
//          + (l^2/hbar^2) Sum_n [ A_n * rho * A_n^c - 1/2 {A_n^c * A_n, rho} ]
// assembled from nested pairwise star operations with fixed-symbol appliers.
// ---------------------------------------------------------------------------

class Generator {
  public:
    explicit Generator(const LindbladModel& model);

    SpectralFunction apply(const SpectralFunction& rho) const;
    GridFunction apply(const GridFunction& rho) const;

    const PhaseGrid& grid() const { return grid_; }
    const WeightFunction& weight() const { return w_; }

    /// Dense matrix of the generator on the spectral basis (small grids).
    std::vector<cplx> dense_matrix() const;

    /// Spectral-radius estimate by power iteration (for the dt gate).
    double spectral_radius_estimate(int iters = 15) const;

    /// Imaginary leakage of L(rho) for a random real symbol (reality audit).
    double reality_defect() const;

  private:
    PhaseGrid grid_;
    WeightFunction w_;
    double diss_scale_;
    GridFunction heff_sym_, gram_sym_;
    std::vector<GridFunction> jump_syms_;
    std::unique_ptr<FixedStar> ham_;
    struct Jump {
        FixedStar a;       // left multiplier
        FixedStar a_conj;  // right multiplier
    };
    std::vector<Jump> jumps_;
    std::unique_ptr<FixedStar> gram_;  // R = sum A^c * A, anti mode
};

// ---------------------------------------------------------------------------
// Direct Fourier-kernel dissipator (small-grid oracle, <= 16x16 modes).
// h defaults to the identity (single-jump reduction). Valid for real
// rho symbols under hermiticity-conserving weights.
// ---------------------------------------------------------------------------

GridFunction dissipator_fourier(const std::vector<GridFunction>& B, const std::vector<cplx>& h,
                                const GridFunction& rho, const WeightFunction& w,
                                double lambda_coupling);

/// Same object assembled from nested pairwise star products (reference route).
GridFunction dissipator_nested(const std::vector<GridFunction>& B, const std::vector<cplx>& h,
                               const GridFunction& rho, const WeightFunction& w,
                               double lambda_coupling);

// ---------------------------------------------------------------------------
// Time evolution: classical fixed-step RK4 with per-step conservation audits.
// Small grids (<= 1024 modes) use the exact dense RK4 propagator matrix;
// larger grids stream the generator.
// ---------------------------------------------------------------------------

struct EvolveOptions {
    double dt = 1e-3;
    double t_end = 1.0;
    size_t snap_every = 0;      // 0: keep only the final state
    double audit_tol = 1e-6;    // per-step trace/reality breach aborts
    bool audit_reality = true;  // only applied when the weight conserves it
};

struct AuditRow {
    double t;
    double trace_drift;  // |Int rho - Int rho0|
    double imag_leak;    // max |Im rho| (z-space, sampled)
};

struct EvolveResult {
    GridFunction final_state;
    std::vector<double> times;
    std::vector<GridFunction> snapshots;
    std::vector<AuditRow> audit;
};

EvolveResult evolve(const GridFunction& rho0, const Generator& gen, const EvolveOptions& opt);

// ---------------------------------------------------------------------------
// Matrix-side oracle: same RK4 on the operator Lindblad equation.
// ---------------------------------------------------------------------------

struct MatrixEvolveResult {
    OperatorMatrix final_state;
    double max_trace_drift = 0;
    double max_herm_defect = 0;
    double min_eigenvalue = 0;  // most negative eigenvalue seen at audits
};

MatrixEvolveResult oracle_evolve_matrix(const OperatorMatrix& rho0, const OperatorMatrix& H,
                                        const std::vector<OperatorMatrix>& jumps,
                                        double lambda_coupling, double hbar, double dt,
                                        double t_end, size_t eig_audits = 4);

// ---------------------------------------------------------------------------
// Commutative-diagram test: quantize -> matrix evolution -> dequantize
// against the phase-space evolution of the same model, plus the expectation
// flow identity d/dt <A, rho> = <A, L rho>.
// ---------------------------------------------------------------------------

struct DiagramReport {
    double state_residual;        // relative L2 at t_end
    double expectation_residual;  // |d/dt tr(A rho) - tr(A L rho)|
};

DiagramReport diagram_commutes(const GridFunction& f0, const LindbladModel& model,
                               const PositionBasis& basis, double t_end, double dt);

// ---------------------------------------------------------------------------
// Weak-coupling assembly: Bohr-decompose the couplings, factor the
// correlation spectra, build jump symbols and the Lamb-shift symbol.
// ---------------------------------------------------------------------------

struct WeakCouplingOptions {
    double degeneracy_tol = 0;   // 0: 1e-9 * max|E|
    double max_energy = 0;       // 0: no truncation
    double jump_drop_tol = 1e-9; // relative to the strongest jump (HS norm)
};

LindbladModel assemble_weak_coupling_model(const std::vector<OperatorMatrix>& couplings,
                                           const OperatorMatrix& H_matrix,
                                           const CorrelationData& data, const WeightFunction& w,
                                           const PhaseGrid& grid,
                                           const WeakCouplingOptions& opt = {});

}  // namespace myl
