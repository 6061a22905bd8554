#pragma once

#include "myl/common.hpp"

namespace myl {

// ---------------------------------------------------------------------------
// Discretized position basis x_j = x_min + j*dx (periodic trigonometric
// conventions, j < n_x). Matrices hold operator kernels A(x_j, x_k) as
// densities: the identity is delta(x-x') -> 1/dx on the diagonal, adjacent
// operators compose with a dx weight.
// ---------------------------------------------------------------------------
struct PositionBasis {
    double x_min = 0, x_max = 0;
    size_t n_x = 0;

    double dx() const { return (x_max - x_min) / double(n_x); }
    double x(size_t j) const { return x_min + double(j) * dx(); }
    /// Half-width of the momentum band this spacing can represent.
    double p_band(double hbar) const { return pi * hbar / dx(); }
    bool same_geometry(const PositionBasis& o) const {
        return x_min == o.x_min && x_max == o.x_max && n_x == o.n_x;
    }
};

PositionBasis make_basis(double x_min, double x_max, size_t n_x);

struct OperatorMatrix {
    PositionBasis basis;
    std::vector<cplx> m;  // n_x * n_x, row-major kernel densities

    OperatorMatrix() = default;
    explicit OperatorMatrix(const PositionBasis& b) : basis(b), m(b.n_x * b.n_x, cplx(0)) {}

    cplx& at(size_t j, size_t k) { return m[j * basis.n_x + k]; }
    const cplx& at(size_t j, size_t k) const { return m[j * basis.n_x + k]; }

    /// max |M - M^dagger| entrywise.
    double herm_defect() const;
    bool hermitian(double tol = 1e-8) const { return herm_defect() <= tol; }
};

OperatorMatrix identity_kernel(const PositionBasis& b);
/// Crisp position multiplication operator, diag(x_j)/dx.
OperatorMatrix position_op(const PositionBasis& b);
/// Spectral-derivative momentum operator -i hbar d/dx (Nyquist row zeroed).
OperatorMatrix momentum_op(const PositionBasis& b, double hbar);

/// Operator composition: (A B)(x,x') = Int A(x,y) B(y,x') dy.
OperatorMatrix compose(const OperatorMatrix& A, const OperatorMatrix& B);
OperatorMatrix adjoint(const OperatorMatrix& A);
OperatorMatrix operator+(const OperatorMatrix& A, const OperatorMatrix& B);
OperatorMatrix operator-(const OperatorMatrix& A, const OperatorMatrix& B);
OperatorMatrix operator*(cplx s, const OperatorMatrix& A);

/// Tr A = Sum A(x_j, x_j) dx.
cplx op_trace(const OperatorMatrix& A);
double op_max_abs(const OperatorMatrix& A);
double op_l2_dist(const OperatorMatrix& A, const OperatorMatrix& B);

/// (A psi)(x_j) = Sum_k A(x_j, x_k) psi(x_k) dx.
std::vector<cplx> apply(const OperatorMatrix& A, const std::vector<cplx>& psi);

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------
struct PureState {
    PositionBasis basis;
    std::vector<cplx> amp;  // normalized: Sum |amp|^2 dx = 1 within 1e-10
};

PureState make_state(const PositionBasis& b, const std::function<cplx(double)>& psi);
cplx overlap(const PureState& bra, const PureState& ket);  // <bra|ket>
/// |psi><psi| as a kernel-density matrix.
OperatorMatrix projector(const PureState& psi);

/// Harmonic-oscillator eigenfunction n = 0 or 1 (unit mass and frequency).
PureState oscillator_state(const PositionBasis& b, int n, double hbar);

// ---------------------------------------------------------------------------
// Dense hermitian eigensolve (LAPACK): returns ascending eigenvalues and the
// orthonormal eigenvectors of the l2 matrix  M_l2 = kernel * dx  as columns.
// ---------------------------------------------------------------------------
struct HermEig {
    std::vector<double> evals;
    std::vector<cplx> evecs;  // n x n row-major, column c = eigenvector c
};
HermEig herm_eig(const OperatorMatrix& A);

/// Smallest eigenvalue of a hermitian kernel matrix (positivity audits).
double min_eigenvalue(const OperatorMatrix& A);

}  // namespace myl
