#include "myl/operator.hpp"

#include "myl/fft.hpp"

#include <cblas.h>
#include <lapacke.h>

#include <cmath>

namespace myl {

PositionBasis make_basis(double x_min, double x_max, size_t n_x) {
    require(std::isfinite(x_min) && std::isfinite(x_max) && x_min < x_max,
            "make_basis: bad bounds");
    require(n_x >= 4 && n_x % 2 == 0, "make_basis: n_x must be even and >= 4");
    return PositionBasis{x_min, x_max, n_x};
}

double OperatorMatrix::herm_defect() const {
    const size_t n = basis.n_x;
    double d = 0;
    for (size_t j = 0; j < n; ++j)
        for (size_t k = j; k < n; ++k)
            d = std::max(d, std::abs(m[j * n + k] - std::conj(m[k * n + j])));
    return d;
}

OperatorMatrix identity_kernel(const PositionBasis& b) {
    OperatorMatrix A(b);
    for (size_t j = 0; j < b.n_x; ++j) A.at(j, j) = 1.0 / b.dx();
    return A;
}

OperatorMatrix position_op(const PositionBasis& b) {
    OperatorMatrix A(b);
    for (size_t j = 0; j < b.n_x; ++j) A.at(j, j) = b.x(j) / b.dx();
    return A;
}

OperatorMatrix momentum_op(const PositionBasis& b, double hbar) {
    // columns of the spectral derivative: D e_k via FFT, Nyquist zeroed
    const size_t n = b.n_x;
    OperatorMatrix A(b);
    std::vector<cplx> col(n);
    std::vector<double> wavenum(n);
    for (size_t a = 0; a < n; ++a) {
        const ptrdiff_t sa = a <= n / 2 ? ptrdiff_t(a) : ptrdiff_t(a) - ptrdiff_t(n);
        wavenum[a] = (sa == ptrdiff_t(n / 2)) ? 0.0 : 2.0 * pi * double(sa) / (double(n) * b.dx());
    }
    for (size_t k = 0; k < n; ++k) {
        std::fill(col.begin(), col.end(), cplx(0));
        col[k] = 1.0;
        fft(col, false);
        for (size_t a = 0; a < n; ++a) col[a] *= cplx(0, wavenum[a]);
        fft(col, true);
        for (size_t j = 0; j < n; ++j) A.at(j, k) = col[j] * (-iu * hbar) / (double(n) * b.dx());
    }
    return A;
}

OperatorMatrix compose(const OperatorMatrix& A, const OperatorMatrix& B) {
    require(A.basis.same_geometry(B.basis), "compose: basis mismatch");
    const size_t n = A.basis.n_x;
    OperatorMatrix C(A.basis);
    const cplx alpha(A.basis.dx(), 0), beta(0, 0);
    cblas_zgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, int(n), int(n), int(n), &alpha,
                A.m.data(), int(n), B.m.data(), int(n), &beta, C.m.data(), int(n));
    return C;
}

OperatorMatrix adjoint(const OperatorMatrix& A) {
    const size_t n = A.basis.n_x;
    OperatorMatrix C(A.basis);
    for (size_t j = 0; j < n; ++j)
        for (size_t k = 0; k < n; ++k) C.at(j, k) = std::conj(A.at(k, j));
    return C;
}

OperatorMatrix operator+(const OperatorMatrix& A, const OperatorMatrix& B) {
    require(A.basis.same_geometry(B.basis), "basis mismatch");
    OperatorMatrix C(A.basis);
    for (size_t i = 0; i < C.m.size(); ++i) C.m[i] = A.m[i] + B.m[i];
    return C;
}

OperatorMatrix operator-(const OperatorMatrix& A, const OperatorMatrix& B) {
    require(A.basis.same_geometry(B.basis), "basis mismatch");
    OperatorMatrix C(A.basis);
    for (size_t i = 0; i < C.m.size(); ++i) C.m[i] = A.m[i] - B.m[i];
    return C;
}

OperatorMatrix operator*(cplx s, const OperatorMatrix& A) {
    OperatorMatrix C(A.basis);
    for (size_t i = 0; i < C.m.size(); ++i) C.m[i] = s * A.m[i];
    return C;
}

cplx op_trace(const OperatorMatrix& A) {
    cplx t(0);
    for (size_t j = 0; j < A.basis.n_x; ++j) t += A.at(j, j);
    return t * A.basis.dx();
}

double op_max_abs(const OperatorMatrix& A) {
    double d = 0;
    for (const cplx& z : A.m) d = std::max(d, std::abs(z));
    return d;
}

double op_l2_dist(const OperatorMatrix& A, const OperatorMatrix& B) {
    require(A.basis.same_geometry(B.basis), "basis mismatch");
    double d = 0;
    for (size_t i = 0; i < A.m.size(); ++i) d += std::norm(A.m[i] - B.m[i]);
    return std::sqrt(d) * A.basis.dx();
}

std::vector<cplx> apply(const OperatorMatrix& A, const std::vector<cplx>& psi) {
    const size_t n = A.basis.n_x;
    require(psi.size() == n, "apply: size mismatch");
    std::vector<cplx> out(n, cplx(0));
    const cplx alpha(A.basis.dx(), 0), beta(0, 0);
    cblas_zgemv(CblasRowMajor, CblasNoTrans, int(n), int(n), &alpha, A.m.data(), int(n),
                psi.data(), 1, &beta, out.data(), 1);
    return out;
}

PureState make_state(const PositionBasis& b, const std::function<cplx(double)>& psi) {
    PureState s{b, std::vector<cplx>(b.n_x)};
    double norm2 = 0;
    for (size_t j = 0; j < b.n_x; ++j) {
        s.amp[j] = psi(b.x(j));
        norm2 += std::norm(s.amp[j]);
    }
    norm2 *= b.dx();
    require(norm2 > 0, "make_state: zero state");
    const double scale = 1.0 / std::sqrt(norm2);
    for (cplx& a : s.amp) a *= scale;
    return s;
}

cplx overlap(const PureState& bra, const PureState& ket) {
    require(bra.basis.same_geometry(ket.basis), "overlap: basis mismatch");
    cplx acc(0);
    for (size_t j = 0; j < bra.basis.n_x; ++j) acc += std::conj(bra.amp[j]) * ket.amp[j];
    return acc * bra.basis.dx();
}

OperatorMatrix projector(const PureState& psi) {
    const size_t n = psi.basis.n_x;
    OperatorMatrix P(psi.basis);
    for (size_t j = 0; j < n; ++j)
        for (size_t k = 0; k < n; ++k) P.at(j, k) = psi.amp[j] * std::conj(psi.amp[k]);
    return P;
}

PureState oscillator_state(const PositionBasis& b, int n, double hbar) {
    require(n == 0 || n == 1, "oscillator_state: only n = 0, 1 provided");
    return make_state(b, [n, hbar](double x) -> cplx {
        const double g = std::exp(-x * x / (2.0 * hbar));
        return n == 0 ? g : x * g;
    });
}

HermEig herm_eig(const OperatorMatrix& A) {
    const size_t n = A.basis.n_x;
    HermEig r;
    r.evals.resize(n);
    r.evecs.resize(n * n);
    const double dx = A.basis.dx();
    for (size_t i = 0; i < n * n; ++i) r.evecs[i] = A.m[i] * dx;
    const int info = LAPACKE_zheevd(LAPACK_ROW_MAJOR, 'V', 'U', int(n),
                                    reinterpret_cast<lapack_complex_double*>(r.evecs.data()),
                                    int(n), r.evals.data());
    if (info != 0) throw error("herm_eig: LAPACK zheevd failed, info=" + std::to_string(info));
    return r;
}

double min_eigenvalue(const OperatorMatrix& A) {
    OperatorMatrix S = A;
    std::vector<double> evals(S.basis.n_x);
    const size_t n = S.basis.n_x;
    const double dx = S.basis.dx();
    for (size_t i = 0; i < n * n; ++i) S.m[i] *= dx;
    const int info = LAPACKE_zheevd(LAPACK_ROW_MAJOR, 'N', 'U', int(n),
                                    reinterpret_cast<lapack_complex_double*>(S.m.data()), int(n),
                                    evals.data());
    if (info != 0) throw error("min_eigenvalue: LAPACK zheevd failed");
    return evals.empty() ? 0.0 : evals.front();
}

}  // namespace myl
