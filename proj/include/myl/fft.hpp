#pragma once

#include "myl/common.hpp"

namespace myl {

// Thin FFTW wrapper. All transforms are unnormalized:
//   forward:  X[a] = sum_j x[j] exp(-2*pi*i*a*j/n)
//   inverse:  x[j] = sum_a X[a] exp(+2*pi*i*a*j/n)
// Plans are cached per (n, howmany, direction); planning is serialized,
// execution is concurrency-safe on caller-owned buffers.

/// In-place batched 1D FFT over `howmany` contiguous rows of length n.
void fft_rows(cplx* data, size_t n, size_t howmany, bool inverse);

/// In-place batched 1D FFT over columns: data is rows x cols row-major,
/// transforming each of the `cols` columns (length rows).
void fft_cols(cplx* data, size_t rows, size_t cols, bool inverse);

/// Single in-place 1D transform.
inline void fft(std::vector<cplx>& v, bool inverse) {
    fft_rows(v.data(), v.size(), 1, inverse);
}

}  // namespace myl
