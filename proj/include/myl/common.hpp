#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace myl {

using cplx = std::complex<double>;
using std::size_t;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr cplx iu{0.0, 1.0};

/// Validation / precondition failures. CLI maps these to exit code 1.
struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numeric audit breaches (conservation, overflow, tolerance gates).
/// CLI maps these to exit code 2.
struct audit_error : error {
    explicit audit_error(const std::string& msg) : error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw error(msg);
}

// ---------------------------------------------------------------------------
// Data-parallel loop helper. Worker count comes from MYL_THREADS when set,
// otherwise hardware concurrency. Chunks are contiguous index ranges so the
// reduction order inside a chunk is fixed.
// ---------------------------------------------------------------------------

int thread_count();
void set_thread_count(int n);

void parallel_for(size_t n, const std::function<void(size_t, size_t)>& body);

}  // namespace myl
