#include "myl/fft.hpp"

#include <fftw3.h>

#include <atomic>
#include <cstdlib>
#include <map>
#include <mutex>

namespace myl {

// ---------------------------------------------------------------------------
// parallel_for (lives here so the library has exactly one small runtime TU).
// ---------------------------------------------------------------------------

static std::atomic<int> g_threads{0};

int thread_count() {
    int t = g_threads.load();
    if (t > 0) return t;
    if (const char* env = std::getenv("MYL_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void set_thread_count(int n) { g_threads.store(n); }

void parallel_for(size_t n, const std::function<void(size_t, size_t)>& body) {
    const int nt = thread_count();
    if (n == 0) return;
    if (nt <= 1 || n < 2) {
        body(0, n);
        return;
    }
    const size_t workers = std::min<size_t>(nt, n);
    const size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr err;
    std::mutex err_mtx;
    for (size_t w = 0; w < workers; ++w) {
        const size_t lo = w * chunk;
        const size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            try {
                body(lo, hi);
            } catch (...) {
                std::lock_guard<std::mutex> g(err_mtx);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

// ---------------------------------------------------------------------------
// FFTW plan cache
// ---------------------------------------------------------------------------

namespace {

struct PlanKey {
    size_t n, howmany, stride, dist;
    int sign;
    bool operator<(const PlanKey& o) const {
        return std::tie(n, howmany, stride, dist, sign) <
               std::tie(o.n, o.howmany, o.stride, o.dist, o.sign);
    }
};

std::mutex g_plan_mtx;
std::map<PlanKey, fftw_plan> g_plans;

fftw_plan plan_for(const PlanKey& key, cplx* data) {
    std::lock_guard<std::mutex> lock(g_plan_mtx);
    auto it = g_plans.find(key);
    if (it != g_plans.end()) return it->second;
    int n = static_cast<int>(key.n);
    // FFTW_ESTIMATE never touches the buffer, so planning on live data is fine.
    fftw_plan p = fftw_plan_many_dft(
        1, &n, static_cast<int>(key.howmany), reinterpret_cast<fftw_complex*>(data), nullptr,
        static_cast<int>(key.stride), static_cast<int>(key.dist),
        reinterpret_cast<fftw_complex*>(data), nullptr, static_cast<int>(key.stride),
        static_cast<int>(key.dist), key.sign, FFTW_ESTIMATE);
    g_plans.emplace(key, p);
    return p;
}

void run(const PlanKey& key, cplx* data) {
    fftw_plan p = plan_for(key, data);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data),
                     reinterpret_cast<fftw_complex*>(data));
}

}  // namespace

void fft_rows(cplx* data, size_t n, size_t howmany, bool inverse) {
    if (n == 0 || howmany == 0) return;
    run({n, howmany, 1, n, inverse ? FFTW_BACKWARD : FFTW_FORWARD}, data);
}

void fft_cols(cplx* data, size_t rows, size_t cols, bool inverse) {
    if (rows == 0 || cols == 0) return;
    run({rows, cols, cols, 1, inverse ? FFTW_BACKWARD : FFTW_FORWARD}, data);
}

}  // namespace myl
