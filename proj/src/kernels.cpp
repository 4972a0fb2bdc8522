#include "acim/kernels.hpp"

#include <atomic>
#include <cstdlib>

#include "acim/errors.hpp"

namespace acim::kernels {

namespace {

Backend detect() {
#if defined(ACIM_HAVE_AVX2)
    const char* env = std::getenv("ACIM_BACKEND");
    if (env && std::string_view(env) == "scalar") return Backend::scalar;
    if (avx2_supported()) return Backend::avx2;
#endif
    return Backend::scalar;
}

std::atomic<int> g_forced{-1};  // -1 = auto

Backend current() {
    int f = g_forced.load(std::memory_order_relaxed);
    if (f >= 0) return static_cast<Backend>(f);
    static const Backend auto_backend = detect();
    return auto_backend;
}

}  // namespace

bool avx2_supported() {
#if defined(ACIM_HAVE_AVX2)
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

Backend active_backend() { return current(); }

void force_backend(Backend b) {
    if (b == Backend::avx2 && !avx2_supported())
        fail(ErrorCode::BadConfig, "avx2 backend requested but not supported on this cpu");
    g_forced.store(static_cast<int>(b), std::memory_order_relaxed);
}

void reset_backend() { g_forced.store(-1, std::memory_order_relaxed); }

double sum(const double* x, size_t n) {
#if defined(ACIM_HAVE_AVX2)
    if (current() == Backend::avx2) return avx2::sum(x, n);
#endif
    return scalar::sum(x, n);
}

void max_inplace(double* dst, const double* src, size_t n) {
#if defined(ACIM_HAVE_AVX2)
    if (current() == Backend::avx2) return avx2::max_inplace(dst, src, n);
#endif
    scalar::max_inplace(dst, src, n);
}

void min_inplace(double* dst, const double* src, size_t n) {
#if defined(ACIM_HAVE_AVX2)
    if (current() == Backend::avx2) return avx2::min_inplace(dst, src, n);
#endif
    scalar::min_inplace(dst, src, n);
}

void escape_steps_2d(const double* xs, const double* ys, size_t n, double rad2,
                     int64_t n_max, int64_t* out) {
#if defined(ACIM_HAVE_AVX2)
    if (current() == Backend::avx2) return avx2::escape_steps_2d(xs, ys, n, rad2, n_max, out);
#endif
    scalar::escape_steps_2d(xs, ys, n, rad2, n_max, out);
}

void escape_steps_1d(const double* ts, size_t n, double rad, int64_t n_max, int64_t* out) {
#if defined(ACIM_HAVE_AVX2)
    if (current() == Backend::avx2) return avx2::escape_steps_1d(ts, n, rad, n_max, out);
#endif
    scalar::escape_steps_1d(ts, n, rad, n_max, out);
}

}  // namespace acim::kernels
