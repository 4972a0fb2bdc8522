#pragma once

#include <cstddef>
#include <cstdint>

namespace acim::kernels {

// Scalar reference kernels plus SIMD variants selected at runtime. Both
// backends are bit-identical by construction: same per-element operation
// order, no FMA contraction, reductions in a fixed lane-strided order.
enum class Backend { scalar, avx2 };

bool avx2_supported();
Backend active_backend();
// Force a backend (tests / ACIM_BACKEND=scalar env). Throws BadConfig if the
// requested backend is not available on this machine.
void force_backend(Backend b);
void reset_backend();

// Deterministic reduction: four interleaved lane accumulators
// (lane l sums x[l], x[l+4], ...) combined as (l0+l1)+(l2+l3).
double sum(const double* x, size_t n);

// Elementwise dst = max/min(dst, src).
void max_inplace(double* dst, const double* src, size_t n);
void min_inplace(double* dst, const double* src, size_t n);

// Escape-step counts for the 2-D neutral germ (x,y) -> (x*u, y*u^2),
// u = 1 + x^2 + y^2, from points inside the ball r^2 < rad2 around the
// origin. out[i] = smallest k >= 1 with the iterate outside, or n_max + 1
// if still inside after n_max steps.
void escape_steps_2d(const double* xs, const double* ys, size_t n, double rad2,
                     int64_t n_max, int64_t* out);

// Same for the 1-D quadratic germ t -> t*(1 + t^2) with region [0, rad).
void escape_steps_1d(const double* ts, size_t n, double rad, int64_t n_max, int64_t* out);

// Reference implementations, callable directly (equivalence tests).
namespace scalar {
double sum(const double* x, size_t n);
void max_inplace(double* dst, const double* src, size_t n);
void min_inplace(double* dst, const double* src, size_t n);
void escape_steps_2d(const double* xs, const double* ys, size_t n, double rad2,
                     int64_t n_max, int64_t* out);
void escape_steps_1d(const double* ts, size_t n, double rad, int64_t n_max, int64_t* out);
}  // namespace scalar

#if defined(ACIM_HAVE_AVX2)
namespace avx2 {
double sum(const double* x, size_t n);
void max_inplace(double* dst, const double* src, size_t n);
void min_inplace(double* dst, const double* src, size_t n);
void escape_steps_2d(const double* xs, const double* ys, size_t n, double rad2,
                     int64_t n_max, int64_t* out);
void escape_steps_1d(const double* ts, size_t n, double rad, int64_t n_max, int64_t* out);
}  // namespace avx2
#endif

}  // namespace acim::kernels
