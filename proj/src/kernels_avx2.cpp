#include "acim/kernels.hpp"

#if defined(ACIM_HAVE_AVX2)

#include <immintrin.h>

// Compiled with -mavx2 -mno-fma: every lane performs the same IEEE mul/add
// sequence as the scalar reference, so results are bit-identical.

namespace acim::kernels::avx2 {

double sum(const double* x, size_t n) {
    __m256d vacc = _mm256_setzero_pd();
    size_t n4 = n & ~size_t{3};
    for (size_t i = 0; i < n4; i += 4) vacc = _mm256_add_pd(vacc, _mm256_loadu_pd(x + i));
    alignas(32) double acc[4];
    _mm256_store_pd(acc, vacc);
    for (size_t i = n4; i < n; ++i) acc[i & 3] += x[i];
    return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

void max_inplace(double* dst, const double* src, size_t n) {
    size_t n4 = n & ~size_t{3};
    for (size_t i = 0; i < n4; i += 4) {
        __m256d d = _mm256_loadu_pd(dst + i);
        __m256d s = _mm256_loadu_pd(src + i);
        _mm256_storeu_pd(dst + i, _mm256_max_pd(d, s));
    }
    for (size_t i = n4; i < n; ++i)
        if (src[i] > dst[i]) dst[i] = src[i];
}

void min_inplace(double* dst, const double* src, size_t n) {
    size_t n4 = n & ~size_t{3};
    for (size_t i = 0; i < n4; i += 4) {
        __m256d d = _mm256_loadu_pd(dst + i);
        __m256d s = _mm256_loadu_pd(src + i);
        _mm256_storeu_pd(dst + i, _mm256_min_pd(d, s));
    }
    for (size_t i = n4; i < n; ++i)
        if (src[i] < dst[i]) dst[i] = src[i];
}

void escape_steps_2d(const double* xs, const double* ys, size_t n, double rad2,
                     int64_t n_max, int64_t* out) {
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d vrad2 = _mm256_set1_pd(rad2);
    size_t n4 = n & ~size_t{3};
    for (size_t i = 0; i < n4; i += 4) {
        __m256d x = _mm256_loadu_pd(xs + i);
        __m256d y = _mm256_loadu_pd(ys + i);
        __m256i counts = _mm256_set1_epi64x(n_max + 1);
        __m256i active = _mm256_set1_epi64x(-1);
        int64_t k = 0;
        while (k < n_max) {
            __m256d r2 = _mm256_add_pd(_mm256_mul_pd(x, x), _mm256_mul_pd(y, y));
            __m256d u = _mm256_add_pd(one, r2);
            x = _mm256_mul_pd(x, u);
            y = _mm256_mul_pd(y, _mm256_mul_pd(u, u));
            ++k;
            __m256d rn = _mm256_add_pd(_mm256_mul_pd(x, x), _mm256_mul_pd(y, y));
            // inside: rn < rad2 (quiet compare; escaped = NOT inside)
            __m256i inside = _mm256_castpd_si256(_mm256_cmp_pd(rn, vrad2, _CMP_LT_OQ));
            __m256i newly = _mm256_andnot_si256(inside, active);
            counts = _mm256_blendv_epi8(counts, _mm256_set1_epi64x(k), newly);
            active = _mm256_and_si256(active, inside);
            if (_mm256_testz_si256(active, active)) break;
        }
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), counts);
    }
    if (n4 < n) scalar::escape_steps_2d(xs + n4, ys + n4, n - n4, rad2, n_max, out + n4);
}

void escape_steps_1d(const double* ts, size_t n, double rad, int64_t n_max, int64_t* out) {
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d vrad = _mm256_set1_pd(rad);
    size_t n4 = n & ~size_t{3};
    for (size_t i = 0; i < n4; i += 4) {
        __m256d t = _mm256_loadu_pd(ts + i);
        __m256i counts = _mm256_set1_epi64x(n_max + 1);
        __m256i active = _mm256_set1_epi64x(-1);
        int64_t k = 0;
        while (k < n_max) {
            __m256d u = _mm256_add_pd(one, _mm256_mul_pd(t, t));
            t = _mm256_mul_pd(t, u);
            ++k;
            __m256i inside = _mm256_castpd_si256(_mm256_cmp_pd(t, vrad, _CMP_LT_OQ));
            __m256i newly = _mm256_andnot_si256(inside, active);
            counts = _mm256_blendv_epi8(counts, _mm256_set1_epi64x(k), newly);
            active = _mm256_and_si256(active, inside);
            if (_mm256_testz_si256(active, active)) break;
        }
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), counts);
    }
    if (n4 < n) scalar::escape_steps_1d(ts + n4, n - n4, rad, n_max, out + n4);
}

}  // namespace acim::kernels::avx2

#endif  // ACIM_HAVE_AVX2
