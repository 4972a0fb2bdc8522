#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "acim/kernels.hpp"
#include "acim/rng.hpp"

using namespace acim;

namespace {

std::vector<double> random_vec(size_t n, uint64_t seed, double lo = -1.0, double hi = 1.0) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(lo, hi);
    return v;
}

}  // namespace

TEST_CASE("deterministic sum matches lane-strided reference order") {
    std::vector<double> x = random_vec(1001, 42);
    double acc[4] = {0, 0, 0, 0};
    for (size_t i = 0; i < x.size(); ++i) acc[i & 3] += x[i];
    double expect = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    CHECK(kernels::scalar::sum(x.data(), x.size()) == expect);
    CHECK(kernels::sum(x.data(), x.size()) == expect);
}

TEST_CASE("scalar and active backend agree bitwise") {
    if (!kernels::avx2_supported()) return;  // scalar-only machine: nothing to compare

    for (size_t n : {0ul, 1ul, 3ul, 4ul, 5ul, 255ul, 1024ul, 4097ul}) {
        std::vector<double> x = random_vec(n, 7 + n);
        CHECK(kernels::avx2::sum(x.data(), n) == kernels::scalar::sum(x.data(), n));

        std::vector<double> a = random_vec(n, 11 + n), b = random_vec(n, 13 + n);
        std::vector<double> a2 = a;
        kernels::scalar::max_inplace(a.data(), b.data(), n);
        kernels::avx2::max_inplace(a2.data(), b.data(), n);
        CHECK(a == a2);

        std::vector<double> c = random_vec(n, 17 + n), c2 = c;
        kernels::scalar::min_inplace(c.data(), b.data(), n);
        kernels::avx2::min_inplace(c2.data(), b.data(), n);
        CHECK(c == c2);
    }
}

TEST_CASE("escape-step kernels: scalar vs simd, and against a direct loop") {
    size_t n = 1003;
    std::vector<double> xs = random_vec(n, 5, -0.15, 0.15);
    std::vector<double> ys = random_vec(n, 6, -0.15, 0.15);
    for (size_t i = 0; i < n; ++i) {
        // keep strictly inside the ball of radius 0.2
        while (xs[i] * xs[i] + ys[i] * ys[i] >= 0.038) {
            xs[i] *= 0.5;
            ys[i] *= 0.5;
        }
    }
    double rad2 = 0.04;
    std::vector<int64_t> a(n), b(n);
    kernels::scalar::escape_steps_2d(xs.data(), ys.data(), n, rad2, 100000, a.data());
#if defined(ACIM_HAVE_AVX2)
    if (kernels::avx2_supported()) {
        kernels::avx2::escape_steps_2d(xs.data(), ys.data(), n, rad2, 100000, b.data());
        CHECK(a == b);
    }
#endif
    // independent per-sample loop
    for (size_t i = 0; i < 50; ++i) {
        double x = xs[i], y = ys[i];
        int64_t k = 0;
        while (k < 100000) {
            double u = 1.0 + (x * x + y * y);
            x = x * u;
            y = y * (u * u);
            ++k;
            if (!(x * x + y * y < rad2)) break;
        }
        CHECK(a[i] == k);
    }

    std::vector<double> ts = random_vec(n, 8, 0.0, 0.24);
    std::vector<int64_t> c(n), d(n);
    kernels::scalar::escape_steps_1d(ts.data(), n, 0.25, 100000, c.data());
#if defined(ACIM_HAVE_AVX2)
    if (kernels::avx2_supported()) {
        kernels::avx2::escape_steps_1d(ts.data(), n, 0.25, 100000, d.data());
        CHECK(c == d);
    }
#endif
}

TEST_CASE("neutral start never escapes and is reported as overflow") {
    double x = 0.0, y = 0.0;
    int64_t out = 0;
    kernels::escape_steps_2d(&x, &y, 1, 0.04, 500, &out);
    CHECK(out == 501);
}

TEST_CASE("backend can be forced to scalar and restored") {
    kernels::force_backend(kernels::Backend::scalar);
    CHECK(kernels::active_backend() == kernels::Backend::scalar);
    kernels::reset_backend();
    if (kernels::avx2_supported()) CHECK(kernels::active_backend() == kernels::Backend::avx2);
}
