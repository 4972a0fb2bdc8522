#include "acim/kernels.hpp"

namespace acim::kernels::scalar {

double sum(const double* x, size_t n) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    size_t n4 = n & ~size_t{3};
    for (size_t i = 0; i < n4; i += 4) {
        acc[0] += x[i];
        acc[1] += x[i + 1];
        acc[2] += x[i + 2];
        acc[3] += x[i + 3];
    }
    for (size_t i = n4; i < n; ++i) acc[i & 3] += x[i];
    return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

void max_inplace(double* dst, const double* src, size_t n) {
    for (size_t i = 0; i < n; ++i)
        if (src[i] > dst[i]) dst[i] = src[i];
}

void min_inplace(double* dst, const double* src, size_t n) {
    for (size_t i = 0; i < n; ++i)
        if (src[i] < dst[i]) dst[i] = src[i];
}

void escape_steps_2d(const double* xs, const double* ys, size_t n, double rad2,
                     int64_t n_max, int64_t* out) {
    for (size_t i = 0; i < n; ++i) {
        double x = xs[i], y = ys[i];
        int64_t k = 0;
        int64_t result = n_max + 1;
        while (k < n_max) {
            double u = 1.0 + (x * x + y * y);
            x = x * u;
            y = y * (u * u);
            ++k;
            if (!(x * x + y * y < rad2)) {
                result = k;
                break;
            }
        }
        out[i] = result;
    }
}

void escape_steps_1d(const double* ts, size_t n, double rad, int64_t n_max, int64_t* out) {
    for (size_t i = 0; i < n; ++i) {
        double t = ts[i];
        int64_t k = 0;
        int64_t result = n_max + 1;
        while (k < n_max) {
            t = t * (1.0 + t * t);
            ++k;
            if (!(t < rad)) {
                result = k;
                break;
            }
        }
        out[i] = result;
    }
}

}  // namespace acim::kernels::scalar
