#include "acim/fit.hpp"

#include <cmath>

#include "acim/errors.hpp"
#include "acim/kernels.hpp"

namespace acim {

LineFit ols_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) fail(ErrorCode::EmptyWindow, "ols_fit needs >= 2 points");
    const size_t n = x.size();
    double xm = kernels::sum(x.data(), n) / static_cast<double>(n);
    double ym = kernels::sum(y.data(), n) / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double dx = x[i] - xm;
        sxx += dx * dx;
        sxy += dx * (y[i] - ym);
    }
    if (sxx <= 0.0) fail(ErrorCode::EmptyWindow, "ols_fit: degenerate abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = ym - f.slope * xm;
    f.n_points = static_cast<long>(n);
    double rss = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double r = y[i] - (f.intercept + f.slope * x[i]);
        rss += r * r;
        if (std::fabs(r) > f.max_abs_residual) f.max_abs_residual = std::fabs(r);
    }
    if (n > 2) f.slope_stderr = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
    return f;
}

}  // namespace acim
