#pragma once

#include <span>

namespace acim {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double max_abs_residual = 0.0;
    long n_points = 0;
};

// Ordinary least squares y ~ a + b x. Requires at least 3 points for a
// stderr; with 2 points the stderr is 0.
LineFit ols_fit(std::span<const double> x, std::span<const double> y);

}  // namespace acim
