#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "acim/fit.hpp"
#include "acim/map_model.hpp"

namespace acim {

// One application of the first-return map.
struct ReturnSample {
    Pt start;
    Pt point;          // first-return image of start
    long return_time;  // i + 1
    double weight;     // reciprocal of the accumulated |det DT| along the orbit
};

// Escape-level histogram of the region and its cumulative tails.
struct TailProfile {
    std::vector<double> level_volumes;  // index n-1 holds the level-n volume
    std::vector<double> tail_volumes;   // index n-1 holds the volume surviving > n steps
    std::vector<double> level_stderr;
    double region_volume = 0.0;   // Monte Carlo estimate of the sampled region's volume
    double residual_volume = 0.0; // mass still inside after n_max steps (reported, never dropped)
    long n_max = 0;
    long sample_count = 0;
    uint64_t seed = 0;
    long boundary_rejections = 0;
    long overflow_count = 0;
    int component = 0;  // 0 = whole region
};

struct TailFit {
    double rho_hat = 0.0;
    double stderr_ = 0.0;
    long window_lo = 0, window_hi = 0;
    LineFit line;
};

// Smallest n >= 1 with T^n x outside the region; nullopt on overflow.
std::optional<long> escape_time(const PiecewiseMap& map, const Pt& x, long n_max);

// First-return map sample from x in M-hat. Throws Overflow / PointOnBoundary.
ReturnSample first_return(const PiecewiseMap& map, const Pt& x, long n_max);

// Monte Carlo escape-time histogram over uniform samples in the region
// (optionally restricted to an invariant component), scaled to volumes.
TailProfile level_volumes(const PiecewiseMap& map, long n_max, long n_samples, uint64_t seed,
                          int component = 0);

// Log-log least squares on the tail volumes over the index window [lo, hi].
TailFit tail_exponent(const TailProfile& profile, long window_lo, long window_hi);

// Lebesgue return-time identity for maps whose non-local branches are full
// and affine: E[tau] = 1 + (sum_j g_j) * (sum_n tails) / nu(M-hat).
double expected_mean_return_time(const PiecewiseMap& map, const TailProfile& profile);

// Empirical mean return time over uniform starts in M-hat (overflows skipped
// and counted into the returned .second).
std::pair<double, long> empirical_mean_return_time(const PiecewiseMap& map, long n_samples,
                                                   long n_max, uint64_t seed);

}  // namespace acim
