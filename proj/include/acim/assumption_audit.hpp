#pragma once

#include <cstdint>
#include <vector>

#include "acim/map_model.hpp"

namespace acim {

struct ExpansionAudit {
    double s_hat = 0.0;
    std::vector<Pt> worst_points;  // arg-max locations (up to 8)
    long grid_points_used = 0;
    long skipped_in_region = 0;
    long skipped_near_neutral = 0;
    long skipped_on_boundary = 0;
};

// Max of the contraction coefficient over a uniform audit grid restricted to
// the complement of the region.
ExpansionAudit expansion_audit(const PiecewiseMap& map, int grid_per_axis, double probe_radius,
                               int probe_samples, uint64_t seed);

struct OverlapRow {
    double eps = 0.0;
    double eps0 = 0.0;
    double g_hat = 0.0;
};

// Monte Carlo estimate of the boundary-overlap functional at one center:
// fraction of the ball B_{(1-s)eps0}(x) mapped within eps of the image
// boundary of its own branch.
double boundary_overlap_at(const PiecewiseMap& map, const Pt& center, double s, double eps,
                           double eps0, int samples, uint64_t seed);

// Sup over stratified centers (reported as a lower bound of the true sup).
double boundary_overlap(const PiecewiseMap& map, double s, double eps, double eps0, int n_centers,
                        int samples_per_center, uint64_t seed);

struct LambdaEstimate {
    double lambda_hat = 0.0;
    double condition_value = 0.0;  // s^alpha + lambda
    double geometric_term = 0.0;   // 3 s gamma_{m-1} / ((1-s) gamma_m)
    double overlap_term = 0.0;     // 2 sup G eps0^alpha / eps^alpha
};

LambdaEstimate lambda_estimate(int dim, const std::vector<OverlapRow>& g_table, double s_hat,
                               double alpha);

// Max sampled ratio |g(x)-g(y)| / (g(x) d(x,y)^alpha) over same-branch image
// pairs, g the reciprocal branch Jacobian.
double distortion_holder_constant(const PiecewiseMap& map, long n_pairs, uint64_t seed,
                                  double alpha, double sample_radius = 0.0,
                                  double pair_distance = 0.05);

struct AuditOptions {
    int grid_per_axis = 32;
    double probe_radius = 0.004;
    int probe_samples = 256;
    int n_centers = 256;
    int samples_per_center = 128;
    double alpha = 0.5;
    long n_pairs = 2000;
};

struct AuditReport {
    ExpansionAudit expansion;
    double s_hat = 0.0;
    std::vector<OverlapRow> g_table;
    LambdaEstimate lambda;
    double c_hat = 0.0;
    double alpha = 0.5;
    bool verdict = false;          // condition_value < 1
    double remark_floor = 0.0;     // 4 s gamma_{m-1} / ((1-s) gamma_m), reported only
    uint64_t seed = 0;
    AuditOptions options;
};

AuditReport run_audit(const PiecewiseMap& map, const AuditOptions& opts, uint64_t seed);

}  // namespace acim
