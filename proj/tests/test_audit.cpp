#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "acim/assumption_audit.hpp"
#include "acim/example_maps.hpp"

using namespace acim;

TEST_CASE("expansion audit of the folding surrogate and the planar example") {
    PiecewiseMap fold = surrogate_only(2, 3);
    ExpansionAudit a = expansion_audit(fold, 32, 0.02, 256, 10);
    CHECK(a.s_hat == doctest::Approx(1.0 / 3.0).epsilon(0.01));
    CHECK(a.skipped_in_region == 0);

    PiecewiseMap m = example1(default_spec("1"));
    ExpansionAudit b = expansion_audit(m, 32, 0.004, 128, 10);
    CHECK(b.s_hat < 1.0);
    CHECK(b.skipped_in_region > 0);
    // weakest expansion sits right next to the region boundary
    CHECK(dist(b.worst_points.front(), m.neutral_point) < 0.35);
    // strictly uniformly expanding outside the region
    CHECK(b.s_hat < 1.0 - 1e-3);
}

TEST_CASE("boundary overlap: zero far from discontinuity images") {
    // Folding map images are the full square; only points mapped near the
    // domain frame count. A center deep inside with a tiny ball sees nothing.
    PiecewiseMap fold = surrogate_only(2, 3);
    double g = boundary_overlap_at(fold, pt2(0.002, 0.002), 1.0 / 3.0, 0.001, 0.003, 4096, 42);
    CHECK(g == 0.0);
}

TEST_CASE("boundary overlap: slab volume of a straight discontinuity image") {
    // Center on the preimage of the frame: the hit set is a slab of width
    // 2 s eps through the ball of radius (1-s) eps0, measured against the
    // slab-volume formula 2 s gamma_{m-1} eps / ((1-s) gamma_m eps0).
    PiecewiseMap fold = surrogate_only(2, 3);
    double s = 1.0 / 3.0;
    double eps = 0.01, eps0 = 0.05;
    // x = 1/3 is a branch boundary; T maps both sides onto the frame; the
    // hit set near x=1/3 is {|x - 1/3| <= s*eps}.
    Pt center = pt2(1.0 / 3.0, 0.2);
    double g = boundary_overlap_at(fold, center, s, eps, eps0, 200000, 7);
    double expected = 2.0 * s * unit_ball_volume(1) * eps / ((1.0 - s) * unit_ball_volume(2) * eps0);
    CHECK(g == doctest::Approx(expected).epsilon(0.08));

    // overlap grows with eps at fixed eps0
    double g2 = boundary_overlap_at(fold, center, s, 0.02, eps0, 200000, 7);
    CHECK(g2 > g);

    CHECK_THROWS_AS((void)boundary_overlap_at(fold, center, s, 0.1, 0.05, 100, 7), Error);
}

TEST_CASE("sup over centers bounds the single-center estimate") {
    PiecewiseMap fold = surrogate_only(2, 3);
    double s = 1.0 / 3.0;
    double at = boundary_overlap_at(fold, pt2(1.0 / 3.0, 0.0), s, 0.01, 0.05, 20000, 11);
    double sup = boundary_overlap(fold, s, 0.01, 0.05, 512, 2000, 11);
    CHECK(sup >= 0.5 * at);  // the stratified centers find the discontinuity
}

TEST_CASE("lambda estimate arithmetic") {
    std::vector<OverlapRow> table;
    table.push_back({0.01, 0.05, 0.0});
    LambdaEstimate est = lambda_estimate(2, table, 1.0 / 3.0, 0.5);
    // with a zero overlap table only the geometric term remains
    double expected = 3.0 * (1.0 / 3.0) * 2.0 / ((2.0 / 3.0) * 3.14159265358979323846);
    CHECK(est.lambda_hat == doctest::Approx(expected).epsilon(1e-12));
    CHECK(est.lambda_hat == doctest::Approx(0.95493).epsilon(1e-4));
    CHECK(est.condition_value == doctest::Approx(std::sqrt(1.0 / 3.0) + expected).epsilon(1e-12));

    // condition flips as the contraction coefficient approaches one
    LambdaEstimate tight = lambda_estimate(2, table, 0.95, 0.5);
    CHECK(tight.condition_value > 1.0);

    std::vector<OverlapRow> empty;
    CHECK_THROWS_AS((void)lambda_estimate(2, empty, 0.5, 0.5), Error);
}

TEST_CASE("distortion Holder constant") {
    PiecewiseMap fold = surrogate_only(2, 3);
    CHECK(distortion_holder_constant(fold, 2000, 3, 0.5) == 0.0);

    PiecewiseMap m = example1(default_spec("1"));
    double c1 = distortion_holder_constant(m, 1000, 3, 0.5, 0.3);
    double c2 = distortion_holder_constant(m, 2000, 3, 0.5, 0.3);
    CHECK(c1 > 0.0);
    CHECK(std::fabs(c2 - c1) < 0.1 * std::max(c1, c2));  // stable under doubling

    // alpha monotonicity for separations below one
    double c_small_alpha = distortion_holder_constant(m, 1000, 3, 0.25, 0.3);
    CHECK(c_small_alpha >= c1 * (1.0 - 1e-9));
}

TEST_CASE("full audit report") {
    PiecewiseMap m = example1(default_spec("1"));
    AuditOptions opts;
    opts.grid_per_axis = 32;
    opts.n_centers = 64;
    opts.samples_per_center = 64;
    opts.n_pairs = 500;
    AuditReport rep = run_audit(m, opts, 2718);
    CHECK(rep.s_hat < 1.0);
    CHECK(rep.lambda.lambda_hat > 0.0);
    CHECK(std::isfinite(rep.lambda.lambda_hat));
    CHECK(rep.verdict == (rep.lambda.condition_value < 1.0));
    CHECK(rep.g_table.size() == 21);  // all eps <= eps0 pairs of the radius grid

    // bit-reproducible for identical inputs
    AuditReport rep2 = run_audit(m, opts, 2718);
    CHECK(rep.s_hat == rep2.s_hat);
    CHECK(rep.c_hat == rep2.c_hat);
    CHECK(rep.lambda.lambda_hat == rep2.lambda.lambda_hat);
    for (size_t i = 0; i < rep.g_table.size(); ++i)
        CHECK(rep.g_table[i].g_hat == rep2.g_table[i].g_hat);
}
