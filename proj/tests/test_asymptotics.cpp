#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "acim/asymptotics.hpp"
#include "acim/example_maps.hpp"

using namespace acim;

namespace {

double bisect_inverse_cubic(double target) {
    double lo = 0.0, hi = target;
    for (int i = 0; i < 200; ++i) {
        double m = 0.5 * (lo + hi);
        (m * (1.0 + m * m) <= target ? lo : hi) = m;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("backward orbit inverts the forward map step by step") {
    PiecewiseMap m = example1(default_spec("1"));
    BackwardOrbit orb = backward_orbit(m, pt2(0.2, 0.0), 2000);
    for (long k = 1; k < 5; ++k) CHECK(orb.radii[static_cast<size_t>(k)] < orb.radii[static_cast<size_t>(k - 1)]);
    Pt prev = pt2(0.2, 0.0);
    for (long k = 0; k < 2000; ++k) {
        Pt fwd = orb.points[static_cast<size_t>(k)];
        m.step_local(fwd);
        CHECK(dist(fwd, prev) <= 10.0 * m.tol.root_tol * (1.0 + norm2(prev)));
        prev = orb.points[static_cast<size_t>(k)];
    }
}

TEST_CASE("first backward step of the interval germ matches the oracle") {
    PiecewiseMap m = neutral_1d(default_spec("neutral1d"));
    BackwardOrbit orb = backward_orbit(m, pt1(0.2), 1000);
    double oracle = bisect_inverse_cubic(0.2);
    CHECK(orb.points[0][0] == doctest::Approx(oracle).epsilon(1e-13));
    CHECK(oracle == doctest::Approx(0.19282993096291287).epsilon(1e-12));
}

TEST_CASE("radius law along the invariant axes") {
    PiecewiseMap m = example1(default_spec("1"));
    const long n = 10000;
    BackwardOrbit ox = backward_orbit(m, pt2(0.2, 0.0), n);
    BackwardOrbit oy = backward_orbit(m, pt2(0.0, 0.2), n);
    double rx = ox.radii.back(), ry = oy.radii.back();
    CHECK(std::fabs(2.0 * n * rx * rx - 1.0) < 0.05);
    CHECK(std::fabs(4.0 * n * ry * ry - 1.0) < 0.05);

    ExponentFit fx = radius_exponent(ox, 1000, n);
    CHECK(fx.exponent == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("harness: radius recursion and product exponents") {
    const long n = 10000;
    struct Combo {
        double g, c, t0;
    };
    for (Combo combo : {Combo{2, 1, 0.2}, Combo{1, 2, 0.05}, Combo{1, 1, 0.05}}) {
        std::vector<double> ts = recursion_radii(combo.g, combo.c, combo.t0, n);
        double scaled = std::pow(combo.g * combo.c * n, 1.0 / combo.g) * ts.back();
        CHECK(std::fabs(scaled - 1.0) < 0.03);
        for (double cp : {1.0, 3.0, 5.0}) {
            std::vector<double> lx, ly;
            double acc = 0.0;
            for (long k = 1; k <= n; ++k) {
                acc += std::log(1.0 - cp * std::pow(ts[static_cast<size_t>(k)], combo.g));
                if (k >= 1000) {
                    lx.push_back(std::log(static_cast<double>(k)));
                    ly.push_back(acc);
                }
            }
            double slope = ols_fit(lx, ly).slope;
            double target = -cp / (combo.g * combo.c);
            CHECK(std::fabs(slope - target) < 0.05 * std::fabs(target));
        }
    }
}

TEST_CASE("determinant decay and unbounded distortion") {
    PiecewiseMap m = example1(default_spec("1"));
    const long n = 10000;
    BackwardOrbit ox = backward_orbit(m, pt2(0.2, 0.0), n);
    BackwardOrbit oy = backward_orbit(m, pt2(0.0, 0.2), n);
    CHECK(det_product_exponent(ox, 1000, n).exponent == doctest::Approx(-2.5).epsilon(0.04));
    CHECK(det_product_exponent(oy, 1000, n).exponent == doctest::Approx(-1.75).epsilon(0.06));

    DistortionCurve curve = distortion_ratio_curve(m, pt2(0.2, 0.0), pt2(0.0, 0.2), n, 1000, n);
    CHECK(std::fabs(curve.slope - 0.75) < 0.1);

    // identical start points: the ratio is constant one
    DistortionCurve flat = distortion_ratio_curve(m, pt2(0.2, 0.0), pt2(0.2, 0.0), 1200, 120, 1200);
    for (double r : flat.ratios) CHECK(r == doctest::Approx(1.0).epsilon(1e-12));

    // multiplicative consistency of the ratio sequence
    for (long k : {100L, 1000L, 5000L}) {
        double seg = curve.ratios[static_cast<size_t>(n - 1)] / curve.ratios[static_cast<size_t>(k - 1)];
        CHECK(curve.ratios[static_cast<size_t>(k - 1)] * seg ==
              doctest::Approx(curve.ratios[static_cast<size_t>(n - 1)]).epsilon(1e-9));
    }

    // one-dimensional germ has bounded distortion: the ratio converges
    PiecewiseMap m1 = neutral_1d(default_spec("neutral1d"));
    DistortionCurve c1 = distortion_ratio_curve(m1, pt1(0.2), pt1(0.1), 4000, 400, 4000);
    CHECK(std::fabs(c1.slope) < 0.01);
    CHECK(c1.ratios[3999] == doctest::Approx(c1.ratios[1999]).epsilon(0.01));
}

TEST_CASE("inverse cocycle norm decay") {
    PiecewiseMap m = example1(default_spec("1"));
    const long n = 10000;
    BackwardOrbit ox = backward_orbit(m, pt2(0.2, 0.0), n);
    NormDecayReport rep = norm_decay_check(ox, 1000, n);
    CHECK(rep.power_law_ok);
    CHECK(rep.slope <= -0.5 + 0.05);

    // submultiplicativity: the composite norm never beats the step product
    double prod = 1.0;
    for (long k = 0; k < n; ++k) {
        prod *= ox.step_inv_norm[static_cast<size_t>(k)];
        CHECK(ox.inv_comp_norm[static_cast<size_t>(k)] <= prod * (1.0 + 1e-12));
    }

    // an affine branch contracts exponentially: power-law reading rejected
    PiecewiseMap fold = surrogate_only(2, 3);
    BackwardOrbit ob = backward_orbit_branch(fold, 1, pt2(-0.9, -0.9), 2000);
    NormDecayReport flagged = norm_decay_check(ob, 200, 2000);
    CHECK_FALSE(flagged.power_law_ok);
}

TEST_CASE("cone geometry of the radial and tangential directions") {
    PiecewiseMap m = example1(default_spec("1"));
    ConeReport rep = cone_check(m, pt2(0.1, 0.0), pt2(0.1, 0.0), pt2(0.0, -0.1));
    CHECK(rep.len_v == doctest::Approx(0.103).epsilon(1e-12));
    CHECK(rep.len_vp == doctest::Approx(0.10201).epsilon(1e-12));
    // on the axis the pair is singular: the sine contraction is exactly one
    CHECK(rep.det_ratio == doctest::Approx(1.0).epsilon(1e-12));

    // strictly inside the bound off the axes
    ConeReport off = cone_check(m, pt2(0.07, 0.07), pt2(0.07, 0.07), pt2(-0.07, 0.07));
    CHECK(off.det_ratio < 1.0);
    CHECK(off.det_ratio > 0.99);

    // the neutral point is the equality limit
    ConeReport at_p = cone_check(m, pt2(0.0, 0.0), pt2(1.0, 0.0), pt2(0.0, 1.0));
    CHECK(at_p.det_ratio == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS((void)cone_check(m, pt2(0.1, 0.0), pt2(1.0, 0.0), pt2(2.0, 0.0)), Error);
}

TEST_CASE("pairwise distortion bound along admissible pairs") {
    PiecewiseMap m = example1(default_spec("1"));
    PairDistortionReport same = pair_distortion_check(m, pt2(0.2, 0.0), pt2(0.2, 0.0), 100, 0.5, 1.0);
    CHECK(same.admissible);
    CHECK(same.max_log_ratio == 0.0);

    PairDistortionReport radial =
        pair_distortion_check(m, pt2(0.2, 0.0), pt2(0.2001, 0.0), 1000, 0.5, 1.0);
    CHECK(radial.admissible);
    CHECK(radial.max_log_ratio < 0.1);
    PairDistortionReport radial_deep =
        pair_distortion_check(m, pt2(0.2, 0.0), pt2(0.2001, 0.0), 4000, 0.5, 1.0);
    CHECK(radial_deep.max_log_ratio ==
          doctest::Approx(radial.max_log_ratio).epsilon(1e-6));  // stable in depth

    PairDistortionReport cross = pair_distortion_check(m, pt2(0.2, 0.0), pt2(0.0, 0.2), 50, 0.5, 1.0);
    CHECK_FALSE(cross.admissible);
    CHECK(cross.first_violation == 1);
}
