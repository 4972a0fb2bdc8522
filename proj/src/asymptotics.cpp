#include "acim/asymptotics.hpp"

#include <algorithm>
#include <cmath>

namespace acim {

namespace {

Mat mat_inverse(const Mat& x, int m) {
    Mat r;
    double d = mat_det(x, m);
    if (d == 0.0) fail(ErrorCode::InverseFailure, "singular Jacobian");
    if (m == 1) {
        r(0, 0) = 1.0 / d;
        return r;
    }
    if (m == 2) {
        r(0, 0) = x(1, 1) / d;
        r(0, 1) = -x(0, 1) / d;
        r(1, 0) = -x(1, 0) / d;
        r(1, 1) = x(0, 0) / d;
        return r;
    }
    // Adjugate, m == 3.
    r(0, 0) = (x(1, 1) * x(2, 2) - x(1, 2) * x(2, 1)) / d;
    r(0, 1) = (x(0, 2) * x(2, 1) - x(0, 1) * x(2, 2)) / d;
    r(0, 2) = (x(0, 1) * x(1, 2) - x(0, 2) * x(1, 1)) / d;
    r(1, 0) = (x(1, 2) * x(2, 0) - x(1, 0) * x(2, 2)) / d;
    r(1, 1) = (x(0, 0) * x(2, 2) - x(0, 2) * x(2, 0)) / d;
    r(1, 2) = (x(0, 2) * x(1, 0) - x(0, 0) * x(1, 2)) / d;
    r(2, 0) = (x(1, 0) * x(2, 1) - x(1, 1) * x(2, 0)) / d;
    r(2, 1) = (x(0, 1) * x(2, 0) - x(0, 0) * x(2, 1)) / d;
    r(2, 2) = (x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0)) / d;
    return r;
}

BackwardOrbit run_orbit(const PiecewiseMap& map, int branch, const Pt& x, long n) {
    BackwardOrbit orb;
    orb.base = x;
    orb.length = n;
    orb.points.reserve(static_cast<size_t>(n));
    orb.radii.reserve(static_cast<size_t>(n));
    Pt cur = x;
    Mat comp = mat_identity(map.dim);  // DT^{-k} at the base, accumulated left-to-right
    double log_det_acc = 0.0;
    const Branch& br = map.branches[static_cast<size_t>(branch - 1)];
    for (long k = 1; k <= n; ++k) {
        Pt pre = br.is_local ? map.branch1_inverse(cur)
                             : map.local_inverse(branch, cur, Interval{});
        Mat j = br.is_local ? map.jacobian_local(pre) : [&] {
            Mat d;
            for (int a = 0; a < map.dim; ++a) d(a, a) = br.scale[a];
            return d;
        }();
        Mat jinv = mat_inverse(j, map.dim);
        comp = mat_mul(jinv, comp, map.dim);
        double det = std::fabs(mat_det(j, map.dim));
        log_det_acc += std::log(det);
        cur = pre;
        orb.points.push_back(cur);
        orb.radii.push_back(dist(cur, map.neutral_point));
        orb.step_det.push_back(det);
        orb.step_norm.push_back(mat_op_norm(j, map.dim));
        orb.step_inv_norm.push_back(mat_op_norm(jinv, map.dim));
        orb.inv_det_product.push_back(std::exp(-log_det_acc));
        orb.inv_comp_norm.push_back(mat_op_norm(comp, map.dim));
    }
    return orb;
}

void default_window(const BackwardOrbit& orbit, long& lo, long& hi) {
    if (hi <= 0) {
        hi = orbit.length;
        lo = std::max<long>(1, orbit.length / 10);
    }
    if (lo < 1 || hi > orbit.length || lo >= hi)
        fail(ErrorCode::EmptyWindow, "fit window out of range");
}

LineFit loglog_fit(const std::vector<double>& series, long lo, long hi) {
    std::vector<double> lx, ly;
    for (long k = lo; k <= hi; ++k) {
        double v = series[static_cast<size_t>(k - 1)];
        if (!(v > 0.0)) fail(ErrorCode::NonPositiveTail, "series not positive inside the window");
        lx.push_back(std::log(static_cast<double>(k)));
        ly.push_back(std::log(v));
    }
    return ols_fit(lx, ly);
}

}  // namespace

BackwardOrbit backward_orbit(const PiecewiseMap& map, const Pt& x, long n) {
    if (n < 1) fail(ErrorCode::EmptyWindow, "orbit length must be positive");
    return run_orbit(map, 1, x, n);
}

BackwardOrbit backward_orbit_branch(const PiecewiseMap& map, int branch, const Pt& x, long n) {
    if (branch < 1 || branch > map.branch_count()) fail(ErrorCode::BadSpec, "branch out of range");
    return run_orbit(map, branch, x, n);
}

ExponentFit radius_exponent(const BackwardOrbit& orbit, long window_lo, long window_hi) {
    if (orbit.length < 1000) fail(ErrorCode::EmptyWindow, "orbit too short for an exponent fit");
    default_window(orbit, window_lo, window_hi);
    ExponentFit f;
    f.line = loglog_fit(orbit.radii, window_lo, window_hi);
    f.exponent = -f.line.slope;  // radii decay like n^-beta
    f.prefactor = std::exp(f.line.intercept);
    return f;
}

ExponentFit det_product_exponent(const BackwardOrbit& orbit, long window_lo, long window_hi) {
    if (orbit.length < 1000) fail(ErrorCode::EmptyWindow, "orbit too short for an exponent fit");
    default_window(orbit, window_lo, window_hi);
    ExponentFit f;
    f.line = loglog_fit(orbit.inv_det_product, window_lo, window_hi);
    f.exponent = f.line.slope;
    f.prefactor = std::exp(f.line.intercept);
    return f;
}

NormDecayReport norm_decay_check(const BackwardOrbit& orbit, long window_lo, long window_hi) {
    default_window(orbit, window_lo, window_hi);
    NormDecayReport rep;
    LineFit f = loglog_fit(orbit.inv_comp_norm, window_lo, window_hi);
    rep.slope = f.slope;
    rep.max_abs_residual = f.max_abs_residual;
    // An exponential decay bends hard in log-log coordinates; reject the
    // power-law reading when residuals are far beyond fit noise.
    rep.power_law_ok = f.max_abs_residual < 0.2;
    return rep;
}

DistortionCurve distortion_ratio_curve(const PiecewiseMap& map, const Pt& z1, const Pt& z2,
                                       long n_max, long window_lo, long window_hi) {
    BackwardOrbit o1 = backward_orbit(map, z1, n_max);
    BackwardOrbit o2 = backward_orbit(map, z2, n_max);
    DistortionCurve curve;
    curve.ratios.resize(static_cast<size_t>(n_max));
    for (long k = 1; k <= n_max; ++k)
        curve.ratios[static_cast<size_t>(k - 1)] =
            o2.inv_det_product[static_cast<size_t>(k - 1)] /
            o1.inv_det_product[static_cast<size_t>(k - 1)];
    if (window_hi <= 0) {
        window_hi = n_max;
        window_lo = std::max<long>(1, n_max / 10);
    }
    std::vector<double> lx, ly;
    for (long k = window_lo; k <= window_hi; ++k) {
        lx.push_back(std::log(static_cast<double>(k)));
        ly.push_back(std::log(curve.ratios[static_cast<size_t>(k - 1)]));
    }
    curve.line = ols_fit(lx, ly);
    curve.slope = curve.line.slope;
    return curve;
}

ConeReport cone_check(const PiecewiseMap& map, const Pt& z, const Pt& v, const Pt& vp) {
    double nv = norm2(v), nvp = norm2(vp);
    if (nv == 0.0 || nvp == 0.0) fail(ErrorCode::DegenerateVectors, "zero cone vector");
    double ip = 0.0;
    for (int a = 0; a < map.dim; ++a) ip += v[a] * vp[a];
    double gram = nv * nv * nvp * nvp - ip * ip;
    if (gram <= 1e-24 * nv * nv * nvp * nvp) fail(ErrorCode::DegenerateVectors, "cone vectors are collinear");

    Mat j = (dist(z, map.neutral_point) < map.glue && map.local_form != LocalForm::none)
                ? map.jacobian_local(z)
                : map.jacobian(z);
    Pt av = mat_apply(j, v, map.dim);
    Pt avp = mat_apply(j, vp, map.dim);
    ConeReport rep;
    rep.len_v = norm2(av);
    rep.len_vp = norm2(avp);
    double ipa = 0.0;
    for (int a = 0; a < map.dim; ++a) ipa += av[a] * avp[a];
    double gram_img = rep.len_v * rep.len_v * rep.len_vp * rep.len_vp - ipa * ipa;
    double area_src = std::sqrt(std::max(0.0, gram));
    double area_img = std::sqrt(std::max(0.0, gram_img));
    // restricted-determinant over the span, divided by the two stretches
    rep.det_ratio = (area_img / area_src) / ((rep.len_v / nv) * (rep.len_vp / nvp));
    return rep;
}

PairDistortionReport pair_distortion_check(const PiecewiseMap& map, const Pt& x, const Pt& y,
                                           long n, double theta, double d1) {
    PairDistortionReport rep;
    if (dist(x, y) == 0.0) return rep;  // identical points: admissible, ratio 0
    BackwardOrbit ox = backward_orbit(map, x, n);
    BackwardOrbit oy = backward_orbit(map, y, n);
    double log_acc_x = 0.0, log_acc_y = 0.0;
    for (long k = 1; k <= n; ++k) {
        const Pt& xi = ox.points[static_cast<size_t>(k - 1)];
        const Pt& yi = oy.points[static_cast<size_t>(k - 1)];
        double sep = dist(xi, yi);
        if (rep.admissible && std::pow(sep, 1.0 - theta) > d1 * ox.radii[static_cast<size_t>(k - 1)]) {
            rep.admissible = false;
            rep.first_violation = k;
        }
        log_acc_x += std::log(ox.step_det[static_cast<size_t>(k - 1)]);
        log_acc_y += std::log(oy.step_det[static_cast<size_t>(k - 1)]);
        rep.max_log_ratio = std::max(rep.max_log_ratio, std::fabs(log_acc_x - log_acc_y));
    }
    rep.theta_scaled_ratio = rep.max_log_ratio / std::pow(dist(x, y), theta);
    return rep;
}

std::vector<double> recursion_radii(double gamma, double coeff, double t0, long n) {
    if (!(gamma > 0.0 && coeff > 0.0 && t0 > 0.0)) fail(ErrorCode::BadSpec, "invalid recursion parameters");
    std::vector<double> ts(static_cast<size_t>(n) + 1);
    ts[0] = t0;
    double t = t0;
    for (long k = 1; k <= n; ++k) {
        double target = t;
        double lo = 0.0, hi = t;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            double val = mid + coeff * std::pow(mid, 1.0 + gamma);
            if (val <= target) lo = mid;
            else hi = mid;
            if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
        }
        t = 0.5 * (lo + hi);
        ts[static_cast<size_t>(k)] = t;
    }
    return ts;
}

}  // namespace acim
