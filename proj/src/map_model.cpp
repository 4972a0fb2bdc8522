#include "acim/map_model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "acim/rng.hpp"

namespace acim {

void ToleranceConfig::validate() const {
    if (!(root_tol > 0.0 && root_tol <= 1e-6)) fail(ErrorCode::BadSpec, "root_tol outside (0, 1e-6]");
    if (audit_radius_grid.empty()) fail(ErrorCode::BadSpec, "empty audit radius grid");
    for (size_t i = 0; i < audit_radius_grid.size(); ++i) {
        if (audit_radius_grid[i] <= 0.0) fail(ErrorCode::BadSpec, "audit radius not positive");
        if (i > 0 && audit_radius_grid[i] >= audit_radius_grid[i - 1])
            fail(ErrorCode::BadSpec, "audit radii not decreasing");
    }
}

double BranchImage::boundary_distance(const Pt& p, int m) const {
    switch (kind) {
        case Kind::interval:
            return std::min(std::fabs(p[0] - lo), std::fabs(p[0] - hi));
        case Kind::box: {
            // Distance to the box frame (interior and exterior both positive).
            double inside_margin = 1e300;
            bool outside = false;
            double out_sq = 0.0;
            for (int a = 0; a < m; ++a) {
                double dl = p[a] - box.lo[a], dh = box.hi[a] - p[a];
                inside_margin = std::min(inside_margin, std::min(dl, dh));
                double d = 0.0;
                if (dl < 0.0) d = -dl;
                else if (dh < 0.0) d = -dh;
                if (d > 0.0) outside = true;
                out_sq += d * d;
            }
            return outside ? std::sqrt(out_sq) : inside_margin;
        }
        case Kind::polyline: {
            double best = 1e300;
            for (const Pt& q : points) {
                double d = dist_sq(p, q);
                if (d < best) best = d;
            }
            return std::sqrt(best);
        }
    }
    return 0.0;
}

int ComponentLabeling::component_of(const Pt& p, double tol) const {
    if (std::max(std::fabs(p[0]), std::fabs(p[1])) >= label_halfwidth) return 0;
    double gap = std::fabs(p[1]) - p[0] * p[0];
    if (std::fabs(gap) <= tol) return 0;
    return gap < 0.0 ? 1 : 2;
}

int PiecewiseMap::region_preimage_count() const {
    int k = 0;
    for (const Branch& b : branches)
        if (b.image_covers_region) ++k;
    return k;
}

namespace {

int axis_interval(const std::vector<double>& cuts, double v) {
    // cuts sorted ascending, cuts.front() <= v <= cuts.back().
    int n = static_cast<int>(cuts.size()) - 1;
    int i = 0;
    while (i + 1 < n && v >= cuts[static_cast<size_t>(i + 1)]) ++i;
    return i;
}

}  // namespace

int PiecewiseMap::rect_branch(const Pt& x) const {
    int idx = 0, stride = 1;
    for (int a = 0; a < dim; ++a) {
        idx += stride * axis_interval(cuts[a], x[a]);
        stride *= static_cast<int>(cuts[a].size()) - 1;
    }
    return rect_to_branch[static_cast<size_t>(idx)];
}

const Branch& PiecewiseMap::locate(const Pt& x) const {
    return branches[static_cast<size_t>(rect_branch(x) - 1)];
}

double PiecewiseMap::branch_boundary_distance(const Pt& x) const {
    // The branch-boundary skeleton is the union of rectangle faces outside
    // the local box plus the box faces themselves; the nearest piece is
    // always on the boundary of the cell owning x.
    double best = 1e300;
    if (local_form != LocalForm::none) {
        const Box& bx = branches.front().domain_box;
        bool inside = true;
        for (int a = 0; a < dim; ++a)
            if (x[a] <= bx.lo[a] || x[a] >= bx.hi[a]) inside = false;
        if (inside) {
            for (int a = 0; a < dim; ++a) {
                if (bx.lo[a] > domain.lo[a]) best = std::min(best, x[a] - bx.lo[a]);
                if (bx.hi[a] < domain.hi[a]) best = std::min(best, bx.hi[a] - x[a]);
            }
            return best;
        }
    }
    for (int a = 0; a < dim; ++a) {
        const auto& cs = cuts[a];
        int i = axis_interval(cs, x[a]);
        if (i > 0) best = std::min(best, std::fabs(x[a] - cs[static_cast<size_t>(i)]));
        if (i + 2 < static_cast<int>(cs.size()))
            best = std::min(best, std::fabs(cs[static_cast<size_t>(i) + 1] - x[a]));
    }
    return best;
}

int PiecewiseMap::branch_index(const Pt& x) const {
    if (!domain.contains(x)) fail(ErrorCode::OutOfDomain, "point outside study domain");
    double btol = tol.root_tol * (1.0 + norm2(x));
    if (branch_boundary_distance(x) <= btol)
        fail(ErrorCode::PointOnBoundary, "point within root_tol of a branch boundary");
    return rect_branch(x);
}

void PiecewiseMap::step_local(Pt& x) const {
    switch (local_form) {
        case LocalForm::neutral1d: {
            double t = x[0];
            if (gamma == 2.0) {
                x[0] = t * (1.0 + t * t);
            } else {
                x[0] = t * (1.0 + std::pow(t, gamma));
            }
            break;
        }
        case LocalForm::neutral2d: {
            double u = 1.0 + (x[0] * x[0] + x[1] * x[1]);
            x[0] = x[0] * u;
            x[1] = x[1] * (u * u);
            break;
        }
        case LocalForm::neutral3d: {
            double u = 1.0 + (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
            double v = 1.0 + u;
            x[0] = x[0] * u;
            x[1] = x[1] * (u * u);
            x[2] = x[2] * (v * v * v);
            break;
        }
        case LocalForm::none:
            fail(ErrorCode::BadSpec, "map has no local branch");
    }
}

double PiecewiseMap::local_det(const Pt& x) const {
    Mat j = jacobian_local(x);
    return mat_det(j, dim);
}

Pt PiecewiseMap::apply_branch(const Branch& b, const Pt& x) const {
    if (b.is_local) {
        Pt y = x;
        step_local(y);
        return y;
    }
    Pt y;
    for (int a = 0; a < dim; ++a) y[a] = b.scale[a] * x[a] + b.offset[a];
    return y;
}

Pt PiecewiseMap::evaluate(const Pt& x) const {
    return apply_branch(branches[static_cast<size_t>(branch_index(x) - 1)], x);
}

Mat PiecewiseMap::jacobian_local(const Pt& x) const {
    Mat j;
    switch (local_form) {
        case LocalForm::neutral1d: {
            double t = x[0];
            double tg = (gamma == 2.0) ? t * t : std::pow(t, gamma);
            j(0, 0) = 1.0 + (1.0 + gamma) * tg;
            break;
        }
        case LocalForm::neutral2d: {
            double X = x[0], Y = x[1];
            double u = 1.0 + X * X + Y * Y;
            j(0, 0) = u + 2.0 * X * X;
            j(0, 1) = 2.0 * X * Y;
            j(1, 0) = 4.0 * X * Y * u;
            j(1, 1) = u * u + 4.0 * Y * Y * u;
            break;
        }
        case LocalForm::neutral3d: {
            double X = x[0], Y = x[1], Z = x[2];
            double u = 1.0 + X * X + Y * Y + Z * Z;
            double v = 1.0 + u;
            j(0, 0) = u + 2.0 * X * X;
            j(0, 1) = 2.0 * X * Y;
            j(0, 2) = 2.0 * X * Z;
            j(1, 0) = 4.0 * X * Y * u;
            j(1, 1) = u * u + 4.0 * Y * Y * u;
            j(1, 2) = 4.0 * Y * Z * u;
            j(2, 0) = 6.0 * X * Z * v * v;
            j(2, 1) = 6.0 * Y * Z * v * v;
            j(2, 2) = v * v * v + 6.0 * Z * Z * v * v;
            break;
        }
        case LocalForm::none:
            fail(ErrorCode::BadSpec, "map has no local branch");
    }
    return j;
}

Mat PiecewiseMap::jacobian(const Pt& x) const {
    const Branch& b = branches[static_cast<size_t>(branch_index(x) - 1)];
    if (b.is_local) return jacobian_local(x);
    Mat j;
    for (int a = 0; a < dim; ++a) j(a, a) = b.scale[a];
    return j;
}

double PiecewiseMap::jacobian_det(const Pt& x) const { return mat_det(jacobian(x), dim); }

double PiecewiseMap::step_with_det(Pt& x) const {
    const Branch& b = locate(x);
    if (b.is_local) {
        double d = std::fabs(mat_det(jacobian_local(x), dim));
        step_local(x);
        return d;
    }
    double d = 1.0;
    for (int a = 0; a < dim; ++a) {
        d *= std::fabs(b.scale[a]);
        x[a] = b.scale[a] * x[a] + b.offset[a];
    }
    return d;
}

void PiecewiseMap::step(Pt& x) const {
    const Branch& b = locate(x);
    x = apply_branch(b, x);
}

Interval PiecewiseMap::branch1_bracket(const Pt& y) const {
    if (local_form == LocalForm::neutral1d) return Interval{0.0, y[0]};
    return Interval{1.0, 1.0 + norm2_sq(y) + 1e-12};
}

namespace {

// Bisection on a monotone increasing profile; relative tolerance, 200 steps.
double bisect_root(const std::function<double(double)>& f, Interval br, double rel_tol) {
    double a = br.lo, b = br.hi;
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) fail(ErrorCode::NoRoot, "bracket endpoints have the same sign");
    double fm_mid = f(0.5 * (a + b));
    if (!((fa <= fm_mid && fm_mid <= fb) || (fb <= fm_mid && fm_mid <= fa)))
        fail(ErrorCode::NotMonotone, "profile not monotone on the bracket");
    for (int it = 0; it < 200; ++it) {
        double m = 0.5 * (a + b);
        double fm = f(m);
        if ((fa <= 0.0 && fm <= 0.0) || (fa >= 0.0 && fm >= 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
        if (b - a <= rel_tol * std::max({1.0, std::fabs(a), std::fabs(b)})) break;
    }
    return 0.5 * (a + b);
}

}  // namespace

Pt PiecewiseMap::local_inverse(int branch, const Pt& y, Interval bracket) const {
    if (branch < 1 || branch > branch_count()) fail(ErrorCode::BadSpec, "branch index out of range");
    const Branch& b = branches[static_cast<size_t>(branch - 1)];
    if (!b.is_local) {
        Pt x;
        for (int a = 0; a < dim; ++a) {
            x[a] = (y[a] - b.offset[a]) / b.scale[a];
            if (x[a] < b.domain_box.lo[a] - tol.root_tol || x[a] > b.domain_box.hi[a] + tol.root_tol)
                fail(ErrorCode::NoRoot, "target outside affine branch image");
        }
        return x;
    }
    Pt x;
    switch (local_form) {
        case LocalForm::neutral1d: {
            double target = y[0];
            if (target == 0.0) return pt1(0.0);
            auto profile = [&](double t) {
                double tg = (gamma == 2.0) ? t * t : std::pow(t, gamma);
                return t * (1.0 + tg) - target;
            };
            x = pt1(bisect_root(profile, bracket, tol.root_tol));
            break;
        }
        case LocalForm::neutral2d: {
            double A = y[0] * y[0], B = y[1] * y[1];
            if (A + B == 0.0) return pt2(0.0, 0.0);
            auto profile = [&](double u) { return (u - 1.0) - A / (u * u) - B / (u * u * u * u); };
            double u = bisect_root(profile, bracket, tol.root_tol);
            x = pt2(y[0] / u, y[1] / (u * u));
            break;
        }
        case LocalForm::neutral3d: {
            double A = y[0] * y[0], B = y[1] * y[1], C = y[2] * y[2];
            if (A + B + C == 0.0) return pt3(0.0, 0.0, 0.0);
            auto profile = [&](double u) {
                double v = 1.0 + u;
                double v3 = v * v * v;
                return (u - 1.0) - A / (u * u) - B / (u * u * u * u) - C / (v3 * v3);
            };
            double u = bisect_root(profile, bracket, tol.root_tol);
            double v = 1.0 + u;
            x = pt3(y[0] / u, y[1] / (u * u), y[2] / (v * v * v));
            break;
        }
        case LocalForm::none:
            fail(ErrorCode::BadSpec, "map has no local branch");
    }
    // Verify the forward contract.
    Pt check = x;
    step_local(check);
    if (dist(check, y) > tol.root_tol * (1.0 + norm2(y)) * 10.0)
        fail(ErrorCode::InverseFailure, "inverse residual exceeds tolerance");
    return x;
}

Pt PiecewiseMap::branch1_inverse(const Pt& y) const { return local_inverse(1, y, branch1_bracket(y)); }

double PiecewiseMap::contraction_coefficient(const Pt& x, double probe_radius, int n_samples,
                                             uint64_t seed) const {
    double r_to_p = dist(x, neutral_point);
    if (local_form != LocalForm::none && r_to_p < 10.0 * tol.root_tol)
        fail(ErrorCode::DegenerateProbe, "probe point coincides with the neutral point");
    double r = probe_radius;
    if (local_form != LocalForm::none) r = std::min(r, 0.1 * r_to_p);
    if (!audit_radius_grid_empty()) r = std::min(r, tol.audit_radius_grid.front());
    int bx = branch_index(x);
    const Branch& b = branches[static_cast<size_t>(bx - 1)];
    Pt tx = apply_branch(b, x);
    Rng rng(seed);
    double s_hat = 0.0;
    int accepted = 0, attempts = 0;
    const int max_attempts = n_samples * 64;
    while (accepted < n_samples && attempts < max_attempts) {
        ++attempts;
        Pt y;
        double rr = 0.0;
        for (int a = 0; a < dim; ++a) {
            y[a] = rng.uniform(-r, r);
            rr += y[a] * y[a];
        }
        if (rr > r * r || rr == 0.0) continue;
        for (int a = 0; a < dim; ++a) y[a] += x[a];
        if (!domain.contains(y) || !b.contains(y)) continue;
        Pt ty = apply_branch(b, y);
        double num = dist(x, y), den = dist(tx, ty);
        if (den <= 0.0) continue;
        ++accepted;
        double ratio = num / den;
        if (ratio > s_hat) s_hat = ratio;
    }
    if (accepted == 0) fail(ErrorCode::DegenerateProbe, "no admissible probe samples");
    return s_hat;
}

bool PiecewiseMap::audit_radius_grid_empty() const { return tol.audit_radius_grid.empty(); }

void PiecewiseMap::validate() const {
    tol.validate();
    if (dim < 1 || dim > 3) fail(ErrorCode::BadSpec, "dimension must be 1..3");
    if (branches.empty()) fail(ErrorCode::BadSpec, "no branches");
    if (local_form != LocalForm::none) {
        Pt p = neutral_point;
        Pt tp = p;
        step_local(tp);
        if (dist(tp, p) > 1e-15) fail(ErrorCode::BadSpec, "neutral point is not fixed");
        if (std::fabs(mat_det(jacobian_local(p), dim)) < 1.0 - 1e-12)
            fail(ErrorCode::BadSpec, "neutral Jacobian determinant below 1");
        if (region.radius > 0.0 && !branches.front().contains(region.center))
            fail(ErrorCode::BadSpec, "region center outside branch 1");
    }
    if (region_preimage_count() > branch_count()) fail(ErrorCode::BadSpec, "K' exceeds K");
}

}  // namespace acim
