#include "acim/assumption_audit.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "acim/rng.hpp"

namespace acim {

namespace {

// Uniform bucket grid over branch-image boundary point clouds, so the
// within-eps predicate does not scan every polyline vertex.
class PointGrid {
  public:
    PointGrid(const std::vector<Pt>& pts, const Box& box, int dim, int res) : dim_(dim), res_(res), box_(box) {
        buckets_.resize(static_cast<size_t>(res) * res * (dim == 3 ? res : 1));
        for (const Pt& p : pts) buckets_[static_cast<size_t>(bucket_of(p))].push_back(p);
    }

    bool within(const Pt& q, double eps) const {
        double eps2 = eps * eps;
        long lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
        for (int a = 0; a < dim_; ++a) {
            lo[a] = coord(a, q[a] - eps);
            hi[a] = coord(a, q[a] + eps);
        }
        long kz_hi = (dim_ == 3) ? hi[2] : 0, kz_lo = (dim_ == 3) ? lo[2] : 0;
        for (long kz = kz_lo; kz <= kz_hi; ++kz)
            for (long ky = (dim_ >= 2 ? lo[1] : 0); ky <= (dim_ >= 2 ? hi[1] : 0); ++ky)
                for (long kx = lo[0]; kx <= hi[0]; ++kx) {
                    size_t b = static_cast<size_t>(kx + res_ * (ky + static_cast<long>(res_) * kz));
                    for (const Pt& p : buckets_[b])
                        if (dist_sq(p, q) <= eps2) return true;
                }
        return false;
    }

  private:
    long coord(int a, double v) const {
        double t = (v - box_.lo[a]) / (box_.hi[a] - box_.lo[a]);
        long k = static_cast<long>(t * res_);
        return std::clamp<long>(k, 0, res_ - 1);
    }
    long bucket_of(const Pt& p) const {
        long k = coord(0, p[0]);
        if (dim_ >= 2) k += res_ * coord(1, p[1]);
        if (dim_ == 3) k += static_cast<long>(res_) * res_ * coord(2, p[2]);
        return k;
    }
    int dim_;
    int res_;
    Box box_;
    std::vector<std::vector<Pt>> buckets_;
};

struct ImageBoundaryOracle {
    const PiecewiseMap& map;
    std::vector<std::unique_ptr<PointGrid>> grids;  // per branch, polyline kinds only

    explicit ImageBoundaryOracle(const PiecewiseMap& m) : map(m) {
        grids.resize(m.branches.size());
        for (size_t i = 0; i < m.branches.size(); ++i)
            if (m.branches[i].image.kind == BranchImage::Kind::polyline)
                grids[i] = std::make_unique<PointGrid>(m.branches[i].image.points, m.domain, m.dim, 64);
    }

    bool near_boundary(int branch, const Pt& image_pt, double eps) const {
        const Branch& b = map.branches[static_cast<size_t>(branch - 1)];
        if (b.image.kind == BranchImage::Kind::polyline)
            return grids[static_cast<size_t>(branch - 1)]->within(image_pt, eps);
        return b.image.boundary_distance(image_pt, map.dim) <= eps;
    }
};

}  // namespace

ExpansionAudit expansion_audit(const PiecewiseMap& map, int grid_per_axis, double probe_radius,
                               int probe_samples, uint64_t seed) {
    if (grid_per_axis < 32) fail(ErrorCode::BadSpec, "audit grid needs at least 32 points per axis");
    ExpansionAudit audit;
    long total = 1;
    for (int a = 0; a < map.dim; ++a) total *= grid_per_axis;
    for (long g = 0; g < total; ++g) {
        Pt p;
        long rem = g;
        for (int a = 0; a < map.dim; ++a) {
            long ia = rem % grid_per_axis;
            rem /= grid_per_axis;
            p[a] = map.domain.lo[a] +
                   (static_cast<double>(ia) + 0.5) * (map.domain.hi[a] - map.domain.lo[a]) /
                       grid_per_axis;
        }
        if (map.region.contains(p)) {
            ++audit.skipped_in_region;
            continue;
        }
        double btol = map.tol.root_tol * (1.0 + norm2(p));
        if (map.branch_boundary_distance(p) <= btol) {
            ++audit.skipped_on_boundary;
            continue;
        }
        if (map.local_form != LocalForm::none && dist(p, map.neutral_point) < 10.0 * map.tol.root_tol) {
            ++audit.skipped_near_neutral;
            continue;
        }
        double s = map.contraction_coefficient(p, probe_radius, probe_samples,
                                               derive_rng(seed, "expansion", static_cast<uint64_t>(g)).next());
        ++audit.grid_points_used;
        if (s > audit.s_hat) {
            audit.s_hat = s;
            audit.worst_points.insert(audit.worst_points.begin(), p);
            if (audit.worst_points.size() > 8) audit.worst_points.resize(8);
        }
    }
    if (audit.grid_points_used == 0) fail(ErrorCode::DegenerateProbe, "no usable audit grid points");
    return audit;
}

namespace {

double overlap_at_impl(const PiecewiseMap& map, const ImageBoundaryOracle& oracle, const Pt& center,
                       double s, double eps, double eps0, int samples, uint64_t seed) {
    double ball_r = (1.0 - s) * eps0;
    Rng rng(seed);
    long hit = 0, used = 0;
    long attempts = 0;
    const long cap = static_cast<long>(samples) * 64;
    while (used < samples && attempts < cap) {
        ++attempts;
        Pt q;
        double rr = 0.0;
        for (int a = 0; a < map.dim; ++a) {
            double d = rng.uniform(-ball_r, ball_r);
            q[a] = center[a] + d;
            rr += d * d;
        }
        if (rr > ball_r * ball_r) continue;
        if (!map.domain.contains(q)) continue;  // ball clipped at the domain edge
        ++used;
        int branch = 0;
        Pt img;
        {
            // Locate without the boundary-tolerance contract; boundary hits
            // are measure zero under continuous sampling.
            long idx = 0, stride = 1;
            for (int a = 0; a < map.dim; ++a) {
                const auto& cs = map.cuts[a];
                int n = static_cast<int>(cs.size()) - 1;
                int i = 0;
                while (i + 1 < n && q[a] >= cs[static_cast<size_t>(i + 1)]) ++i;
                idx += stride * i;
                stride *= n;
            }
            branch = map.rect_to_branch[static_cast<size_t>(idx)];
            const Branch& b = map.branches[static_cast<size_t>(branch - 1)];
            img = q;
            if (b.is_local) {
                map.step_local(img);
            } else {
                for (int a = 0; a < map.dim; ++a) img[a] = b.scale[a] * q[a] + b.offset[a];
            }
        }
        if (oracle.near_boundary(branch, img, eps)) ++hit;
    }
    if (used == 0) return 0.0;
    return static_cast<double>(hit) / static_cast<double>(used);
}

}  // namespace

double boundary_overlap_at(const PiecewiseMap& map, const Pt& center, double s, double eps,
                           double eps0, int samples, uint64_t seed) {
    if (!(eps > 0.0) || !(eps0 >= eps)) fail(ErrorCode::BadRadii, "need 0 < eps <= eps0");
    if (!(s >= 0.0 && s < 1.0)) fail(ErrorCode::BadRadii, "contraction coefficient must lie in [0,1)");
    ImageBoundaryOracle oracle(map);
    return overlap_at_impl(map, oracle, center, s, eps, eps0, samples, seed);
}

double boundary_overlap(const PiecewiseMap& map, double s, double eps, double eps0, int n_centers,
                        int samples_per_center, uint64_t seed) {
    if (!(eps > 0.0) || !(eps0 >= eps)) fail(ErrorCode::BadRadii, "need 0 < eps <= eps0");
    if (!(s >= 0.0 && s < 1.0)) fail(ErrorCode::BadRadii, "contraction coefficient must lie in [0,1)");
    ImageBoundaryOracle oracle(map);
    // Stratified jittered centers across the domain.
    int per_axis = 1;
    while (std::pow(per_axis, map.dim) < static_cast<double>(n_centers)) ++per_axis;
    double sup = 0.0;
    for (int c = 0; c < n_centers; ++c) {
        Rng rng = derive_rng(seed, "overlap_centers", static_cast<uint64_t>(c));
        Pt center;
        long rem = c;
        for (int a = 0; a < map.dim; ++a) {
            long ia = rem % per_axis;
            rem /= per_axis;
            double w = (map.domain.hi[a] - map.domain.lo[a]) / per_axis;
            center[a] = map.domain.lo[a] + (static_cast<double>(ia) + rng.uniform()) * w;
        }
        double g = overlap_at_impl(map, oracle, center, s, eps, eps0, samples_per_center, rng.next());
        sup = std::max(sup, g);
    }
    return sup;
}

LambdaEstimate lambda_estimate(int dim, const std::vector<OverlapRow>& g_table, double s_hat,
                               double alpha) {
    if (g_table.empty()) fail(ErrorCode::EmptyTable, "empty overlap table");
    LambdaEstimate est;
    double overlap_sup = 0.0;
    for (const OverlapRow& row : g_table)
        overlap_sup = std::max(overlap_sup,
                               row.g_hat * std::pow(row.eps0, alpha) / std::pow(row.eps, alpha));
    est.overlap_term = 2.0 * overlap_sup;
    est.geometric_term =
        3.0 * s_hat * unit_ball_volume(dim - 1) / ((1.0 - s_hat) * unit_ball_volume(dim));
    est.lambda_hat = std::max(est.overlap_term, est.geometric_term);
    est.condition_value = std::pow(s_hat, alpha) + est.lambda_hat;
    return est;
}

double distortion_holder_constant(const PiecewiseMap& map, long n_pairs, uint64_t seed,
                                  double alpha, double sample_radius, double pair_distance) {
    double c_hat = 0.0;
    long made = 0;
    uint64_t idx = 0;
    while (made < n_pairs && idx < static_cast<uint64_t>(n_pairs) * 64) {
        Rng rng = derive_rng(seed, "holder_pairs", idx++);
        Pt x;
        for (int a = 0; a < map.dim; ++a) x[a] = rng.uniform(map.domain.lo[a], map.domain.hi[a]);
        if (sample_radius > 0.0 && dist(x, map.neutral_point) > sample_radius) continue;
        double btol = map.tol.root_tol * (1.0 + norm2(x));
        if (map.branch_boundary_distance(x) <= btol) continue;
        int bx = 0;
        try {
            bx = map.branch_index(x);
        } catch (const Error&) {
            continue;
        }
        Pt y = x;
        double step = pair_distance * rng.uniform();
        for (int a = 0; a < map.dim; ++a) y[a] += rng.uniform(-step, step);
        if (!map.domain.contains(y)) continue;
        int by = 0;
        try {
            by = map.branch_index(y);
        } catch (const Error&) {
            continue;
        }
        if (by != bx) continue;
        const Branch& b = map.branches[static_cast<size_t>(bx - 1)];
        Pt tx = x, ty = y;
        double dx, dy;
        if (b.is_local) {
            dx = std::fabs(map.local_det(x));
            dy = std::fabs(map.local_det(y));
            map.step_local(tx);
            map.step_local(ty);
        } else {
            dx = dy = 1.0;
            for (int a = 0; a < map.dim; ++a) {
                dx *= std::fabs(b.scale[a]);
                tx[a] = b.scale[a] * x[a] + b.offset[a];
                ty[a] = b.scale[a] * y[a] + b.offset[a];
            }
            dy = dx;
        }
        double sep = dist(tx, ty);
        if (sep <= 0.0) continue;
        ++made;
        double gx = 1.0 / dx, gy = 1.0 / dy;
        c_hat = std::max(c_hat, std::fabs(gx - gy) / (gx * std::pow(sep, alpha)));
    }
    return c_hat;
}

AuditReport run_audit(const PiecewiseMap& map, const AuditOptions& opts, uint64_t seed) {
    AuditReport rep;
    rep.options = opts;
    rep.seed = seed;
    rep.alpha = opts.alpha;
    rep.expansion = expansion_audit(map, opts.grid_per_axis, opts.probe_radius, opts.probe_samples,
                                    derive_rng(seed, "audit_expansion").next());
    rep.s_hat = rep.expansion.s_hat;

    const auto& radii = map.tol.audit_radius_grid;
    double s_for_balls = std::min(rep.s_hat, 0.9);  // keeps (1-s) eps0 positive
    for (size_t i = 0; i < radii.size(); ++i)
        for (size_t j = i; j < radii.size(); ++j) {
            OverlapRow row;
            row.eps0 = radii[i];
            row.eps = radii[j];
            row.g_hat = boundary_overlap(map, s_for_balls, row.eps, row.eps0, opts.n_centers,
                                         opts.samples_per_center,
                                         derive_rng(seed, "audit_overlap", i * 97 + j).next());
            rep.g_table.push_back(row);
        }
    rep.lambda = lambda_estimate(map.dim, rep.g_table, rep.s_hat, opts.alpha);
    rep.c_hat = distortion_holder_constant(map, opts.n_pairs, derive_rng(seed, "audit_holder").next(),
                                           opts.alpha, 0.0, 0.05);
    rep.verdict = rep.lambda.condition_value < 1.0;
    rep.remark_floor =
        4.0 * rep.s_hat * unit_ball_volume(map.dim - 1) / ((1.0 - rep.s_hat) * unit_ball_volume(map.dim));
    return rep;
}

}  // namespace acim
