#include "acim/quasi_holder.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "acim/kernels.hpp"
#include "acim/rng.hpp"

namespace acim {

namespace {
constexpr double kInvalidLo = -std::numeric_limits<double>::infinity();

double max_cell_width(const UlamPartition& p) {
    double w = 0.0;
    for (int a = 0; a < p.dim; ++a) w = std::max(w, p.width[a]);
    return w;
}

// Sliding max over a contiguous line with half-window W; `sign` +1 for max,
// -1 for min (computed as max of the negated values by the caller).
void sliding_max_line(const double* src, double* dst, long n, long w) {
    std::deque<long> dq;
    long right = -1;
    for (long i = 0; i < n; ++i) {
        while (right < std::min(i + w, n - 1)) {
            ++right;
            while (!dq.empty() && src[dq.back()] <= src[right]) dq.pop_back();
            dq.push_back(right);
        }
        while (!dq.empty() && dq.front() < i - w) dq.pop_front();
        dst[i] = src[dq.front()];
    }
}

}  // namespace

UlamPartition build_plain_partition(const Box& box, int resolution) {
    if (resolution < 8) fail(ErrorCode::BadResolution, "resolution must be at least 8 per axis");
    UlamPartition part;
    part.box = box;
    part.dim = box.dim;
    part.resolution = resolution;
    long total = 1;
    for (int a = 0; a < box.dim; ++a) {
        part.width[a] = (box.hi[a] - box.lo[a]) / resolution;
        total *= resolution;
    }
    part.cell_volume = 1.0;
    for (int a = 0; a < box.dim; ++a) part.cell_volume *= part.width[a];
    part.in_region.assign(static_cast<size_t>(total), 0);
    part.straddle_region.assign(static_cast<size_t>(total), 0);
    part.straddle_branch.assign(static_cast<size_t>(total), 0);
    part.mhat_of_cell.resize(static_cast<size_t>(total));
    part.mhat_cells.resize(static_cast<size_t>(total));
    for (long c = 0; c < total; ++c) {
        part.mhat_of_cell[static_cast<size_t>(c)] = static_cast<int32_t>(c);
        part.mhat_cells[static_cast<size_t>(c)] = static_cast<int32_t>(c);
    }
    return part;
}

std::vector<double> QuasiHolderConfig::eps_grid(const UlamPartition& part) const {
    if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::BadSpec, "alpha must lie in (0,1)");
    std::vector<double> grid;
    double floor_eps = 2.0 * max_cell_width(part);
    for (int k = 0; k <= k_max; ++k) {
        double e = eps0 * std::pow(0.5, k);
        if (e >= floor_eps) grid.push_back(e);
    }
    return grid;
}

namespace {

// One directional extreme field: for every cell, max (sign=+1) or min
// (sign=-1) of f over the eps-ball stencil, mask-aware.
void extreme_field(const GridDensity& f, double eps, int sign, std::vector<double>& out) {
    const UlamPartition& p = *f.part;
    const long total = p.cell_count();
    // Work in negated space for minima: masked-out cells are always -inf so
    // they never win a max.
    const double invalid = kInvalidLo;
    std::vector<double> masked(static_cast<size_t>(total));
    for (long c = 0; c < total; ++c)
        masked[static_cast<size_t>(c)] =
            p.in_region[static_cast<size_t>(c)] ? invalid
                                                : sign * f.values[static_cast<size_t>(c)];

    out.assign(static_cast<size_t>(total), invalid);
    if (p.dim == 1) {
        long w = static_cast<long>(eps / p.width[0] + 1e-12);
        sliding_max_line(masked.data(), out.data(), total, w);
        for (long c = 0; c < total; ++c) out[static_cast<size_t>(c)] *= sign;
        return;
    }

    // dim == 2: lines run along axis 0 (contiguous); shifts along axis 1.
    const long nx = p.resolution, ny = p.resolution;
    const double wx = p.width[0], wy = p.width[1];
    const long K = static_cast<long>(eps / wy + 1e-12);
    std::vector<double> lined(static_cast<size_t>(total));
    std::fill(out.begin(), out.end(), invalid);
    for (long dy = K; dy >= 0; --dy) {
        // Half-window along x admissible together with a dy-row offset.
        double rem = eps * eps - static_cast<double>(dy) * wy * static_cast<double>(dy) * wy;
        if (rem < 0.0) continue;
        long H = static_cast<long>(std::sqrt(rem) / wx + 1e-12);
        // Sliding extreme along each x-line with half-window H.
        for (long j = 0; j < ny; ++j)
            sliding_max_line(masked.data() + j * nx, lined.data() + j * nx, nx, H);
        for (long j = 0; j < ny; ++j) {
            if (dy == 0) {
                kernels::max_inplace(out.data() + j * nx, lined.data() + j * nx, static_cast<size_t>(nx));
            } else {
                if (j + dy < ny)
                    kernels::max_inplace(out.data() + j * nx, lined.data() + (j + dy) * nx,
                                         static_cast<size_t>(nx));
                if (j - dy >= 0)
                    kernels::max_inplace(out.data() + j * nx, lined.data() + (j - dy) * nx,
                                         static_cast<size_t>(nx));
            }
        }
    }
    for (long c = 0; c < total; ++c) out[static_cast<size_t>(c)] *= sign;
}

}  // namespace

GridDensity oscillation(const GridDensity& f, double eps) {
    const UlamPartition& p = *f.part;
    if (p.dim > 2) fail(ErrorCode::BadSpec, "oscillation fields support dimensions 1 and 2");
    if (eps < 2.0 * max_cell_width(p) * (1.0 - 1e-12))
        fail(ErrorCode::EpsTooSmall, "eps below two cell widths");
    std::vector<double> hi, lo;
    extreme_field(f, eps, +1, hi);
    extreme_field(f, eps, -1, lo);
    GridDensity out = zero_density(p);
    for (long c = 0; c < p.cell_count(); ++c) {
        if (p.in_region[static_cast<size_t>(c)]) continue;
        out.values[static_cast<size_t>(c)] = hi[static_cast<size_t>(c)] - lo[static_cast<size_t>(c)];
    }
    return out;
}

double seminorm_alpha(const GridDensity& f, const QuasiHolderConfig& cfg) {
    std::vector<double> grid = cfg.eps_grid(*f.part);
    if (grid.empty()) fail(ErrorCode::EpsGridEmpty, "no admissible eps in the grid");
    double best = 0.0;
    for (double eps : grid) {
        GridDensity osc = oscillation(f, eps);
        double integral = kernels::sum(osc.values.data(), osc.values.size()) * f.part->cell_volume;
        best = std::max(best, integral / std::pow(eps, cfg.alpha));
    }
    return best;
}

double norm_alpha(const GridDensity& f, const QuasiHolderConfig& cfg) {
    return f.l1_norm() + seminorm_alpha(f, cfg);
}

std::vector<GridDensity> default_test_family(const UlamPartition& part, int n_indicators,
                                             int n_trig, uint64_t seed) {
    std::vector<GridDensity> family;
    const long total = part.cell_count();
    for (int i = 0; i < n_indicators; ++i) {
        Rng rng = derive_rng(seed, "qh_indicator", static_cast<uint64_t>(i));
        GridDensity f = zero_density(part);
        // Random ball bump.
        Pt c;
        for (int a = 0; a < part.dim; ++a) c[a] = rng.uniform(part.box.lo[a], part.box.hi[a]);
        double rad = rng.uniform(0.05, 0.35) * (part.box.hi[0] - part.box.lo[0]);
        for (long cell = 0; cell < total; ++cell) {
            if (part.in_region[static_cast<size_t>(cell)]) continue;
            f.values[static_cast<size_t>(cell)] = dist(part.center(cell), c) <= rad ? 1.0 : 0.0;
        }
        // A few neighbor-averaging sweeps to smooth the indicator edge.
        int sweeps = static_cast<int>(rng.below(4));
        for (int s = 0; s < sweeps; ++s) {
            GridDensity g = f;
            for (long cell = 0; cell < total; ++cell) {
                if (part.in_region[static_cast<size_t>(cell)]) continue;
                double acc = f.values[static_cast<size_t>(cell)];
                int cnt = 1;
                long rem = cell, idx[3] = {0, 0, 0}, stride = 1;
                for (int a = 0; a < part.dim; ++a) {
                    idx[a] = rem % part.resolution;
                    rem /= part.resolution;
                }
                stride = 1;
                for (int a = 0; a < part.dim; ++a) {
                    if (idx[a] > 0 && !part.in_region[static_cast<size_t>(cell - stride)]) {
                        acc += f.values[static_cast<size_t>(cell - stride)];
                        ++cnt;
                    }
                    if (idx[a] + 1 < part.resolution &&
                        !part.in_region[static_cast<size_t>(cell + stride)]) {
                        acc += f.values[static_cast<size_t>(cell + stride)];
                        ++cnt;
                    }
                    stride *= part.resolution;
                }
                g.values[static_cast<size_t>(cell)] = acc / cnt;
            }
            f = g;
        }
        family.push_back(std::move(f));
    }
    for (int i = 0; i < n_trig; ++i) {
        Rng rng = derive_rng(seed, "qh_trig", static_cast<uint64_t>(i));
        GridDensity f = zero_density(part);
        double k1 = 1.0 + static_cast<double>(rng.below(4));
        double k2 = 1.0 + static_cast<double>(rng.below(4));
        double ph1 = rng.uniform(0.0, 6.283185307179586);
        double ph2 = rng.uniform(0.0, 6.283185307179586);
        for (long cell = 0; cell < total; ++cell) {
            if (part.in_region[static_cast<size_t>(cell)]) continue;
            Pt p = part.center(cell);
            double sx = (p[0] - part.box.lo[0]) / (part.box.hi[0] - part.box.lo[0]);
            double v = 1.0 + 0.5 * std::cos(6.283185307179586 * k1 * sx + ph1);
            if (part.dim >= 2) {
                double sy = (p[1] - part.box.lo[1]) / (part.box.hi[1] - part.box.lo[1]);
                v *= 1.0 + 0.5 * std::cos(6.283185307179586 * k2 * sy + ph2);
            }
            f.values[static_cast<size_t>(cell)] = v;
        }
        family.push_back(std::move(f));
    }
    return family;
}

LYReport ly_estimate(const TransferMatrix& matrix, const std::vector<GridDensity>& family,
                     const QuasiHolderConfig& cfg) {
    if (family.empty()) fail(ErrorCode::DegenerateFamily, "empty test family");
    LYReport rep;
    rep.family = std::to_string(family.size()) + " functions";
    double a_mean = 0.0, l_mean = 0.0;
    bool any_seminorm = false;
    for (size_t i = 0; i < family.size(); ++i) {
        LYRow row;
        row.id = "f" + std::to_string(i);
        row.f_alpha = seminorm_alpha(family[i], cfg);
        row.f_l1 = family[i].l1_norm();
        GridDensity pf = apply_pf(matrix, family[i]);
        row.pf_alpha = seminorm_alpha(pf, cfg);
        if (row.f_alpha >= 1e-12) any_seminorm = true;
        rep.rows.push_back(row);
        a_mean += row.f_alpha;
        l_mean += row.f_l1;
    }
    a_mean /= static_cast<double>(family.size());
    l_mean /= static_cast<double>(family.size());

    bool all_constant = !any_seminorm;
    auto d_of = [&](double eta) {
        double d = 0.0;
        for (const LYRow& r : rep.rows) {
            if (r.f_l1 <= 0.0) continue;
            d = std::max(d, (r.pf_alpha - eta * r.f_alpha) / r.f_l1);
        }
        return std::max(0.0, d);
    };
    if (all_constant) {
        rep.eta_hat = 0.0;
        rep.d_hat = d_of(0.0);
        return rep;
    }

    double eta_ub = 0.0;
    for (const LYRow& r : rep.rows)
        if (r.f_alpha > 1e-15) eta_ub = std::max(eta_ub, r.pf_alpha / r.f_alpha);
    const int grid_n = 4096;
    double best_eta = 0.0, best_obj = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= grid_n; ++k) {
        double eta = eta_ub * k / grid_n;
        double obj = eta * a_mean + d_of(eta) * l_mean;
        if (obj < best_obj - 1e-12 * (1.0 + std::fabs(best_obj))) {
            best_obj = obj;
            best_eta = eta;
        }
    }
    rep.eta_hat = best_eta;
    rep.d_hat = d_of(best_eta);
    return rep;
}

}  // namespace acim
