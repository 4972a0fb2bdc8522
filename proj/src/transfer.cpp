#include "acim/transfer.hpp"

#include <algorithm>
#include <cmath>

#include "acim/kernels.hpp"
#include "acim/rng.hpp"

namespace acim {

Pt UlamPartition::center(long cell) const {
    Pt p;
    long rem = cell;
    for (int a = 0; a < dim; ++a) {
        long ia = rem % resolution;
        rem /= resolution;
        p[a] = box.lo[a] + (static_cast<double>(ia) + 0.5) * width[a];
    }
    return p;
}

long UlamPartition::cell_of(const Pt& p) const {
    long idx = 0, stride = 1;
    for (int a = 0; a < dim; ++a) {
        if (p[a] < box.lo[a] || p[a] > box.hi[a]) return -1;
        long ia = static_cast<long>((p[a] - box.lo[a]) / width[a]);
        if (ia >= resolution) ia = resolution - 1;
        if (ia < 0) ia = 0;
        idx += stride * ia;
        stride *= resolution;
    }
    return idx;
}

double UlamPartition::straddle_mass() const {
    long n = 0;
    for (uint8_t s : straddle_region) n += s;
    return static_cast<double>(n) * cell_volume;
}

UlamPartition build_partition(const PiecewiseMap& map, const Box& box, int resolution) {
    if (resolution < 8) fail(ErrorCode::BadResolution, "resolution must be at least 8 per axis");
    UlamPartition part;
    part.box = box;
    part.dim = map.dim;
    part.resolution = resolution;
    long total = 1;
    for (int a = 0; a < map.dim; ++a) {
        part.width[a] = (box.hi[a] - box.lo[a]) / resolution;
        total *= resolution;
    }
    part.cell_volume = 1.0;
    for (int a = 0; a < map.dim; ++a) part.cell_volume *= part.width[a];

    part.in_region.assign(static_cast<size_t>(total), 0);
    part.straddle_region.assign(static_cast<size_t>(total), 0);
    part.straddle_branch.assign(static_cast<size_t>(total), 0);
    part.mhat_of_cell.assign(static_cast<size_t>(total), -1);

    const int n_corners = 1 << map.dim;
    for (long cell = 0; cell < total; ++cell) {
        Pt c = part.center(cell);
        bool center_in = map.region.contains(c);
        part.in_region[static_cast<size_t>(cell)] = center_in ? 1 : 0;
        bool any_in = false, any_out = false;
        int branch0 = -1;
        bool branch_mix = false;
        for (int k = 0; k < n_corners; ++k) {
            Pt q = c;
            for (int a = 0; a < map.dim; ++a)
                q[a] += ((k >> a) & 1) ? 0.5 * part.width[a] : -0.5 * part.width[a];
            (map.region.contains(q) ? any_in : any_out) = true;
            int b = -2;
            try {
                b = map.branch_index(q);
            } catch (const Error&) {
                branch_mix = true;  // corner pinned on a boundary
            }
            if (b != -2) {
                if (branch0 == -1) branch0 = b;
                else if (b != branch0) branch_mix = true;
            }
        }
        part.straddle_region[static_cast<size_t>(cell)] = (any_in && any_out) ? 1 : 0;
        part.straddle_branch[static_cast<size_t>(cell)] = branch_mix ? 1 : 0;
        if (!center_in) {
            part.mhat_of_cell[static_cast<size_t>(cell)] = static_cast<int32_t>(part.mhat_cells.size());
            part.mhat_cells.push_back(static_cast<int32_t>(cell));
        }
    }
    return part;
}

double GridDensity::mass() const {
    return kernels::sum(values.data(), values.size()) * part->cell_volume;
}

double GridDensity::l1_norm() const {
    std::vector<double> a(values.size());
    for (size_t i = 0; i < values.size(); ++i) a[i] = std::fabs(values[i]);
    return kernels::sum(a.data(), a.size()) * part->cell_volume;
}

double GridDensity::sup_mhat() const {
    double s = 0.0;
    for (int32_t cell : part->mhat_cells) s = std::max(s, std::fabs(values[static_cast<size_t>(cell)]));
    return s;
}

GridDensity zero_density(const UlamPartition& part) {
    GridDensity g;
    g.part = &part;
    g.values.assign(static_cast<size_t>(part.cell_count()), 0.0);
    return g;
}

double TransferMatrix::row_sum(long r) const {
    double s = 0.0;
    for (int64_t k = row_ptr[static_cast<size_t>(r)]; k < row_ptr[static_cast<size_t>(r) + 1]; ++k)
        s += val[static_cast<size_t>(k)];
    return s;
}

namespace {

// First return to the discretized complement of the region: iterate until the
// landing cell is an M-hat cell. Returns the landing cell or -1 on overflow.
long discrete_first_return(const PiecewiseMap& map, const UlamPartition& part, Pt z, long n_max,
                           Pt* out) {
    map.step(z);
    long time = 1;
    long cell = part.cell_of(z);
    while (cell >= 0 && part.in_region[static_cast<size_t>(cell)]) {
        map.step(z);
        ++time;
        if (time > n_max) return -1;
        cell = part.cell_of(z);
    }
    if (out) *out = z;
    return cell;
}

}  // namespace

TransferMatrix build_transfer(const PiecewiseMap& map, const UlamPartition& part,
                              long samples_per_cell, uint64_t seed, const TransferOptions& opts) {
    if (samples_per_cell < 16) fail(ErrorCode::BadSpec, "samples_per_cell must be at least 16");
    if (opts.component != 0 && !map.components)
        fail(ErrorCode::BadSpec, "component restriction requires a labeled map");

    TransferMatrix M;
    M.part = &part;
    M.samples_per_cell = samples_per_cell;
    M.seed = seed;
    M.opts = opts;
    M.row_of_cell.assign(static_cast<size_t>(part.cell_count()), -1);
    for (int32_t cell : part.mhat_cells) {
        if (opts.component != 0) {
            int c = map.components->component_of(part.center(cell), 0.0);
            if (c != opts.component) continue;
        }
        M.row_of_cell[static_cast<size_t>(cell)] = static_cast<int32_t>(M.rows.size());
        M.rows.push_back(cell);
    }

    // Stratified sub-grid per cell, jittered per sample.
    int s_axis = 1;
    while (std::pow(s_axis, map.dim) < static_cast<double>(samples_per_cell)) ++s_axis;

    M.row_ptr.push_back(0);
    std::vector<double> row_acc(static_cast<size_t>(part.cell_count()), 0.0);
    std::vector<long> touched;
    for (long r = 0; r < M.row_count(); ++r) {
        int32_t cell = M.rows[static_cast<size_t>(r)];
        Pt c = part.center(cell);
        Rng rng = derive_rng(seed, "ulam_rows", static_cast<uint64_t>(cell));
        long accepted = 0;
        touched.clear();
        for (long k = 0; k < samples_per_cell; ++k) {
            long rem = k;
            Pt z;
            for (int a = 0; a < map.dim; ++a) {
                long sub = rem % s_axis;
                rem /= s_axis;
                double frac = (opts.jitter > 0.0)
                                  ? (static_cast<double>(sub) + opts.jitter * rng.uniform() +
                                     (1.0 - opts.jitter) * 0.5) /
                                        s_axis
                                  : (static_cast<double>(sub) + 0.5) / s_axis;
                z[a] = c[a] - 0.5 * part.width[a] + frac * part.width[a];
            }
            double btol = map.tol.root_tol * (1.0 + norm2(z));
            if (map.branch_boundary_distance(z) <= btol || map.region.boundary_distance(z) <= btol) {
                ++M.boundary_rejections;
                continue;
            }
            long dest = discrete_first_return(map, part, z, opts.n_max, nullptr);
            if (dest < 0) {
                ++M.overflow_samples;
                continue;
            }
            long dest_row = M.row_of_cell[static_cast<size_t>(dest)];
            if (dest_row < 0) {
                // Component-restricted build: return left the labeled cells.
                ++M.leaked_returns;
                continue;
            }
            if (row_acc[static_cast<size_t>(dest)] == 0.0) touched.push_back(dest);
            row_acc[static_cast<size_t>(dest)] += 1.0;
            ++accepted;
        }
        if (accepted < (samples_per_cell + 1) / 2) {
            // CellStarved: uniform redistribution, flagged.
            M.starved_rows.push_back(cell);
            for (long t : touched) row_acc[static_cast<size_t>(t)] = 0.0;
            double u = 1.0 / static_cast<double>(M.row_count());
            for (long rr = 0; rr < M.row_count(); ++rr) {
                M.col.push_back(static_cast<int32_t>(rr));
                M.val.push_back(u);
            }
        } else {
            std::sort(touched.begin(), touched.end());
            for (long t : touched) {
                M.col.push_back(M.row_of_cell[static_cast<size_t>(t)]);
                M.val.push_back(row_acc[static_cast<size_t>(t)] / static_cast<double>(accepted));
                row_acc[static_cast<size_t>(t)] = 0.0;
            }
        }
        M.row_ptr.push_back(static_cast<int64_t>(M.col.size()));
    }
    return M;
}

DensityResult invariant_density(const TransferMatrix& matrix, double tol, long max_iter) {
    const long n = matrix.row_count();
    if (n == 0) fail(ErrorCode::BadSpec, "matrix has no rows");
    std::vector<double> pi(static_cast<size_t>(n), 1.0 / static_cast<double>(n));
    std::vector<double> next(static_cast<size_t>(n));
    std::vector<double> diff(static_cast<size_t>(n));

    DensityResult res;
    double residual = 0.0;
    long it = 0;
    for (; it < max_iter; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (long r = 0; r < n; ++r) {
            double m = pi[static_cast<size_t>(r)];
            if (m == 0.0) continue;
            for (int64_t k = matrix.row_ptr[static_cast<size_t>(r)];
                 k < matrix.row_ptr[static_cast<size_t>(r) + 1]; ++k)
                next[static_cast<size_t>(matrix.col[static_cast<size_t>(k)])] +=
                    m * matrix.val[static_cast<size_t>(k)];
        }
        for (long i = 0; i < n; ++i)
            diff[static_cast<size_t>(i)] =
                std::fabs(next[static_cast<size_t>(i)] - pi[static_cast<size_t>(i)]);
        residual = kernels::sum(diff.data(), diff.size());
        pi.swap(next);
        res.residual_history.push_back(residual);
        if (residual < tol) {
            ++it;
            break;
        }
    }
    res.iterations = it;
    res.residual = residual;
    res.converged = residual < tol;

    double total = kernels::sum(pi.data(), pi.size());
    res.density = zero_density(*matrix.part);
    for (long r = 0; r < n; ++r)
        res.density.values[static_cast<size_t>(matrix.rows[static_cast<size_t>(r)])] =
            pi[static_cast<size_t>(r)] / total / matrix.part->cell_volume;
    return res;
}

GridDensity apply_pf(const TransferMatrix& matrix, const GridDensity& f) {
    if (f.part != matrix.part) fail(ErrorCode::PartitionMismatch, "density lives on a different partition");
    GridDensity out = zero_density(*matrix.part);
    const long n = matrix.row_count();
    for (long r = 0; r < n; ++r) {
        double v = f.values[static_cast<size_t>(matrix.rows[static_cast<size_t>(r)])];
        if (v == 0.0) continue;
        for (int64_t k = matrix.row_ptr[static_cast<size_t>(r)];
             k < matrix.row_ptr[static_cast<size_t>(r) + 1]; ++k) {
            long dest_row = matrix.col[static_cast<size_t>(k)];
            out.values[static_cast<size_t>(matrix.rows[static_cast<size_t>(dest_row)])] +=
                v * matrix.val[static_cast<size_t>(k)];
        }
    }
    return out;
}

ExtensionResult extend_density(const PiecewiseMap& map, const GridDensity& density_hat,
                               long n_levels) {
    const UlamPartition& part = *density_hat.part;
    ExtensionResult res;
    res.extended = density_hat;

    // Constant reciprocal determinants of the full affine branches.
    struct OtherBranch {
        const Branch* b;
        double g;
    };
    std::vector<OtherBranch> others;
    for (const Branch& b : map.branches) {
        if (b.is_local || !b.image_covers_region) continue;
        double det = 1.0;
        for (int a = 0; a < map.dim; ++a) det *= std::fabs(b.scale[a]);
        others.push_back({&b, 1.0 / det});
    }

    auto hhat_at = [&](const Pt& p) -> double {
        long cell = part.cell_of(p);
        if (cell < 0) fail(ErrorCode::InverseFailure, "pullback point left the partition");
        return density_hat.values[static_cast<size_t>(cell)];
    };

    // First-exit shell representatives: M-hat cell centers whose branch-1
    // preimage lies inside the region.
    std::vector<long> reps;
    for (int32_t cell : part.mhat_cells) {
        Pt c = part.center(cell);
        if (norm2(c) >= map.glue) continue;
        Pt pre = map.branch1_inverse(c);
        if (map.region.contains(pre)) reps.push_back(cell);
    }
    res.representatives = static_cast<long>(reps.size());
    if (reps.empty()) fail(ErrorCode::InverseFailure, "no first-exit shell cells found");

    std::vector<double> cell_sum(static_cast<size_t>(part.cell_count()), 0.0);
    std::vector<long> cell_cnt(static_cast<size_t>(part.cell_count()), 0);
    std::vector<double> level_mean(static_cast<size_t>(n_levels) + 1, 0.0);

    for (long rep : reps) {
        Pt cur = part.center(rep);
        double h = density_hat.values[static_cast<size_t>(rep)];
        for (long n = 1; n <= n_levels; ++n) {
            double pulled = 0.0;
            for (const OtherBranch& ob : others) {
                Pt pre = map.local_inverse(ob.b->index, cur, Interval{});
                pulled += hhat_at(pre) * ob.g;
            }
            Pt prev = map.branch1_inverse(cur);
            double det = std::fabs(map.local_det(prev));
            double value = det * (h - pulled);
            if (value < 0.0) {
                res.clamped_mass += -value;
                ++res.clamp_events;
                value = 0.0;
            }
            cur = prev;
            h = value;
            long cell = part.cell_of(cur);
            if (cell >= 0 && part.in_region[static_cast<size_t>(cell)]) {
                cell_sum[static_cast<size_t>(cell)] += value;
                cell_cnt[static_cast<size_t>(cell)] += 1;
            }
            level_mean[static_cast<size_t>(n)] += value;
            if (n >= std::max<long>(1, n_levels / 100)) {
                res.rep_radius.push_back(dist(cur, map.neutral_point));
                res.rep_value.push_back(value);
            }
        }
    }
    for (long n = 1; n <= n_levels; ++n)
        level_mean[static_cast<size_t>(n)] /= static_cast<double>(reps.size());

    for (long cell = 0; cell < part.cell_count(); ++cell) {
        if (!part.in_region[static_cast<size_t>(cell)]) continue;
        if (cell_cnt[static_cast<size_t>(cell)] > 0)
            res.extended.values[static_cast<size_t>(cell)] =
                cell_sum[static_cast<size_t>(cell)] / static_cast<double>(cell_cnt[static_cast<size_t>(cell)]);
        else
            ++res.unreached_region_cells;
    }

    // Blow-up fit over the deepest resolved radial decade.
    std::vector<double> lx, ly;
    for (size_t i = 0; i < res.rep_radius.size(); ++i) {
        if (res.rep_value[i] > 0.0 && res.rep_radius[i] > 0.0) {
            lx.push_back(std::log(res.rep_radius[i]));
            ly.push_back(std::log(res.rep_value[i]));
        }
    }
    if (lx.size() >= 8) {
        res.blowup_fit = ols_fit(lx, ly);
        res.blowup_slope = res.blowup_fit.slope;
    }

    // Partial masses (1-D: exact level widths from the region boundary orbit).
    if (map.dim == 1) {
        res.partial_mass.resize(static_cast<size_t>(n_levels) + 1, 0.0);
        double outer = map.region.radius;
        double acc = 0.0;
        Pt b = pt1(map.region.radius);
        for (long n = 1; n <= n_levels; ++n) {
            b = map.branch1_inverse(b);
            double inner = b[0];
            acc += level_mean[static_cast<size_t>(n)] * (outer - inner);
            res.partial_mass[static_cast<size_t>(n)] = acc;
            outer = inner;
        }
    }
    return res;
}

Classification classify_measure(const PiecewiseMap& map, const TailProfile& profile,
                                const GridDensity* density_hat, const ClassifyOptions& opts) {
    Classification c;
    c.margin = opts.margin;
    c.detect_fit = tail_exponent(profile, opts.detect_lo, opts.detect_hi);
    if (!(c.detect_fit.stderr_ < opts.margin / 2.0))
        fail(ErrorCode::InsufficientFit, "tail fit stderr too large for the requested margin");
    c.asymptotic_fit = tail_exponent(profile, opts.asymptotic_lo, opts.asymptotic_hi);
    c.rho_hat = c.detect_fit.rho_hat;
    c.rho_stderr = c.detect_fit.stderr_;
    if (c.rho_hat >= 1.0 + opts.margin) c.verdict = "Finite";
    else if (c.rho_hat <= 1.0 - opts.margin) c.verdict = "SigmaFinite";
    else c.verdict = "Indeterminate";

    c.kprime = map.region_preimage_count();
    c.hhat_sup = density_hat ? density_hat->sup_mhat() : 0.0;
    double tails = kernels::sum(profile.tail_volumes.data(), profile.tail_volumes.size());
    c.extended_mass_bound = c.hhat_sup * static_cast<double>(c.kprime - 1) * tails;
    c.residual_volume = profile.residual_volume;
    return c;
}

OrbitHistogram induced_orbit_histogram(const PiecewiseMap& map, const UlamPartition& part,
                                       long steps, long burn_in, uint64_t seed, double dither,
                                       long n_max) {
    OrbitHistogram oh;
    oh.density = zero_density(part);
    oh.steps = steps;

    // Start at the M-hat cell center farthest from the region.
    long start_cell = part.mhat_cells.back();
    Pt cur = part.center(start_cell);
    Rng rng = derive_rng(seed, "orbit_dither");

    std::vector<double> counts(static_cast<size_t>(part.cell_count()), 0.0);
    for (long k = 0; k < steps; ++k) {
        Pt next;
        long cell = discrete_first_return(map, part, cur, n_max, &next);
        if (cell < 0) {
            ++oh.forced_escapes;
            next = part.center(start_cell);
            cell = start_cell;
        }
        if (dither > 0.0) {
            Pt jig = next;
            for (int a = 0; a < map.dim; ++a) {
                double d = dither * (2.0 * rng.uniform() - 1.0);
                jig[a] = std::min(std::max(next[a] + d, part.box.lo[a]),
                                  part.box.hi[a] - 1e-12 * (part.box.hi[a] - part.box.lo[a]));
            }
            long jcell = part.cell_of(jig);
            if (jcell >= 0 && !part.in_region[static_cast<size_t>(jcell)]) {
                next = jig;
                cell = jcell;
            }
        }
        cur = next;
        if (k >= burn_in) counts[static_cast<size_t>(cell)] += 1.0;
    }
    double total = kernels::sum(counts.data(), counts.size());
    for (size_t i = 0; i < counts.size(); ++i)
        oh.density.values[i] = counts[i] / total / part.cell_volume;
    return oh;
}

}  // namespace acim
