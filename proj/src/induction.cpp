#include "acim/induction.hpp"

#include <cmath>

#include "acim/kernels.hpp"
#include "acim/rng.hpp"

namespace acim {

std::optional<long> escape_time(const PiecewiseMap& map, const Pt& x, long n_max) {
    if (!map.region.contains(x)) fail(ErrorCode::NotInRegion, "escape_time start outside the region");
    Pt p = x;
    for (long n = 1; n <= n_max; ++n) {
        map.step_local(p);  // the region sits inside branch 1
        if (!map.region.contains(p)) return n;
    }
    return std::nullopt;
}

ReturnSample first_return(const PiecewiseMap& map, const Pt& x, long n_max) {
    if (map.region.contains(x)) fail(ErrorCode::NotInRegion, "first_return start inside the region");
    map.branch_index(x);  // domain + boundary contract
    ReturnSample s;
    s.start = x;
    Pt p = x;
    double det_prod = map.step_with_det(p);
    long time = 1;
    while (map.region.contains(p)) {
        det_prod *= std::fabs(map.local_det(p));
        map.step_local(p);
        ++time;
        if (time > n_max) fail(ErrorCode::Overflow, "first_return exceeded n_max");
    }
    s.point = p;
    s.return_time = time;
    s.weight = 1.0 / det_prod;
    return s;
}

namespace {

// Rejection-samples one point of region (cap on attempts keeps pathological
// configs from spinning); returns attempts used via io parameter.
Pt sample_region_point(const PiecewiseMap& map, int component, Rng& rng, long& boundary_rejects) {
    const Region& reg = map.region;
    double lo[3], hi[3];
    for (int a = 0; a < map.dim; ++a) {
        lo[a] = std::max(map.domain.lo[a], reg.center[a] - reg.radius);
        hi[a] = std::min(map.domain.hi[a], reg.center[a] + reg.radius);
    }
    for (int attempt = 0; attempt < 100000; ++attempt) {
        Pt p;
        for (int a = 0; a < map.dim; ++a) p[a] = rng.uniform(lo[a], hi[a]);
        if (!reg.contains(p)) continue;
        double btol = map.tol.root_tol * (1.0 + norm2(p));
        if (reg.boundary_distance(p) <= btol) {
            ++boundary_rejects;
            continue;
        }
        if (component != 0) {
            if (!map.components) fail(ErrorCode::BadSpec, "map has no component labeling");
            int c = map.components->component_of(p, btol);
            if (c == 0) ++boundary_rejects;
            if (c != component) continue;
        }
        return p;
    }
    fail(ErrorCode::BadSpec, "region sampling failed to accept a point");
}

// Acceptance fraction of the region (and component) inside the sampling box,
// for the volume scale. Deterministic companion stream.
double region_volume_estimate(const PiecewiseMap& map, int component, uint64_t seed,
                              long n_probe = 2000000) {
    const Region& reg = map.region;
    double lo[3], hi[3];
    double box_vol = 1.0;
    for (int a = 0; a < map.dim; ++a) {
        lo[a] = std::max(map.domain.lo[a], reg.center[a] - reg.radius);
        hi[a] = std::min(map.domain.hi[a], reg.center[a] + reg.radius);
        box_vol *= hi[a] - lo[a];
    }
    Rng rng = derive_rng(seed, "region_volume");
    long inside = 0;
    for (long i = 0; i < n_probe; ++i) {
        Pt p;
        for (int a = 0; a < map.dim; ++a) p[a] = rng.uniform(lo[a], hi[a]);
        if (!reg.contains(p)) continue;
        if (component != 0) {
            int c = map.components->component_of(p, 0.0);
            if (c != component) continue;
        }
        ++inside;
    }
    return box_vol * static_cast<double>(inside) / static_cast<double>(n_probe);
}

bool kernel_eligible(const PiecewiseMap& map) {
    if (norm2_sq(map.region.center) != 0.0) return false;
    if (map.local_form == LocalForm::neutral2d) return true;
    return map.local_form == LocalForm::neutral1d && map.gamma == 2.0;
}

}  // namespace

TailProfile level_volumes(const PiecewiseMap& map, long n_max, long n_samples, uint64_t seed,
                          int component) {
    if (map.region.radius <= 0.0) fail(ErrorCode::NotInRegion, "map has an empty region");
    TailProfile prof;
    prof.n_max = n_max;
    prof.sample_count = n_samples;
    prof.seed = seed;
    prof.component = component;
    prof.region_volume = region_volume_estimate(map, component, seed);

    std::vector<long> hist(static_cast<size_t>(n_max) + 2, 0);

    const long chunk = 8192;
    std::vector<double> xs(chunk), ys(chunk);
    std::vector<int64_t> counts(chunk);
    const bool use_kernel = kernel_eligible(map);

    long done = 0;
    while (done < n_samples) {
        long batch = std::min(chunk, n_samples - done);
        for (long i = 0; i < batch; ++i) {
            Rng rng = derive_rng(seed, "level_samples", static_cast<uint64_t>(done + i));
            Pt p = sample_region_point(map, component, rng, prof.boundary_rejections);
            xs[static_cast<size_t>(i)] = p[0];
            ys[static_cast<size_t>(i)] = (map.dim >= 2) ? p[1] : 0.0;
        }
        if (use_kernel && map.dim == 2) {
            kernels::escape_steps_2d(xs.data(), ys.data(), static_cast<size_t>(batch),
                                     map.region.radius * map.region.radius, n_max, counts.data());
        } else if (use_kernel && map.dim == 1) {
            kernels::escape_steps_1d(xs.data(), static_cast<size_t>(batch), map.region.radius, n_max,
                                     counts.data());
        } else {
            for (long i = 0; i < batch; ++i) {
                Pt p;
                p[0] = xs[static_cast<size_t>(i)];
                if (map.dim >= 2) p[1] = ys[static_cast<size_t>(i)];
                auto et = escape_time(map, p, n_max);
                counts[static_cast<size_t>(i)] = et ? *et : n_max + 1;
            }
        }
        for (long i = 0; i < batch; ++i) ++hist[static_cast<size_t>(counts[static_cast<size_t>(i)])];
        done += batch;
    }

    prof.overflow_count = hist[static_cast<size_t>(n_max) + 1];
    const double scale = prof.region_volume / static_cast<double>(n_samples);
    prof.level_volumes.resize(static_cast<size_t>(n_max));
    prof.level_stderr.resize(static_cast<size_t>(n_max));
    prof.tail_volumes.resize(static_cast<size_t>(n_max));
    long cum = 0;
    for (long n = 1; n <= n_max; ++n) {
        long c = hist[static_cast<size_t>(n)];
        cum += c;
        double p_hat = static_cast<double>(c) / static_cast<double>(n_samples);
        prof.level_volumes[static_cast<size_t>(n - 1)] = scale * static_cast<double>(c);
        prof.level_stderr[static_cast<size_t>(n - 1)] =
            prof.region_volume *
            std::sqrt(std::max(0.0, p_hat * (1.0 - p_hat) / static_cast<double>(n_samples)));
        prof.tail_volumes[static_cast<size_t>(n - 1)] =
            scale * static_cast<double>(n_samples - cum);
    }
    prof.residual_volume = scale * static_cast<double>(prof.overflow_count);
    return prof;
}

TailFit tail_exponent(const TailProfile& profile, long window_lo, long window_hi) {
    if (window_lo < 1 || window_hi > profile.n_max || window_lo >= window_hi)
        fail(ErrorCode::EmptyWindow, "tail fit window empty or out of range");
    std::vector<double> lx, ly;
    for (long n = window_lo; n <= window_hi; ++n) {
        double t = profile.tail_volumes[static_cast<size_t>(n - 1)];
        if (!(t > 0.0)) fail(ErrorCode::NonPositiveTail, "tail volume not positive inside the window");
        lx.push_back(std::log(static_cast<double>(n)));
        ly.push_back(std::log(t));
    }
    TailFit f;
    f.line = ols_fit(lx, ly);
    f.rho_hat = -f.line.slope;
    f.stderr_ = f.line.slope_stderr;
    f.window_lo = window_lo;
    f.window_hi = window_hi;
    return f;
}

double expected_mean_return_time(const PiecewiseMap& map, const TailProfile& profile) {
    double g_sum = 0.0;
    for (const Branch& b : map.branches) {
        if (b.is_local || !b.image_covers_region) continue;
        double det = 1.0;
        for (int a = 0; a < map.dim; ++a) det *= std::fabs(b.scale[a]);
        g_sum += 1.0 / det;
    }
    double tail_sum = profile.region_volume + kernels::sum(profile.tail_volumes.data(),
                                                           profile.tail_volumes.size());
    double mhat_vol = map.domain.volume() - profile.region_volume;
    return 1.0 + g_sum * tail_sum / mhat_vol;
}

std::pair<double, long> empirical_mean_return_time(const PiecewiseMap& map, long n_samples,
                                                   long n_max, uint64_t seed) {
    double acc = 0.0;
    long overflows = 0;
    long accepted = 0;
    uint64_t idx = 0;
    while (accepted < n_samples) {
        Rng rng = derive_rng(seed, "mean_return", idx++);
        Pt p;
        bool ok = false;
        for (int attempt = 0; attempt < 1000 && !ok; ++attempt) {
            for (int a = 0; a < map.dim; ++a) p[a] = rng.uniform(map.domain.lo[a], map.domain.hi[a]);
            double btol = map.tol.root_tol * (1.0 + norm2(p));
            ok = !map.region.contains(p) && map.region.boundary_distance(p) > btol &&
                 map.branch_boundary_distance(p) > btol;
        }
        if (!ok) continue;
        try {
            acc += static_cast<double>(first_return(map, p, n_max).return_time);
            ++accepted;
        } catch (const Error& e) {
            if (e.code() == ErrorCode::Overflow) {
                ++overflows;
                ++accepted;  // count the start, not its unresolved time
            } else {
                throw;
            }
        }
    }
    return {acc / static_cast<double>(n_samples - overflows), overflows};
}

}  // namespace acim
