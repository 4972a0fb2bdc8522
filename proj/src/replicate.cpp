#include "acim/replicate.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "acim/artifacts.hpp"
#include "acim/assumption_audit.hpp"
#include "acim/asymptotics.hpp"
#include "acim/example_maps.hpp"
#include "acim/induction.hpp"
#include "acim/kernels.hpp"
#include "acim/quasi_holder.hpp"
#include "acim/rng.hpp"
#include "acim/transfer.hpp"

namespace acim {

namespace {

CheckRow row_abs(const std::string& metric, double observed, double expected, double tol) {
    return {metric, expected, observed, tol, std::fabs(observed - expected) <= tol};
}

CheckRow row_below(const std::string& metric, double observed, double bound) {
    return {metric, bound, observed, 0.0, observed < bound};
}

CheckRow row_at_least(const std::string& metric, double observed, double bound) {
    return {metric, bound, observed, 0.0, observed >= bound};
}

CheckRow row_flag(const std::string& metric, bool ok) {
    return {metric, 1.0, ok ? 1.0 : 0.0, 0.0, ok};
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

// Shared fixtures built once and reused across criteria.
struct Fixtures {
    uint64_t seed;
    PiecewiseMap map1d;
    UlamPartition part256;
    UlamPartition part512;
    TransferMatrix matrix256;
    TransferMatrix matrix512;
    DensityResult inv256;
    DensityResult inv512;

    explicit Fixtures(uint64_t s) : seed(s), map1d(neutral_1d(default_spec("neutral1d"))) {
        part256 = build_partition(map1d, map1d.domain, 256);
        part512 = build_partition(map1d, map1d.domain, 512);
        matrix256 = build_transfer(map1d, part256, 1024, seed);
        matrix512 = build_transfer(map1d, part512, 1024, seed);
        inv256 = invariant_density(matrix256, 1e-13, 50000);
        inv512 = invariant_density(matrix512, 1e-13, 50000);
    }
};

CriterionResult criterion1(uint64_t) {
    CriterionResult c{1, "backward-radius law on the invariant axes", {}, 0, 5.0};
    Timer t;
    PiecewiseMap map = example1(default_spec("1"));
    const long n = 10000;
    BackwardOrbit ox = backward_orbit(map, pt2(0.2, 0.0), n);
    BackwardOrbit oy = backward_orbit(map, pt2(0.0, 0.2), n);
    double rx = ox.radii.back(), ry = oy.radii.back();
    c.rows.push_back(row_abs("x_axis 2n|x_n|^2", 2.0 * n * rx * rx, 1.0, 0.05));
    c.rows.push_back(row_abs("y_axis 4n|x_n|^2", 4.0 * n * ry * ry, 1.0, 0.05));
    c.elapsed_s = t.seconds();
    return c;
}

CriterionResult criterion2(uint64_t) {
    CriterionResult c{2, "determinant-decay exponents and unbounded distortion", {}, 0, 10.0};
    Timer t;
    PiecewiseMap map = example1(default_spec("1"));
    const long n = 10000, lo = 1000;
    BackwardOrbit ox = backward_orbit(map, pt2(0.2, 0.0), n);
    BackwardOrbit oy = backward_orbit(map, pt2(0.0, 0.2), n);
    c.rows.push_back(row_abs("x_axis det slope", det_product_exponent(ox, lo, n).exponent, -2.5, 0.1));
    c.rows.push_back(row_abs("y_axis det slope", det_product_exponent(oy, lo, n).exponent, -1.75, 0.1));
    DistortionCurve curve = distortion_ratio_curve(map, pt2(0.2, 0.0), pt2(0.0, 0.2), n, lo, n);
    c.rows.push_back(row_abs("distortion ratio slope", curve.slope, 0.75, 0.1));
    c.elapsed_s = t.seconds();
    return c;
}

CriterionResult criterion3(uint64_t) {
    CriterionResult c{3, "radius-recursion and product-exponent harness", {}, 0, 30.0};
    Timer t;
    const long n = 10000, lo = 1000;
    struct Combo {
        double gamma, coeff, t0;
    };
    for (const Combo combo : {Combo{2, 1, 0.2}, Combo{1, 2, 0.05}, Combo{1, 1, 0.05}}) {
        std::vector<double> ts = recursion_radii(combo.gamma, combo.coeff, combo.t0, n);
        double val = std::pow(combo.gamma * combo.coeff * n, 1.0 / combo.gamma) * ts.back();
        std::ostringstream tag;
        tag << "(gamma=" << combo.gamma << ",C=" << combo.coeff << ")";
        c.rows.push_back(row_abs(tag.str() + " scaled radius", val, 1.0, 0.03));
        for (double cp : {1.0, 3.0, 5.0}) {
            std::vector<double> lx, ly;
            double acc = 0.0;
            for (long k = 1; k <= n; ++k) {
                acc += std::log(1.0 - cp * std::pow(ts[static_cast<size_t>(k)], combo.gamma));
                if (k >= lo) {
                    lx.push_back(std::log(static_cast<double>(k)));
                    ly.push_back(acc);
                }
            }
            double target = -cp / (combo.gamma * combo.coeff);
            double slope = ols_fit(lx, ly).slope;
            c.rows.push_back(
                row_abs(tag.str() + " C'=" + format_double(cp) + " product slope", slope, target,
                        0.05 * std::fabs(target)));
        }
    }
    c.elapsed_s = t.seconds();
    return c;
}

CriterionResult criterion4(uint64_t seed) {
    CriterionResult c{4, "finite vs sigma-finite classification of the two components", {}, 0, 120.0};
    Timer t;
    PiecewiseMap map = example4(default_spec("4"));
    UlamPartition part = build_partition(map, map.domain, 64);
    TransferMatrix matrix = build_transfer(map, part, 64, seed);
    DensityResult inv = invariant_density(matrix, 1e-10, 20000);

    TailProfile prof1 = level_volumes(map, 100000, 1000000, seed, 1);
    ClassifyOptions opt1;
    opt1.margin = 0.15;
    opt1.detect_lo = 100;
    opt1.detect_hi = 1000;
    opt1.asymptotic_lo = 100;
    opt1.asymptotic_hi = 1000;
    Classification cls1 = classify_measure(map, prof1, &inv.density, opt1);
    c.rows.push_back(row_flag("component 1 verdict Finite", cls1.verdict == "Finite"));
    c.rows.push_back(row_at_least("component 1 tail exponent", cls1.rho_hat, 1.3));

    TailProfile prof2 = level_volumes(map, 100000, 1000000, seed, 2);
    ClassifyOptions opt2;
    opt2.margin = 0.15;
    opt2.detect_lo = 8;
    opt2.detect_hi = 100;
    opt2.asymptotic_lo = 100;
    opt2.asymptotic_hi = 1000;
    Classification cls2 = classify_measure(map, prof2, &inv.density, opt2);
    c.rows.push_back(row_flag("component 2 verdict SigmaFinite", cls2.verdict == "SigmaFinite"));
    c.rows.push_back(
        row_abs("component 2 asymptotic exponent", cls2.asymptotic_fit.rho_hat, 1.0, 0.15));
    c.elapsed_s = t.seconds();
    return c;
}

CriterionResult criterion5(const Fixtures& fx) {
    CriterionResult c{5, "transfer-operator suite on the induced interval map", {}, 0, 180.0};
    Timer t;

    double worst_row = 0.0;
    for (long r = 0; r < fx.matrix256.row_count(); ++r)
        worst_row = std::max(worst_row, std::fabs(fx.matrix256.row_sum(r) - 1.0));
    for (long r = 0; r < fx.matrix512.row_count(); ++r)
        worst_row = std::max(worst_row, std::fabs(fx.matrix512.row_sum(r) - 1.0));
    c.rows.push_back(row_below("max |row sum - 1|", worst_row, 1e-12 * (1.0 + 1e-6)));

    // Integral preservation over random test functions.
    double worst_int = 0.0;
    std::vector<GridDensity> fam = default_test_family(fx.part256, 80, 20, fx.seed ^ 0x5u);
    for (const GridDensity& f : fam) {
        GridDensity pf = apply_pf(fx.matrix256, f);
        worst_int = std::max(worst_int, std::fabs(pf.mass() - f.mass()));
    }
    c.rows.push_back(row_below("max integral drift of apply_pf", worst_int, 1e-12));

    OrbitHistogram orbit = induced_orbit_histogram(fx.map1d, fx.part256, 10000000, 1000, fx.seed);
    double l1 = 0.0;
    for (int32_t cell : fx.part256.mhat_cells)
        l1 += std::fabs(fx.inv256.density.values[static_cast<size_t>(cell)] -
                        orbit.density.values[static_cast<size_t>(cell)]) *
              fx.part256.cell_volume;
    c.rows.push_back(row_below("L1(Ulam density, orbit histogram)", l1, 0.05));

    // Refinement 256 -> 512: project the fine density onto the coarse cells.
    double l1r = 0.0;
    for (int32_t cell : fx.part256.mhat_cells) {
        Pt ctr = fx.part256.center(cell);
        Pt left = ctr, right = ctr;
        left[0] -= 0.25 * fx.part256.width[0];
        right[0] += 0.25 * fx.part256.width[0];
        long f1 = fx.part512.cell_of(left), f2 = fx.part512.cell_of(right);
        double fine = 0.5 * (fx.inv512.density.values[static_cast<size_t>(f1)] +
                             fx.inv512.density.values[static_cast<size_t>(f2)]);
        l1r += std::fabs(fine - fx.inv256.density.values[static_cast<size_t>(cell)]) *
               fx.part256.cell_volume;
    }
    c.rows.push_back(row_below("L1 refinement drift 256->512", l1r, 0.1));
    c.rows.push_back(row_flag("power iteration converged", fx.inv256.converged && fx.inv512.converged));
    c.elapsed_s = t.seconds();
    return c;
}

CriterionResult criterion6(const Fixtures& fx) {
    CriterionResult c{6, "density extension into the neutral region", {}, 0, 60.0};
    Timer t;
    ExtensionResult ext = extend_density(fx.map1d, fx.inv256.density, 4000);
    c.rows.push_back(row_abs("blow-up slope toward the neutral point", ext.blowup_slope, -2.0, 0.3));
    double max_diff = 0.0;
    for (int32_t cell : fx.part256.mhat_cells)
        max_diff = std::max(max_diff, std::fabs(ext.extended.values[static_cast<size_t>(cell)] -
                                                fx.inv256.density.values[static_cast<size_t>(cell)]));
    c.rows.push_back(CheckRow{"extension preserves the induced density", 0.0, max_diff, 0.0,
                              max_diff == 0.0});
    bool monotone = true;
    for (size_t n = 2; n < ext.partial_mass.size(); ++n)
        if (ext.partial_mass[n] < ext.partial_mass[n - 1] - 1e-15) monotone = false;
    c.rows.push_back(row_flag("partial masses non-decreasing", monotone));
    c.elapsed_s = t.seconds();
    return c;
}

CriterionResult criterion7(uint64_t seed) {
    CriterionResult c{7, "quasi-Holder oscillation and seminorm suite", {}, 0, 60.0};
    Timer t;
    QuasiHolderConfig qc;
    qc.alpha = 0.5;
    qc.eps0 = 0.1;
    qc.k_max = 6;

    {
        Box box;
        box.dim = 2;
        box.lo = pt2(0.0, 0.0);
        box.hi = pt2(1.0, 1.0);
        UlamPartition part = build_plain_partition(box, 512);
        GridDensity half = zero_density(part);
        for (long cell = 0; cell < part.cell_count(); ++cell)
            half.values[static_cast<size_t>(cell)] = part.center(cell)[0] < 0.5 ? 1.0 : 0.0;
        double sn = seminorm_alpha(half, qc);
        double expected = 2.0 * std::pow(qc.eps0, 1.0 - qc.alpha);
        c.rows.push_back(row_abs("half-plane indicator seminorm", sn, expected, 0.10 * expected));
    }

    Box box;
    box.dim = 2;
    box.lo = pt2(0.0, 0.0);
    box.hi = pt2(1.0, 1.0);
    UlamPartition part = build_plain_partition(box, 256);
    std::vector<GridDensity> fam = default_test_family(part, 150, 50, seed ^ 0x77u);

    long viol_add = 0;
    const double eps_probe = 0.05;
    for (int k = 0; k < 100; ++k) {
        const GridDensity& f = fam[static_cast<size_t>(k)];
        const GridDensity& g = fam[static_cast<size_t>(k + 100)];
        GridDensity sum_fg = f;
        for (size_t i = 0; i < sum_fg.values.size(); ++i) sum_fg.values[i] += g.values[i];
        GridDensity of = oscillation(f, eps_probe);
        GridDensity og = oscillation(g, eps_probe);
        GridDensity os = oscillation(sum_fg, eps_probe);
        for (size_t i = 0; i < os.values.size(); ++i)
            if (os.values[i] > of.values[i] + og.values[i] + 1e-12) ++viol_add;
    }
    c.rows.push_back(row_below("subadditivity violations", static_cast<double>(viol_add), 0.5));

    long viol_prod = 0;
    Rng rng = derive_rng(seed, "stencil_checks");
    for (int k = 0; k < 100; ++k) {
        const GridDensity& f = fam[static_cast<size_t>(k)];
        const GridDensity& g = fam[static_cast<size_t>(199 - k)];
        Pt ctr = pt2(rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9));
        double rad = rng.uniform(0.02, 0.2);
        double fmax = -1e300, fmin = 1e300, gmax = -1e300, gmin = 1e300, pmax = -1e300, pmin = 1e300;
        for (long cell = 0; cell < part.cell_count(); ++cell) {
            if (dist(part.center(cell), ctr) > rad) continue;
            double fv = f.values[static_cast<size_t>(cell)];
            double gv = g.values[static_cast<size_t>(cell)];
            fmax = std::max(fmax, fv);
            fmin = std::min(fmin, fv);
            gmax = std::max(gmax, gv);
            gmin = std::min(gmin, gv);
            pmax = std::max(pmax, fv * gv);
            pmin = std::min(pmin, fv * gv);
        }
        if (fmax < fmin) continue;  // empty stencil
        double lhs = pmax - pmin;
        double rhs = (fmax - fmin) * gmax + (gmax - gmin) * fmin;
        if (lhs > rhs + 1e-12) ++viol_prod;
    }
    c.rows.push_back(row_below("product-rule violations", static_cast<double>(viol_prod), 0.5));

    long viol_sup = 0;
    for (int k = 0; k < 100; ++k) {
        const GridDensity& f = fam[static_cast<size_t>(k + 50)];
        double fmax = 0.0;
        for (double v : f.values) fmax = std::max(fmax, std::fabs(v));
        double bound = norm_alpha(f, qc) / (unit_ball_volume(2) * qc.eps0 * qc.eps0);
        if (fmax > bound + 1e-12) ++viol_sup;
    }
    c.rows.push_back(row_below("sup-bound violations", static_cast<double>(viol_sup), 0.5));
    c.elapsed_s = t.seconds();
    return c;
}

CriterionResult criterion8(const Fixtures& fx) {
    CriterionResult c{8, "empirical Lasota-Yorke coefficients and iterate bound", {}, 0, 120.0};
    Timer t;
    QuasiHolderConfig qc;
    qc.alpha = 0.5;
    qc.eps0 = 0.1;
    qc.k_max = 6;
    std::vector<GridDensity> fam = default_test_family(fx.part256, 64, 16, fx.seed);
    LYReport rep = ly_estimate(fx.matrix256, fam, qc);
    c.rows.push_back(row_below("eta_hat", rep.eta_hat, 1.0));

    std::vector<GridDensity> fresh = default_test_family(fx.part256, 7, 3, fx.seed ^ 0x9e3779b9u);
    double worst_gap = -1e300;
    for (const GridDensity& f : fresh) {
        double bound = seminorm_alpha(f, qc) + rep.d_hat * f.l1_norm() / (1.0 - rep.eta_hat) + 1e-6;
        GridDensity g = f;
        for (int n = 1; n <= 20; ++n) {
            g = apply_pf(fx.matrix256, g);
            worst_gap = std::max(worst_gap, seminorm_alpha(g, qc) - bound);
        }
    }
    c.rows.push_back(row_below("max |P^n f|_alpha excess over the geometric bound", worst_gap, 0.0));
    c.elapsed_s = t.seconds();
    return c;
}

CriterionResult criterion9(uint64_t seed, const std::string& out_dir) {
    CriterionResult c{9, "structural checks and determinism", {}, 0, 60.0};
    Timer t;
    PiecewiseMap map4 = example4(default_spec("4"));
    Rng rng = derive_rng(seed, "parabola");
    double worst_parabola = 0.0;
    for (int k = 0; k < 10000; ++k) {
        double x = rng.uniform(-0.6, 0.6) * map4.glue;
        Pt z = pt2(x, x * x);
        Pt tz = z;
        map4.step_local(tz);
        worst_parabola = std::max(worst_parabola, std::fabs(tz[1] - tz[0] * tz[0]));
    }
    c.rows.push_back(row_below("max |T2 - T1^2| on the invariant parabola", worst_parabola, 1e-12));

    PiecewiseMap map1 = example1(default_spec("1"));
    Rng rng2 = derive_rng(seed, "cone_pairs");
    double worst_ratio = 0.0;
    long made = 0;
    while (made < 1000) {
        double zx = rng2.uniform(-0.21, 0.21), zy = rng2.uniform(-0.21, 0.21);
        double r = std::sqrt(zx * zx + zy * zy);
        if (r < 1e-6 || r > 0.21) continue;
        ConeReport rep = cone_check(map1, pt2(zx, zy), pt2(zx, zy), pt2(-zy, zx));
        worst_ratio = std::max(worst_ratio, rep.det_ratio);
        ++made;
    }
    c.rows.push_back(row_below("max radial/tangential sine-contraction ratio", worst_ratio,
                               1.0 + 1e-12));

    ExpansionAudit audit = expansion_audit(map1, 32, 0.004, 128, derive_rng(seed, "c9exp").next());
    c.rows.push_back(row_below("contraction coefficient sup over the audit grid", audit.s_hat, 1.0));

    // Determinism: an identical seeded pipeline twice, byte-compared.
    auto run_once = [&](const std::string& dir) {
        nlohmann::json j;
        j["map"] = {{"example_id", "neutral1d"}, {"r0", 0.5}, {"region_radius", 0.25}, {"gamma", 2.0}};
        j["seed"] = 424242;
        j["out"] = dir;
        j["induction"] = {{"n_max", 2000}, {"n_samples", 20000}};
        ExperimentConfig cfg = parse_config(j);
        run_command(cfg, "induce-stats");
        std::ifstream in(dir + "/tails.csv", std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    std::string base = out_dir.empty() ? std::string("out") : out_dir;
    std::string a = run_once(base + "/determinism_a");
    std::string b = run_once(base + "/determinism_b");
    c.rows.push_back(row_flag("byte-identical artifacts for equal seeds", !a.empty() && a == b));
    c.elapsed_s = t.seconds();
    return c;
}

}  // namespace

ReplicateSummary replicate_paper(const std::string& out_dir, uint64_t seed) {
    ReplicateSummary summary;
    summary.criteria.push_back(criterion1(seed));
    summary.criteria.push_back(criterion2(seed));
    summary.criteria.push_back(criterion3(seed));
    summary.criteria.push_back(criterion4(seed));
    Fixtures fx(seed);
    summary.criteria.push_back(criterion5(fx));
    summary.criteria.push_back(criterion6(fx));
    summary.criteria.push_back(criterion7(seed));
    summary.criteria.push_back(criterion8(fx));
    summary.criteria.push_back(criterion9(seed, out_dir));

    if (!out_dir.empty()) {
        std::ostringstream os;
        os << "criterion,metric,expected,observed,tolerance,pass\n";
        for (const CriterionResult& c : summary.criteria)
            for (const CheckRow& r : c.rows)
                os << c.id << ",\"" << r.metric << "\"," << format_double(r.expected) << ','
                   << format_double(r.observed) << ',' << format_double(r.tolerance) << ','
                   << (r.pass ? 1 : 0) << "\n";
        ArtifactWriter w(out_dir, "replicate", seed);
        w.write_text("replicate.csv", os.str());
    }
    return summary;
}

void print_summary(const ReplicateSummary& s, std::ostream& os) {
    for (const CriterionResult& c : s.criteria) {
        os << (c.passed() ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << ") ["
           << c.elapsed_s << " s, budget " << c.budget_s << " s]\n";
        for (const CheckRow& r : c.rows)
            os << "    " << (r.pass ? "ok  " : "FAIL") << " " << r.metric
               << ": observed=" << r.observed << " expected=" << r.expected
               << (r.tolerance > 0 ? " tol=" + std::to_string(r.tolerance) : "") << "\n";
    }
    os << (s.all_passed() ? "ALL CRITERIA PASSED" : "CRITERIA FAILED") << "\n";
}

}  // namespace acim
