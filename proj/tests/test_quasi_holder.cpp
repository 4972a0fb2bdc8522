#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "acim/example_maps.hpp"
#include "acim/quasi_holder.hpp"
#include "acim/rng.hpp"

using namespace acim;

namespace {

UlamPartition unit_square(int res) {
    Box box;
    box.dim = 2;
    box.lo = pt2(0.0, 0.0);
    box.hi = pt2(1.0, 1.0);
    return build_plain_partition(box, res);
}

// Brute-force oscillation oracle over the eps stencil.
double osc_at_oracle(const GridDensity& f, long cell, double eps) {
    const UlamPartition& p = *f.part;
    Pt c = p.center(cell);
    double hi = -1e300, lo = 1e300;
    for (long q = 0; q < p.cell_count(); ++q) {
        if (p.in_region[static_cast<size_t>(q)]) continue;
        if (dist(p.center(q), c) > eps) continue;
        hi = std::max(hi, f.values[static_cast<size_t>(q)]);
        lo = std::min(lo, f.values[static_cast<size_t>(q)]);
    }
    return hi - lo;
}

}  // namespace

TEST_CASE("oscillation field basics") {
    UlamPartition part = unit_square(64);
    GridDensity f = zero_density(part);
    for (auto& v : f.values) v = 3.25;
    GridDensity osc = oscillation(f, 0.1);
    for (double v : osc.values) CHECK(v == 0.0);

    // half-space indicator: the oscillation is 1 on the eps-strip
    for (long c = 0; c < part.cell_count(); ++c)
        f.values[static_cast<size_t>(c)] = part.center(c)[0] < 0.5 ? 1.0 : 0.0;
    double eps = 0.1;
    osc = oscillation(f, eps);
    for (long c = 0; c < part.cell_count(); ++c) {
        double d = std::fabs(part.center(c)[0] - 0.5);
        double v = osc.values[static_cast<size_t>(c)];
        if (d < eps - part.width[0]) CHECK(v == 1.0);
        if (d > eps + part.width[0]) CHECK(v == 0.0);
    }

    CHECK_THROWS_AS((void)oscillation(f, 0.5 * part.width[0]), Error);
}

TEST_CASE("oscillation matches the brute-force stencil oracle") {
    UlamPartition part = unit_square(48);
    Rng rng(7);
    std::vector<GridDensity> fam = default_test_family(part, 4, 2, 99);
    for (const GridDensity& f : fam)
        for (double eps : {0.05, 0.11, 0.2}) {
            GridDensity osc = oscillation(f, eps);
            for (int probe = 0; probe < 50; ++probe) {
                long cell = static_cast<long>(rng.below(static_cast<uint64_t>(part.cell_count())));
                CHECK(osc.values[static_cast<size_t>(cell)] ==
                      doctest::Approx(osc_at_oracle(f, cell, eps)).epsilon(1e-12));
            }
        }
}

TEST_CASE("oscillation with a region mask") {
    PiecewiseMap m = example1(default_spec("1"));
    UlamPartition part = build_partition(m, m.domain, 64);
    GridDensity f = zero_density(part);
    Rng rng(13);
    for (int32_t cell : part.mhat_cells)
        f.values[static_cast<size_t>(cell)] = rng.uniform(0.0, 2.0);
    GridDensity osc = oscillation(f, 0.15);
    Rng rng2(14);
    for (int probe = 0; probe < 100; ++probe) {
        long cell = static_cast<long>(rng2.below(static_cast<uint64_t>(part.cell_count())));
        if (part.in_region[static_cast<size_t>(cell)]) {
            CHECK(osc.values[static_cast<size_t>(cell)] == 0.0);
        } else {
            CHECK(osc.values[static_cast<size_t>(cell)] ==
                  doctest::Approx(osc_at_oracle(f, cell, 0.15)).epsilon(1e-12));
        }
    }
}

TEST_CASE("seminorm of the half-plane indicator and homogeneity") {
    UlamPartition part = unit_square(512);
    GridDensity f = zero_density(part);
    for (long c = 0; c < part.cell_count(); ++c)
        f.values[static_cast<size_t>(c)] = part.center(c)[0] < 0.5 ? 1.0 : 0.0;
    QuasiHolderConfig cfg;
    cfg.alpha = 0.5;
    cfg.eps0 = 0.1;
    double sn = seminorm_alpha(f, cfg);
    double expected = 2.0 * std::pow(cfg.eps0, 0.5);
    CHECK(std::fabs(sn - expected) < 0.1 * expected);

    CHECK(norm_alpha(f, cfg) == doctest::Approx(0.5 + sn).epsilon(1e-12));

    GridDensity g = f;
    for (auto& v : g.values) v *= -3.7;
    CHECK(seminorm_alpha(g, cfg) == doctest::Approx(3.7 * sn).epsilon(1e-12));

    GridDensity constant = zero_density(part);
    for (auto& v : constant.values) v = 1.0;
    CHECK(seminorm_alpha(constant, cfg) == 0.0);
    CHECK(norm_alpha(constant, cfg) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("seminorm never decreases when coarser radii are appended") {
    UlamPartition part = unit_square(128);
    std::vector<GridDensity> fam = default_test_family(part, 6, 2, 1234);
    for (const GridDensity& f : fam) {
        QuasiHolderConfig small;
        small.alpha = 0.5;
        small.eps0 = 0.05;
        small.k_max = 4;
        QuasiHolderConfig big = small;
        big.eps0 = 0.1;
        big.k_max = 5;  // same floor, one coarser radius appended
        CHECK(seminorm_alpha(f, big) >= seminorm_alpha(f, small) - 1e-15);
    }
}

TEST_CASE("eps grid validation") {
    UlamPartition part = unit_square(16);
    QuasiHolderConfig cfg;
    cfg.eps0 = 0.01;  // below two cell widths of a 16-cell grid
    cfg.k_max = 3;
    GridDensity f = zero_density(part);
    CHECK_THROWS_AS((void)seminorm_alpha(f, cfg), Error);
    QuasiHolderConfig bad;
    bad.alpha = 1.5;
    CHECK_THROWS_AS((void)bad.eps_grid(part), Error);
}

TEST_CASE("empirical Lasota-Yorke coefficients") {
    // Exact-Lebesgue surrogate: constants map to constants, eta and D vanish.
    PiecewiseMap fold = surrogate_only(1, 3);
    UlamPartition part = build_partition(fold, fold.domain, 243);
    TransferOptions opts;
    opts.jitter = 0.0;
    TransferMatrix M = build_transfer(fold, part, 1026, 5, opts);
    QuasiHolderConfig cfg;
    cfg.alpha = 0.5;
    cfg.eps0 = 0.1;

    std::vector<GridDensity> constants;
    for (double level : {0.5, 1.0, 2.0}) {
        GridDensity f = zero_density(part);
        for (int32_t cell : part.mhat_cells) f.values[static_cast<size_t>(cell)] = level;
        constants.push_back(std::move(f));
    }
    LYReport rep = ly_estimate(M, constants, cfg);
    CHECK(rep.eta_hat == 0.0);
    CHECK(rep.d_hat <= 1e-12);

    std::vector<GridDensity> empty;
    CHECK_THROWS_AS((void)ly_estimate(M, empty, cfg), Error);
}

TEST_CASE("estimated pair dominates every family row") {
    PiecewiseMap m = neutral_1d(default_spec("neutral1d"));
    UlamPartition part = build_partition(m, m.domain, 256);
    TransferMatrix M = build_transfer(m, part, 512, 66);
    QuasiHolderConfig cfg;
    cfg.alpha = 0.5;
    cfg.eps0 = 0.1;
    std::vector<GridDensity> fam = default_test_family(part, 32, 8, 777);
    LYReport rep = ly_estimate(M, fam, cfg);
    for (const LYRow& r : rep.rows)
        CHECK(r.pf_alpha <= rep.eta_hat * r.f_alpha + rep.d_hat * r.f_l1 + 1e-9);
    CHECK(rep.eta_hat < 1.0);
}
