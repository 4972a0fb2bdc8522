#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "acim/induction.hpp"
#include "acim/map_model.hpp"

namespace acim {

class UlamPartition {
  public:
    Box box;
    int dim = 1;
    int resolution = 0;  // cells per axis
    double width[3] = {0, 0, 0};
    double cell_volume = 0.0;
    std::vector<uint8_t> in_region;         // cell center inside the region
    std::vector<uint8_t> straddle_region;   // corners disagree about the region
    std::vector<uint8_t> straddle_branch;   // corners lie in different branches
    std::vector<int32_t> mhat_of_cell;      // compact M-hat row index or -1
    std::vector<int32_t> mhat_cells;        // compact row -> cell id

    long cell_count() const { return static_cast<long>(in_region.size()); }
    long mhat_count() const { return static_cast<long>(mhat_cells.size()); }
    Pt center(long cell) const;
    long cell_of(const Pt& p) const;  // -1 outside the box
    double straddle_mass() const;
};

UlamPartition build_partition(const PiecewiseMap& map, const Box& box, int resolution);

struct GridDensity {
    const UlamPartition* part = nullptr;
    std::vector<double> values;  // one per cell; region cells carry extension values or 0

    double mass() const;
    double l1_norm() const;
    double sup_mhat() const;
};

GridDensity zero_density(const UlamPartition& part);

struct TransferOptions {
    double jitter = 1.0;  // 0 = midpoint stratification (exact for full affine branches)
    long n_max = 100000;
    int component = 0;  // restrict rows/returns to one labeled component
};

struct TransferMatrix {
    const UlamPartition* part = nullptr;
    std::vector<int64_t> row_ptr;  // per compact row (or component-restricted row set)
    std::vector<int32_t> col;
    std::vector<double> val;
    std::vector<int32_t> rows;  // cell ids of the rows (equals part->mhat_cells if unrestricted)
    std::vector<int32_t> row_of_cell;  // cell id -> row index or -1
    long samples_per_cell = 0;
    uint64_t seed = 0;
    TransferOptions opts;
    std::vector<int32_t> starved_rows;
    long overflow_samples = 0;
    long boundary_rejections = 0;
    long leaked_returns = 0;

    long row_count() const { return static_cast<long>(rows.size()); }
    double row_sum(long r) const;
};

TransferMatrix build_transfer(const PiecewiseMap& map, const UlamPartition& part,
                              long samples_per_cell, uint64_t seed,
                              const TransferOptions& opts = {});

struct DensityResult {
    GridDensity density;
    double residual = 0.0;
    long iterations = 0;
    bool converged = false;
    std::vector<double> residual_history;
};

// Leading left fixed vector of the row-stochastic matrix by power iteration,
// returned as a density with mass 1 on the matrix rows.
DensityResult invariant_density(const TransferMatrix& matrix, double tol, long max_iter);

// Density-side action of the discretized operator; preserves the integral.
GridDensity apply_pf(const TransferMatrix& matrix, const GridDensity& f);

struct ExtensionResult {
    GridDensity extended;   // hhat copied on M-hat cells, level values binned on region cells
    double clamped_mass = 0.0;
    long clamp_events = 0;
    long representatives = 0;
    long unreached_region_cells = 0;
    LineFit blowup_fit;           // log h vs log |x|
    double blowup_slope = 0.0;
    std::vector<double> partial_mass;  // cumulative integral over the first n levels (1-D)
    std::vector<double> rep_radius;    // fit sample radii
    std::vector<double> rep_value;     // fit sample densities
};

// Pulls the induced density back onto the region level sets along backward
// orbits of the first-exit shell's cell centers.
ExtensionResult extend_density(const PiecewiseMap& map, const GridDensity& density_hat,
                               long n_levels);

struct ClassifyOptions {
    double margin = 0.15;
    long detect_lo = 8, detect_hi = 100;        // window for the verdict fit
    long asymptotic_lo = 100, asymptotic_hi = 1000;  // reported consistency fit
};

struct Classification {
    std::string verdict;  // Finite | SigmaFinite | Indeterminate
    double rho_hat = 0.0;
    double rho_stderr = 0.0;
    double margin = 0.0;
    TailFit detect_fit;
    TailFit asymptotic_fit;
    double hhat_sup = 0.0;
    int kprime = 0;
    double extended_mass_bound = 0.0;  // hhat_sup * (K'-1) * sum of tails
    double residual_volume = 0.0;
};

Classification classify_measure(const PiecewiseMap& map, const TailProfile& profile,
                                const GridDensity* density_hat, const ClassifyOptions& opts);

struct OrbitHistogram {
    GridDensity density;
    long steps = 0;
    long forced_escapes = 0;
};

// Long-orbit oracle for the induced map: histogram of first-return iterates
// over M-hat cells. A seeded dither (default 1e-7, far below a cell width)
// breaks floating-point orbit lattices; sojourns past n_max force a reset to
// the start cell (counted).
OrbitHistogram induced_orbit_histogram(const PiecewiseMap& map, const UlamPartition& part,
                                       long steps, long burn_in, uint64_t seed,
                                       double dither = 1e-7, long n_max = 100000);

}  // namespace acim
