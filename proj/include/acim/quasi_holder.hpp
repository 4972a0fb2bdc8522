#pragma once

#include <string>
#include <vector>

#include "acim/transfer.hpp"

namespace acim {

struct QuasiHolderConfig {
    double alpha = 0.5;
    double eps0 = 0.1;
    int k_max = 6;

    // Geometric radius grid eps0 * 2^-k clipped below at two cell widths.
    std::vector<double> eps_grid(const UlamPartition& part) const;
};

// Partition of a plain box with no region hole (quasi-Holder test domains).
UlamPartition build_plain_partition(const Box& box, int resolution);

// Per-cell max-minus-min of f over cells whose centers lie within eps of the
// target cell center (region cells masked out of both stencil and output).
GridDensity oscillation(const GridDensity& f, double eps);

double seminorm_alpha(const GridDensity& f, const QuasiHolderConfig& cfg);
double norm_alpha(const GridDensity& f, const QuasiHolderConfig& cfg);

struct LYRow {
    std::string id;
    double f_alpha = 0.0;
    double f_l1 = 0.0;
    double pf_alpha = 0.0;
};

struct LYReport {
    double eta_hat = 0.0;
    double d_hat = 0.0;
    std::string family;
    std::vector<LYRow> rows;
};

// Random nonnegative test functions: smoothed indicator bumps plus
// trigonometric profiles, supported on the M-hat cells.
std::vector<GridDensity> default_test_family(const UlamPartition& part, int n_indicators,
                                             int n_trig, uint64_t seed);

// Empirical Lasota-Yorke coefficients: the smallest-eta pair on the grid of
// candidate etas (D implied by the binding row) minimizing the family-average
// implied bound eta*mean|f|_a + D*mean||f||_1.
LYReport ly_estimate(const TransferMatrix& matrix, const std::vector<GridDensity>& family,
                     const QuasiHolderConfig& cfg);

}  // namespace acim
