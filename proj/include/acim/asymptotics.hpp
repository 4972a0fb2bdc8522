#pragma once

#include <vector>

#include "acim/fit.hpp"
#include "acim/map_model.hpp"

namespace acim {

// Backward orbit under repeated branch-1 inversion, with per-step derivative
// data and the accumulated inverse-cocycle norms.
struct BackwardOrbit {
    Pt base;
    long length = 0;
    std::vector<Pt> points;              // x_1 .. x_n
    std::vector<double> radii;           // |x_i - p|
    std::vector<double> step_det;        // |det DT(x_i)|
    std::vector<double> step_norm;       // op norm of DT(x_i)
    std::vector<double> step_inv_norm;   // op norm of DT(x_i)^-1
    std::vector<double> inv_det_product; // |det DT^{-n}| at the base, per n
    std::vector<double> inv_comp_norm;   // op norm of DT^{-n} at the base, per n
};

BackwardOrbit backward_orbit(const PiecewiseMap& map, const Pt& x, long n);
// Same along an arbitrary (affine) branch, for exponential-contrast checks.
BackwardOrbit backward_orbit_branch(const PiecewiseMap& map, int branch, const Pt& x, long n);

struct AsymptoticParams {
    double gamma = 2.0;
    double coeff = 1.0;  // C in the radius recursion
};

struct ExponentFit {
    double exponent = 0.0;  // fitted log-log slope
    double prefactor = 0.0;
    LineFit line;
};

// Least-squares fit of log r_n against log n over [window_lo, window_hi]
// (defaults to the final decade). Returns (beta_hat, coeff_hat).
ExponentFit radius_exponent(const BackwardOrbit& orbit, long window_lo = 0, long window_hi = 0);

// Fitted slope of log |det DT^{-n}| against log n.
ExponentFit det_product_exponent(const BackwardOrbit& orbit, long window_lo = 0, long window_hi = 0);

struct NormDecayReport {
    double slope = 0.0;
    bool power_law_ok = true;  // false when residuals reject a power law
    double max_abs_residual = 0.0;
};

NormDecayReport norm_decay_check(const BackwardOrbit& orbit, long window_lo = 0, long window_hi = 0);

struct DistortionCurve {
    std::vector<double> ratios;  // |det DT^{-n}(z2)| / |det DT^{-n}(z1)| per n
    double slope = 0.0;
    LineFit line;
};

DistortionCurve distortion_ratio_curve(const PiecewiseMap& map, const Pt& z1, const Pt& z2,
                                       long n_max, long window_lo = 0, long window_hi = 0);

struct ConeReport {
    double len_v = 0.0;
    double len_vp = 0.0;
    double det_ratio = 0.0;  // |det DT|_span| / (|DTv| |DTv'|), sine-contraction factor
};

ConeReport cone_check(const PiecewiseMap& map, const Pt& z, const Pt& v, const Pt& vp);

struct PairDistortionReport {
    bool admissible = true;
    long first_violation = 0;          // step of the first separation-bound failure
    double max_log_ratio = 0.0;        // max_n |log det DT^n(x_n)/det DT^n(y_n)|
    double theta_scaled_ratio = 0.0;   // max_log_ratio / d(x,y)^theta
};

PairDistortionReport pair_distortion_check(const PiecewiseMap& map, const Pt& x, const Pt& y,
                                           long n, double theta, double d1);

// Radius recursion t_{n-1} = t_n + C t_n^{1+gamma} solved backward from t_0.
std::vector<double> recursion_radii(double gamma, double coeff, double t0, long n);

}  // namespace acim
