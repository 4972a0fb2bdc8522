#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "acim/errors.hpp"
#include "acim/geometry.hpp"

namespace acim {

struct ToleranceConfig {
    double root_tol = 1e-14;
    // Probe-radius grid for audits, positive and decreasing.
    std::vector<double> audit_radius_grid = {0.1, 0.05, 0.02, 0.01, 0.005, 0.002};
    long n_max_orbit = 100000;

    void validate() const;
};

// Study region around the neutral point: a ball intersected with the domain.
// radius == 0 denotes the empty region of auxiliary (surrogate-only) maps.
struct Region {
    Pt center;
    double radius = 0.0;
    std::string label;

    bool contains(const Pt& p) const {
        return radius > 0.0 && dist_sq(p, center) < radius * radius;
    }
    double boundary_distance(const Pt& p) const { return std::fabs(dist(p, center) - radius); }
};

// Analytic local form at the neutral point.
enum class LocalForm {
    none,       // surrogate-only map, no neutral branch
    neutral1d,  // t -> t (1 + t^gamma) on [0, glue)
    neutral2d,  // (x,y) -> (x u, y u^2), u = 1 + x^2 + y^2
    neutral3d,  // (x,y,z) -> (x u, y u^2, z (1+u)^3)
};

// Geometry of a branch image, used by the boundary-overlap audit.
struct BranchImage {
    enum class Kind { box, interval, polyline };
    Kind kind = Kind::box;
    Box box;                   // kind == box
    double lo = 0.0, hi = 0.0; // kind == interval
    std::vector<Pt> points;    // kind == polyline: dense closed sampling of the boundary

    double boundary_distance(const Pt& p, int m) const;
};

struct Branch {
    int index = 1;       // 1-based; branch 1 is the local branch when present
    bool is_local = false;
    Box domain_box;
    // Affine action per axis: T_a(x) = scale[a] * x[a] + offset[a].
    Pt scale;
    Pt offset;
    BranchImage image;
    bool image_covers_region = false;

    bool contains(const Pt& p) const { return domain_box.contains(p); }
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Invariant component labeling (the two parabola-bounded components).
struct ComponentLabeling {
    // 1 or 2; 0 for points on the separatrix or outside the labeled zone.
    int component_of(const Pt& p, double tol) const;
    double label_halfwidth = 0.0;  // labels valid for |x|_inf < label_halfwidth
};

class PiecewiseMap {
  public:
    std::string name;
    int dim = 1;
    Box domain;
    LocalForm local_form = LocalForm::none;
    double gamma = 2.0;
    double glue = 0.0;  // half-width of the local branch box (1-D: [0, glue))
    Pt neutral_point;
    Region region;
    ToleranceConfig tol;
    std::vector<Branch> branches;
    std::optional<ComponentLabeling> components;

    // Per-axis sorted branch boundary coordinates including domain edges.
    std::vector<double> cuts[3];
    // Rectangle index (mixed radix over per-axis intervals) -> branch index.
    std::vector<int> rect_to_branch;

    int branch_count() const { return static_cast<int>(branches.size()); }
    int region_preimage_count() const;  // K'

    // --- pointwise operations -------------------------------------------
    Pt evaluate(const Pt& x) const;
    Mat jacobian(const Pt& x) const;
    double jacobian_det(const Pt& x) const;
    int branch_index(const Pt& x) const;
    // Distance from x to the nearest branch boundary plane.
    double branch_boundary_distance(const Pt& x) const;

    // Inverse of one branch. For the local branch this is a scalar monotone
    // root problem: in the 1-D form the bracket is in t; in 2-D/3-D it is in
    // u = 1 + |x|^2. Affine branches invert exactly (bracket ignored).
    Pt local_inverse(int branch, const Pt& y, Interval bracket) const;
    // Branch-1 inverse with the canonical bracket.
    Pt branch1_inverse(const Pt& y) const;
    Interval branch1_bracket(const Pt& y) const;

    // Monte Carlo estimate of the local contraction coefficient s(x,T):
    // max over sampled y in the probe ball (same branch) of d(x,y)/d(Tx,Ty).
    // Lower-biased by construction.
    double contraction_coefficient(const Pt& x, double probe_radius, int n_samples,
                                   uint64_t seed) const;

    // --- fast stepping (no boundary checks; boundary-measure-zero paths) --
    // Applies T in place and returns |det DT| at the pre-image point.
    double step_with_det(Pt& x) const;
    void step(Pt& x) const;
    // Applies the local branch form in place (caller guarantees membership).
    void step_local(Pt& x) const;
    Mat jacobian_local(const Pt& x) const;
    double local_det(const Pt& x) const;

    void validate() const;

  private:
    const Branch& locate(const Pt& x) const;
    int rect_branch(const Pt& x) const;
    Pt apply_branch(const Branch& b, const Pt& x) const;
    bool audit_radius_grid_empty() const;
};

}  // namespace acim
