#include "acim/example_maps.hpp"

#include <algorithm>
#include <cmath>

namespace acim {

namespace {

double corner_image_supnorm(LocalForm form, double gamma, double b) {
    switch (form) {
        case LocalForm::neutral1d:
            return b * (1.0 + std::pow(b, gamma));
        case LocalForm::neutral2d: {
            double u = 1.0 + 2.0 * b * b;
            return std::max(b * u, b * u * u);
        }
        case LocalForm::neutral3d: {
            double u = 1.0 + 3.0 * b * b;
            double v = 1.0 + u;
            return std::max({b * u, b * u * u, b * v * v * v});
        }
        case LocalForm::none:
            break;
    }
    return 0.0;
}

std::vector<double> subdivide(double a, double b, int q, std::vector<double>& out) {
    for (int k = 1; k < q; ++k) out.push_back(a + (b - a) * k / q);
    out.push_back(b);
    return out;
}

// Per-axis cuts for the box-aligned completion on [-1,1]: pieces between
// {-1,-g,0,g,1}, each split so every full branch expands by at least sigma.
std::vector<double> axis_cuts_2sided(double g, double sigma) {
    std::vector<double> cuts{-1.0};
    double base[5] = {-1.0, -g, 0.0, g, 1.0};
    for (int p = 0; p < 4; ++p) {
        double len = base[p + 1] - base[p];
        int q = std::max(1, static_cast<int>(std::ceil(sigma * len / 2.0 - 1e-12)));
        subdivide(base[p], base[p + 1], q, cuts);
    }
    return cuts;
}

struct Builder {
    PiecewiseMap m;

    void finish_branches() {
        // Enumerate rectangles in mixed-radix order and assign branches.
        int n_int[3] = {1, 1, 1};
        int total = 1;
        for (int a = 0; a < m.dim; ++a) {
            n_int[a] = static_cast<int>(m.cuts[a].size()) - 1;
            total *= n_int[a];
        }
        m.rect_to_branch.assign(static_cast<size_t>(total), 0);

        const bool has_local = m.local_form != LocalForm::none;
        if (has_local) {
            Branch local;
            local.index = 1;
            local.is_local = true;
            local.domain_box.dim = m.dim;
            for (int a = 0; a < m.dim; ++a) {
                local.domain_box.lo[a] = (m.local_form == LocalForm::neutral1d) ? 0.0 : -m.glue;
                local.domain_box.hi[a] = m.glue;
            }
            m.branches.push_back(local);
        }

        for (int idx = 0; idx < total; ++idx) {
            int rem = idx;
            Box rect;
            rect.dim = m.dim;
            bool inner = has_local;
            for (int a = 0; a < m.dim; ++a) {
                int ia = rem % n_int[a];
                rem /= n_int[a];
                rect.lo[a] = m.cuts[a][static_cast<size_t>(ia)];
                rect.hi[a] = m.cuts[a][static_cast<size_t>(ia) + 1];
                if (has_local) {
                    double blo = (m.local_form == LocalForm::neutral1d) ? 0.0 : -m.glue;
                    if (rect.lo[a] < blo - 1e-15 || rect.hi[a] > m.glue + 1e-15) inner = false;
                }
            }
            if (inner) {
                m.rect_to_branch[static_cast<size_t>(idx)] = 1;
                continue;
            }
            Branch b;
            b.index = static_cast<int>(m.branches.size()) + 1;
            b.domain_box = rect;
            for (int a = 0; a < m.dim; ++a) {
                double lo = m.domain.lo[a], hi = m.domain.hi[a];
                b.scale[a] = (hi - lo) / (rect.hi[a] - rect.lo[a]);
                b.offset[a] = lo - b.scale[a] * rect.lo[a];
            }
            b.image.kind = BranchImage::Kind::box;
            b.image.box = m.domain;
            b.image_covers_region = true;  // full branch
            m.rect_to_branch[static_cast<size_t>(idx)] = b.index;
            m.branches.push_back(b);
        }

        if (has_local) {
            Branch& local = m.branches.front();
            // Full branches cover the domain; the local branch image contains
            // its own domain box (the inverse contracts componentwise), hence
            // the region.
            local.image_covers_region = true;
            build_local_image(local);
        }
    }

    void build_local_image(Branch& local) {
        if (m.dim == 1) {
            local.image.kind = BranchImage::Kind::interval;
            local.image.lo = 0.0;
            Pt e = pt1(m.glue);
            m.step_local(e);
            local.image.hi = e[0];
            return;
        }
        local.image.kind = BranchImage::Kind::polyline;
        const Box& bx = local.domain_box;
        if (m.dim == 2) {
            const int n_side = 2048;
            for (int side = 0; side < 4; ++side)
                for (int k = 0; k < n_side; ++k) {
                    double t = static_cast<double>(k) / n_side;
                    Pt p;
                    switch (side) {
                        case 0: p = pt2(bx.lo[0] + t * (bx.hi[0] - bx.lo[0]), bx.lo[1]); break;
                        case 1: p = pt2(bx.hi[0], bx.lo[1] + t * (bx.hi[1] - bx.lo[1])); break;
                        case 2: p = pt2(bx.hi[0] - t * (bx.hi[0] - bx.lo[0]), bx.hi[1]); break;
                        default: p = pt2(bx.lo[0], bx.hi[1] - t * (bx.hi[1] - bx.lo[1])); break;
                    }
                    m.step_local(p);
                    local.image.points.push_back(p);
                }
            return;
        }
        // 3-D: sampled face cloud.
        const int n = 24;
        for (int face = 0; face < 6; ++face) {
            int axis = face / 2;
            double val = (face % 2 == 0) ? bx.lo[axis] : bx.hi[axis];
            int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
            for (int i = 0; i <= n; ++i)
                for (int j = 0; j <= n; ++j) {
                    Pt p;
                    p[axis] = val;
                    p[a1] = bx.lo[a1] + (bx.hi[a1] - bx.lo[a1]) * i / n;
                    p[a2] = bx.lo[a2] + (bx.hi[a2] - bx.lo[a2]) * j / n;
                    m.step_local(p);
                    local.image.points.push_back(p);
                }
        }
    }
};

void check_region(const PiecewiseMap& m, double region_radius) {
    if (!(region_radius > 0.0) || region_radius >= m.glue)
        fail(ErrorCode::BadSpec, "region_radius must lie in (0, glue half-width)");
    // closure(TR) must stay inside branch 1.
    Pt edge;
    edge[0] = region_radius;
    m.step_local(edge);
    double worst = norm2(edge);
    if (m.dim >= 2) {
        Pt e2;
        e2[m.dim - 1] = region_radius;
        m.step_local(e2);
        worst = std::max(worst, norm2(e2));
    }
    if (worst >= m.glue) fail(ErrorCode::BadSpec, "image of the region leaves branch 1");
}

PiecewiseMap build_neutral(int dim, LocalForm form, const ExampleSpec& spec,
                           const std::string& name) {
    PiecewiseMap m;
    m.name = name;
    m.dim = dim;
    m.local_form = form;
    m.gamma = spec.gamma;
    if (spec.surrogate_expansion < 2.0) fail(ErrorCode::BadSpec, "surrogate_expansion below 2");
    if (!(spec.r0 > 0.0)) fail(ErrorCode::BadSpec, "r0 must be positive");
    m.domain.dim = dim;
    for (int a = 0; a < dim; ++a) {
        m.domain.lo[a] = (dim == 1) ? 0.0 : -1.0;
        m.domain.hi[a] = 1.0;
    }
    m.glue = std::min(spec.r0, 0.99 * largest_safe_glue(form, spec.gamma));
    if (dim == 1) {
        // Single full surjective affine branch on [glue, 1].
        m.cuts[0] = {0.0, m.glue, 1.0};
    } else {
        for (int a = 0; a < dim; ++a) m.cuts[a] = axis_cuts_2sided(m.glue, spec.surrogate_expansion);
    }
    m.region.center = m.neutral_point;
    m.region.radius = spec.region_radius;
    m.region.label = "ball around the neutral point";
    Builder b{std::move(m)};
    b.finish_branches();
    check_region(b.m, spec.region_radius);
    b.m.validate();
    return std::move(b.m);
}

}  // namespace

double largest_safe_glue(LocalForm form, double gamma) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (corner_image_supnorm(form, gamma, mid) <= 1.0) lo = mid;
        else hi = mid;
    }
    return lo;
}

ExampleSpec default_spec(const std::string& example_id) {
    ExampleSpec s;
    s.example_id = example_id;
    if (example_id == "2") {
        s.r0 = 0.11;
        s.region_radius = 0.05;
    } else if (example_id == "neutral1d") {
        s.r0 = 0.5;
        s.region_radius = 0.25;
    }
    return s;
}

PiecewiseMap example1(const ExampleSpec& spec) {
    if (spec.example_id != "1" && spec.example_id != "3")
        fail(ErrorCode::BadSpec, "example1 requires example_id 1 or 3");
    return build_neutral(2, LocalForm::neutral2d, spec, "example1");
}

PiecewiseMap example2(const ExampleSpec& spec) {
    if (spec.example_id != "2") fail(ErrorCode::BadSpec, "example2 requires example_id 2");
    return build_neutral(3, LocalForm::neutral3d, spec, "example2");
}

PiecewiseMap example4(const ExampleSpec& spec) {
    if (spec.example_id != "4") fail(ErrorCode::BadSpec, "example4 requires example_id 4");
    PiecewiseMap m = build_neutral(2, LocalForm::neutral2d, spec, "example4");
    ComponentLabeling comp;
    comp.label_halfwidth = m.glue;
    m.components = comp;
    return m;
}

PiecewiseMap neutral_1d(const ExampleSpec& spec) {
    if (spec.example_id != "neutral1d") fail(ErrorCode::BadSpec, "neutral_1d requires example_id neutral1d");
    if (!(spec.gamma > 0.0)) fail(ErrorCode::BadSpec, "gamma must be positive");
    return build_neutral(1, LocalForm::neutral1d, spec, "neutral1d");
}

PiecewiseMap make_example(const ExampleSpec& spec) {
    if (spec.example_id == "1" || spec.example_id == "3") return example1(spec);
    if (spec.example_id == "2") return example2(spec);
    if (spec.example_id == "4") return example4(spec);
    if (spec.example_id == "neutral1d") return neutral_1d(spec);
    fail(ErrorCode::BadSpec, "unknown example_id '" + spec.example_id + "'");
}

PiecewiseMap surrogate_only(int dim, int folds) {
    if (dim < 1 || dim > 3 || folds < 2) fail(ErrorCode::BadSpec, "surrogate_only needs dim 1..3, folds >= 2");
    PiecewiseMap m;
    m.name = "surrogate_only";
    m.dim = dim;
    m.local_form = LocalForm::none;
    m.domain.dim = dim;
    for (int a = 0; a < dim; ++a) {
        m.domain.lo[a] = -1.0;
        m.domain.hi[a] = 1.0;
        std::vector<double> cuts;
        for (int k = 0; k <= folds; ++k) cuts.push_back(-1.0 + 2.0 * k / folds);
        m.cuts[a] = cuts;
    }
    m.region.radius = 0.0;
    m.region.label = "empty";
    Builder b{std::move(m)};
    b.finish_branches();
    return std::move(b.m);
}

}  // namespace acim
