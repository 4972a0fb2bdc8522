#pragma once

#include <string>

#include "acim/map_model.hpp"

namespace acim {

struct ExampleSpec {
    std::string example_id = "1";  // "1", "2", "3", "4", "neutral1d"
    double r0 = 0.5;
    double region_radius = 0.2;
    double surrogate_expansion = 3.0;
    double gamma = 2.0;
};

// Per-example defaults (example 2 needs a much smaller local box, see
// largest_safe_glue).
ExampleSpec default_spec(const std::string& example_id);

// Largest local-box half-width for which the local form maps the box into
// the domain, found by bisection on the corner image.
double largest_safe_glue(LocalForm form, double gamma);

PiecewiseMap example1(const ExampleSpec& spec);
PiecewiseMap example2(const ExampleSpec& spec);
PiecewiseMap example4(const ExampleSpec& spec);
PiecewiseMap neutral_1d(const ExampleSpec& spec);
PiecewiseMap make_example(const ExampleSpec& spec);

// Auxiliary full-branch folding map on [-1,1]^m with `folds` equal branches
// per axis (slope = folds). No neutral branch, empty region.
PiecewiseMap surrogate_only(int m, int folds);

}  // namespace acim
