#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace acim {

// Points and matrices in dimension m <= 3. The active dimension is carried
// by the owning map/partition; unused trailing components stay zero so that
// norms and distances can ignore m.
struct Pt {
    std::array<double, 3> c{0.0, 0.0, 0.0};

    double& operator[](int i) { return c[static_cast<size_t>(i)]; }
    double operator[](int i) const { return c[static_cast<size_t>(i)]; }
};

inline Pt pt1(double x) { return Pt{{x, 0.0, 0.0}}; }
inline Pt pt2(double x, double y) { return Pt{{x, y, 0.0}}; }
inline Pt pt3(double x, double y, double z) { return Pt{{x, y, z}}; }

inline double norm2_sq(const Pt& p) { return p.c[0] * p.c[0] + p.c[1] * p.c[1] + p.c[2] * p.c[2]; }
inline double norm2(const Pt& p) { return std::sqrt(norm2_sq(p)); }

inline double dist_sq(const Pt& a, const Pt& b) {
    double dx = a.c[0] - b.c[0], dy = a.c[1] - b.c[1], dz = a.c[2] - b.c[2];
    return dx * dx + dy * dy + dz * dz;
}
inline double dist(const Pt& a, const Pt& b) { return std::sqrt(dist_sq(a, b)); }

struct Mat {
    // Row-major m x m block of a 3x3 array.
    std::array<std::array<double, 3>, 3> a{};

    double& operator()(int i, int j) { return a[static_cast<size_t>(i)][static_cast<size_t>(j)]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i)][static_cast<size_t>(j)]; }
};

Mat mat_identity(int m);
Mat mat_mul(const Mat& x, const Mat& y, int m);
Pt mat_apply(const Mat& x, const Pt& v, int m);
double mat_det(const Mat& x, int m);
// Largest singular value (operator 2-norm); exact closed form for m<=2,
// cyclic Jacobi on A^T A for m=3.
double mat_op_norm(const Mat& x, int m);

struct Box {
    Pt lo;
    Pt hi;
    int dim = 2;

    bool contains(const Pt& p) const {
        for (int a = 0; a < dim; ++a)
            if (p[a] < lo[a] || p[a] > hi[a]) return false;
        return true;
    }
    double volume() const {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) v *= hi[a] - lo[a];
        return v;
    }
};

// Volume of the unit ball in R^m (m = 0 gives 1, used as the (m-1)-factor
// of slab volumes in one dimension).
double unit_ball_volume(int m);

}  // namespace acim
