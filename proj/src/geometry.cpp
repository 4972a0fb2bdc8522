#include "acim/geometry.hpp"

namespace acim {

Mat mat_identity(int m) {
    Mat r;
    for (int i = 0; i < m; ++i) r(i, i) = 1.0;
    return r;
}

Mat mat_mul(const Mat& x, const Mat& y, int m) {
    Mat r;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            double s = 0.0;
            for (int k = 0; k < m; ++k) s += x(i, k) * y(k, j);
            r(i, j) = s;
        }
    return r;
}

Pt mat_apply(const Mat& x, const Pt& v, int m) {
    Pt r;
    for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int k = 0; k < m; ++k) s += x(i, k) * v[k];
        r[i] = s;
    }
    return r;
}

double mat_det(const Mat& x, int m) {
    switch (m) {
        case 1:
            return x(0, 0);
        case 2:
            return x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0);
        default:
            return x(0, 0) * (x(1, 1) * x(2, 2) - x(1, 2) * x(2, 1)) -
                   x(0, 1) * (x(1, 0) * x(2, 2) - x(1, 2) * x(2, 0)) +
                   x(0, 2) * (x(1, 0) * x(2, 1) - x(1, 1) * x(2, 0));
    }
}

double mat_op_norm(const Mat& x, int m) {
    if (m == 1) return std::fabs(x(0, 0));
    if (m == 2) {
        // Largest singular value of [[a,b],[c,d]].
        double a = x(0, 0), b = x(0, 1), c = x(1, 0), d = x(1, 1);
        double f = a * a + b * b + c * c + d * d;
        double g = a * a + b * b - c * c - d * d;
        double h = 2.0 * (a * c + b * d);
        double s = std::sqrt(g * g + h * h);
        return std::sqrt(0.5 * (f + s));
    }
    // m == 3: largest eigenvalue of G = A^T A by cyclic Jacobi sweeps.
    double g[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += x(k, i) * x(k, j);
            g[i][j] = s;
        }
    for (int sweep = 0; sweep < 32; ++sweep) {
        double off = std::fabs(g[0][1]) + std::fabs(g[0][2]) + std::fabs(g[1][2]);
        if (off < 1e-15 * (std::fabs(g[0][0]) + std::fabs(g[1][1]) + std::fabs(g[2][2]) + 1e-300)) break;
        for (int p = 0; p < 2; ++p)
            for (int q = p + 1; q < 3; ++q) {
                if (g[p][q] == 0.0) continue;
                double theta = 0.5 * std::atan2(2.0 * g[p][q], g[q][q] - g[p][p]);
                double cs = std::cos(theta), sn = std::sin(theta);
                for (int k = 0; k < 3; ++k) {
                    double gpk = g[p][k], gqk = g[q][k];
                    g[p][k] = cs * gpk - sn * gqk;
                    g[q][k] = sn * gpk + cs * gqk;
                }
                for (int k = 0; k < 3; ++k) {
                    double gkp = g[k][p], gkq = g[k][q];
                    g[k][p] = cs * gkp - sn * gkq;
                    g[k][q] = sn * gkp + cs * gkq;
                }
            }
    }
    double lmax = g[0][0];
    if (g[1][1] > lmax) lmax = g[1][1];
    if (g[2][2] > lmax) lmax = g[2][2];
    return std::sqrt(lmax < 0.0 ? 0.0 : lmax);
}

double unit_ball_volume(int m) {
    switch (m) {
        case 0:
            return 1.0;
        case 1:
            return 2.0;
        case 2:
            return 3.14159265358979323846;
        default:
            return 4.0 / 3.0 * 3.14159265358979323846;
    }
}

}  // namespace acim
