#include "qmap/series_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <numeric>

namespace qmap {

namespace {

// sum_j c_j h^(K-j) u^j, Horner in h with u = x^3.
double homogeneous(std::initializer_list<double> coeffs, double h, double u) {
    double p = 0.0;
    double upow = 1.0;
    for (double c : coeffs) {
        p = p * h + c * upow;
        upow *= u;
    }
    return p;
}

}  // namespace

SeriesInvariants series_invariants(int n, double x, double hval) {
    if (n < 1) throw Error(ErrorCode::InvalidParameters, "series needs n >= 1");
    const double u = x * x * x;
    const double D = hval - 4.0 * u;
    if (!(std::abs(D) >= 1e-8 * std::abs(u)) || D == 0.0)
        throw Error(ErrorCode::PoleAt4x3, "h = 4x^3 is a pole of the series invariants");
    const double N = n;
    const double h = hval;
    const double D3 = D * D * D;
    const double D6 = D3 * D3;
    SeriesInvariants s;
    s.scal = -N * (2 * N - 1) + 3.0 * h * (N - 2) / D + 36.0 * u * h * h / D3;
    s.normR = 16.0 / D6 *
              homogeneous({N * (3 * N - 8) + 9, -4.0 * (N * (17 * N - 46) + 57), 4.0 * (N * (161 * N - 382) + 537),
                           -64.0 * (N * (51 * N - 97) + 99), 128.0 * (N * (73 * N - 107) + 78),
                           -2048.0 * (N * (7 * N - 8) + 3), 1024.0 * N * (9 * N - 8)},
                          h, u);
    s.S2 = 3.0 * u * u / D6 *
           homogeneous({N * (N + 16) + 207, -16.0 * (N - 2) * (N + 9), 96.0 * (N * N + N - 6), -256.0 * (N - 2) * N,
                        256.0 * (N - 2) * N},
                       h, u);
    s.SW = 1.5 / D6 *
               homogeneous({N * (N + 1), -4.0 * (N + 1) * (5 * N - 2), 8.0 * (N * (21 * N + 37) + 112),
                            -256.0 * (N * (3 * N + 10) - 11), 256.0 * (N * (8 * N + 33) - 20),
                            -1024.0 * (N * (3 * N + 11) + 2), 2048.0 * (N + 1) * (N + 2)},
                           h, u) +
           0.75 * N * (N + 1);
    return s;
}

ConstancyVerdict nonconstancy_check(int n, const std::vector<double>& grid) {
    if (grid.size() < 16) throw Error(ErrorCode::InvalidParameters, "grid needs at least 16 points");
    ConstancyVerdict v;
    // For n = 1 the level set {h = 1} is the single ray point x = 1; a grid
    // value x stands for the point (x, h = x^3) of the same ray.
    for (double x : grid) v.values.push_back(series_invariants(n, x, n == 1 ? x * x * x : 1.0).SW);
    const auto [lo, hi] = std::minmax_element(v.values.begin(), v.values.end());
    v.range = *hi - *lo;
    v.mean = std::accumulate(v.values.begin(), v.values.end(), 0.0) / static_cast<double>(v.values.size());
    v.verdict = v.range <= 1e-12 * std::max(1.0, std::abs(v.mean)) ? Constancy::Constant : Constancy::Nonconstant;
    return v;
}

std::vector<double> uniform_grid(double lo, double hi, int count) {
    if (count < 2) throw Error(ErrorCode::InvalidParameters, "grid needs at least 2 points");
    std::vector<double> g(count);
    for (int i = 0; i < count; ++i) g[i] = lo + (hi - lo) * i / (count - 1);
    return g;
}

Mat series_hinv(int n, double x, const Vec& y) {
    if (y.size() != n - 1) throw Error(ErrorCode::DimensionMismatch, "y must have n - 1 entries");
    const double den = 12.0 * x * x + 4.0 * y.squaredNorm();
    if (den == 0.0) throw Error(ErrorCode::ZeroDenominator, "12x^2 + 4|y|^2 vanishes");
    Mat m(n, n);
    m(0, 0) = -2.0 * x;
    m.block(0, 1, 1, n - 1) = 2.0 * y.transpose();
    m.block(1, 0, n - 1, 1) = 2.0 * y;
    const double s = y.squaredNorm();
    if (s == 0.0 || n < 3) {
        m.bottomRightCorner(n - 1, n - 1) = 6.0 * x * Mat::Identity(n - 1, n - 1);
        return (-1.0 / den) * m;
    }
    // on the complement of y the inverse is -1/(2x)
    if (x == 0.0) throw Error(ErrorCode::ZeroDenominator, "x vanishes");
    const Mat P = y * y.transpose() / s;
    m.bottomRightCorner(n - 1, n - 1) = 6.0 * x * P;
    Mat out = (-1.0 / den) * m;
    out.bottomRightCorner(n - 1, n - 1) -= (Mat::Identity(n - 1, n - 1) - P) / (2.0 * x);
    return out;
}

}  // namespace qmap
