#pragma once

#include <vector>

#include "qmap/linalg.hpp"

namespace qmap {

struct SeriesInvariants {
    double scal = 0.0;
    double normR = 0.0;  // ||R_M||^2
    double S2 = 0.0;     // sum S_abcd^2
    double SW = 0.0;
};

// Closed forms for h = x(x^2 - sum y_i^2) as functions of x and the value
// hval = h(x, y). Throws PoleAt4x3 when |hval - 4x^3| < 1e-8 |x|^3.
SeriesInvariants series_invariants(int n, double x, double hval);

enum class Constancy { Constant, Nonconstant };

struct ConstancyVerdict {
    Constancy verdict = Constancy::Constant;
    double range = 0.0;
    double mean = 0.0;
    std::vector<double> values;
};

// S_W on {h = 1} over the x-grid (at least 16 points); constant iff the
// range is at most 1e-12 max(1, |mean|). For n >= 2 every x >= 1 lies on the
// level set with hval = 1. For n = 1 only x = 1 does, and grid values are
// evaluated at (x, x^3), which S_W identifies with that point.
ConstancyVerdict nonconstancy_check(int n, const std::vector<double>& grid);

// Uniform grid of count points on [lo, hi].
std::vector<double> uniform_grid(double lo, double hi, int count);

// Inverse Hessian of the series cubic at (x, y). Throws ZeroDenominator.
Mat series_hinv(int n, double x, const Vec& y);

}  // namespace qmap
