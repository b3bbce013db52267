#pragma once

#include <functional>
#include <vector>

#include "qmap/linalg.hpp"
#include "qmap/tensor.hpp"

namespace qmap {

enum class DerivativeMode { HyperDual, FiniteDifference };

// A smooth field of symmetric matrices on an open chart of R^dim. eval_hd is
// the same function evaluated over hyper-dual scalars; it may be empty, in
// which case only finite differences are available.
struct MetricFunctor {
    int dim = 0;
    std::function<Mat(const Vec&)> eval;
    std::function<MatT<HyperDual>(const VecT<HyperDual>&)> eval_hd;
};

struct OracleCurvature {
    Mat metric;
    Tensor3<double> gamma;          // Gamma^a_{bc}
    Tensor4<double> riemann;        // R^a_{bcd}
    Tensor4<double> riemann_lower;  // R_{abcd}
    Mat ricci;
    double scal = 0.0;
    double norm_sq = 0.0;  // R_{abcd} R^{abcd}
    // Identity residuals relative to max(1, max |R|), always computed.
    double bianchi_residual = 0.0;
    double antisymmetry_residual = 0.0;
};

// Gamma^a_{bc} = 1/2 g^{ad}(d_b g_dc + d_c g_db - d_d g_bc) and
// R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb} + Gamma^a_{ce}Gamma^e_{db} - Gamma^a_{de}Gamma^e_{cb}.
OracleCurvature oracle_curvature(const MetricFunctor& m, const Vec& x,
                                 DerivativeMode mode = DerivativeMode::HyperDual);

SignatureReport signature(const MetricFunctor& m, const Vec& x, double rel_tol = 1e-9);

// Kaehler metric K_{mu nu}(x) on a tube domain R^n + iU that depends on
// x = Im X only. Returns G^r_{s m} = K^{r k} d_{x^s} K_{m k}, so that
// Gamma^r_{s m} = -(i/2) G^r_{s m}, and R^r_{s m nbar} = -(1/4) d_{x^n} G^r_{s m}.
struct TubeKahlerOracle {
    Tensor3<double> G;
    Tensor4<double> R;
};

TubeKahlerOracle tube_kahler_oracle(const std::function<MatT<HyperDual>(const VecT<HyperDual>&)>& kahler,
                                    const Vec& x);

// (a ^ b)(u, v) = a(u) b(v) - a(v) b(u), as a dense antisymmetric matrix.
CMat wedge(const CVec& a, const CVec& b);
Mat wedge(const Vec& a, const Vec& b);

// d alpha(u, v) for constant coordinate vector fields u, v; central
// differences with one Richardson step.
double numeric_exterior_derivative(const std::function<Vec(const Vec&)>& form, const Vec& x, const Vec& u,
                                   const Vec& v);

// Exterior derivative of each row of a matrix of covector fields, as dense
// two-form matrices (d alpha)_{ij} = d_i alpha_j - d_j alpha_i. The step for
// coordinate i is rel_step * max(1, |x_i|).
std::vector<CMat> exterior_derivative(const std::function<CMat(const Vec&)>& rows, const Vec& x,
                                      double rel_step = 1e-5);

}  // namespace qmap
