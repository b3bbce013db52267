#pragma once

#include <vector>

#include "qmap/cubic_form.hpp"
#include "qmap/curvature_oracle.hpp"
#include "qmap/linalg.hpp"
#include "qmap/tensor.hpp"

namespace qmap {

struct SKMetricData {
    double K = 0.0;  // -log 8h(x)
    Mat g;           // K_{mu nubar}
    Mat ginv;        // K^{mu nubar} = -4h h^{mu nu} + 2 x^mu x^nu
};

struct Vielbein {
    Mat e;     // e^a_mu, lower triangular, e^T e = g
    Mat einv;  // e^mu_a
};

Vielbein vielbein(const Mat& g);

struct PrepotentialData {
    cd F;
    CVec F_I;
    CMat F_IJ;
    Mat N;     // 2 Im F_IJ
    Mat Ninv;
};

// h contracted with the inverse vielbein: h~_abc, h~_ab (from the Hessian) and
// h~_a (from the gradient).
struct FrameContractions {
    double eK = 0.0;  // e^K = 1/(8h)
    Vielbein frame;
    Tensor3<double> h3;
    Mat h2;
    Vec h1;
};

// n x n matrix of complex covectors on the real chart (y^1..y^n, x^1..x^n).
struct CovectorMatrix {
    int rows = 0;
    int cols = 0;
    int dim = 0;
    std::vector<CVec> entries;

    CovectorMatrix() = default;
    CovectorMatrix(int r, int c, int d) : rows(r), cols(c), dim(d), entries(r * c, CVec::Zero(d)) {}
    CVec& operator()(int a, int b) { return entries[a * cols + b]; }
    const CVec& operator()(int a, int b) const { return entries[a * cols + b]; }
};

struct ConnectionForm {
    CovectorMatrix from_vielbein;     // e^a_mu dbar e^mu_b - e^b_mu d e^mu_a
    CovectorMatrix from_prepotential; // e^{-K}((dbar P) N^{-1} Pbar^T - P N^{-1} d Pbar^T)
};

struct PskNorm {
    double b_route = 0.0;  // -32 scal - 32n(n+1) + B.K^-4.B / (4^4 h^4)
    double direct = 0.0;   // 16 R.K^-4.R
};

// r-map geometry of a cubic on the hyperbolic cone component U through a base
// point. Immutable after construction.
class RMapGeometry {
public:
    RMapGeometry(CubicForm h, Vec base_point);

    // The series cubic with base point (1, 0, ..., 0).
    static RMapGeometry series(int n);

    const CubicForm& cubic() const { return h_; }
    int n() const { return h_.dim(); }
    const Vec& base_point() const { return base_; }

    // h(x) > 0 with Lorentzian Hessian at x and along the segment from the
    // base point (32 interior samples).
    bool in_domain(const Vec& x) const;
    void require_domain(const Vec& x) const;

    template <class T>
    MatT<T> kahler_metric(const VecT<T>& x) const {
        const T hv = h_.value(x);
        const VecT<T> g = h_.gradient(x);
        const MatT<T> hs = h_.hessian(x);
        const T a = T(-0.25) / hv;
        const T b = T(0.25) / (hv * hv);
        MatT<T> k(n(), n());
        for (int i = 0; i < n(); ++i)
            for (int j = 0; j < n(); ++j) k(i, j) = a * hs(i, j) + b * g[i] * g[j];
        return k;
    }

    template <class T>
    MatT<T> vielbein_field(const VecT<T>& x) const {
        return reversed_cholesky<T>(kahler_metric<T>(x));
    }

    SKMetricData kahler_data(const CVec& X) const;
    Tensor3<cd> christoffel(const CVec& X) const;          // Gamma^rho_{sigma mu}
    Tensor4<double> riemann_coeffs(const CVec& X) const;   // R^rho_{sigma mu nubar}, closed form
    Tensor4<double> riemann_coeffs_expanded(const CVec& X) const;
    Tensor4<double> riemann_lowered(const CVec& X) const;  // R_{mubar nu sigma rhobar}
    FrameContractions frame_contractions(const CVec& X, const Mat& gauge = Mat()) const;
    // R~^a_b(sigma_e, sigmabar_d) indexed (a, b, e, d).
    Tensor4<double> unitary_curvature(const CVec& X, const Mat& gauge = Mat()) const;
    // gauge: constant orthogonal O replacing e by O e.
    ConnectionForm connection_one_form(const CVec& X, const Mat& gauge = Mat()) const;
    double scal_psk(const CVec& X) const;
    PskNorm riemann_norm_psk(const CVec& X) const;
    PrepotentialData prepotential(const CVec& z) const;

    // diag(K, K) on the chart (y, x).
    MetricFunctor real_metric() const;

private:
    bool hyperbolic_at(const Vec& x) const;

    CubicForm h_;
    Vec base_;
};

// Unit-norm values of the oracle calibration: oracle scal of the real metric
// equals kScalCalibration * scal_psk, and the oracle norm equals
// kNormCalibration * ||R||^2 in the complex-index convention.
inline constexpr double kScalCalibration = 2.0;
inline constexpr double kNormCalibration = 1.0;

}  // namespace qmap
