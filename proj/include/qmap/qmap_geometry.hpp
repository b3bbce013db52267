#pragma once

#include <string>
#include <vector>

#include "qmap/curvature_oracle.hpp"
#include "qmap/special_kahler.hpp"

namespace qmap {

// Reduced scalar curvature of c-map targets.
inline constexpr double kNu = -2.0;

// Canonical chart: (y^1..y^n, x^1..x^n, rho, phit, zeta^0..zeta^n, zetat_0..zetat_n), X = y + i x.
struct QKPoint {
    CVec X;
    double rho = 1.0;
    double phit = 0.0;
    Vec zeta;
    Vec zetat;

    static QKPoint base(const CVec& X);  // rho = 1, phit = 0, zeta = zetat = 0
    static QKPoint from_chart(const Vec& c, int n);
    Vec chart() const;
};

struct ChartLayout {
    int n;
    int dim() const { return 4 * n + 4; }
    int y(int i) const { return i; }
    int x(int i) const { return n + i; }
    int rho() const { return 2 * n; }
    int phit() const { return 2 * n + 1; }
    int zeta(int I) const { return 2 * n + 2 + I; }
    int zetat(int I) const { return 3 * n + 3 + I; }
};

struct GaugeKineticData {
    Mat Rmat;
    Mat Imat;
    Mat Iinv;
    Mat Hhat;  // acting on p = (zetat_0..zetat_n, zeta^0..zeta^n)
};

// Rows are complex covectors on the canonical chart.
struct CoframeData {
    CMat beta;   // (n+1) x dim
    CMat alpha;  // (n+1) x dim
    CMat P;      // n x (n+1)
    CMat A;      // (n+1) x dim, A_I = dzetat_I + F_IJ dzeta^J
    Mat N;
    Mat Ninv;
    double eK = 0.0;
    Vec dcK;  // d^c K
    FrameContractions frame;
};

struct Sp1Connection {
    Vec theta1;
    Vec theta2;
    Vec theta3;
};

struct ConnectionData {
    Sp1Connection theta;
    CVec p11;  // -i theta1
    CVec p12;  // -beta^0
    CovectorMatrix q;
    CovectorMatrix t;
};

// Matrix of complex two-forms, each a dense antisymmetric dim x dim matrix.
struct TwoFormMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<CMat> entries;

    TwoFormMatrix() = default;
    TwoFormMatrix(int r, int c, int d) : rows(r), cols(c), entries(r * c, CMat::Zero(d, d)) {}
    CMat& operator()(int a, int b) { return entries[a * cols + b]; }
    const CMat& operator()(int a, int b) const { return entries[a * cols + b]; }
};

double max_abs_diff(const TwoFormMatrix& a, const TwoFormMatrix& b);
double max_abs_entry(const TwoFormMatrix& a);

struct CurvatureE {
    TwoFormMatrix r;
    TwoFormMatrix s;
    CMat r00_unit;  // r^0_0 with unit coefficients on alpha0^alpha0bar and beta0^beta0bar
};

// Fit of a computed r^0_0 onto alpha0^alpha0bar, beta0^beta0bar,
// sum_a alpha^a^alphabar^a and sum_a beta^a^betabar^a.
struct R00Term {
    std::string term;
    double unit = 0.0;
    double used = 0.0;
    double fitted = 0.0;
};

struct R00Report {
    std::vector<R00Term> terms;
    double fit_residual = 0.0;
    double unit_residual = 0.0;  // max |r00_unit - numeric|
    double used_residual = 0.0;  // max |r00 - numeric|
};

// Symmetric quartic tensor over {0..n, 0~..n~}; index k >= n+1 is the tilde of k-n-1.
class QuarticOmega {
public:
    explicit QuarticOmega(int n) : n_(n), data_(2 * n + 2) {}
    int n() const { return n_; }
    int size() const { return 2 * n_ + 2; }
    int tilde(int a) const { return n_ + 1 + a; }
    cd operator()(int a, int b, int c, int d) const { return data_(a, b, c, d); }
    // Sets the value on every permutation of (a, b, c, d).
    void set_symmetric(int a, int b, int c, int d, cd v);
    double symmetry_residual() const;
    const Tensor4<cd>& data() const { return data_; }

private:
    int n_;
    Tensor4<cd> data_;
};

struct SwReport {
    double omega = 0.0;        // Omega contraction with C^{..} raised indices
    double omega_imag = 0.0;   // imaginary part of the contraction
    double closed_form = 0.0;  // 2 S.S + (11n+6)(n+1)/4 + 3/32 ||R_M||^2 + 5/2 scal
};

struct QKNorm {
    double from_curvatures = 0.0;  // 64(n+1)(4n+3) + 160 scal + 6 ||R_M||^2 + 128 S.S
    double via_sw = 0.0;     // 80(n+1)^2 + 16(n+1) + 64 S_W
};

struct QuaternionicStructure {
    Mat J1;
    Mat J2;
    Mat J3;
    Mat g;
};

struct TorsionResiduals {
    double dbeta0 = 0.0;
    double dbeta = 0.0;
    double dalpha0 = 0.0;
    double dalpha = 0.0;
    double max() const;
};

struct StructureResiduals {
    double theta1 = 0.0;
    double theta2 = 0.0;
    double theta3 = 0.0;
    double max() const;
};

struct SpTorsionResiduals {
    double beta = 0.0;
    double alpha = 0.0;
};

namespace detail {

template <class T>
struct Cx {
    T re;
    T im;
};
template <class T>
Cx<T> operator+(const Cx<T>& a, const Cx<T>& b) { return {a.re + b.re, a.im + b.im}; }
template <class T>
Cx<T> operator*(const Cx<T>& a, const Cx<T>& b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }

template <class T>
struct GaugeKineticT {
    MatT<T> R;
    MatT<T> I;
};

// Gauge kinetic matrices at z = (1, y + i x).
template <class T>
GaugeKineticT<T> gauge_kinetic_chart(const CubicForm& h, const VecT<T>& y, const VecT<T>& x) {
    const int n = h.dim();
    std::vector<Cx<T>> X(n);
    for (int i = 0; i < n; ++i) X[i] = {y[i], x[i]};
    std::vector<Cx<T>> hess(n * n, Cx<T>{T(0.0), T(0.0)});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const double c = 6.0 * h.H(i, j, k);
                if (c == 0.0) continue;
                hess[i * n + j].re += T(c) * X[k].re;
                hess[i * n + j].im += T(c) * X[k].im;
            }
    std::vector<Cx<T>> grad(n, Cx<T>{T(0.0), T(0.0)});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) grad[i] = grad[i] + hess[i * n + j] * X[j];
    Cx<T> hv{T(0.0), T(0.0)};
    for (int i = 0; i < n; ++i) {
        grad[i].re *= T(0.5);
        grad[i].im *= T(0.5);
        hv = hv + grad[i] * X[i];
    }
    hv.re *= T(1.0 / 3.0);
    hv.im *= T(1.0 / 3.0);

    const int m = n + 1;
    MatT<T> Fre(m, m), Fim(m, m);
    Fre(0, 0) = T(2.0) * hv.re;
    Fim(0, 0) = T(2.0) * hv.im;
    for (int i = 0; i < n; ++i) {
        Fre(0, i + 1) = Fre(i + 1, 0) = -grad[i].re;
        Fim(0, i + 1) = Fim(i + 1, 0) = -grad[i].im;
        for (int j = 0; j < n; ++j) {
            Fre(i + 1, j + 1) = hess[i * n + j].re;
            Fim(i + 1, j + 1) = hess[i * n + j].im;
        }
    }
    const MatT<T> N = T(2.0) * Fim;
    VecT<T> zre(m), zim(m);
    zre[0] = T(1.0);
    zim[0] = T(0.0);
    for (int i = 0; i < n; ++i) {
        zre[i + 1] = y[i];
        zim[i + 1] = x[i];
    }
    const VecT<T> vre = N * zre;
    const VecT<T> vim = N * zim;
    T dre = T(0.0), dim = T(0.0);
    for (int i = 0; i < m; ++i) {
        dre += zre[i] * vre[i] - zim[i] * vim[i];
        dim += zre[i] * vim[i] + zim[i] * vre[i];
    }
    const T den = dre * dre + dim * dim;
    const T ire = dre / den;
    const T iim = -dim / den;
    GaugeKineticT<T> out{MatT<T>(m, m), MatT<T>(m, m)};
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const T pre = vre[i] * vre[j] - vim[i] * vim[j];
            const T pim = vre[i] * vim[j] + vim[i] * vre[j];
            const T wre = pre * ire - pim * iim;
            const T wim = pre * iim + pim * ire;
            out.R(i, j) = Fre(i, j) - wim;
            out.I(i, j) = -Fim(i, j) + wre;
        }
    return out;
}

}  // namespace detail

// q-map target of an r-map geometry: the Ferrara-Sabharwal metric on
// U x R^{>0} x R x R^{2n+2}. Immutable after construction.
class QMapGeometry {
public:
    explicit QMapGeometry(RMapGeometry rmap);
    static QMapGeometry series(int n);

    const RMapGeometry& rmap() const { return rmap_; }
    int n() const { return rmap_.n(); }
    int dim() const { return 4 * n() + 4; }
    ChartLayout layout() const { return ChartLayout{n()}; }

    bool valid(const QKPoint& p) const;
    void require_point(const QKPoint& p) const;

    // General z = z^0 (1, X) with z^0 != 0.
    GaugeKineticData gauge_kinetic(const CVec& z) const;

    template <class T>
    MatT<T> fs_metric_chart(const VecT<T>& c) const {
        const int m = n();
        const ChartLayout L = layout();
        const int D = dim();
        const VecT<T> y = c.head(m);
        const VecT<T> x = c.segment(m, m);
        const T rho = c[L.rho()];
        const MatT<T> K = rmap_.kahler_metric<T>(x);
        const detail::GaugeKineticT<T> gk = detail::gauge_kinetic_chart<T>(rmap_.cubic(), y, x);
        const MatT<T> Ii = inverse<T>(gk.I, ErrorCode::SingularI);
        const MatT<T> IiR = Ii * gk.R;
        const int p = m + 1;
        MatT<T> Hh(2 * p, 2 * p);
        Hh.topLeftCorner(p, p) = Ii;
        Hh.topRightCorner(p, p) = IiR;
        Hh.bottomLeftCorner(p, p) = IiR.transpose();
        Hh.bottomRightCorner(p, p) = gk.I + gk.R * IiR;

        MatT<T> g = MatT<T>::Constant(D, D, T(0.0));
        g.topLeftCorner(m, m) = K;
        g.block(m, m, m, m) = K;
        const T inv4r2 = T(0.25) / (rho * rho);
        g(L.rho(), L.rho()) += inv4r2;
        VecT<T> th = VecT<T>::Constant(D, T(0.0));
        th[L.phit()] = T(1.0);
        for (int I = 0; I < p; ++I) {
            th[L.zeta(I)] = -c[L.zetat(I)];
            th[L.zetat(I)] = c[L.zeta(I)];
        }
        for (int i = 0; i < D; ++i)
            for (int j = 0; j < D; ++j) g(i, j) += inv4r2 * th[i] * th[j];
        const T inv2r = T(0.5) / rho;
        std::vector<int> idx(2 * p);
        for (int a = 0; a < p; ++a) {
            idx[a] = L.zetat(a);
            idx[p + a] = L.zeta(a);
        }
        for (int a = 0; a < 2 * p; ++a)
            for (int b = 0; b < 2 * p; ++b) g(idx[a], idx[b]) += inv2r * Hh(a, b);
        return g;
    }

    Mat fs_metric(const QKPoint& p) const;
    MetricFunctor metric_functor() const;

    CoframeData coframe(const QKPoint& p) const;
    Sp1Connection sp1_connection(const QKPoint& p) const;
    ConnectionData sp_n_connection(const QKPoint& p) const;

    // Closed-form r and s.
    CurvatureE curvature_E(const QKPoint& p) const;
    // r = dq + q^q - t^tbar, s = dt + q^t + t^qbar by numerical exterior derivatives.
    CurvatureE curvature_E_numeric(const QKPoint& p) const;
    R00Report r00_report(const QKPoint& p) const;

    Tensor4<double> s_tensor(const CVec& X) const;             // S_abcd
    Tensor4<double> s_tensor_coordinate(const CVec& X) const;  // S_{mu nu sigma rho}
    double s_norm_sq(const CVec& X) const;                     // sum S_abcd^2
    double s_norm_sq_coordinate(const CVec& X) const;          // S.K^-4.S

    QuarticOmega omega_tensor(const CVec& X) const;
    // r and s rebuilt from Omega through the splitting of the curvature.
    CurvatureE omega_reassembly(const QKPoint& p) const;

    SwReport sw_invariant(const CVec& X) const;
    QKNorm qk_curvature_norm(const CVec& X) const;
    // ||R||^2 of quaternionic projective space of dimension 4n + 4: 20n^2 + 44n + 24.
    static double hp_norm(int n);
    // 4m(m+2) nu with m = n+1.
    static double expected_scal(int n);

    QuaternionicStructure quaternionic_structure(const QKPoint& p) const;
    TorsionResiduals torsion_residuals(const QKPoint& p) const;
    StructureResiduals structure_residuals(const QKPoint& p) const;
    SpTorsionResiduals sp_torsion_residuals(const QKPoint& p) const;

private:
    RMapGeometry rmap_;
};

}  // namespace qmap
