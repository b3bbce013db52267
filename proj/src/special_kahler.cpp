#include "qmap/special_kahler.hpp"

#include <cmath>

#include "qmap/tensor_ops.hpp"

namespace qmap {

Vielbein vielbein(const Mat& g) {
    Vielbein v;
    v.e = reversed_cholesky<double>(g);
    v.einv = v.e.triangularView<Eigen::Lower>().solve(Mat::Identity(g.rows(), g.cols()));
    return v;
}

RMapGeometry::RMapGeometry(CubicForm h, Vec base_point) : h_(std::move(h)), base_(std::move(base_point)) {
    if (base_.size() != h_.dim()) throw Error(ErrorCode::DimensionMismatch, "base point dimension");
    if (!hyperbolic_at(base_)) throw Error(ErrorCode::OutOfDomain, "base point is not hyperbolic");
}

RMapGeometry RMapGeometry::series(int n) {
    Vec base = Vec::Zero(n);
    base[0] = 1.0;
    return RMapGeometry(series_cubic(n), base);
}

bool RMapGeometry::hyperbolic_at(const Vec& x) const {
    if (!(h_.value(x) > 0.0)) return false;
    const SignatureReport s = signature_of(h_.hessian(x));
    return s.zero == 0 && s.positive == 1 && s.negative == n() - 1;
}

bool RMapGeometry::in_domain(const Vec& x) const {
    if (x.size() != n() || !x.allFinite()) return false;
    if (!hyperbolic_at(x)) return false;
    constexpr int kSamples = 32;
    for (int i = 1; i <= kSamples; ++i) {
        const double t = static_cast<double>(i) / (kSamples + 1);
        if (!hyperbolic_at((1.0 - t) * base_ + t * x)) return false;
    }
    return true;
}

void RMapGeometry::require_domain(const Vec& x) const {
    if (x.size() != n()) throw Error(ErrorCode::DimensionMismatch, "point dimension");
    if (!in_domain(x)) throw Error(ErrorCode::OutOfDomain, "Im X is outside the domain U");
}

SKMetricData RMapGeometry::kahler_data(const CVec& X) const {
    const Vec x = X.imag();
    require_domain(x);
    const double hv = h_.value(x);
    const Mat hinv = inverse<double>(h_.hessian(x), ErrorCode::SingularHessian);
    SKMetricData d;
    d.K = -std::log(8.0 * hv);
    d.g = kahler_metric<double>(x);
    d.ginv = -4.0 * hv * hinv + 2.0 * x * x.transpose();
    return d;
}

Tensor3<cd> RMapGeometry::christoffel(const CVec& X) const {
    const Vec x = X.imag();
    require_domain(x);
    const int m = n();
    const double hv = h_.value(x);
    const Vec g = h_.gradient(x);
    const Mat hs = h_.hessian(x);
    const Mat hinv = inverse<double>(hs, ErrorCode::SingularHessian);
    const Tensor3<double> h3 = third_derivative(h_);
    const Tensor3<double> a = contract_first<double>(hinv, h3);  // h^{rk} h_{k mu sigma}
    Tensor3<cd> out(m);
    const cd pre(0.0, -0.5 / hv);
    for (int r = 0; r < m; ++r)
        for (int s = 0; s < m; ++s)
            for (int mu = 0; mu < m; ++mu) {
                double v = hv * a(r, mu, s) + 0.5 * x[r] * hs(mu, s);
                if (r == mu) v -= g[s];
                if (r == s) v -= g[mu];
                out(r, s, mu) = pre * v;
            }
    return out;
}

Tensor4<double> RMapGeometry::riemann_coeffs(const CVec& X) const {
    const SKMetricData d = kahler_data(X);
    const int m = n();
    const Tensor3<double> h3 = third_derivative(h_);
    const double e2K = std::exp(2.0 * d.K);
    const Tensor3<double> a = contract_first(d.ginv, h3);  // K^{ra} h_{a nu beta}
    Tensor4<double> out(m);
    for (int r = 0; r < m; ++r)
        for (int s = 0; s < m; ++s)
            for (int mu = 0; mu < m; ++mu)
                for (int nu = 0; nu < m; ++nu) {
                    double v = 0.0;
                    for (int b = 0; b < m; ++b)
                        for (int c = 0; c < m; ++c) v += a(r, nu, b) * d.ginv(b, c) * h3(c, mu, s);
                    v *= e2K;
                    if (r == s) v -= d.g(mu, nu);
                    if (r == mu) v -= d.g(s, nu);
                    out(r, s, mu, nu) = v;
                }
    return out;
}

Tensor4<double> RMapGeometry::riemann_coeffs_expanded(const CVec& X) const {
    const Vec x = X.imag();
    require_domain(x);
    const int m = n();
    const double hv = h_.value(x);
    const Vec g = h_.gradient(x);
    const Mat hs = h_.hessian(x);
    const Mat hinv = inverse<double>(hs, ErrorCode::SingularHessian);
    const Tensor3<double> h3 = third_derivative(h_);
    const Tensor3<double> a = contract_first(hinv, h3);  // h^{ra} h_{a nu beta}
    const double pre = -1.0 / (4.0 * hv * hv);
    Tensor4<double> out(m);
    for (int r = 0; r < m; ++r)
        for (int s = 0; s < m; ++s)
            for (int mu = 0; mu < m; ++mu)
                for (int nu = 0; nu < m; ++nu) {
                    double quad = 0.0;
                    for (int b = 0; b < m; ++b)
                        for (int c = 0; c < m; ++c) quad += a(r, nu, b) * hinv(b, c) * h3(c, mu, s);
                    double v = 0.5 * x[r] * (hv * h3(mu, s, nu) - hs(mu, s) * g[nu]) - hv * hv * quad;
                    if (r == s) v += g[mu] * g[nu] - hv * hs(mu, nu);
                    if (r == mu) v += g[s] * g[nu] - hv * hs(s, nu);
                    if (r == nu) v += 0.5 * hv * hs(mu, s);
                    out(r, s, mu, nu) = pre * v;
                }
    return out;
}

Tensor4<double> RMapGeometry::riemann_lowered(const CVec& X) const {
    const SKMetricData d = kahler_data(X);
    const int m = n();
    const Tensor3<double> h3 = third_derivative(h_);
    const double e2K = std::exp(2.0 * d.K);
    const Tensor3<double> a = contract_last(h3, d.ginv);  // h_{mu rho beta} K^{beta gamma}
    Tensor4<double> out(m);
    for (int mu = 0; mu < m; ++mu)
        for (int nu = 0; nu < m; ++nu)
            for (int s = 0; s < m; ++s)
                for (int r = 0; r < m; ++r) {
                    double v = 0.0;
                    for (int c = 0; c < m; ++c) v += a(mu, r, c) * h3(c, s, nu);
                    out(mu, nu, s, r) = e2K * v - d.g(mu, nu) * d.g(s, r) - d.g(mu, s) * d.g(nu, r);
                }
    return out;
}

FrameContractions RMapGeometry::frame_contractions(const CVec& X, const Mat& gauge) const {
    const SKMetricData d = kahler_data(X);
    const Vec x = X.imag();
    FrameContractions fc;
    fc.eK = std::exp(d.K);
    fc.frame = vielbein(d.g);
    if (gauge.size() != 0) {
        fc.frame.e = gauge * fc.frame.e;
        fc.frame.einv = fc.frame.einv * gauge.transpose();
    }
    const Mat& ei = fc.frame.einv;
    fc.h3 = transform3(third_derivative(h_), ei);
    fc.h2 = ei.transpose() * h_.hessian(x) * ei;
    fc.h1 = ei.transpose() * h_.gradient(x);
    return fc;
}

Tensor4<double> RMapGeometry::unitary_curvature(const CVec& X, const Mat& gauge) const {
    const FrameContractions fc = frame_contractions(X, gauge);
    const int m = n();
    const double e2K = fc.eK * fc.eK;
    Tensor4<double> out(m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int e = 0; e < m; ++e)
                for (int d = 0; d < m; ++d) {
                    double v = 0.0;
                    for (int c = 0; c < m; ++c) v += fc.h3(a, d, c) * fc.h3(c, e, b);
                    v *= e2K;
                    if (a == b && d == e) v -= 1.0;
                    if (a == e && b == d) v -= 1.0;
                    out(a, b, e, d) = v;
                }
    return out;
}

ConnectionForm RMapGeometry::connection_one_form(const CVec& X, const Mat& gauge) const {
    const Vec x = X.imag();
    require_domain(x);
    const int m = n();
    const int D = 2 * m;
    Mat e = reversed_cholesky<double>(kahler_metric<double>(x));
    std::vector<Mat> de(m, Mat::Zero(m, m));
    for (int nu = 0; nu < m; ++nu) {
        VecT<HyperDual> xh(m);
        for (int i = 0; i < m; ++i) xh[i] = HyperDual(x[i]);
        xh[nu].d1 = 1.0;
        const MatT<HyperDual> eh = vielbein_field<HyperDual>(xh);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) de[nu](i, j) = eh(i, j).d1;
    }
    if (gauge.size() != 0) {
        e = gauge * e;
        for (auto& d : de) d = gauge * d;
    }
    const Mat einv = inverse<double>(e, ErrorCode::SingularMetric);

    std::vector<CVec> dX(m, CVec::Zero(D)), dXb(m, CVec::Zero(D));
    for (int nu = 0; nu < m; ++nu) {
        dX[nu][nu] = 1.0;
        dX[nu][m + nu] = cd(0.0, 1.0);
        dXb[nu] = dX[nu].conjugate();
    }
    const cd half_i(0.0, 0.5);

    ConnectionForm out{CovectorMatrix(m, m, D), CovectorMatrix(m, m, D)};
    for (int nu = 0; nu < m; ++nu) {
        const Mat w = e * (-einv * de[nu] * einv);  // w(a, b) = e^a_mu d_nu e^mu_b
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                out.from_vielbein(a, b) += half_i * (w(a, b) * dXb[nu] + w(b, a) * dX[nu]);
    }

    CVec z(m + 1);
    z[0] = 1.0;
    z.tail(m) = X;
    const PrepotentialData pd = prepotential(z);
    const double eK = 1.0 / (8.0 * h_.value(x));
    CMat P(m, m + 1);
    P.col(0) = -(e.cast<cd>() * X);
    P.rightCols(m) = e.cast<cd>();
    const CMat Ni = pd.Ninv.cast<cd>();
    const CMat NiPbarT = Ni * P.conjugate().transpose();  // (m+1) x m
    const CMat PNi = P * Ni;                              // m x (m+1)
    for (int nu = 0; nu < m; ++nu) {
        CMat dP(m, m + 1), dPbar(m, m + 1);
        dP.col(0) = -(de[nu].cast<cd>() * X);
        dP.rightCols(m) = de[nu].cast<cd>();
        dPbar.col(0) = -(de[nu].cast<cd>() * X.conjugate());
        dPbar.rightCols(m) = de[nu].cast<cd>();
        const CMat first = dP * NiPbarT;                   // (a, b)
        const CMat second = PNi * dPbar.transpose();       // (a, b)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                out.from_prepotential(a, b) +=
                    (1.0 / eK) * (half_i * first(a, b) * dXb[nu] + half_i * second(a, b) * dX[nu]);
    }
    return out;
}

double RMapGeometry::scal_psk(const CVec& X) const {
    const SKMetricData d = kahler_data(X);
    const int m = n();
    const double hv = h_.value(Vec(X.imag()));
    const Tensor3<double> h3 = third_derivative(h_);
    const Tensor3<double> up = transform3(h3, d.ginv);
    double s = 0.0;
    for (std::size_t i = 0; i < h3.data().size(); ++i) s += h3.data()[i] * up.data()[i];
    return -2.0 * m * (m + 1) + s / (32.0 * hv * hv);
}

PskNorm RMapGeometry::riemann_norm_psk(const CVec& X) const {
    const SKMetricData d = kahler_data(X);
    const int m = n();
    const double hv = h_.value(Vec(X.imag()));
    const Tensor3<double> h3 = third_derivative(h_);
    const Tensor3<double> a = contract_last(h3, d.ginv);
    Tensor4<double> B(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int s = 0; s < m; ++s)
                for (int r = 0; r < m; ++r) {
                    double v = 0.0;
                    for (int k = 0; k < m; ++k) v += a(i, j, k) * h3(k, s, r);
                    B(i, j, s, r) = v;
                }
    PskNorm out;
    out.b_route = -32.0 * scal_psk(X) - 32.0 * m * (m + 1) + full_contract(B, d.ginv) / std::pow(4.0 * hv, 4);
    out.direct = 16.0 * full_contract(riemann_lowered(X), d.ginv);
    return out;
}

PrepotentialData RMapGeometry::prepotential(const CVec& z) const {
    const int m = n();
    if (z.size() != m + 1) throw Error(ErrorCode::DimensionMismatch, "z has wrong dimension");
    const cd z0 = z[0];
    if (std::abs(z0) == 0.0) throw Error(ErrorCode::ZeroZ0, "z^0 = 0");
    const CVec zs = z.tail(m);
    const cd hv = h_.value(zs);
    const CVec g = h_.gradient(zs);
    const CMat hs = h_.hessian(zs);
    PrepotentialData pd;
    pd.F = hv / z0;
    pd.F_I = CVec(m + 1);
    pd.F_I[0] = -hv / (z0 * z0);
    pd.F_I.tail(m) = g / z0;
    pd.F_IJ = CMat(m + 1, m + 1);
    pd.F_IJ(0, 0) = 2.0 * hv / (z0 * z0 * z0);
    for (int i = 0; i < m; ++i) {
        pd.F_IJ(0, i + 1) = -g[i] / (z0 * z0);
        pd.F_IJ(i + 1, 0) = pd.F_IJ(0, i + 1);
    }
    pd.F_IJ.bottomRightCorner(m, m) = hs / z0;
    pd.N = 2.0 * pd.F_IJ.imag();
    pd.Ninv = inverse<double>(pd.N, ErrorCode::SingularMetric);
    return pd;
}

MetricFunctor RMapGeometry::real_metric() const {
    const RMapGeometry self = *this;
    const int m = n();
    MetricFunctor f;
    f.dim = 2 * m;
    f.eval = [self, m](const Vec& c) {
        const Mat k = self.kahler_metric<double>(Vec(c.tail(m)));
        Mat g = Mat::Zero(2 * m, 2 * m);
        g.topLeftCorner(m, m) = k;
        g.bottomRightCorner(m, m) = k;
        return g;
    };
    f.eval_hd = [self, m](const VecT<HyperDual>& c) {
        const MatT<HyperDual> k = self.kahler_metric<HyperDual>(VecT<HyperDual>(c.tail(m)));
        MatT<HyperDual> g = MatT<HyperDual>::Constant(2 * m, 2 * m, HyperDual(0.0));
        g.topLeftCorner(m, m) = k;
        g.bottomRightCorner(m, m) = k;
        return g;
    };
    return f;
}

}  // namespace qmap
