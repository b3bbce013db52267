#include "qmap/curvature_oracle.hpp"

#include <algorithm>
#include <cmath>

namespace qmap {

namespace {

struct MetricDerivatives {
    Mat g;
    std::vector<Mat> dg;                // dg[e] = d_e g
    std::vector<std::vector<Mat>> ddg;  // ddg[e][f] = d_e d_f g
};

MetricDerivatives derivatives_hd(const MetricFunctor& m, const Vec& x) {
    const int D = m.dim;
    MetricDerivatives out;
    out.dg.assign(D, Mat::Zero(D, D));
    out.ddg.assign(D, std::vector<Mat>(D, Mat::Zero(D, D)));
    for (int b = 0; b < D; ++b) {
        for (int c = b; c < D; ++c) {
            VecT<HyperDual> xh(D);
            for (int i = 0; i < D; ++i) xh[i] = HyperDual(x[i]);
            xh[b].d1 = 1.0;
            xh[c].d2 = 1.0;
            const MatT<HyperDual> gh = m.eval_hd(xh);
            Mat v(D, D), d1(D, D), d2(D, D), d12(D, D);
            for (int i = 0; i < D; ++i)
                for (int j = 0; j < D; ++j) {
                    v(i, j) = gh(i, j).v;
                    d1(i, j) = gh(i, j).d1;
                    d2(i, j) = gh(i, j).d2;
                    d12(i, j) = gh(i, j).d12;
                }
            if (b == 0 && c == 0) out.g = v;
            if (c == b) out.dg[b] = d1;
            if (b == 0) out.dg[c] = d2;
            out.ddg[b][c] = d12;
            out.ddg[c][b] = d12;
        }
    }
    return out;
}

MetricDerivatives derivatives_fd(const MetricFunctor& m, const Vec& x) {
    const int D = m.dim;
    MetricDerivatives out;
    out.g = m.eval(x);
    out.dg.assign(D, Mat::Zero(D, D));
    out.ddg.assign(D, std::vector<Mat>(D, Mat::Zero(D, D)));
    auto shifted = [&](int i, double hi, int j, double hj) {
        Vec y = x;
        if (i >= 0) y[i] += hi;
        if (j >= 0) y[j] += hj;
        return m.eval(y);
    };
    std::vector<double> h1(D), h2(D);
    for (int i = 0; i < D; ++i) {
        const double scale = std::max(1.0, std::abs(x[i]));
        h1[i] = 1e-5 * scale;
        h2[i] = 1e-4 * scale;
    }
    for (int e = 0; e < D; ++e)
        out.dg[e] = (shifted(e, h1[e], -1, 0) - shifted(e, -h1[e], -1, 0)) / (2.0 * h1[e]);
    for (int e = 0; e < D; ++e) {
        out.ddg[e][e] = (shifted(e, h2[e], -1, 0) - 2.0 * out.g + shifted(e, -h2[e], -1, 0)) / (h2[e] * h2[e]);
        for (int f = e + 1; f < D; ++f) {
            const Mat mixed = (shifted(e, h2[e], f, h2[f]) - shifted(e, h2[e], f, -h2[f]) -
                               shifted(e, -h2[e], f, h2[f]) + shifted(e, -h2[e], f, -h2[f])) /
                              (4.0 * h2[e] * h2[f]);
            out.ddg[e][f] = mixed;
            out.ddg[f][e] = mixed;
        }
    }
    return out;
}

}  // namespace

OracleCurvature oracle_curvature(const MetricFunctor& m, const Vec& x, DerivativeMode mode) {
    const int D = m.dim;
    if (x.size() != D) throw Error(ErrorCode::DimensionMismatch, "oracle point dimension");
    if (mode == DerivativeMode::HyperDual && !m.eval_hd)
        throw Error(ErrorCode::InvalidParameters, "metric has no hyper-dual evaluation");
    const MetricDerivatives md = mode == DerivativeMode::HyperDual ? derivatives_hd(m, x) : derivatives_fd(m, x);
    const Mat& g = md.g;
    const Mat gi = inverse<double>(g, ErrorCode::SingularMetric);

    Tensor3<double> G1(D);  // Gamma_{dbc}
    for (int d = 0; d < D; ++d)
        for (int b = 0; b < D; ++b)
            for (int c = 0; c < D; ++c) G1(d, b, c) = 0.5 * (md.dg[b](d, c) + md.dg[c](d, b) - md.dg[d](b, c));

    OracleCurvature out;
    out.metric = g;
    out.gamma = Tensor3<double>(D);
    for (int a = 0; a < D; ++a)
        for (int b = 0; b < D; ++b)
            for (int c = 0; c < D; ++c) {
                double s = 0.0;
                for (int d = 0; d < D; ++d) s += gi(a, d) * G1(d, b, c);
                out.gamma(a, b, c) = s;
            }

    // dGamma(e, a, b, c) = d_e Gamma^a_{bc}
    Tensor4<double> dGamma(D);
    for (int e = 0; e < D; ++e) {
        const Mat dgi = -gi * md.dg[e] * gi;
        for (int a = 0; a < D; ++a)
            for (int b = 0; b < D; ++b)
                for (int c = 0; c < D; ++c) {
                    double s = 0.0;
                    for (int d = 0; d < D; ++d) {
                        const double dG1 =
                            0.5 * (md.ddg[e][b](d, c) + md.ddg[e][c](d, b) - md.ddg[e][d](b, c));
                        s += dgi(a, d) * G1(d, b, c) + gi(a, d) * dG1;
                    }
                    dGamma(e, a, b, c) = s;
                }
    }

    out.riemann = Tensor4<double>(D);
    for (int a = 0; a < D; ++a)
        for (int b = 0; b < D; ++b)
            for (int c = 0; c < D; ++c)
                for (int d = 0; d < D; ++d) {
                    double s = dGamma(c, a, d, b) - dGamma(d, a, c, b);
                    for (int e = 0; e < D; ++e)
                        s += out.gamma(a, c, e) * out.gamma(e, d, b) - out.gamma(a, d, e) * out.gamma(e, c, b);
                    out.riemann(a, b, c, d) = s;
                }

    out.riemann_lower = Tensor4<double>(D);
    for (int a = 0; a < D; ++a)
        for (int b = 0; b < D; ++b)
            for (int c = 0; c < D; ++c)
                for (int d = 0; d < D; ++d) {
                    double s = 0.0;
                    for (int e = 0; e < D; ++e) s += g(a, e) * out.riemann(e, b, c, d);
                    out.riemann_lower(a, b, c, d) = s;
                }

    out.ricci = Mat::Zero(D, D);
    for (int b = 0; b < D; ++b)
        for (int d = 0; d < D; ++d)
            for (int a = 0; a < D; ++a) out.ricci(b, d) += out.riemann(a, b, a, d);
    out.scal = (gi.cwiseProduct(out.ricci)).sum();

    // Raise all four indices one at a time.
    Tensor4<double> up = out.riemann_lower;
    for (int slot = 0; slot < 4; ++slot) {
        Tensor4<double> next(D);
        for (int a = 0; a < D; ++a)
            for (int b = 0; b < D; ++b)
                for (int c = 0; c < D; ++c)
                    for (int d = 0; d < D; ++d) {
                        int idx[4] = {a, b, c, d};
                        double s = 0.0;
                        for (int k = 0; k < D; ++k) {
                            int j[4] = {a, b, c, d};
                            j[slot] = k;
                            s += gi(idx[slot], k) * up(j[0], j[1], j[2], j[3]);
                        }
                        next(a, b, c, d) = s;
                    }
        up = std::move(next);
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < up.data().size(); ++i) norm += out.riemann_lower.data()[i] * up.data()[i];
    out.norm_sq = norm;

    const double scale = std::max(1.0, max_abs_entry(out.riemann_lower));
    double bianchi = 0.0;
    double anti = 0.0;
    for (int a = 0; a < D; ++a)
        for (int b = 0; b < D; ++b)
            for (int c = 0; c < D; ++c)
                for (int d = 0; d < D; ++d) {
                    const auto& R = out.riemann_lower;
                    bianchi = std::max(bianchi, std::abs(R(a, b, c, d) + R(a, c, d, b) + R(a, d, b, c)));
                    anti = std::max(anti, std::abs(R(a, b, c, d) + R(b, a, c, d)));
                    anti = std::max(anti, std::abs(R(a, b, c, d) + R(a, b, d, c)));
                }
    out.bianchi_residual = bianchi / scale;
    out.antisymmetry_residual = anti / scale;
    return out;
}

SignatureReport signature(const MetricFunctor& m, const Vec& x, double rel_tol) {
    return signature_of(m.eval(x), rel_tol);
}

TubeKahlerOracle tube_kahler_oracle(const std::function<MatT<HyperDual>(const VecT<HyperDual>&)>& kahler,
                                    const Vec& x) {
    const int n = static_cast<int>(x.size());
    TubeKahlerOracle out{Tensor3<double>(n), Tensor4<double>(n)};
    for (int s = 0; s < n; ++s) {
        for (int nu = 0; nu < n; ++nu) {
            VecT<HyperDual> xh(n);
            for (int i = 0; i < n; ++i) xh[i] = HyperDual(x[i]);
            xh[s].d1 = 1.0;
            xh[nu].d2 = 1.0;
            const MatT<HyperDual> K = kahler(xh);
            MatT<HyperDual> Kv(n, n), dK(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    Kv(i, j) = HyperDual(K(i, j).v, 0.0, K(i, j).d2, 0.0);
                    dK(i, j) = HyperDual(K(i, j).d1, 0.0, K(i, j).d12, 0.0);
                }
            const MatT<HyperDual> Ki = inverse<HyperDual>(Kv, ErrorCode::SingularMetric);
            for (int r = 0; r < n; ++r)
                for (int mu = 0; mu < n; ++mu) {
                    HyperDual acc(0.0);
                    for (int k = 0; k < n; ++k) acc += Ki(r, k) * dK(mu, k);
                    out.G(r, s, mu) = acc.v;
                    out.R(r, s, mu, nu) = -0.25 * acc.d2;
                }
        }
    }
    return out;
}

CMat wedge(const CVec& a, const CVec& b) { return a * b.transpose() - b * a.transpose(); }
Mat wedge(const Vec& a, const Vec& b) { return a * b.transpose() - b * a.transpose(); }

double numeric_exterior_derivative(const std::function<Vec(const Vec&)>& form, const Vec& x, const Vec& u,
                                   const Vec& v) {
    const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
    auto directional = [&](const Vec& w) -> Vec {
        const double wn = w.cwiseAbs().maxCoeff();
        if (wn == 0.0) return Vec::Zero(x.size());
        const double h = 1e-5 * scale / wn;
        auto central = [&](double s) -> Vec { return (form(x + s * w) - form(x - s * w)) / (2.0 * s); };
        return (4.0 * central(0.5 * h) - central(h)) / 3.0;
    };
    return directional(u).dot(v) - directional(v).dot(u);
}

std::vector<CMat> exterior_derivative(const std::function<CMat(const Vec&)>& rows, const Vec& x, double rel_step) {
    const int D = static_cast<int>(x.size());
    std::vector<CMat> jac;  // jac[i] = d_i of all rows
    jac.reserve(D);
    int m = -1;
    for (int i = 0; i < D; ++i) {
        const double h = rel_step * std::max(1.0, std::abs(x[i]));
        auto central = [&](double s) -> CMat {
            Vec xp = x, xm = x;
            xp[i] += s;
            xm[i] -= s;
            return (rows(xp) - rows(xm)) / (2.0 * s);
        };
        jac.push_back((4.0 * central(0.5 * h) - central(h)) / 3.0);
        m = static_cast<int>(jac.back().rows());
    }
    std::vector<CMat> out(m, CMat::Zero(D, D));
    for (int r = 0; r < m; ++r)
        for (int i = 0; i < D; ++i)
            for (int j = 0; j < D; ++j) out[r](i, j) = jac[i](r, j) - jac[j](r, i);
    return out;
}

}  // namespace qmap
