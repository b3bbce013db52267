#include "qmap/qmap_geometry.hpp"

#include <algorithm>
#include <cmath>

#include "qmap/tensor_ops.hpp"

namespace qmap {

namespace {

const cd kI(0.0, 1.0);

CMat wedge_rows(const CVec& a, const CVec& b) { return wedge(a, b); }

// (X ^ Y)_ab = sum_c X_ac ^ Y_cb for matrices of one-forms.
TwoFormMatrix matrix_wedge(const CovectorMatrix& x, const CovectorMatrix& y) {
    TwoFormMatrix out(x.rows, y.cols, x.dim);
    for (int a = 0; a < x.rows; ++a)
        for (int b = 0; b < y.cols; ++b)
            for (int c = 0; c < x.cols; ++c) out(a, b) += wedge(x(a, c), y(c, b));
    return out;
}

CovectorMatrix conj(const CovectorMatrix& x) {
    CovectorMatrix out = x;
    for (auto& e : out.entries) e = e.conjugate();
    return out;
}

CMat flatten(const CovectorMatrix& x) {
    CMat m(x.rows * x.cols, x.dim);
    for (int i = 0; i < x.rows * x.cols; ++i) m.row(i) = x.entries[i].transpose();
    return m;
}

TwoFormMatrix unflatten(const std::vector<CMat>& forms, int rows, int cols) {
    TwoFormMatrix out;
    out.rows = rows;
    out.cols = cols;
    out.entries = forms;
    return out;
}

CVec row(const CMat& m, int i) { return m.row(i).transpose(); }

}  // namespace

double max_abs_diff(const TwoFormMatrix& a, const TwoFormMatrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.entries.size(); ++i) m = std::max(m, max_abs(CMat(a.entries[i] - b.entries[i])));
    return m;
}

double max_abs_entry(const TwoFormMatrix& a) {
    double m = 0.0;
    for (const auto& e : a.entries) m = std::max(m, max_abs(e));
    return m;
}

double TorsionResiduals::max() const { return std::max({dbeta0, dbeta, dalpha0, dalpha}); }
double StructureResiduals::max() const { return std::max({theta1, theta2, theta3}); }

QKPoint QKPoint::base(const CVec& X) {
    QKPoint p;
    p.X = X;
    p.zeta = Vec::Zero(X.size() + 1);
    p.zetat = Vec::Zero(X.size() + 1);
    return p;
}

QKPoint QKPoint::from_chart(const Vec& c, int n) {
    if (c.size() != 4 * n + 4) throw Error(ErrorCode::DimensionMismatch, "chart vector has wrong dimension");
    const ChartLayout L{n};
    QKPoint p;
    p.X = CVec(n);
    for (int i = 0; i < n; ++i) p.X[i] = cd(c[L.y(i)], c[L.x(i)]);
    p.rho = c[L.rho()];
    p.phit = c[L.phit()];
    p.zeta = c.segment(L.zeta(0), n + 1);
    p.zetat = c.segment(L.zetat(0), n + 1);
    return p;
}

Vec QKPoint::chart() const {
    const int n = static_cast<int>(X.size());
    Vec c(4 * n + 4);
    c << X.real(), X.imag(), rho, phit, zeta, zetat;
    return c;
}

void QuarticOmega::set_symmetric(int a, int b, int c, int d, cd v) {
    int idx[4] = {a, b, c, d};
    std::sort(idx, idx + 4);
    do {
        data_(idx[0], idx[1], idx[2], idx[3]) = v;
    } while (std::next_permutation(idx, idx + 4));
}

double QuarticOmega::symmetry_residual() const {
    const int M = size();
    double r = 0.0;
    for (int a = 0; a < M; ++a)
        for (int b = 0; b < M; ++b)
            for (int c = 0; c < M; ++c)
                for (int d = 0; d < M; ++d) {
                    int idx[4] = {a, b, c, d};
                    const cd v = data_(a, b, c, d);
                    std::sort(idx, idx + 4);
                    do {
                        r = std::max(r, std::abs(v - data_(idx[0], idx[1], idx[2], idx[3])));
                    } while (std::next_permutation(idx, idx + 4));
                }
    return r;
}

QMapGeometry::QMapGeometry(RMapGeometry rmap) : rmap_(std::move(rmap)) {}

QMapGeometry QMapGeometry::series(int n) { return QMapGeometry(RMapGeometry::series(n)); }

bool QMapGeometry::valid(const QKPoint& p) const {
    const int m = n();
    if (p.X.size() != m || p.zeta.size() != m + 1 || p.zetat.size() != m + 1) return false;
    if (!(p.rho > 0.0) || !std::isfinite(p.rho) || !std::isfinite(p.phit)) return false;
    if (!p.zeta.allFinite() || !p.zetat.allFinite() || !p.X.allFinite()) return false;
    return rmap_.in_domain(p.X.imag());
}

void QMapGeometry::require_point(const QKPoint& p) const {
    const int m = n();
    if (p.X.size() != m || p.zeta.size() != m + 1 || p.zetat.size() != m + 1)
        throw Error(ErrorCode::DimensionMismatch, "QK point has wrong dimension");
    if (!(p.rho > 0.0) || !std::isfinite(p.rho)) throw Error(ErrorCode::OutOfDomain, "rho must be positive");
    rmap_.require_domain(p.X.imag());
}

GaugeKineticData QMapGeometry::gauge_kinetic(const CVec& z) const {
    const PrepotentialData pd = rmap_.prepotential(z);
    const CVec v = pd.N.cast<cd>() * z;
    const cd zNz = (z.transpose() * v)(0, 0);
    if (std::abs(zNz) == 0.0) throw Error(ErrorCode::SingularI, "z N z vanishes");
    const CMat NN = pd.F_IJ.conjugate() + kI * (v * v.transpose()) / zNz;
    GaugeKineticData gk;
    gk.Rmat = NN.real();
    gk.Imat = NN.imag();
    const SignatureReport s = signature_of(gk.Imat, 1e-12);
    if (s.negative != 0 || s.zero != 0) throw Error(ErrorCode::SingularI, "Im N is not positive definite");
    gk.Iinv = inverse<double>(gk.Imat, ErrorCode::SingularI);
    const int p = static_cast<int>(z.size());
    gk.Hhat = Mat(2 * p, 2 * p);
    const Mat IiR = gk.Iinv * gk.Rmat;
    gk.Hhat.topLeftCorner(p, p) = gk.Iinv;
    gk.Hhat.topRightCorner(p, p) = IiR;
    gk.Hhat.bottomLeftCorner(p, p) = gk.Rmat * gk.Iinv;
    gk.Hhat.bottomRightCorner(p, p) = gk.Imat + gk.Rmat * IiR;
    return gk;
}

Mat QMapGeometry::fs_metric(const QKPoint& p) const {
    require_point(p);
    return fs_metric_chart<double>(p.chart());
}

MetricFunctor QMapGeometry::metric_functor() const {
    const QMapGeometry self = *this;
    MetricFunctor f;
    f.dim = dim();
    f.eval = [self](const Vec& c) { return self.fs_metric_chart<double>(c); };
    f.eval_hd = [self](const VecT<HyperDual>& c) { return self.fs_metric_chart<HyperDual>(c); };
    return f;
}

CoframeData QMapGeometry::coframe(const QKPoint& p) const {
    require_point(p);
    const int m = n();
    const int D = dim();
    const ChartLayout L = layout();
    CoframeData cf;
    cf.frame = rmap_.frame_contractions(p.X);
    cf.eK = cf.frame.eK;
    const Mat& e = cf.frame.frame.e;
    const Vec x = p.X.imag();
    const double hv = rmap_.cubic().value(x);

    CVec z(m + 1);
    z[0] = 1.0;
    z.tail(m) = p.X;
    const PrepotentialData pd = rmap_.prepotential(z);
    cf.N = pd.N;
    cf.Ninv = pd.Ninv;

    CMat dX = CMat::Zero(m, D);
    for (int i = 0; i < m; ++i) {
        dX(i, L.y(i)) = 1.0;
        dX(i, L.x(i)) = kI;
    }
    cf.A = CMat::Zero(m + 1, D);
    for (int I = 0; I < m + 1; ++I) {
        cf.A(I, L.zetat(I)) = 1.0;
        for (int J = 0; J < m + 1; ++J) cf.A(I, L.zeta(J)) += pd.F_IJ(I, J);
    }
    cf.P = CMat(m, m + 1);
    cf.P.col(0) = -(e.cast<cd>() * p.X);
    cf.P.rightCols(m) = e.cast<cd>();

    const double sqrt_rho = std::sqrt(p.rho);
    const double sqrt_eK = std::sqrt(cf.eK);
    cf.beta = CMat(m + 1, D);
    cf.alpha = CMat(m + 1, D);
    cf.beta.row(0) = (kI * sqrt_eK / sqrt_rho) * (z.transpose() * cf.A);
    cf.beta.bottomRows(m) = e.cast<cd>() * dX;

    CVec a0 = CVec::Zero(D);
    a0[L.rho()] = 1.0;
    CVec th = CVec::Zero(D);
    th[L.phit()] = 1.0;
    for (int I = 0; I < m + 1; ++I) {
        th[L.zetat(I)] = p.zeta[I];
        th[L.zeta(I)] = -p.zetat[I];
    }
    cf.alpha.row(0) = (-(a0 - kI * th) / (2.0 * p.rho)).transpose();
    cf.alpha.bottomRows(m) = (kI / (sqrt_rho * sqrt_eK)) * (cf.P.conjugate() * pd.Ninv.cast<cd>() * cf.A);

    cf.dcK = Vec::Zero(D);
    const Vec g = rmap_.cubic().gradient(x);
    for (int i = 0; i < m; ++i) cf.dcK[L.y(i)] = g[i] / hv;
    return cf;
}

Sp1Connection QMapGeometry::sp1_connection(const QKPoint& p) const {
    const CoframeData cf = coframe(p);
    Sp1Connection s;
    s.theta1 = -0.5 * cf.alpha.row(0).imag().transpose() - 0.25 * cf.dcK;
    s.theta2 = cf.beta.row(0).real().transpose();
    s.theta3 = cf.beta.row(0).imag().transpose();
    return s;
}

ConnectionData QMapGeometry::sp_n_connection(const QKPoint& p) const {
    const CoframeData cf = coframe(p);
    const int m = n();
    const int D = dim();
    const ConnectionForm omega = rmap_.connection_one_form(p.X);
    ConnectionData cd_;
    cd_.theta.theta1 = -0.5 * cf.alpha.row(0).imag().transpose() - 0.25 * cf.dcK;
    cd_.theta.theta2 = cf.beta.row(0).real().transpose();
    cd_.theta.theta3 = cf.beta.row(0).imag().transpose();
    cd_.p11 = -kI * cd_.theta.theta1.cast<cd>();
    cd_.p12 = -row(cf.beta, 0);

    const CVec a0 = row(cf.alpha, 0);
    const CVec dcK = cf.dcK.cast<cd>();
    cd_.q = CovectorMatrix(m + 1, m + 1, D);
    cd_.t = CovectorMatrix(m + 1, m + 1, D);
    cd_.q(0, 0) = 0.25 * kI * dcK + 0.75 * (a0.conjugate() - a0);
    const CVec diag = 0.25 * (-kI * dcK + a0.conjugate() - a0);
    for (int k = 0; k < m; ++k) {
        cd_.q(0, 1 + k) = -row(cf.alpha, 1 + k);
        cd_.q(1 + k, 0) = row(cf.alpha, 1 + k).conjugate();
        for (int l = 0; l < m; ++l) {
            CVec w = CVec::Zero(D);
            w.head(2 * m) = omega.from_vielbein(k, l);
            if (k == l) w += diag;
            cd_.q(1 + k, 1 + l) = w;
            CVec t = CVec::Zero(D);
            for (int c = 0; c < m; ++c) t += cf.frame.h3(k, l, c) * row(cf.alpha, 1 + c);
            cd_.t(1 + k, 1 + l) = kI * cf.eK * t;
        }
    }
    return cd_;
}

CurvatureE QMapGeometry::curvature_E(const QKPoint& p) const {
    const CoframeData cf = coframe(p);
    const int m = n();
    const int N1 = m + 1;
    const int D = dim();
    const double eK = cf.eK;
    const double e2K = eK * eK;
    const Tensor3<double>& h3 = cf.frame.h3;
    const Tensor4<double> S = s_tensor(p.X);
    std::vector<CVec> a(N1), b(N1), ab(N1), bb(N1);
    for (int A = 0; A < N1; ++A) {
        a[A] = row(cf.alpha, A);
        b[A] = row(cf.beta, A);
        ab[A] = a[A].conjugate();
        bb[A] = b[A].conjugate();
    }
    CMat tr = CMat::Zero(D, D);
    for (int C = 0; C < N1; ++C) tr += wedge(a[C], ab[C]) - wedge(b[C], bb[C]);

    CurvatureE out{TwoFormMatrix(N1, N1, D), TwoFormMatrix(N1, N1, D), CMat()};
    const CMat a0a0 = wedge(a[0], ab[0]);
    const CMat b0b0 = wedge(b[0], bb[0]);
    out.r(0, 0) = a0a0 - b0b0 + 0.5 * tr;
    out.r00_unit = 0.5 * (a0a0 - b0b0 + tr);

    for (int B = 0; B < m; ++B) {
        CMat r0b = wedge(a[1 + B], ab[0]) + wedge(bb[1 + B], b[0]);
        CMat rb0 = wedge(a[0], ab[1 + B]) + wedge(bb[0], b[1 + B]);
        for (int C = 0; C < m; ++C)
            for (int E = 0; E < m; ++E) {
                const double c = h3(B, C, E);
                if (c == 0.0) continue;
                r0b += (kI * eK * c) * wedge(ab[1 + C], b[1 + E]);
                rb0 += (kI * eK * c) * wedge(a[1 + C], bb[1 + E]);
            }
        out.r(0, 1 + B) = r0b;
        out.r(1 + B, 0) = rb0;
    }

    // hh(a, d, e, b) = sum_c h3(a, d, c) h3(c, e, b)
    Tensor4<double> hh(m);
    for (int A = 0; A < m; ++A)
        for (int Dd = 0; Dd < m; ++Dd)
            for (int E = 0; E < m; ++E)
                for (int B = 0; B < m; ++B) {
                    double v = 0.0;
                    for (int c = 0; c < m; ++c) v += h3(A, Dd, c) * h3(c, E, B);
                    hh(A, Dd, E, B) = v;
                }
    for (int A = 0; A < m; ++A)
        for (int B = 0; B < m; ++B) {
            CMat r = -(wedge(b[1 + A], bb[1 + B]) + wedge(ab[1 + A], a[1 + B]));
            if (A == B) r += 0.5 * tr;
            CMat s = CMat::Zero(D, D);
            for (int C = 0; C < m; ++C) {
                const double c = h3(A, B, C);
                if (c != 0.0) s += (kI * eK * c) * (wedge(b[0], bb[1 + C]) + wedge(ab[0], a[1 + C]));
            }
            for (int Dd = 0; Dd < m; ++Dd)
                for (int E = 0; E < m; ++E) {
                    const double c = hh(A, Dd, E, B);
                    if (c != 0.0) r -= (e2K * c) * (wedge(a[1 + Dd], ab[1 + E]) + wedge(bb[1 + Dd], b[1 + E]));
                    const double c2 = hh(A, B, Dd, E);  // sum_f h3(a,b,f) h3(f,d,e)
                    if (c2 != 0.0) s += (e2K * c2) * wedge(ab[1 + Dd], b[1 + E]);
                    const double sv = S(A, B, Dd, E);
                    if (sv != 0.0) s -= (2.0 * sv) * wedge(a[1 + Dd], bb[1 + E]);
                }
            out.r(1 + A, 1 + B) = r;
            out.s(1 + A, 1 + B) = s;
        }
    return out;
}

CurvatureE QMapGeometry::curvature_E_numeric(const QKPoint& p) const {
    require_point(p);
    const int N1 = n() + 1;
    const int nn = n();
    const ConnectionData cd0 = sp_n_connection(p);
    auto q_rows = [this, nn](const Vec& c) { return flatten(sp_n_connection(QKPoint::from_chart(c, nn)).q); };
    auto t_rows = [this, nn](const Vec& c) { return flatten(sp_n_connection(QKPoint::from_chart(c, nn)).t); };
    const Vec c = p.chart();
    const TwoFormMatrix dq = unflatten(exterior_derivative(q_rows, c), N1, N1);
    const TwoFormMatrix dt = unflatten(exterior_derivative(t_rows, c), N1, N1);
    const TwoFormMatrix qq = matrix_wedge(cd0.q, cd0.q);
    const TwoFormMatrix ttb = matrix_wedge(cd0.t, conj(cd0.t));
    const TwoFormMatrix qt = matrix_wedge(cd0.q, cd0.t);
    const TwoFormMatrix tqb = matrix_wedge(cd0.t, conj(cd0.q));
    CurvatureE out{dq, dt, CMat()};
    for (std::size_t i = 0; i < out.r.entries.size(); ++i) {
        out.r.entries[i] += qq.entries[i] - ttb.entries[i];
        out.s.entries[i] += qt.entries[i] + tqb.entries[i];
    }
    out.r00_unit = out.r(0, 0);
    return out;
}

R00Report QMapGeometry::r00_report(const QKPoint& p) const {
    const CoframeData cf = coframe(p);
    const CurvatureE closed = curvature_E(p);
    const CurvatureE numeric = curvature_E_numeric(p);
    const int N1 = n() + 1;
    const int D = dim();
    std::vector<CMat> basis(4, CMat::Zero(D, D));
    basis[0] = wedge_rows(row(cf.alpha, 0), row(cf.alpha, 0).conjugate());
    basis[1] = wedge_rows(row(cf.beta, 0), row(cf.beta, 0).conjugate());
    for (int k = 1; k < N1; ++k) {
        basis[2] += wedge_rows(row(cf.alpha, k), row(cf.alpha, k).conjugate());
        basis[3] += wedge_rows(row(cf.beta, k), row(cf.beta, k).conjugate());
    }
    CMat M(D * D, 4);
    for (int j = 0; j < 4; ++j) M.col(j) = basis[j].reshaped();
    const CVec rhs = numeric.r(0, 0).reshaped();
    const CVec coef = M.colPivHouseholderQr().solve(rhs);

    R00Report rep;
    const char* names[4] = {"alpha0^alpha0bar", "beta0^beta0bar", "sum alpha^a^alphabar^a", "sum beta^a^betabar^a"};
    const double unit[4] = {1.0, -1.0, 0.5, -0.5};
    const double used[4] = {1.5, -1.5, 0.5, -0.5};
    for (int j = 0; j < 4; ++j) rep.terms.push_back({names[j], unit[j], used[j], coef[j].real()});
    rep.fit_residual = (M * coef - rhs).cwiseAbs().maxCoeff();
    rep.unit_residual = max_abs(CMat(closed.r00_unit - numeric.r(0, 0)));
    rep.used_residual = max_abs(CMat(closed.r(0, 0) - numeric.r(0, 0)));
    return rep;
}

Tensor4<double> QMapGeometry::s_tensor(const CVec& X) const {
    const FrameContractions fc = rmap_.frame_contractions(X);
    const int m = n();
    const auto& t3 = fc.h3;
    const Mat& t2 = fc.h2;
    const Vec& t1 = fc.h1;
    const double pre = -0.5 * fc.eK * fc.eK;
    auto pair = [&](int a, int b, int c, int d) {
        double v = 0.0;
        for (int f = 0; f < m; ++f) v += t3(a, b, f) * t3(f, c, d);
        return v - 4.0 * t2(a, b) * t2(c, d);
    };
    Tensor4<double> S(m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c)
                for (int d = 0; d < m; ++d) {
                    const double v = pair(b, c, a, d) + pair(a, c, b, d) + pair(a, b, c, d) +
                                     4.0 * (t1[a] * t3(b, c, d) + t1[b] * t3(c, d, a) + t1[c] * t3(d, a, b) +
                                            t1[d] * t3(a, b, c));
                    S(a, b, c, d) = pre * v;
                }
    return S;
}

Tensor4<double> QMapGeometry::s_tensor_coordinate(const CVec& X) const {
    const SKMetricData d = rmap_.kahler_data(X);
    const Vec x = X.imag();
    const int m = n();
    const double hv = rmap_.cubic().value(x);
    const Vec g = rmap_.cubic().gradient(x);
    const Mat hs = rmap_.cubic().hessian(x);
    const Tensor3<double> h3 = third_derivative(rmap_.cubic());
    const Tensor3<double> hk = contract_last(h3, d.ginv);
    // Unsymmetrized summand; the symmetrization of each term over the 24
    // orderings equals the sum over the distinct pairings or placements.
    Tensor4<double> S(m);
    const double pre = -0.5 / (64.0 * hv * hv);
    auto hkh = [&](int a, int b, int c, int dd) {
        double v = 0.0;
        for (int t = 0; t < m; ++t) v += hk(a, b, t) * h3(t, c, dd);
        return v;
    };
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c)
                for (int dd = 0; dd < m; ++dd) {
                    const double t1 = hkh(a, b, c, dd) + hkh(a, c, b, dd) + hkh(a, dd, b, c);
                    const double t2 = hs(a, b) * hs(c, dd) + hs(a, c) * hs(b, dd) + hs(a, dd) * hs(b, c);
                    const double t3 =
                        g[a] * h3(b, c, dd) + g[b] * h3(a, c, dd) + g[c] * h3(a, b, dd) + g[dd] * h3(a, b, c);
                    S(a, b, c, dd) = pre * (t1 - 4.0 * t2 + 4.0 * t3);
                }
    return S;
}

double QMapGeometry::s_norm_sq(const CVec& X) const {
    const Tensor4<double> S = s_tensor(X);
    double s = 0.0;
    for (double v : S.data()) s += v * v;
    return s;
}

double QMapGeometry::s_norm_sq_coordinate(const CVec& X) const {
    const SKMetricData d = rmap_.kahler_data(X);
    return full_contract(s_tensor_coordinate(X), d.ginv);
}

QuarticOmega QMapGeometry::omega_tensor(const CVec& X) const {
    const FrameContractions fc = rmap_.frame_contractions(X);
    const Tensor4<double> S = s_tensor(X);
    const int m = n();
    const double eK = fc.eK;
    const auto& h3 = fc.h3;
    QuarticOmega om(m);
    auto T = [&](int a) { return om.tilde(a); };
    om.set_symmetric(0, 0, T(0), T(0), 0.5);
    for (int b = 0; b < m; ++b) om.set_symmetric(0, 1 + b, T(0), T(1 + b), 0.25);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c) {
                om.set_symmetric(T(0), 1 + a, 1 + b, 1 + c, cd(0.0, -0.5 * eK * h3(a, b, c)));
                om.set_symmetric(0, T(1 + a), T(1 + b), T(1 + c), cd(0.0, -0.5 * eK * h3(a, b, c)));
                for (int d = 0; d < m; ++d) {
                    double hh = 0.0;
                    for (int f = 0; f < m; ++f) hh += h3(a, b, f) * h3(f, c, d);
                    const double v =
                        0.25 * ((a == c && b == d ? 1.0 : 0.0) + (a == d && b == c ? 1.0 : 0.0)) - 0.5 * eK * eK * hh;
                    om.set_symmetric(1 + a, 1 + b, T(1 + c), T(1 + d), v);
                    om.set_symmetric(1 + a, 1 + b, 1 + c, 1 + d, S(a, b, c, d));
                    om.set_symmetric(T(1 + a), T(1 + b), T(1 + c), T(1 + d), S(a, b, c, d));
                }
            }
    return om;
}

CurvatureE QMapGeometry::omega_reassembly(const QKPoint& p) const {
    const CoframeData cf = coframe(p);
    const QuarticOmega om = omega_tensor(p.X);
    const int m = n();
    const int N1 = m + 1;
    const int M2 = 2 * N1;
    const int D = dim();
    std::vector<CVec> f0(M2), f1(M2);
    for (int A = 0; A < N1; ++A) {
        f0[A] = row(cf.beta, A);
        f0[N1 + A] = row(cf.alpha, A);
        f1[A] = -row(cf.alpha, A).conjugate();
        f1[N1 + A] = row(cf.beta, A).conjugate();
    }
    // FF^{GH} = eps_ab f^{aG} ^ f^{bH}
    std::vector<CMat> FF(M2 * M2);
    for (int G = 0; G < M2; ++G)
        for (int H = 0; H < M2; ++H) FF[G * M2 + H] = wedge(f0[G], f1[H]) - wedge(f1[G], f0[H]);
    auto pair_of = [N1](int X) { return X < N1 ? X + N1 : X - N1; };
    auto cl = [N1](int X) { return X < N1 ? 1.0 : -1.0; };  // C_{X, pair(X)}

    CurvatureE out{TwoFormMatrix(N1, N1, D), TwoFormMatrix(N1, N1, D), CMat()};
    for (int Lr = 0; Lr < N1; ++Lr) {
        const int Mi = pair_of(Lr);  // C^{L M} nonzero only here, value -1
        for (int X = 0; X < M2; ++X) {
            CMat acc = (kNu / 4.0) * cl(X) * FF[Lr * M2 + pair_of(X)];
            for (int G = 0; G < M2; ++G)
                for (int H = 0; H < M2; ++H) {
                    const cd w = om(Mi, X, G, H);
                    if (w != 0.0) acc -= w * FF[G * M2 + H];
                }
            if (X < N1)
                out.r(Lr, X) = acc;
            else
                out.s(Lr, X - N1) = acc;
        }
    }
    out.r00_unit = out.r(0, 0);
    return out;
}

SwReport QMapGeometry::sw_invariant(const CVec& X) const {
    const QuarticOmega om = omega_tensor(X);
    const int N1 = n() + 1;
    const int M2 = 2 * N1;
    auto pair_of = [N1](int a) { return a < N1 ? a + N1 : a - N1; };
    auto sg = [N1](int a) { return a < N1 ? -1.0 : 1.0; };
    cd sw = 0.0;
    for (int a = 0; a < M2; ++a)
        for (int b = 0; b < M2; ++b)
            for (int c = 0; c < M2; ++c)
                for (int d = 0; d < M2; ++d) {
                    const cd v = om(a, b, c, d);
                    if (v == 0.0) continue;
                    sw += v * sg(a) * sg(b) * sg(c) * sg(d) * om(pair_of(a), pair_of(b), pair_of(c), pair_of(d));
                }
    const int m = n();
    SwReport rep;
    rep.omega = sw.real();
    rep.omega_imag = sw.imag();
    rep.closed_form = 2.0 * s_norm_sq(X) + 0.25 * (11 * m + 6) * (m + 1) +
                      3.0 / 32.0 * rmap_.riemann_norm_psk(X).direct + 2.5 * rmap_.scal_psk(X);
    return rep;
}

QKNorm QMapGeometry::qk_curvature_norm(const CVec& X) const {
    const int m = n();
    QKNorm q;
    q.from_curvatures = 64.0 * (m + 1) * (4 * m + 3) + 160.0 * rmap_.scal_psk(X) +
                  6.0 * rmap_.riemann_norm_psk(X).direct + 128.0 * s_norm_sq(X);
    q.via_sw = 80.0 * (m + 1) * (m + 1) + 16.0 * (m + 1) + 64.0 * sw_invariant(X).closed_form;
    return q;
}

double QMapGeometry::hp_norm(int n) { return 20.0 * n * n + 44.0 * n + 24.0; }

double QMapGeometry::expected_scal(int n) {
    const int m = n + 1;
    return 4.0 * m * (m + 2) * kNu;
}

QuaternionicStructure QMapGeometry::quaternionic_structure(const QKPoint& p) const {
    const CoframeData cf = coframe(p);
    const int D = dim();
    const int N1 = n() + 1;
    Mat E(D, D), T1(D, D), T2(D, D);
    const Mat br = cf.beta.real(), bi = cf.beta.imag(), ar = cf.alpha.real(), ai = cf.alpha.imag();
    E << br, bi, ar, ai;
    T1 << -bi, br, -ai, ar;
    T2 << -ar, ai, br, -bi;
    (void)N1;
    const Eigen::PartialPivLU<Mat> lu(E);
    QuaternionicStructure q;
    q.J1 = lu.solve(T1);
    q.J2 = lu.solve(T2);
    q.J3 = q.J1 * q.J2;
    q.g = fs_metric(p);
    return q;
}

TorsionResiduals QMapGeometry::torsion_residuals(const QKPoint& p) const {
    const CoframeData cf = coframe(p);
    const int m = n();
    const int N1 = m + 1;
    const ConnectionForm omega = rmap_.connection_one_form(p.X);
    const int D = dim();
    const int nn = m;
    auto rows = [this, nn](const Vec& c) {
        const CoframeData f = coframe(QKPoint::from_chart(c, nn));
        CMat r(2 * (nn + 1), f.beta.cols());
        r << f.beta, f.alpha;
        return r;
    };
    const std::vector<CMat> d = exterior_derivative(rows, p.chart());
    std::vector<CVec> a(N1), b(N1);
    for (int A = 0; A < N1; ++A) {
        a[A] = row(cf.alpha, A);
        b[A] = row(cf.beta, A);
    }
    auto om = [&](int i, int j) {
        CVec w = CVec::Zero(D);
        w.head(2 * m) = omega.from_vielbein(i, j);
        return w;
    };
    const CVec Lf = 0.5 * (a[0] + a[0].conjugate() - kI * cf.dcK.cast<cd>());
    TorsionResiduals r;
    CMat e = d[0] - wedge(Lf, b[0]);
    for (int k = 1; k < N1; ++k) e -= wedge(a[k], b[k]);
    r.dbeta0 = max_abs(e);
    for (int A = 0; A < m; ++A) {
        CMat t = d[1 + A];
        for (int B = 0; B < m; ++B) t += wedge(om(A, B), b[1 + B]);
        r.dbeta = std::max(r.dbeta, max_abs(t));
    }
    e = d[N1] + wedge(a[0], a[0].conjugate()) - wedge(b[0], b[0].conjugate());
    for (int k = 1; k < N1; ++k) e += wedge(a[k], a[k].conjugate());
    r.dalpha0 = max_abs(e);
    for (int A = 0; A < m; ++A) {
        CMat t = d[N1 + 1 + A] - wedge(Lf, a[1 + A]) - wedge(b[0], b[1 + A].conjugate());
        for (int B = 0; B < m; ++B) {
            t += wedge(CVec(om(A, B).conjugate()), a[1 + B]);
            for (int C = 0; C < m; ++C) {
                const double c = cf.frame.h3(A, B, C);
                if (c != 0.0) t += (kI * cf.eK * c) * wedge(CVec(a[1 + B].conjugate()), b[1 + C]);
            }
        }
        r.dalpha = std::max(r.dalpha, max_abs(t));
    }
    return r;
}

StructureResiduals QMapGeometry::structure_residuals(const QKPoint& p) const {
    const QuaternionicStructure J = quaternionic_structure(p);
    const Sp1Connection th = sp1_connection(p);
    const int nn = n();
    auto rows = [this, nn](const Vec& c) {
        const Sp1Connection s = sp1_connection(QKPoint::from_chart(c, nn));
        CMat r(3, s.theta1.size());
        r.row(0) = s.theta1.transpose().cast<cd>();
        r.row(1) = s.theta2.transpose().cast<cd>();
        r.row(2) = s.theta3.transpose().cast<cd>();
        return r;
    };
    const std::vector<CMat> d = exterior_derivative(rows, p.chart());
    const Mat w1 = J.J1.transpose() * J.g;
    const Mat w2 = J.J2.transpose() * J.g;
    const Mat w3 = J.J3.transpose() * J.g;
    const double half_nu = kNu / 2.0;
    StructureResiduals r;
    r.theta1 = max_abs(Mat(d[0].real() - 2.0 * wedge(th.theta2, th.theta3) - half_nu * w1));
    r.theta2 = max_abs(Mat(d[1].real() - 2.0 * wedge(th.theta3, th.theta1) - half_nu * w2));
    r.theta3 = max_abs(Mat(d[2].real() - 2.0 * wedge(th.theta1, th.theta2) - half_nu * w3));
    return r;
}

SpTorsionResiduals QMapGeometry::sp_torsion_residuals(const QKPoint& p) const {
    const CoframeData cf = coframe(p);
    const ConnectionData c = sp_n_connection(p);
    const int N1 = n() + 1;
    const int nn = n();
    auto rows = [this, nn](const Vec& x) {
        const CoframeData f = coframe(QKPoint::from_chart(x, nn));
        CMat r(2 * (nn + 1), f.beta.cols());
        r << f.beta, f.alpha;
        return r;
    };
    const std::vector<CMat> d = exterior_derivative(rows, p.chart());
    SpTorsionResiduals r;
    for (int A = 0; A < N1; ++A) {
        const CVec bA = row(cf.beta, A), aA = row(cf.alpha, A);
        CMat eb = d[A] + wedge(c.p11, bA) - wedge(c.p12, CVec(aA.conjugate()));
        CMat ea = d[N1 + A] + wedge(c.p11, aA) + wedge(c.p12, CVec(bA.conjugate()));
        for (int B = 0; B < N1; ++B) {
            const CVec bB = row(cf.beta, B), aB = row(cf.alpha, B);
            eb += wedge(c.q(A, B), bB) + wedge(c.t(A, B), aB);
            ea += -wedge(CVec(c.t(A, B).conjugate()), bB) + wedge(CVec(c.q(A, B).conjugate()), aB);
        }
        r.beta = std::max(r.beta, max_abs(eb));
        r.alpha = std::max(r.alpha, max_abs(ea));
    }
    return r;
}

}  // namespace qmap
