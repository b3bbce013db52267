#include "qmap/isometry_embeddings.hpp"

#include <cmath>

#include "qmap/sampling.hpp"

namespace qmap {

Mat standard_symplectic(int n) {
    const int p = n + 1;
    Mat J = Mat::Zero(2 * p, 2 * p);
    J.topRightCorner(p, p) = Mat::Identity(p, p);
    J.bottomLeftCorner(p, p) = -Mat::Identity(p, p);
    return J;
}

SymplecticAut phi_translation(const CubicForm& h, const Vec& v) {
    const int n = h.dim();
    if (v.size() != n) throw Error(ErrorCode::DimensionMismatch, "translation vector dimension");
    const double hv = h.value(v);
    const Vec Hvv = h.contract2(v, v);
    const Mat Hv = h.contract1(v);
    Mat M = Mat::Zero(2 * n + 2, 2 * n + 2);
    M(0, 0) = 1.0;
    M.block(1, 0, n, 1) = v;
    M.block(1, 1, n, n) = Mat::Identity(n, n);
    M(n + 1, 0) = -hv;
    M.block(n + 1, 1, 1, n) = -3.0 * Hvv.transpose();
    M(n + 1, n + 1) = 1.0;
    M.block(n + 1, n + 2, 1, n) = -v.transpose();
    M.block(n + 2, 0, n, 1) = 3.0 * Hvv;
    M.block(n + 2, 1, n, n) = 6.0 * Hv;
    M.block(n + 2, n + 2, n, n) = Mat::Identity(n, n);
    return {M};
}

SymplecticAut phi_scaling(double lambda, int n) {
    if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidParameters, "lambda must be positive");
    Vec d(2 * n + 2);
    d[0] = lambda * lambda * lambda;
    d.segment(1, n).setConstant(lambda);
    d[n + 1] = 1.0 / d[0];
    d.tail(n).setConstant(1.0 / lambda);
    return {Mat(d.asDiagonal())};
}

SymplecticAut phi_linear(const CubicForm& h, const Mat& A) {
    const int n = h.dim();
    if (A.rows() != n || A.cols() != n) throw Error(ErrorCode::DimensionMismatch, "linear map dimension");
    CounterRng rng(0x5eed, 17);
    for (int i = 0; i < 16; ++i) {
        const Vec v = rng.normal_vec(n);
        const double a = h.value(v);
        if (std::abs(h.value(Vec(A * v)) - a) > 1e-10 * std::max(1.0, std::abs(a)))
            throw Error(ErrorCode::NotAutomorphism, "A does not preserve h");
    }
    const Mat Ait = inverse<double>(A, ErrorCode::NotAutomorphism).transpose();
    Mat M = Mat::Zero(2 * n + 2, 2 * n + 2);
    M(0, 0) = 1.0;
    M.block(1, 1, n, n) = A;
    M(n + 1, n + 1) = 1.0;
    M.block(n + 2, n + 2, n, n) = Ait;
    return {M};
}

double symplectic_residual(const SymplecticAut& g) {
    const int n = static_cast<int>(g.M.rows()) / 2 - 1;
    const Mat J = standard_symplectic(n);
    return max_abs(Mat(g.M.transpose() * J * g.M - J));
}

ConePoint cone_point(const RMapGeometry& rmap, const CVec& z) {
    return {z, rmap.prepotential(z).F_I};
}

double cone_preservation(const RMapGeometry& rmap, const SymplecticAut& g, const std::vector<ConePoint>& pts) {
    const int p = rmap.n() + 1;
    double r = 0.0;
    for (const auto& c : pts) {
        CVec v(2 * p);
        v << c.z, c.w;
        const CVec out = g.M.cast<cd>() * v;
        const CVec F = rmap.prepotential(out.head(p)).F_I;
        r = std::max(r, (out.tail(p) - F).cwiseAbs().maxCoeff());
    }
    return r;
}

Vec act_on_chart(const SymplecticAut& g, const Vec& chart, int n) {
    const ChartLayout L{n};
    const int p = n + 1;
    Vec c = chart;
    CVec z(p);
    z[0] = 1.0;
    for (int i = 0; i < n; ++i) z[1 + i] = cd(chart[L.y(i)], chart[L.x(i)]);
    const CVec zp = g.M.topLeftCorner(p, p).cast<cd>() * z;
    for (int i = 0; i < n; ++i) {
        const cd X = zp[1 + i] / zp[0];
        c[L.y(i)] = X.real();
        c[L.x(i)] = X.imag();
    }
    Vec f(2 * p);
    f << chart.segment(L.zeta(0), p), -chart.segment(L.zetat(0), p);
    const Vec fp = g.M * f;
    c.segment(L.zeta(0), p) = fp.head(p);
    c.segment(L.zetat(0), p) = -fp.tail(p);
    return c;
}

std::vector<Generator> fiber_generators(int n) {
    const ChartLayout L{n};
    std::vector<Generator> gens;
    gens.push_back({"phit", [L](const Vec& c, double t) {
                        Vec o = c;
                        o[L.phit()] += t;
                        return o;
                    }});
    for (int I = 0; I <= n; ++I) {
        gens.push_back({"zeta" + std::to_string(I), [L, I](const Vec& c, double t) {
                            Vec o = c;
                            o[L.zeta(I)] += t;
                            o[L.phit()] -= t * c[L.zetat(I)];
                            return o;
                        }});
        gens.push_back({"zetat" + std::to_string(I), [L, I](const Vec& c, double t) {
                            Vec o = c;
                            o[L.zetat(I)] += t;
                            o[L.phit()] += t * c[L.zeta(I)];
                            return o;
                        }});
    }
    gens.push_back({"dilation", [L, n](const Vec& c, double t) {
                        const double l = std::exp(t);
                        Vec o = c;
                        o[L.rho()] *= l * l;
                        o[L.phit()] *= l * l;
                        o.segment(L.zeta(0), n + 1) *= l;
                        o.segment(L.zetat(0), n + 1) *= l;
                        return o;
                    }});
    return gens;
}

std::vector<Generator> series_automorphism_generators(int n) {
    std::vector<Generator> gens = fiber_generators(n);
    const CubicForm h = series_cubic(n);
    for (int i = 0; i < n; ++i) {
        gens.push_back({"translation" + std::to_string(i), [h, i, n](const Vec& c, double t) {
                            Vec v = Vec::Zero(n);
                            v[i] = t;
                            return act_on_chart(phi_translation(h, v), c, n);
                        }});
    }
    gens.push_back({"scaling", [n](const Vec& c, double t) { return act_on_chart(phi_scaling(std::exp(t), n), c, n); }});
    for (int i = 1; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            gens.push_back({"rotation" + std::to_string(i) + std::to_string(j), [h, i, j, n](const Vec& c, double t) {
                                Mat A = Mat::Identity(n, n);
                                A(i, i) = A(j, j) = std::cos(t);
                                A(i, j) = -std::sin(t);
                                A(j, i) = std::sin(t);
                                return act_on_chart(phi_linear(h, A), c, n);
                            }});
        }
    return gens;
}

Vec generator_vector(const Generator& g, const Vec& chart) {
    const double t = 1e-6;
    return (g.flow(chart, t) - g.flow(chart, -t)) / (2.0 * t);
}

double isometry_residual(const QMapGeometry& q, const Generator& g, const Vec& chart, double t, double step) {
    const int D = q.dim();
    Mat J(D, D);
    for (int i = 0; i < D; ++i) {
        Vec e = Vec::Zero(D);
        e[i] = step;
        J.col(i) = (g.flow(chart + e, t) - g.flow(chart - e, t)) / (2.0 * step);
    }
    const Mat g0 = q.fs_metric(QKPoint::from_chart(chart, q.n()));
    const Mat g1 = q.fs_metric(QKPoint::from_chart(g.flow(chart, t), q.n()));
    return max_abs(Mat(J.transpose() * g1 * J - g0));
}

OrbitReport orbit_dimension(const QMapGeometry& q, const QKPoint& p, const std::vector<Generator>& gens,
                            int expected) {
    q.require_point(p);
    const Vec c = p.chart();
    Mat V(q.dim(), static_cast<int>(gens.size()));
    for (std::size_t k = 0; k < gens.size(); ++k) V.col(static_cast<int>(k)) = generator_vector(gens[k], c);
    const Eigen::JacobiSVD<Mat> svd(V);
    const Vec s = svd.singularValues();
    OrbitReport rep;
    rep.expected = expected;
    const double smax = s.size() ? s.maxCoeff() : 0.0;
    for (int i = 0; i < s.size(); ++i) {
        rep.singular_values.push_back(s[i]);
        if (s[i] >= 1e-8 * smax && smax > 0.0) ++rep.rank;
    }
    rep.deficient = rep.rank < expected;
    return rep;
}

}  // namespace qmap
