#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "qmap/curvature_oracle.hpp"
#include "qmap/errors.hpp"
#include "qmap/qmap_geometry.hpp"
#include "qmap/series_analysis.hpp"
#include "support.hpp"

using namespace qmap;
using qmap::test::imag_point;
using qmap::test::random_point;
using qmap::test::vec;

namespace {

bool positive_definite(const Mat& m) {
    return (m - m.transpose()).norm() < 1e-12 * std::max(1.0, m.norm()) &&
           Eigen::SelfAdjointEigenSolver<Mat>(m).eigenvalues().minCoeff() > 0.0;
}

}  // namespace

TEST_CASE("gauge kinetic matrix") {
    CounterRng rng(31, 0);
    for (int n : {1, 2, 3}) {
        const QMapGeometry q = QMapGeometry::series(n);
        for (int t = 0; t < 100; ++t) {
            const QKPoint p = random_point(n, rng);
            CVec z(n + 1);
            z[0] = 1.0;
            z.tail(n) = p.X;
            const GaugeKineticData g = q.gauge_kinetic(z);
            CHECK(positive_definite(g.Imat));
            if (t < 5) {
                CHECK(positive_definite(g.Hhat));
                const cd lam(0.6, 1.7);
                const GaugeKineticData s = q.gauge_kinetic(CVec(lam * z));
                CHECK((s.Rmat - g.Rmat).norm() < 1e-10 * g.Rmat.norm() + 1e-12);
                CHECK((s.Imat - g.Imat).norm() < 1e-10 * g.Imat.norm());
            }
        }
    }
}

TEST_CASE("fs metric") {
    const QMapGeometry q = QMapGeometry::series(2);
    const ChartLayout L = q.layout();
    QKPoint p = QKPoint::base(imag_point(vec({1.3, 0.25})));
    p.rho = 1.7;
    p.phit = 0.4;
    const Mat g = q.fs_metric(p);
    const double d = 1.0 / (4 * p.rho * p.rho);
    CHECK(g(L.rho(), L.rho()) == doctest::Approx(d));
    CHECK(g(L.phit(), L.phit()) == doctest::Approx(d));
    CHECK(g(L.rho(), L.phit()) == 0.0);
    for (int i = 0; i < L.dim(); ++i) {
        if (i != L.rho()) CHECK(g(L.rho(), i) == 0.0);
        if (i != L.phit() && (i < L.zeta(0) || i > L.zetat(2))) CHECK(g(L.phit(), i) == 0.0);
    }

    CounterRng rng(32, 0);
    for (int n : {1, 2}) {
        const QMapGeometry qn = QMapGeometry::series(n);
        for (int t = 0; t < 100; ++t) CHECK(positive_definite(qn.fs_metric(random_point(n, rng))));
        const SignatureReport s = signature(qn.metric_functor(), random_point(n, rng).chart());
        CHECK(s.positive == 4 * n + 4);
        CHECK(s.negative == 0);
        CHECK(s.zero == 0);
    }
    QKPoint bad = p;
    bad.rho = -1.0;
    CHECK_FALSE(q.valid(bad));
    CHECK_THROWS_AS(q.require_point(bad), Error);
}

TEST_CASE("coframe") {
    CounterRng rng(33, 0);
    for (int n : {1, 2, 3}) {
        const QMapGeometry q = QMapGeometry::series(n);
        const ChartLayout L = q.layout();
        for (int t = 0; t < 100; ++t) {
            const QKPoint p = random_point(n, rng);
            const CoframeData c = q.coframe(p);
            Mat rec = Mat::Zero(L.dim(), L.dim());
            for (int A = 0; A <= n; ++A) {
                const CVec b = c.beta.row(A).transpose();
                const CVec a = c.alpha.row(A).transpose();
                rec += (b * b.adjoint()).real() + (a * a.adjoint()).real();
            }
            CHECK(max_abs(Mat(rec - q.fs_metric(p))) < 1e-10);
            if (t < 5) {
                const CMat pnp = c.P * c.Ninv.cast<cd>() * c.P.adjoint();
                CHECK(max_abs(CMat(pnp + c.eK * CMat::Identity(n, n))) < 1e-10);
                for (int a = 1; a <= n; ++a)
                    CHECK(c.beta.row(a).tail(L.dim() - 2 * n).norm() == 0.0);
                CHECK(std::abs(c.alpha(0, L.rho()) + 1.0 / (2 * p.rho)) < 1e-14);
            }
        }
    }
}

TEST_CASE("connection structure") {
    CounterRng rng(34, 0);
    for (int n : {1, 2}) {
        const QMapGeometry q = QMapGeometry::series(n);
        for (int t = 0; t < 3; ++t) {
            const QKPoint p = random_point(n, rng);
            const ConnectionData c = q.sp_n_connection(p);
            for (int a = 0; a < c.q.rows; ++a)
                for (int b = 0; b < c.q.cols; ++b) CHECK((c.q(a, b) + c.q(b, a).conjugate()).norm() < 1e-12);
            CHECK(q.torsion_residuals(p).max() < 1e-6);
            CHECK(q.structure_residuals(p).max() < 1e-6);
            const SpTorsionResiduals s = q.sp_torsion_residuals(p);
            CHECK(s.beta < 1e-6);
            CHECK(s.alpha < 1e-6);
        }
    }
}

TEST_CASE("quaternionic structure") {
    CounterRng rng(35, 0);
    const QMapGeometry q = QMapGeometry::series(2);
    const QKPoint p = random_point(2, rng);
    const QuaternionicStructure J = q.quaternionic_structure(p);
    const Mat I = Mat::Identity(q.dim(), q.dim());
    for (const Mat* j : {&J.J1, &J.J2, &J.J3}) {
        CHECK(max_abs(Mat(*j * *j + I)) < 1e-12);
        const Mat w = j->transpose() * J.g;
        CHECK(max_abs(Mat(w + w.transpose())) < 1e-12);
    }
    CHECK(max_abs(Mat(J.J1 * J.J2 - J.J3)) < 1e-10);
}

TEST_CASE("curvature of the connection") {
    CounterRng rng(36, 0);
    for (int n : {1, 2, 3}) {
        const QMapGeometry q = QMapGeometry::series(n);
        for (int t = 0; t < 20; ++t) {
            const QKPoint p = random_point(n, rng);
            const CurvatureE e = q.curvature_E(p);
            const CurvatureE o = q.omega_reassembly(p);
            CHECK(max_abs_diff(e.r, o.r) < 1e-9);
            CHECK(max_abs_diff(e.s, o.s) < 1e-9);
            for (int b = 0; b < e.s.cols; ++b) {
                CHECK(max_abs(e.s(0, b)) == 0.0);
                CHECK(max_abs(e.s(b, 0)) == 0.0);
            }
        }
    }
    const QMapGeometry q = QMapGeometry::series(1);
    const QKPoint p = random_point(1, rng);
    const CurvatureE e = q.curvature_E(p);
    const CurvatureE num = q.curvature_E_numeric(p);
    CHECK(max_abs_diff(e.r, num.r) < 1e-5);
    CHECK(max_abs_diff(e.s, num.s) < 1e-5);
}

TEST_CASE("r00 coefficients") {
    CounterRng rng(37, 0);
    const QMapGeometry q = QMapGeometry::series(2);
    const R00Report r = q.r00_report(random_point(2, rng));
    REQUIRE(r.terms.size() == 4);
    const double fitted[4] = {1.5, -1.5, 0.5, -0.5};
    for (int i = 0; i < 4; ++i) {
        CHECK(r.terms[i].fitted == doctest::Approx(fitted[i]).epsilon(1e-6));
        CHECK(r.terms[i].used == doctest::Approx(fitted[i]));
    }
    CHECK(r.fit_residual < 1e-6);
    CHECK(r.used_residual < 1e-6);
    CHECK(r.unit_residual > 1e-2);
}

TEST_CASE("s tensor") {
    const QMapGeometry q2 = QMapGeometry::series(2);
    const CVec X = imag_point(vec({1.3, 0.25}));
    const Tensor4<double> S = q2.s_tensor(X);
    double asym = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) {
                    const double v = S(a, b, c, d);
                    for (double w : {S(b, a, c, d), S(a, c, b, d), S(a, b, d, c), S(d, c, b, a), S(c, d, a, b)})
                        asym = std::max(asym, std::abs(v - w));
                }
    CHECK(asym < 1e-12);
    CHECK(q2.s_norm_sq(X) == doctest::Approx(0.79911849).epsilon(1e-8));
    CHECK(q2.s_norm_sq(X) == doctest::Approx(q2.s_norm_sq_coordinate(X)).epsilon(1e-10));
    const CVec X1 = imag_point(vec({1.0, 0.0}));
    CHECK(q2.s_norm_sq(X1) == doctest::Approx(series_invariants(2, 1.0, 1.0).S2).epsilon(1e-12));

    const QMapGeometry q1 = QMapGeometry::series(1);
    const double s0 = q1.s_norm_sq(imag_point(vec({0.5})));
    for (double x : {1.0, 2.0}) CHECK(std::abs(q1.s_norm_sq(imag_point(vec({x}))) - s0) < 1e-12);

    const QMapGeometry q3 = QMapGeometry::series(3);
    CHECK(q3.s_norm_sq(imag_point(vec({1.3, 0.25, -0.1}))) == doctest::Approx(2.31958525).epsilon(1e-8));
}

TEST_CASE("omega tensor") {
    CounterRng rng(38, 0);
    for (int n : {1, 2, 3}) {
        const QMapGeometry q = QMapGeometry::series(n);
        const QuarticOmega w = q.omega_tensor(random_point(n, rng).X);
        CHECK(w.symmetry_residual() < 1e-12);
        CHECK(std::abs(w(0, 0, w.tilde(0), w.tilde(0)) - 0.5) < 1e-12);
        for (int b = 1; b <= n; ++b)
            for (int d = 1; d <= n; ++d)
                CHECK(std::abs(w(0, b, w.tilde(0), w.tilde(d)) - (b == d ? 0.25 : 0.0)) < 1e-12);
    }
}

TEST_CASE("S_W and the curvature norm") {
    CHECK(QMapGeometry::hp_norm(1) == 88.0);
    CHECK(QMapGeometry::hp_norm(2) == 192.0);
    CHECK(QMapGeometry::expected_scal(1) == -64.0);

    struct Frozen {
        int n;
        Vec x;
        double sw;
        double norm;
    };
    const Frozen cases[] = {{1, vec({1.0}), 35.0 / 6.0, 2176.0 / 3.0},
                            {2, vec({1.3, 0.25}), 13.24715790, 1615.818106},
                            {3, vec({1.3, 0.25, -0.1}), 23.90788363, 2874.104552}};
    for (const Frozen& f : cases) {
        const QMapGeometry q = QMapGeometry::series(f.n);
        const CVec X = imag_point(f.x);
        const SwReport sw = q.sw_invariant(X);
        CHECK(sw.closed_form == doctest::Approx(f.sw).epsilon(1e-8));
        CHECK(sw.omega == doctest::Approx(sw.closed_form).epsilon(1e-10));
        CHECK(std::abs(sw.omega_imag) < 1e-10);
        const QKNorm nr = q.qk_curvature_norm(X);
        CHECK(nr.from_curvatures == doctest::Approx(f.norm).epsilon(1e-9));
        CHECK(nr.via_sw == doctest::Approx(nr.from_curvatures).epsilon(1e-10));
    }

    CounterRng rng(39, 0);
    const QMapGeometry q1 = QMapGeometry::series(1);
    const double base = q1.sw_invariant(imag_point(vec({1.0}))).closed_form;
    for (int t = 0; t < 10; ++t) CHECK(std::abs(q1.sw_invariant(random_point(1, rng).X).closed_form - base) < 1e-10);
}

TEST_CASE("full metric oracle for n = 1") {
    CounterRng rng(40, 0);
    const QMapGeometry q = QMapGeometry::series(1);
    for (int t = 0; t < 2; ++t) {
        const QKPoint p = random_point(1, rng);
        const OracleCurvature o = oracle_curvature(q.metric_functor(), p.chart());
        CHECK(o.scal == doctest::Approx(QMapGeometry::expected_scal(1)).epsilon(1e-5));
        CHECK(o.norm_sq == doctest::Approx(q.qk_curvature_norm(p.X).from_curvatures).epsilon(1e-4));
        CHECK(o.bianchi_residual < 1e-8);
        CHECK(o.antisymmetry_residual < 1e-8);
    }
}
