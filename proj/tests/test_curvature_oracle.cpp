#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qmap/curvature_oracle.hpp"
#include "qmap/qmap_geometry.hpp"
#include "support.hpp"

using namespace qmap;
using qmap::test::random_point;
using qmap::test::vec;

namespace {

MetricFunctor sphere() {
    MetricFunctor m;
    m.dim = 2;
    m.eval = [](const Vec& x) {
        Mat g = Mat::Zero(2, 2);
        g(0, 0) = 1.0;
        g(1, 1) = std::sin(x[0]) * std::sin(x[0]);
        return g;
    };
    m.eval_hd = [](const VecT<HyperDual>& x) {
        MatT<HyperDual> g = MatT<HyperDual>::Constant(2, 2, HyperDual(0.0));
        g(0, 0) = HyperDual(1.0);
        g(1, 1) = qmap::sin(x[0]) * qmap::sin(x[0]);
        return g;
    };
    return m;
}

MetricFunctor hyperbolic_plane() {
    MetricFunctor m;
    m.dim = 2;
    m.eval = [](const Vec& x) { return Mat(Mat::Identity(2, 2) / (x[1] * x[1])); };
    m.eval_hd = [](const VecT<HyperDual>& x) {
        MatT<HyperDual> g = MatT<HyperDual>::Constant(2, 2, HyperDual(0.0));
        const HyperDual w = HyperDual(1.0) / (x[1] * x[1]);
        g(0, 0) = w;
        g(1, 1) = w;
        return g;
    };
    return m;
}

double max_abs4(const Tensor4<double>& t) { return max_abs_entry(t); }

}  // namespace

TEST_CASE("flat metric") {
    MetricFunctor m;
    m.dim = 3;
    m.eval = [](const Vec&) {
        Mat g(3, 3);
        g << 2, 0.3, 0, 0.3, 1, 0.1, 0, 0.1, 4;
        return g;
    };
    const OracleCurvature o = oracle_curvature(m, vec({0.1, 0.2, 0.3}), DerivativeMode::FiniteDifference);
    CHECK(max_abs4(o.riemann) < 1e-12);
    CHECK(std::abs(o.scal) < 1e-12);
    CHECK(std::abs(o.norm_sq) < 1e-12);
}

TEST_CASE("round sphere") {
    const OracleCurvature o = oracle_curvature(sphere(), vec({0.9, 0.4}));
    CHECK(std::abs(o.scal - 2.0) < 1e-9);
    CHECK(std::abs(o.norm_sq - 4.0) < 1e-9);
    CHECK(o.bianchi_residual < 1e-8);
    CHECK(o.antisymmetry_residual < 1e-8);
    const OracleCurvature f = oracle_curvature(sphere(), vec({0.9, 0.4}), DerivativeMode::FiniteDifference);
    CHECK(std::abs(f.scal - 2.0) < 1e-6);
}

TEST_CASE("hyperbolic plane") {
    const OracleCurvature o = oracle_curvature(hyperbolic_plane(), vec({0.3, 1.7}));
    CHECK(std::abs(o.scal + 2.0) < 1e-9);
    CHECK(std::abs(o.norm_sq - 4.0) < 1e-9);
    const OracleCurvature f = oracle_curvature(hyperbolic_plane(), vec({0.3, 1.7}), DerivativeMode::FiniteDifference);
    CHECK(std::abs(f.scal + 2.0) < 1e-6);
}

TEST_CASE("hyper-dual and finite-difference modes agree on project metrics") {
    CounterRng rng(41, 0);
    for (int n : {1, 2}) {
        const QMapGeometry q = QMapGeometry::series(n);
        const Vec c = random_point(n, rng).chart();
        const OracleCurvature a = oracle_curvature(q.metric_functor(), c, DerivativeMode::HyperDual);
        const OracleCurvature b = oracle_curvature(q.metric_functor(), c, DerivativeMode::FiniteDifference);
        CHECK(max_abs_diff(a.gamma, b.gamma) < 1e-6);
        CHECK(max_abs_diff(a.riemann, b.riemann) < 1e-4);
        CHECK(a.bianchi_residual < 1e-8);
        CHECK(a.antisymmetry_residual < 1e-8);

        const MetricFunctor rm = q.rmap().real_metric();
        Vec x(2 * n);
        x << c.head(n), c.segment(n, n);
        const OracleCurvature r = oracle_curvature(rm, x);
        CHECK(r.bianchi_residual < 1e-8);
        CHECK(r.antisymmetry_residual < 1e-8);
    }
}

TEST_CASE("exterior derivative") {
    auto df = [](const Vec& x) {
        // f = x^2 y + y^3 z
        return vec({2 * x[0] * x[1], x[0] * x[0] + 3 * x[1] * x[1] * x[2], x[1] * x[1] * x[1]});
    };
    const Vec p = vec({0.4, -1.1, 0.7});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(std::abs(numeric_exterior_derivative(df, p, Vec::Unit(3, i), Vec::Unit(3, j))) < 1e-9);

    auto xdy = [](const Vec& x) { return vec({0.0, x[0]}); };
    CHECK(numeric_exterior_derivative(xdy, vec({0.3, 0.8}), Vec::Unit(2, 0), Vec::Unit(2, 1)) ==
          doctest::Approx(1.0).epsilon(1e-9));

    auto rows = [](const Vec& x) {
        CMat m = CMat::Zero(1, 2);
        m(0, 1) = cd(x[0], x[0] * x[0]);
        return m;
    };
    const std::vector<CMat> d = exterior_derivative(rows, vec({0.5, 0.2}));
    CHECK(std::abs(d[0](0, 1) - cd(1.0, 1.0)) < 1e-8);
    CHECK(std::abs(d[0](1, 0) + cd(1.0, 1.0)) < 1e-8);
}

TEST_CASE("structure equation through the exterior derivative") {
    CounterRng rng(42, 0);
    const QMapGeometry q = QMapGeometry::series(2);
    CHECK(q.structure_residuals(random_point(2, rng)).max() < 1e-6);
}

TEST_CASE("signatures") {
    MetricFunctor lorentz;
    lorentz.dim = 3;
    lorentz.eval = [](const Vec&) { return Mat(vec({1.0, -1.0, -1.0}).asDiagonal()); };
    const SignatureReport s = signature(lorentz, Vec::Zero(3));
    CHECK(s.positive == 1);
    CHECK(s.negative == 2);
    CHECK(s.zero == 0);

    MetricFunctor degenerate;
    degenerate.dim = 2;
    degenerate.eval = [](const Vec&) { return Mat(vec({1.0, 0.0}).asDiagonal()); };
    CHECK(signature(degenerate, Vec::Zero(2)).zero == 1);

    CounterRng rng(43, 0);
    const QMapGeometry q = QMapGeometry::series(2);
    const SignatureReport f = signature(q.metric_functor(), random_point(2, rng).chart());
    CHECK(f.positive == 12);
}
