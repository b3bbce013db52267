#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qmap/errors.hpp"
#include "qmap/qmap_geometry.hpp"
#include "qmap/series_analysis.hpp"
#include "support.hpp"

using namespace qmap;
using qmap::test::imag_point;
using qmap::test::vec;

TEST_CASE("n = 1 scalar curvature") {
    for (double x : {0.5, 1.0, 2.0, 3.7}) CHECK(std::abs(series_invariants(1, x, x * x * x).scal + 4.0 / 3.0) < 1e-12);
}

TEST_CASE("closed forms agree with the general pipeline") {
    CounterRng rng(51, 0);
    for (int n : {1, 2, 3}) {
        const QMapGeometry q = QMapGeometry::series(n);
        for (int t = 0; t < 20; ++t) {
            const Vec x = sample_series_domain(n, rng);
            const CVec X = imag_point(x);
            const SeriesInvariants s = series_invariants(n, x[0], q.rmap().cubic().value(x));
            CHECK(s.scal == doctest::Approx(q.rmap().scal_psk(X)).epsilon(1e-10));
            CHECK(s.normR == doctest::Approx(q.rmap().riemann_norm_psk(X).direct).epsilon(1e-10));
            CHECK(s.S2 == doctest::Approx(q.s_norm_sq(X)).epsilon(1e-9));
            CHECK(s.SW == doctest::Approx(q.sw_invariant(X).closed_form).epsilon(1e-10));
        }
    }
}

TEST_CASE("frozen series values") {
    const SeriesInvariants a = series_invariants(2, 1.3, series_cubic(2).value(vec({1.3, 0.25})));
    CHECK(a.scal == doctest::Approx(-7.19191237).epsilon(1e-8));
    CHECK(a.normR == doctest::Approx(92.03948631).epsilon(1e-8));
    CHECK(a.S2 == doctest::Approx(0.79911849).epsilon(1e-8));
    CHECK(a.SW == doctest::Approx(13.24715790).epsilon(1e-8));
    const SeriesInvariants b = series_invariants(1, 2.0, 8.0);
    CHECK(b.SW == doctest::Approx(35.0 / 6.0));
    CHECK(b.normR == doctest::Approx(64.0 / 9.0));
}

TEST_CASE("degree-zero scaling") {
    for (int n : {1, 2, 3})
        for (double lam : {0.3, 1.7, 4.0}) {
            const SeriesInvariants a = series_invariants(n, 1.4, 1.2);
            const SeriesInvariants b = series_invariants(n, lam * 1.4, lam * lam * lam * 1.2);
            CHECK(std::abs(a.SW - b.SW) < 1e-12 * std::max(1.0, std::abs(a.SW)));
            CHECK(std::abs(a.scal - b.scal) < 1e-12 * std::max(1.0, std::abs(a.scal)));
        }
}

TEST_CASE("pole") { CHECK_THROWS_AS(series_invariants(2, 1.0, 4.0), Error); }

TEST_CASE("nonconstancy") {
    const std::vector<double> grid = uniform_grid(1.0, 3.0, 32);
    REQUIRE(grid.size() == 32);
    CHECK(grid.front() == 1.0);
    CHECK(grid.back() == 3.0);
    const ConstancyVerdict v1 = nonconstancy_check(1, grid);
    CHECK(v1.verdict == Constancy::Constant);
    CHECK(v1.range <= 1e-12);
    const ConstancyVerdict v2 = nonconstancy_check(2, grid);
    CHECK(v2.verdict == Constancy::Nonconstant);
    CHECK(v2.range == doctest::Approx(0.649).epsilon(1e-3));
    const ConstancyVerdict v3 = nonconstancy_check(3, grid);
    CHECK(v3.verdict == Constancy::Nonconstant);
    CHECK(v3.range == doctest::Approx(1.187).epsilon(1e-3));
    CHECK_THROWS_AS(nonconstancy_check(2, uniform_grid(1.0, 3.0, 8)), Error);
}

TEST_CASE("inverse hessian") {
    const Mat a = series_hinv(2, 1.0, vec({0.0}));
    CHECK(a(0, 0) == doctest::Approx(2.0 / 12.0));
    CHECK(a(1, 1) == doctest::Approx(-6.0 / 12.0));
    CHECK(a(0, 1) == 0.0);
    for (double x : {0.5, 2.0}) {
        const Mat b = series_hinv(3, x, vec({0.0, 0.0}));
        CHECK(b(0, 0) == doctest::Approx(2 * x / (12 * x * x)));
        CHECK(b(2, 2) == doctest::Approx(-6 * x / (12 * x * x)));
    }
    const Vec p = vec({1.3, 0.25, -0.1});
    const Mat c = series_hinv(3, p[0], p.tail(2));
    CHECK((c - c.transpose()).norm() == 0.0);
    CHECK((c * series_cubic(3).hessian(p) - Mat::Identity(3, 3)).norm() < 1e-12);
    CHECK_THROWS_AS(series_hinv(2, 0.0, vec({0.0})), Error);
}
