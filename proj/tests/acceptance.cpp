#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "qmap/cubic_form.hpp"
#include "qmap/curvature_oracle.hpp"
#include "qmap/isometry_embeddings.hpp"
#include "qmap/qmap_geometry.hpp"
#include "qmap/sampling.hpp"
#include "qmap/series_analysis.hpp"
#include "support.hpp"

using namespace qmap;
using qmap::test::imag_point;
using qmap::test::random_point;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

class Worst {
public:
    void add(double v) { value_ = std::max(value_, std::isnan(v) ? INFINITY : v); }
    double value() const { return value_; }

private:
    double value_ = 0.0;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

CVec random_X(int n, CounterRng& rng) {
    const Vec x = sample_series_domain(n, rng);
    CVec X(n);
    for (int i = 0; i < n; ++i) X[i] = cd(rng.normal(), x[i]);
    return X;
}

Outcome point_checks() {
    Outcome o;
    for (int n : {3, 4, 5, 6}) {
        const int dim = n + 1;
        std::vector<long long> pa(dim, 0), pb(dim, 0), pc(dim, 0);
        pa[0] = 1;
        pb[0] = 1;
        pb[1] = 2;
        pc[0] = -1;
        pc[dim - 1] = 2;
        const std::vector<std::pair<Family, std::vector<long long>>> cases{
            {Family::a, pa}, {Family::b, pb}, {Family::c, pc}};
        const long long expect[3] = {1, 5, 3};
        for (int c = 0; c < 3; ++c) {
            const CubicForm h = normal_form({cases[c].first, n, 0});
            const auto v = h.value_exact(cases[c].second);
            const auto hess = h.hessian_exact(cases[c].second);
            const bool ok = v && *v == expect[c] && hess && [&] {
                const SignatureReport s = exact_signature(*hess);
                return s.positive == 1 && s.negative == n && s.zero == 0;
            }();
            o.pass = o.pass && ok;
        }
    }
    o.detail = "h(p_A)=1, h(p_B)=5, h(p_C)=3, signature (1,n) exact for n=3..6";
    return o;
}

Outcome determinants() {
    Worst w;
    int count = 0;
    for (int dim = 4; dim <= 6; ++dim) {
        const int n = dim - 1;
        std::vector<FamilyTag> tags;
        for (int k = 0; k <= n + 1; ++k) {
            if (2 * k >= n && k <= n) tags.push_back({Family::I, n, k});
            if (k >= 1) tags.push_back({Family::II, n, k});
        }
        for (const FamilyTag& t : tags) {
            CounterRng rng(0xde7, static_cast<std::uint64_t>(100 * dim + 10 * static_cast<int>(t.family) + t.k));
            for (int i = 0; i < 100; ++i) {
                const DetIdentity d = hessian_det_identity(t, rng.normal_vec(dim));
                const double scale = std::max(std::abs(d.lhs), std::abs(d.rhs));
                w.add(scale == 0.0 ? 0.0 : std::abs(d.lhs - d.rhs) / scale);
                ++count;
            }
        }
    }
    return {w.value() <= 1e-10, fmt("max rel err %.2e", w.value()) + " over " + std::to_string(count) + " points"};
}

Outcome rmap_curvature() {
    Worst gam, rie, scal, norm;
    CounterRng rng(0xc3, 0);
    for (int n : {1, 2, 3}) {
        const RMapGeometry r = RMapGeometry::series(n);
        const MetricFunctor real = r.real_metric();
        for (int i = 0; i < 20; ++i) {
            const CVec X = random_X(n, rng);
            const TubeKahlerOracle t = tube_kahler_oracle(
                [&r](const VecT<HyperDual>& v) { return r.kahler_metric<HyperDual>(v); }, X.imag());
            const Tensor3<cd> G = r.christoffel(X);
            double dg = 0.0;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    for (int c = 0; c < n; ++c) dg = std::max(dg, std::abs(G(a, b, c) - cd(0, -0.5) * t.G(a, b, c)));
            gam.add(dg / std::max(1.0, max_abs_entry(t.G)));
            rie.add(max_abs_diff(r.riemann_coeffs(X), t.R) / std::max(1.0, max_abs_entry(t.R)));
            Vec c(2 * n);
            c << X.real(), X.imag();
            const OracleCurvature o = oracle_curvature(real, c);
            scal.add(rel(o.scal / kScalCalibration, r.scal_psk(X)));
            norm.add(rel(o.norm_sq / kNormCalibration, r.riemann_norm_psk(X).direct));
        }
    }
    const bool pass = gam.value() <= 1e-8 && rie.value() <= 1e-8 && scal.value() <= 1e-6 && norm.value() <= 1e-8;
    return {pass, fmt("Gamma %.1e", gam.value()) + fmt(", R %.1e", rie.value()) + fmt(", scal %.1e", scal.value()) +
                      fmt(", |R|^2 %.1e", norm.value())};
}

Outcome n1_constants() {
    const RMapGeometry r = RMapGeometry::series(1);
    Worst w, oracle;
    for (double x : {0.5, 1.0, 2.0}) {
        w.add(std::abs(r.scal_psk(imag_point(qmap::test::vec({x}))) + 4.0 / 3.0));
        const OracleCurvature o = oracle_curvature(r.real_metric(), qmap::test::vec({0.0, x}));
        oracle.add(std::abs(o.scal / kScalCalibration + 4.0 / 3.0));
    }
    return {w.value() <= 1e-12 && oracle.value() <= 1e-6,
            fmt("scal_psk + 4/3: %.1e", w.value()) + fmt(", oracle %.1e", oracle.value())};
}

Outcome coframe() {
    Worst w;
    CounterRng rng(0xc5, 0);
    for (int n : {1, 2, 3}) {
        const QMapGeometry q = QMapGeometry::series(n);
        for (int i = 0; i < 100; ++i) {
            const QKPoint p = random_point(n, rng);
            const CoframeData c = q.coframe(p);
            Mat rec = Mat::Zero(q.dim(), q.dim());
            for (int A = 0; A <= n; ++A) {
                const CVec b = c.beta.row(A).transpose();
                const CVec a = c.alpha.row(A).transpose();
                rec += (b * b.adjoint()).real() + (a * a.adjoint()).real();
            }
            w.add(max_abs(Mat(rec - q.fs_metric(p))));
        }
    }
    return {w.value() <= 1e-10, fmt("max residual %.2e over 300 points", w.value())};
}

Outcome connection_identities() {
    Worst tor, str;
    CounterRng rng(0xc6, 0);
    for (int n : {1, 2}) {
        const QMapGeometry q = QMapGeometry::series(n);
        for (int i = 0; i < 10; ++i) {
            const QKPoint p = random_point(n, rng);
            tor.add(q.torsion_residuals(p).max());
            str.add(q.structure_residuals(p).max());
        }
    }
    return {tor.value() <= 1e-6 && str.value() <= 1e-6,
            fmt("torsion %.1e", tor.value()) + fmt(", structure (nu=-2) %.1e", str.value())};
}

Outcome reassembly() {
    Worst w;
    CounterRng rng(0xc7, 0);
    for (int n : {1, 2, 3}) {
        const QMapGeometry q = QMapGeometry::series(n);
        for (int i = 0; i < 20; ++i) {
            const QKPoint p = random_point(n, rng);
            const CurvatureE e = q.curvature_E(p);
            const CurvatureE o = q.omega_reassembly(p);
            w.add(std::max(max_abs_diff(e.r, o.r), max_abs_diff(e.s, o.s)));
        }
    }
    return {w.value() <= 1e-9, fmt("max residual %.2e (r^0_0 with coefficients 3/2, -3/2, 1/2, -1/2)", w.value())};
}

Outcome norm_chain() {
    Worst chain, onorm, oscal;
    CounterRng rng(0xc8, 0);
    for (int n : {1, 2, 3}) {
        const QMapGeometry q = QMapGeometry::series(n);
        for (int i = 0; i < 20; ++i) {
            const QKNorm k = q.qk_curvature_norm(random_X(n, rng));
            chain.add(rel(k.from_curvatures, k.via_sw));
        }
    }
    const QMapGeometry q1 = QMapGeometry::series(1);
    for (int i = 0; i < 3; ++i) {
        const QKPoint p = random_point(1, rng);
        const OracleCurvature o = oracle_curvature(q1.metric_functor(), p.chart());
        onorm.add(rel(o.norm_sq, q1.qk_curvature_norm(p.X).from_curvatures));
        oscal.add(rel(o.scal, QMapGeometry::expected_scal(1)));
    }
    const bool pass = chain.value() <= 1e-10 && onorm.value() <= 1e-4 && oscal.value() <= 1e-5;
    return {pass, fmt("chain %.1e", chain.value()) + fmt(", oracle |R|^2 %.1e", onorm.value()) +
                      fmt(", oracle scal vs %.0f", QMapGeometry::expected_scal(1)) + fmt(" %.1e", oscal.value()) +
                      " (4m(m+2)nu, m=n+1; -96 is not reproduced)"};
}

Outcome series_identities() {
    Worst w;
    CounterRng rng(0xc9, 0);
    for (int n : {1, 2, 3}) {
        const QMapGeometry q = QMapGeometry::series(n);
        for (int i = 0; i < 20; ++i) {
            const Vec x = sample_series_domain(n, rng);
            const CVec X = imag_point(x);
            const SeriesInvariants s = series_invariants(n, x[0], q.rmap().cubic().value(x));
            w.add(rel(s.scal, q.rmap().scal_psk(X)));
            w.add(rel(s.normR, q.rmap().riemann_norm_psk(X).direct));
            w.add(rel(s.S2, q.s_norm_sq(X)));
            w.add(rel(s.SW, q.sw_invariant(X).closed_form));
        }
    }
    return {w.value() <= 1e-9, fmt("max rel err %.2e", w.value())};
}

Outcome inhomogeneity() {
    const std::vector<double> grid = uniform_grid(1.0, 3.0, 64);
    const ConstancyVerdict v1 = nonconstancy_check(1, grid);
    const ConstancyVerdict v2 = nonconstancy_check(2, grid);
    const ConstancyVerdict v3 = nonconstancy_check(3, grid);
    const bool pass = v1.range <= 1e-12 && v2.range > 1e-3 && v3.range > 1e-3;
    return {pass, fmt("S_W range n=1 %.1e", v1.range) + fmt(", n=2 %.3f", v2.range) + fmt(", n=3 %.3f", v3.range)};
}

Outcome automorphisms() {
    Worst sym, hom, semi, cone, iso;
    bool ranks = true;
    std::string rank_text;
    for (int n : {1, 2, 3}) {
        const QMapGeometry q = QMapGeometry::series(n);
        const RMapGeometry& r = q.rmap();
        const CubicForm& h = r.cubic();
        CounterRng rng(0xca, static_cast<std::uint64_t>(n));
        std::vector<ConePoint> pts;
        for (int i = 0; i < 20; ++i) {
            CVec z(n + 1);
            z[0] = cd(rng.uniform(0.5, 2.0), rng.normal());
            for (int j = 1; j <= n; ++j) z[j] = cd(rng.normal(), rng.normal());
            pts.push_back(cone_point(r, z));
        }
        for (int i = 0; i < 50; ++i) {
            const Vec v = rng.normal_vec(n), u = rng.normal_vec(n);
            const double lam = rng.uniform(0.5, 2.0);
            const SymplecticAut tv = phi_translation(h, v), s = phi_scaling(lam, n);
            sym.add(symplectic_residual(tv));
            sym.add(symplectic_residual(s));
            const Mat prod = tv.M * phi_translation(h, u).M;
            hom.add(max_abs(Mat(prod - phi_translation(h, v + u).M)) / std::max(1.0, max_abs(prod)));
            const Mat conj = s.M * tv.M * s.M.inverse();
            semi.add(max_abs(Mat(conj - phi_translation(h, v / (lam * lam)).M)) / std::max(1.0, max_abs(conj)));
            cone.add(cone_preservation(r, tv, pts));
            cone.add(cone_preservation(r, s, pts));
        }
        const QKPoint p = random_point(n, rng);
        const std::vector<Generator> gens = series_automorphism_generators(n);
        for (const Generator& g : gens) iso.add(isometry_residual(q, g, p.chart()));
        const OrbitReport orb = orbit_dimension(q, p, gens, 4 * n + 3);
        ranks = ranks && (n == 1 ? orb.rank >= 7 : orb.rank == 4 * n + 3);
        rank_text += (n > 1 ? "," : "") + std::to_string(orb.rank);
    }
    const bool pass = sym.value() <= 1e-12 && hom.value() <= 1e-12 && semi.value() <= 1e-12 && cone.value() <= 1e-9 &&
                      iso.value() <= 1e-6 && ranks;
    return {pass, fmt("symplectic %.1e", sym.value()) + fmt(", hom %.1e", hom.value()) +
                      fmt(", semidirect %.1e", semi.value()) + fmt(", cone %.1e", cone.value()) +
                      fmt(", isometry %.1e", iso.value()) + ", orbit ranks n=1..3: " + rank_text};
}

Outcome oracle_self_tests() {
    Worst exact, ident;
    MetricFunctor flat{3, [](const Vec&) { return Mat(qmap::test::vec({2.0, 1.0, 4.0}).asDiagonal()); }, {}};
    const OracleCurvature f = oracle_curvature(flat, qmap::test::vec({0.1, 0.2, 0.3}), DerivativeMode::FiniteDifference);
    exact.add(max_abs_entry(f.riemann));
    exact.add(std::abs(f.scal));

    MetricFunctor sphere;
    sphere.dim = 2;
    sphere.eval_hd = [](const VecT<HyperDual>& x) {
        MatT<HyperDual> g = MatT<HyperDual>::Constant(2, 2, HyperDual(0.0));
        g(0, 0) = HyperDual(1.0);
        g(1, 1) = qmap::sin(x[0]) * qmap::sin(x[0]);
        return g;
    };
    const OracleCurvature s = oracle_curvature(sphere, qmap::test::vec({0.9, 0.4}));
    exact.add(std::abs(s.scal - 2.0));
    exact.add(std::abs(s.norm_sq - 4.0));

    MetricFunctor hyp;
    hyp.dim = 2;
    hyp.eval_hd = [](const VecT<HyperDual>& x) {
        MatT<HyperDual> g = MatT<HyperDual>::Constant(2, 2, HyperDual(0.0));
        g(0, 0) = g(1, 1) = HyperDual(1.0) / (x[1] * x[1]);
        return g;
    };
    exact.add(std::abs(oracle_curvature(hyp, qmap::test::vec({0.3, 1.7})).scal + 2.0));

    CounterRng rng(0xcc, 0);
    for (int n : {1, 2, 3}) {
        const QMapGeometry q = QMapGeometry::series(n);
        const QKPoint p = random_point(n, rng);
        Vec c(2 * n);
        c << p.X.real(), p.X.imag();
        const OracleCurvature a = oracle_curvature(q.rmap().real_metric(), c);
        ident.add(std::max(a.bianchi_residual, a.antisymmetry_residual));
        if (n <= 2) {
            const OracleCurvature b = oracle_curvature(q.metric_functor(), p.chart());
            ident.add(std::max(b.bianchi_residual, b.antisymmetry_residual));
        }
    }
    for (const OracleCurvature* o : {&f, &s}) ident.add(std::max(o->bianchi_residual, o->antisymmetry_residual));
    return {exact.value() <= 1e-9 && ident.value() <= 1e-8,
            fmt("flat/sphere/hyperbolic %.1e", exact.value()) + fmt(", Bianchi/antisymmetry %.1e", ident.value())};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "point checks", 1.0, point_checks},
        {2, "determinant identities", 1.0, determinants},
        {3, "r-map curvature", 30.0, rmap_curvature},
        {4, "n=1 constants", 1.0, n1_constants},
        {5, "coframe reconstruction", 10.0, coframe},
        {6, "connection identities", 60.0, connection_identities},
        {7, "Omega reassembly", 10.0, reassembly},
        {8, "norm chain", 300.0, norm_chain},
        {9, "series identities", 30.0, series_identities},
        {10, "inhomogeneity", 5.0, inhomogeneity},
        {11, "automorphism embeddings", 60.0, automorphisms},
        {12, "oracle self-tests", 60.0, oracle_self_tests},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = dt <= c.budget_s;
        const bool pass = o.pass && in_time;
        failed += pass ? 0 : 1;
        std::printf("criterion %2d %-24s %s  %.3fs/%.0fs  %s%s\n", c.id, c.name, pass ? "PASS" : "FAIL", dt, c.budget_s,
                    o.detail.c_str(), in_time ? "" : "  (over time budget)");
    }
    return failed == 0 ? 0 : 1;
}
