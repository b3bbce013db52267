#include "qmap/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "qmap/curvature_oracle.hpp"
#include "qmap/isometry_embeddings.hpp"
#include "qmap/qmap_geometry.hpp"
#include "qmap/sampling.hpp"
#include "qmap/series_analysis.hpp"

namespace qmap::cli {

using nlohmann::json;

namespace {

struct RunConfig {
    std::string command;
    std::string family = "series";
    std::string cubic_file;
    int n = 2;
    int k = 0;
    int points = 10;
    int grid = 32;
    double x_min = 1.0;
    double x_max = 3.0;
    std::uint64_t seed = 1;
    std::optional<double> tol;
    std::string out;
    std::string format = "json";
};

class ConfigFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void error_line(std::ostream& err, const std::string& kind, const std::string& message) {
    err << json{{"schema", kSchema}, {"error", kind}, {"message", message}}.dump() << '\n';
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

template <class Tn>
double tensor_rel(const Tn& a, const Tn& b) {
    return max_abs_diff(a, b) / std::max(1.0, max_abs_entry(b));
}

// The geometry named by --family / --cubic-file, together with a base point.
struct Problem {
    std::string label;
    bool series = false;
    std::optional<FamilyTag> tag;
    QMapGeometry geometry;
};

Vec find_base_point(const CubicForm& h, std::uint64_t seed) {
    CounterRng rng(seed, 0xba5e);
    for (int t = 0; t < 100000; ++t) {
        const Vec d = rng.normal_vec(h.dim());
        if (!(h.value(d) > 0.0)) continue;
        const Vec p = point_on_level_set(h, d);
        if (is_hyperbolic_point(h, p).hyperbolic) return p;
    }
    throw ConfigFailure("no hyperbolic point found for the cubic");
}

Problem make_problem(const RunConfig& cfg) {
    if (!cfg.cubic_file.empty()) {
        std::ifstream in(cfg.cubic_file);
        if (!in) throw ConfigFailure("cannot open cubic file " + cfg.cubic_file);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw ConfigFailure(std::string("cubic file: ") + e.what());
        }
        CubicForm h = CubicForm::from_json(j);
        Vec base;
        if (j.contains("base_point")) {
            const auto b = j.at("base_point").get<std::vector<double>>();
            base = Eigen::Map<const Vec>(b.data(), static_cast<Eigen::Index>(b.size()));
        } else {
            base = find_base_point(h, cfg.seed);
        }
        return {"cubic-file", false, std::nullopt, QMapGeometry(RMapGeometry(h, base))};
    }
    if (cfg.family == "series") {
        if (cfg.n < 1) throw ConfigFailure("--n must be at least 1");
        return {"series", true, std::nullopt, QMapGeometry::series(cfg.n)};
    }
    const auto fam = parse_family(cfg.family);
    if (!fam) throw ConfigFailure("unknown family " + cfg.family);
    FamilyTag tag{*fam, cfg.n, cfg.k};
    validate(tag);
    CounterRng rng(cfg.seed, 0xba5e);
    const Vec base = sample_family_point(tag, rng);
    return {to_string(tag), false, tag, QMapGeometry(RMapGeometry(normal_form(tag), base))};
}

// Domain point number `index` for the problem; deterministic in (seed, index).
QKPoint sample_point(const Problem& pb, std::uint64_t seed, int index) {
    CounterRng rng(seed, static_cast<std::uint64_t>(index) + 1);
    const RMapGeometry& r = pb.geometry.rmap();
    const int n = r.n();
    Vec x;
    if (pb.series) {
        x = sample_series_domain(n, rng);
    } else {
        const Vec& b = r.base_point();
        for (int t = 0;; ++t) {
            if (t > 10000) throw Error(ErrorCode::OutOfDomain, "no domain point near the base point");
            Vec c = b + 0.2 * b.norm() * rng.normal_vec(n) / std::sqrt(static_cast<double>(n));
            c *= rng.uniform(0.5, 2.0);
            if (r.in_domain(c)) {
                x = c;
                break;
            }
        }
    }
    QKPoint p = QKPoint::base(CVec(n));
    for (int i = 0; i < n; ++i) p.X[i] = cd(0.5 * rng.normal(), x[i]);
    p.rho = rng.uniform(0.5, 2.0);
    p.phit = rng.normal();
    p.zeta = 0.5 * rng.normal_vec(n + 1);
    p.zetat = 0.5 * rng.normal_vec(n + 1);
    return p;
}

json point_json(const QKPoint& p) {
    return {{"X_re", vec_json(p.X.real())}, {"X_im", vec_json(p.X.imag())}, {"rho", p.rho}, {"phit", p.phit},
            {"zeta", vec_json(p.zeta)}, {"zetat", vec_json(p.zetat)}};
}

void write_output(const RunConfig& cfg, std::ostream& out, const std::string& text) {
    if (cfg.out.empty()) {
        out << text;
        return;
    }
    std::ofstream f(cfg.out);
    if (!f) throw ConfigFailure("cannot write " + cfg.out);
    f << text;
}

struct PointResult {
    json report;
    bool ok = true;
    std::string error;
};

json curvature_report(const QMapGeometry& q, const QKPoint& p) {
    const RMapGeometry& r = q.rmap();
    const PskNorm nr = r.riemann_norm_psk(p.X);
    const SwReport sw = q.sw_invariant(p.X);
    const QKNorm qn = q.qk_curvature_norm(p.X);
    return {{"point", point_json(p)},
            {"scal_psk", r.scal_psk(p.X)},
            {"norm_R_psk", nr.direct},
            {"S2", q.s_norm_sq(p.X)},
            {"S_W", sw.closed_form},
            {"norm_R_qk", qn.from_curvatures},
            {"residuals",
             {{"norm_R_psk:b_route-direct", rel(nr.b_route, nr.direct)},
              {"S_W:omega-closed", rel(sw.omega, sw.closed_form)},
              {"norm_R_qk:curvatures-via_S_W", rel(qn.from_curvatures, qn.via_sw)}}}};
}

// name -> (residual, tolerance)
using Checks = std::vector<std::tuple<std::string, double, double>>;

Checks verify_point(const Problem& pb, const QKPoint& p, const std::optional<double>& tol) {
    const QMapGeometry& q = pb.geometry;
    const RMapGeometry& r = q.rmap();
    const int n = r.n();
    const Vec x = p.X.imag();
    auto T = [&](double d) { return tol ? *tol : d; };
    Checks c;

    const TubeKahlerOracle tube =
        tube_kahler_oracle([&r](const VecT<HyperDual>& v) { return r.kahler_metric<HyperDual>(v); }, x);
    const Tensor3<cd> gam = r.christoffel(p.X);
    double dg = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int e = 0; e < n; ++e) dg = std::max(dg, std::abs(gam(a, b, e) - cd(0.0, -0.5) * tube.G(a, b, e)));
    c.emplace_back("christoffel:closed-oracle", dg / std::max(1.0, max_abs_entry(tube.G)), T(1e-8));
    c.emplace_back("riemann:closed-oracle", tensor_rel(r.riemann_coeffs(p.X), tube.R), T(1e-8));
    c.emplace_back("riemann:expanded-closed", tensor_rel(r.riemann_coeffs_expanded(p.X), r.riemann_coeffs(p.X)),
                   T(1e-8));

    const Vec chart2 = p.chart().head(2 * n);
    const OracleCurvature psk = oracle_curvature(r.real_metric(), chart2);
    const double scal = r.scal_psk(p.X);
    const PskNorm nr = r.riemann_norm_psk(p.X);
    c.emplace_back("scal_psk:closed-oracle", rel(psk.scal / kScalCalibration, scal), T(1e-6));
    c.emplace_back("norm_R_psk:closed-oracle", rel(psk.norm_sq / kNormCalibration, nr.direct), T(1e-8));
    c.emplace_back("norm_R_psk:b_route-direct", rel(nr.b_route, nr.direct), T(1e-8));

    const Mat g = q.fs_metric(p);
    const CoframeData cf = q.coframe(p);
    Mat rec = Mat::Zero(g.rows(), g.cols());
    for (int A = 0; A <= n; ++A) {
        const CVec b = cf.beta.row(A).transpose();
        const CVec a = cf.alpha.row(A).transpose();
        rec += (b * b.adjoint()).real() + (a * a.adjoint()).real();
    }
    c.emplace_back("coframe:reconstruction", max_abs(Mat(rec - g)), T(1e-10));

    const CurvatureE ce = q.curvature_E(p);
    const CurvatureE re = q.omega_reassembly(p);
    c.emplace_back("curvature_E:omega-closed", std::max(max_abs_diff(ce.r, re.r), max_abs_diff(ce.s, re.s)), T(1e-9));
    c.emplace_back("S2:frame-coordinate", rel(q.s_norm_sq(p.X), q.s_norm_sq_coordinate(p.X)), T(1e-9));
    const SwReport sw = q.sw_invariant(p.X);
    c.emplace_back("S_W:omega-closed", rel(sw.omega, sw.closed_form), T(1e-10));
    const QKNorm qn = q.qk_curvature_norm(p.X);
    c.emplace_back("norm_R_qk:curvatures-via_S_W", rel(qn.from_curvatures, qn.via_sw), T(1e-10));

    const OracleCurvature qk = oracle_curvature(q.metric_functor(), p.chart());
    c.emplace_back("scal_qk:oracle-formula", rel(qk.scal, QMapGeometry::expected_scal(n)), T(1e-5));
    c.emplace_back("norm_R_qk:oracle-curvatures", rel(qk.norm_sq, qn.from_curvatures), T(1e-4));
    c.emplace_back("oracle:bianchi", std::max(psk.bianchi_residual, qk.bianchi_residual), T(1e-8));
    c.emplace_back("oracle:antisymmetry", std::max(psk.antisymmetry_residual, qk.antisymmetry_residual), T(1e-8));

    if (pb.series) {
        const SeriesInvariants si = series_invariants(n, x[0], r.cubic().value(x));
        const double d = std::max({rel(si.scal, scal), rel(si.normR, nr.direct), rel(si.S2, q.s_norm_sq(p.X)),
                                   rel(si.SW, sw.closed_form)});
        c.emplace_back("series:closed-pipeline", d, T(1e-9));
    }
    return c;
}

int cmd_classify(const RunConfig& cfg, std::ostream& out) {
    if (cfg.family == "series" || !cfg.cubic_file.empty()) throw ConfigFailure("classify needs a catalogue --family");
    const auto fam = parse_family(cfg.family);
    if (!fam) throw ConfigFailure("unknown family " + cfg.family);
    const FamilyTag tag{*fam, cfg.n, cfg.k};
    validate(tag);
    const CubicForm h = normal_form(tag);
    std::vector<json> rows(cfg.points);
    std::vector<int> good(cfg.points, 0);
    parallel_for(cfg.points, [&](int i) {
        CounterRng rng(cfg.seed, static_cast<std::uint64_t>(i) + 1);
        const Vec p = sample_family_point(tag, rng);
        const HyperbolicityResult hr = is_hyperbolic_point(h, p, cfg.tol.value_or(1e-9));
        const bool member = component_membership(tag, p);
        good[i] = hr.hyperbolic && member ? 1 : 0;
        rows[i] = {{"point", vec_json(p)},
                   {"h", hr.value},
                   {"hyperbolic", hr.hyperbolic},
                   {"member", member},
                   {"signature", {hr.signature.positive, hr.signature.negative, hr.signature.zero}}};
    });
    const int ok = static_cast<int>(std::count(good.begin(), good.end(), 1));
    const json rep{{"schema", kSchema},      {"command", "classify"}, {"family", to_string(tag)},
                   {"seed", cfg.seed},       {"samples", cfg.points}, {"hyperbolic_members", ok},
                   {"all_hyperbolic", ok == cfg.points}, {"points", rows}};
    write_output(cfg, out, rep.dump(2) + "\n");
    return ok == cfg.points ? Ok : VerificationFailed;
}

int cmd_invariants(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Problem pb = make_problem(cfg);
    std::vector<PointResult> res(cfg.points);
    parallel_for(cfg.points, [&](int i) {
        try {
            res[i].report = curvature_report(pb.geometry, sample_point(pb, cfg.seed, i));
        } catch (const Error& e) {
            res[i].ok = false;
            res[i].error = std::string(to_string(e.code())) + ": " + e.what();
        }
    });
    bool ok = true;
    if (cfg.format == "csv") {
        std::ostringstream s;
        s << "index,scal_psk,norm_R_psk,S2,S_W,norm_R_qk\n";
        for (int i = 0; i < cfg.points; ++i) {
            if (!res[i].ok) {
                ok = false;
                error_line(err, "PointFailure", res[i].error);
                continue;
            }
            const json& r = res[i].report;
            s << i << ',' << fmt17(r["scal_psk"]) << ',' << fmt17(r["norm_R_psk"]) << ',' << fmt17(r["S2"]) << ','
              << fmt17(r["S_W"]) << ',' << fmt17(r["norm_R_qk"]) << '\n';
        }
        write_output(cfg, out, s.str());
    } else {
        json pts = json::array();
        for (auto& r : res) {
            if (!r.ok) {
                ok = false;
                error_line(err, "PointFailure", r.error);
                continue;
            }
            pts.push_back(r.report);
        }
        const json rep{{"schema", kSchema}, {"command", "invariants"}, {"cubic", pb.label},
                       {"n", pb.geometry.n()},  {"seed", cfg.seed},     {"reports", pts}};
        write_output(cfg, out, rep.dump(2) + "\n");
    }
    return ok ? Ok : VerificationFailed;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Problem pb = make_problem(cfg);
    std::vector<Checks> res(cfg.points);
    std::vector<std::string> errors(cfg.points);
    parallel_for(cfg.points, [&](int i) {
        try {
            res[i] = verify_point(pb, sample_point(pb, cfg.seed, i), cfg.tol);
        } catch (const Error& e) {
            errors[i] = std::string(to_string(e.code())) + ": " + e.what();
        }
    });
    std::map<std::string, std::pair<double, double>> worst;
    bool ok = true;
    for (int i = 0; i < cfg.points; ++i) {
        if (!errors[i].empty()) {
            ok = false;
            error_line(err, "PointFailure", errors[i]);
        }
        for (const auto& [name, value, tol] : res[i]) {
            auto& w = worst[name];
            w.first = std::max(w.first, value);
            w.second = tol;
            if (!(value <= tol)) ok = false;
        }
    }
    json checks = json::object();
    for (const auto& [name, w] : worst)
        checks[name] = {{"max_residual", w.first}, {"tolerance", w.second}, {"pass", w.first <= w.second}};
    const json rep{{"schema", kSchema}, {"command", "verify"}, {"cubic", pb.label}, {"n", pb.geometry.n()},
                   {"seed", cfg.seed},  {"points", cfg.points}, {"pass", ok},       {"checks", checks}};
    write_output(cfg, out, rep.dump(2) + "\n");
    return ok ? Ok : VerificationFailed;
}

int cmd_scan_sw(const RunConfig& cfg, std::ostream& out) {
    if (cfg.grid < 16) throw ConfigFailure("--grid must be at least 16");
    if (cfg.n < 1) throw ConfigFailure("--n must be at least 1");
    const std::vector<double> grid = uniform_grid(cfg.x_min, cfg.x_max, cfg.grid);
    const ConstancyVerdict v = nonconstancy_check(cfg.n, grid);
    std::vector<SeriesInvariants> rows(grid.size());
    std::vector<double> hvals(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        hvals[i] = cfg.n == 1 ? grid[i] * grid[i] * grid[i] : 1.0;
        rows[i] = series_invariants(cfg.n, grid[i], hvals[i]);
    }
    if (cfg.format == "json") {
        json pts = json::array();
        for (std::size_t i = 0; i < grid.size(); ++i)
            pts.push_back({{"x", grid[i]}, {"hval", hvals[i]}, {"scal", rows[i].scal}, {"normR", rows[i].normR},
                           {"S2", rows[i].S2}, {"SW", rows[i].SW}});
        const json rep{{"schema", kSchema},
                       {"command", "scan-sw"},
                       {"n", cfg.n},
                       {"verdict", v.verdict == Constancy::Constant ? "constant" : "nonconstant"},
                       {"range", v.range},
                       {"rows", pts}};
        write_output(cfg, out, rep.dump(2) + "\n");
    } else {
        std::ostringstream s;
        s << "n,x,hval,scal,normR,S2,SW\n";
        for (std::size_t i = 0; i < grid.size(); ++i)
            s << cfg.n << ',' << fmt17(grid[i]) << ',' << fmt17(hvals[i]) << ',' << fmt17(rows[i].scal) << ','
              << fmt17(rows[i].normR) << ',' << fmt17(rows[i].S2) << ',' << fmt17(rows[i].SW) << '\n';
        write_output(cfg, out, s.str());
    }
    return Ok;
}

int cmd_aut_check(const RunConfig& cfg, std::ostream& out) {
    if (cfg.n < 1) throw ConfigFailure("--n must be at least 1");
    const int n = cfg.n;
    const QMapGeometry q = QMapGeometry::series(n);
    const RMapGeometry& r = q.rmap();
    const CubicForm& h = r.cubic();
    CounterRng rng(cfg.seed, 0xa07);
    std::vector<ConePoint> cone;
    for (int i = 0; i < 20; ++i) {
        CVec z(n + 1);
        z[0] = cd(rng.uniform(0.5, 2.0), rng.normal());
        for (int j = 0; j < n; ++j) z[1 + j] = cd(rng.normal(), rng.normal());
        cone.push_back(cone_point(r, z));
    }
    const double tol_sym = 1e-12, tol_cone = 1e-9, tol_iso = 1e-6;
    bool ok = true;
    json mats = json::array();
    auto add = [&](const std::string& id, const SymplecticAut& m) {
        const double s = symplectic_residual(m);
        const double c = cone_preservation(r, m, cone);
        ok = ok && s <= tol_sym && c <= tol_cone;
        mats.push_back({{"matrix_id", id}, {"symplectic_residual", s}, {"cone_residual", c}});
    };
    double hom = 0.0, semi = 0.0;
    for (int i = 0; i < cfg.points; ++i) {
        const Vec v = 0.5 * rng.normal_vec(n), w = 0.5 * rng.normal_vec(n);
        const double lam = rng.uniform(0.5, 2.0);
        const SymplecticAut tv = phi_translation(h, v), tw = phi_translation(h, w);
        add("translation" + std::to_string(i), tv);
        add("scaling" + std::to_string(i), phi_scaling(lam, n));
        const SymplecticAut s = phi_scaling(lam, n);
        hom = std::max(hom, max_abs(Mat(tv.M * tw.M - phi_translation(h, v + w).M)));
        semi = std::max(semi, max_abs(Mat(s.M * tv.M * s.M.inverse() - phi_translation(h, v / (lam * lam)).M)));
    }
    ok = ok && hom <= tol_sym && semi <= tol_sym;

    QKPoint p = sample_point(Problem{"series", true, std::nullopt, q}, cfg.seed, 0);
    const std::vector<Generator> gens = series_automorphism_generators(n);
    double iso = 0.0;
    for (const auto& g : gens) iso = std::max(iso, isometry_residual(q, g, p.chart()));
    ok = ok && iso <= tol_iso;
    const OrbitReport orb = orbit_dimension(q, p, gens, 4 * n + 3);
    const OrbitReport fib = orbit_dimension(q, p, fiber_generators(n), 2 * n + 4);
    if (n >= 2) ok = ok && orb.rank == orb.expected;
    ok = ok && fib.rank == fib.expected;
    const json rep{{"schema", kSchema},
                   {"command", "aut-check"},
                   {"n", n},
                   {"seed", cfg.seed},
                   {"matrices", mats},
                   {"homomorphism_residual", hom},
                   {"semidirect_residual", semi},
                   {"isometry_residual", iso},
                   {"orbit_rank", orb.rank},
                   {"expected_rank", orb.expected},
                   {"fiber_rank", fib.rank},
                   {"point", point_json(p)},
                   {"pass", ok}};
    write_output(cfg, out, rep.dump(2) + "\n");
    return ok ? Ok : VerificationFailed;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--family", cfg.family, "series, I, II, III or a-e");
    sub->add_option("--cubic-file", cfg.cubic_file, "JSON cubic {n, monomials, base_point?}");
    sub->add_option("--n", cfg.n, "number of variables (series) or family parameter");
    sub->add_option("--k", cfg.k, "family index for I, II, III");
    sub->add_option("--points,--samples", cfg.points, "number of sampled points")->check(CLI::NonNegativeNumber);
    sub->add_option("--grid", cfg.grid, "grid size for scan-sw");
    sub->add_option("--x-min", cfg.x_min);
    sub->add_option("--x-max", cfg.x_max);
    sub->add_option("--seed", cfg.seed);
    sub->add_option("--tol", cfg.tol, "tolerance replacing every default");
    sub->add_option("--out", cfg.out, "output file (default stdout)");
    sub->add_option("--format", cfg.format)->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int thread_count() {
    if (const char* env = std::getenv("QMAP_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) return t;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int count, const std::function<void(int)>& fn) {
    const int workers = std::min(thread_count(), count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (int i = w; i < count; i += workers) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"q-map curvature engine"};
    app.require_subcommand(1);
    for (const char* name : {"classify", "invariants", "verify", "scan-sw", "aut-check"}) {
        CLI::App* sub = app.add_subcommand(name);
        add_common(sub, cfg);
        sub->callback([&cfg, name] { cfg.command = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Ok;
    } catch (const CLI::ParseError& e) {
        error_line(err, "ConfigError", e.what());
        return ConfigError;
    }
    try {
        if (cfg.command == "classify") return cmd_classify(cfg, out);
        if (cfg.command == "invariants") return cmd_invariants(cfg, out, err);
        if (cfg.command == "verify") return cmd_verify(cfg, out, err);
        if (cfg.command == "scan-sw") return cmd_scan_sw(cfg, out);
        if (cfg.command == "aut-check") return cmd_aut_check(cfg, out);
    } catch (const ConfigFailure& e) {
        error_line(err, "ConfigError", e.what());
        return ConfigError;
    } catch (const Error& e) {
        const ErrorCode c = e.code();
        const bool config = c == ErrorCode::InvalidParameters || c == ErrorCode::UnsupportedFamily ||
                            c == ErrorCode::ParseError || c == ErrorCode::DimensionMismatch;
        error_line(err, to_string(c), e.what());
        return config ? ConfigError : VerificationFailed;
    }
    error_line(err, "ConfigError", "no subcommand");
    return ConfigError;
}

}  // namespace qmap::cli
