#include "qmap/cubic_form.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace qmap {

namespace {

int multiplicity(const std::array<int, 3>& ijk) {
    if (ijk[0] == ijk[1] && ijk[1] == ijk[2]) return 1;
    if (ijk[0] == ijk[1] || ijk[1] == ijk[2] || ijk[0] == ijk[2]) return 3;
    return 6;
}

bool integral(double c) { return std::floor(c) == c && std::abs(c) < 9.0e15; }

// Quadratic form sum_{i<k} x_i^2 - sum_{k<=i<m} x_i^2 over variables
// offset..offset+m-1, multiplied by the linear form `lin`.
void add_linear_times_quadratic(std::map<std::array<int, 3>, double>& acc,
                                const std::vector<std::pair<int, double>>& lin, int offset, int m, int k) {
    for (const auto& [var, a] : lin) {
        for (int i = 0; i < m; ++i) {
            const double s = i < k ? 1.0 : -1.0;
            std::array<int, 3> ijk{var, offset + i, offset + i};
            std::sort(ijk.begin(), ijk.end());
            acc[ijk] += a * s;
        }
    }
}

CubicForm from_map(int dim, const std::map<std::array<int, 3>, double>& acc) {
    std::vector<Monomial> ms;
    for (const auto& [ijk, c] : acc) ms.push_back({ijk, c});
    return CubicForm(dim, ms);
}

}  // namespace

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidParameters: return "InvalidParameters";
        case ErrorCode::UnsupportedFamily: return "UnsupportedFamily";
        case ErrorCode::NotOnLevelSet: return "NotOnLevelSet";
        case ErrorCode::BasisNotTangent: return "BasisNotTangent";
        case ErrorCode::SingularHessian: return "SingularHessian";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::ZeroZ0: return "ZeroZ0";
        case ErrorCode::SingularI: return "SingularI";
        case ErrorCode::SingularMetric: return "SingularMetric";
        case ErrorCode::PoleAt4x3: return "PoleAt4x3";
        case ErrorCode::ZeroDenominator: return "ZeroDenominator";
        case ErrorCode::NotAutomorphism: return "NotAutomorphism";
        case ErrorCode::OutOfDomain: return "OutOfDomain";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

SignatureReport signature_of(const Mat& a, double rel_tol) {
    SignatureReport r;
    const double scale = max_abs(a);
    r.tolerance = rel_tol * scale;
    if (scale == 0.0) {
        r.zero = static_cast<int>(a.rows());
        return r;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const double l = es.eigenvalues()[i];
        if (std::abs(l) < r.tolerance)
            ++r.zero;
        else if (l > 0)
            ++r.positive;
        else
            ++r.negative;
    }
    return r;
}

double max_abs(const Mat& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }
double max_abs(const CMat& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }
double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

CubicForm::CubicForm(int n, std::vector<Monomial> monomials) : n_(n), H_(n) {
    if (n <= 0) throw Error(ErrorCode::InvalidParameters, "cubic needs at least one variable");
    std::map<std::array<int, 3>, double> acc;
    for (auto m : monomials) {
        for (int idx : m.ijk)
            if (idx < 0 || idx >= n) throw Error(ErrorCode::InvalidParameters, "monomial index out of range");
        std::sort(m.ijk.begin(), m.ijk.end());
        acc[m.ijk] += m.coeff;
    }
    for (const auto& [ijk, c] : acc) {
        if (c == 0.0) continue;
        monomials_.push_back({ijk, c});
        const double v = c / multiplicity(ijk);
        std::array<int, 3> p = ijk;
        do {
            H_(p[0], p[1], p[2]) = v;
        } while (std::next_permutation(p.begin(), p.end()));
    }
}

CubicForm CubicForm::from_json(const nlohmann::json& j) {
    try {
        const int n = j.at("n").get<int>();
        std::vector<Monomial> ms;
        for (const auto& m : j.at("monomials")) {
            const auto ijk = m.at("ijk").get<std::vector<int>>();
            if (ijk.size() != 3) throw Error(ErrorCode::ParseError, "monomial needs three indices");
            ms.push_back({{ijk[0], ijk[1], ijk[2]}, m.at("coeff").get<double>()});
        }
        return CubicForm(n, ms);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("cubic JSON: ") + e.what());
    }
}

nlohmann::json CubicForm::to_json() const {
    nlohmann::json ms = nlohmann::json::array();
    for (const auto& m : monomials_) ms.push_back({{"ijk", m.ijk}, {"coeff", m.coeff}});
    return {{"n", n_}, {"monomials", ms}};
}

Jet CubicForm::jet(const Vec& x) const {
    Jet j;
    j.value = value(x);
    j.gradient = gradient(x);
    j.hessian = hessian(x);
    j.third = Tensor3<double>(n_);
    for (std::size_t i = 0; i < H_.data().size(); ++i) j.third.data()[i] = 6.0 * H_.data()[i];
    return j;
}

double CubicForm::polar(const Vec& a, const Vec& b, const Vec& c) const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            for (int k = 0; k < n_; ++k) s += H_(i, j, k) * a[i] * b[j] * c[k];
    return s;
}

Vec CubicForm::contract2(const Vec& a, const Vec& b) const {
    Vec r = Vec::Zero(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            for (int k = 0; k < n_; ++k) r[k] += H_(i, j, k) * a[i] * b[j];
    return r;
}

Mat CubicForm::contract1(const Vec& a) const {
    Mat r = Mat::Zero(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            for (int k = 0; k < n_; ++k) r(j, k) += H_(i, j, k) * a[i];
    return r;
}

std::optional<long long> CubicForm::value_exact(std::span<const long long> x) const {
    if (static_cast<int>(x.size()) != n_) throw Error(ErrorCode::DimensionMismatch, "point dimension");
    __int128 acc = 0;
    for (const auto& m : monomials_) {
        if (!integral(m.coeff)) return std::nullopt;
        acc += static_cast<__int128>(static_cast<long long>(m.coeff)) * x[m.ijk[0]] * x[m.ijk[1]] * x[m.ijk[2]];
    }
    return static_cast<long long>(acc);
}

std::optional<std::vector<std::vector<long long>>> CubicForm::hessian_exact(std::span<const long long> x) const {
    if (static_cast<int>(x.size()) != n_) throw Error(ErrorCode::DimensionMismatch, "point dimension");
    std::vector<std::vector<long long>> a(n_, std::vector<long long>(n_, 0));
    for (const auto& m : monomials_) {
        if (!integral(m.coeff)) return std::nullopt;
        const long long c = static_cast<long long>(m.coeff);
        for (int p = 0; p < n_; ++p) {
            for (int q = 0; q < n_; ++q) {
                // d_q d_p of x_i x_j x_k: remove one p, then one q, from the multiset.
                std::vector<int> rest(m.ijk.begin(), m.ijk.end());
                long long f = 1;
                auto take = [&](int v) {
                    const auto cnt = std::count(rest.begin(), rest.end(), v);
                    if (cnt == 0) return false;
                    f *= cnt;
                    rest.erase(std::find(rest.begin(), rest.end(), v));
                    return true;
                };
                if (!take(p) || !take(q)) continue;
                a[p][q] += c * f * x[rest[0]];
            }
        }
    }
    return a;
}

std::string to_string(const FamilyTag& tag) {
    switch (tag.family) {
        case Family::I: return "I(n=" + std::to_string(tag.n) + ",k=" + std::to_string(tag.k) + ")";
        case Family::II: return "II(n=" + std::to_string(tag.n) + ",k=" + std::to_string(tag.k) + ")";
        case Family::III: return "III(n=" + std::to_string(tag.n) + ",k=" + std::to_string(tag.k) + ")";
        case Family::a: return "a(n=" + std::to_string(tag.n) + ")";
        case Family::b: return "b(n=" + std::to_string(tag.n) + ")";
        case Family::c: return "c(n=" + std::to_string(tag.n) + ")";
        case Family::d: return "d(n=" + std::to_string(tag.n) + ")";
        case Family::e: return "e(n=" + std::to_string(tag.n) + ")";
    }
    return "?";
}

std::optional<Family> parse_family(const std::string& s) {
    if (s == "I") return Family::I;
    if (s == "II") return Family::II;
    if (s == "III") return Family::III;
    if (s == "a") return Family::a;
    if (s == "b") return Family::b;
    if (s == "c") return Family::c;
    if (s == "d") return Family::d;
    if (s == "e") return Family::e;
    return std::nullopt;
}

void validate(const FamilyTag& t) {
    const int n = t.n;
    auto bad = [&](const char* why) { throw Error(ErrorCode::InvalidParameters, to_string(t) + ": " + why); };
    if (n < 1) bad("n must be positive");
    switch (t.family) {
        case Family::I:
            if (2 * t.k < n || t.k > n) bad("requires n/2 <= k <= n");
            break;
        case Family::II:
            if (t.k < 1 || t.k > n + 1) bad("requires 1 <= k <= n+1");
            break;
        case Family::III:
            if (2 * t.k < n + 1 || t.k > n) bad("requires (n+1)/2 <= k <= n");
            break;
        case Family::b:
            if (n < 2) bad("requires n >= 2");
            break;
        case Family::d:
            if (n < 2) bad("requires n >= 2");
            break;
        default: break;
    }
}

CubicForm normal_form(const FamilyTag& t) {
    validate(t);
    const int n = t.n;
    const int dim = n + 1;
    std::map<std::array<int, 3>, double> acc;
    switch (t.family) {
        case Family::I: add_linear_times_quadratic(acc, {{n, 1.0}}, 0, n, t.k); break;
        case Family::II: add_linear_times_quadratic(acc, {{0, 1.0}}, 0, n + 1, t.k); break;
        case Family::III: add_linear_times_quadratic(acc, {{0, 1.0}, {n, 1.0}}, 0, n + 1, t.k); break;
        case Family::a: add_linear_times_quadratic(acc, {{0, 1.0}}, 0, n + 1, 1); break;
        case Family::b: add_linear_times_quadratic(acc, {{0, 1.0}}, 0, n + 1, 2); break;
        case Family::c: add_linear_times_quadratic(acc, {{0, 1.0}}, 0, n + 1, n); break;
        case Family::d: add_linear_times_quadratic(acc, {{n, 1.0}}, 0, n, n - 1); break;
        case Family::e: add_linear_times_quadratic(acc, {{0, 1.0}, {n, 1.0}}, 0, n + 1, n); break;
    }
    return from_map(dim, acc);
}

HyperbolicityResult is_hyperbolic_point(const CubicForm& h, const Vec& p, double tol) {
    if (p.size() != h.dim()) throw Error(ErrorCode::DimensionMismatch, "point dimension");
    HyperbolicityResult r;
    r.value = h.value(p);
    r.signature = signature_of(h.hessian(p), tol);
    r.degenerate = r.signature.zero > 0;
    r.hyperbolic = r.value > 0.0 && !r.degenerate && r.signature.positive == 1 &&
                   r.signature.negative == h.dim() - 1;
    return r;
}

SignatureReport exact_signature(const std::vector<std::vector<long long>>& a) {
    const int n = static_cast<int>(a.size());
    using I = __int128;
    std::vector<std::vector<I>> A(n, std::vector<I>(n)), M(n, std::vector<I>(n, 0)), AM(n, std::vector<I>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A[i][j] = a[i][j];
    // coeffs[k] multiplies lambda^k in det(lambda - A).
    std::vector<I> coeffs(n + 1, 0);
    coeffs[n] = 1;
    for (int k = 1; k <= n; ++k) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                I s = 0;
                for (int l = 0; l < n; ++l) s += A[i][l] * M[l][j];
                AM[i][j] = s;
            }
        for (int i = 0; i < n; ++i) AM[i][i] += coeffs[n - k + 1];
        M = AM;
        I tr = 0;
        for (int i = 0; i < n; ++i)
            for (int l = 0; l < n; ++l) tr += A[i][l] * M[l][i];
        coeffs[n - k] = -tr / k;
    }
    SignatureReport r;
    r.tolerance = 0.0;
    int zero = 0;
    while (zero < n && coeffs[zero] == 0) ++zero;
    auto changes = [&](bool flip) {
        int cnt = 0;
        int last = 0;
        for (int k = n; k >= zero; --k) {
            if (coeffs[k] == 0) continue;
            int s = coeffs[k] > 0 ? 1 : -1;
            if (flip && (k % 2 == 1)) s = -s;
            if (last != 0 && s != last) ++cnt;
            last = s;
        }
        return cnt;
    };
    r.zero = zero;
    r.positive = changes(false);
    r.negative = changes(true);
    return r;
}

DetIdentity hessian_det_identity(const FamilyTag& t, const Vec& p) {
    validate(t);
    if (t.family != Family::I && t.family != Family::II)
        throw Error(ErrorCode::UnsupportedFamily, "determinant identity is only known for families I and II");
    const CubicForm h = normal_form(t);
    if (p.size() != h.dim()) throw Error(ErrorCode::DimensionMismatch, "point dimension");
    DetIdentity d;
    d.lhs = h.hessian(p).determinant();
    const int n = t.n;
    const double hv = h.value(p);
    const double two = std::ldexp(1.0, n + 1);
    if (t.family == Family::I) {
        const double sign = ((n - t.k + 1) % 2 == 0) ? 1.0 : -1.0;
        d.rhs = two * sign * std::pow(p[n], n - 2) * hv;
    } else {
        const double sign = ((n + 1 - t.k) % 2 == 0) ? 1.0 : -1.0;
        d.rhs = sign * two * std::pow(p[0], n - 2) * (4.0 * p[0] * p[0] * p[0] - hv);
    }
    return d;
}

bool component_membership(const FamilyTag& t, const Vec& p, double tol) {
    validate(t);
    const CubicForm h = normal_form(t);
    if (p.size() != h.dim()) throw Error(ErrorCode::DimensionMismatch, "point dimension");
    if (std::abs(h.value(p) - 1.0) > tol) throw Error(ErrorCode::NotOnLevelSet, "point is not on {h = 1}");
    const int n = t.n;
    switch (t.family) {
        case Family::a: return p[0] > 0.0;
        case Family::b: return p[0] > 0.0 && p[0] < 1.0 / std::cbrt(4.0);
        case Family::c: return p[0] < 0.0;
        case Family::d: return p[n] < 0.0;
        case Family::e: return p[0] + p[n] < 0.0;
        default: throw Error(ErrorCode::UnsupportedFamily, "membership is defined for families a to e");
    }
}

Mat centroaffine_metric(const CubicForm& h, const Vec& p, const std::vector<Vec>& basis, double tol) {
    const Vec g = h.gradient(p);
    const Mat hess = h.hessian(p);
    const int m = static_cast<int>(basis.size());
    for (const auto& v : basis) {
        if (v.size() != h.dim()) throw Error(ErrorCode::DimensionMismatch, "basis vector dimension");
        if (std::abs(g.dot(v)) > tol * std::max(1.0, g.norm() * v.norm()))
            throw Error(ErrorCode::BasisNotTangent, "basis vector is not tangent to the level set");
    }
    Mat r(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) r(i, j) = -0.5 * basis[i].dot(hess * basis[j]);
    return r;
}

std::vector<Vec> tangent_basis(const CubicForm& h, const Vec& p) {
    const Vec g = h.gradient(p);
    const int n = h.dim();
    Eigen::HouseholderQR<Mat> qr{Mat(g)};
    const Mat q = qr.householderQ() * Mat::Identity(n, n);
    std::vector<Vec> out;
    for (int j = 1; j < n; ++j) out.emplace_back(q.col(j));
    return out;
}

Vec point_on_level_set(const CubicForm& h, const Vec& dir) {
    const double hd = h.value(dir);
    if (!(hd > 0.0)) throw Error(ErrorCode::InvalidParameters, "direction must have h(dir) > 0");
    double lo = 0.0;
    double hi = 1.0;
    while (hi * hi * hi * hd < 1.0) hi *= 2.0;
    while (hi - lo > 1e-14 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mid * mid * mid * hd < 1.0)
            lo = mid;
        else
            hi = mid;
        if (mid == lo && mid == hi) break;
    }
    return 0.5 * (lo + hi) * dir;
}

CubicForm series_cubic(int n) {
    if (n < 1) throw Error(ErrorCode::InvalidParameters, "series needs n >= 1");
    std::vector<Monomial> ms{{{0, 0, 0}, 1.0}};
    for (int i = 1; i < n; ++i) ms.push_back({{0, i, i}, -1.0});
    return CubicForm(n, ms);
}

}  // namespace qmap
