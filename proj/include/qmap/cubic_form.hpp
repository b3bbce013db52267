#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmap/linalg.hpp"
#include "qmap/tensor.hpp"

namespace qmap {

// Coefficient of x_i x_j x_k in h, with 0-based i <= j <= k.
struct Monomial {
    std::array<int, 3> ijk{};
    double coeff = 0.0;
};

struct Jet {
    double value = 0.0;
    Vec gradient;
    Mat hessian;
    Tensor3<double> third;  // 6H, constant in x
};

class CubicForm {
public:
    CubicForm() = default;
    CubicForm(int n, std::vector<Monomial> monomials);

    static CubicForm from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    int dim() const { return n_; }
    const std::vector<Monomial>& monomials() const { return monomials_; }
    // Fully symmetric H with h(v) = H(v,v,v).
    const Tensor3<double>& tensor() const { return H_; }
    double H(int i, int j, int k) const { return H_(i, j, k); }

    template <class T>
    T value(const VecT<T>& x) const {
        T acc = T(0.0);
        for (const auto& m : monomials_) acc += T(m.coeff) * x[m.ijk[0]] * x[m.ijk[1]] * x[m.ijk[2]];
        return acc;
    }

    template <class T>
    VecT<T> gradient(const VecT<T>& x) const {
        VecT<T> g = VecT<T>::Constant(n_, T(0.0));
        for (int m = 0; m < n_; ++m)
            for (int j = 0; j < n_; ++j)
                for (int k = 0; k < n_; ++k)
                    if (H_(m, j, k) != 0.0) g[m] += T(3.0 * H_(m, j, k)) * x[j] * x[k];
        return g;
    }

    template <class T>
    MatT<T> hessian(const VecT<T>& x) const {
        MatT<T> a = MatT<T>::Constant(n_, n_, T(0.0));
        for (int m = 0; m < n_; ++m)
            for (int j = 0; j < n_; ++j)
                for (int k = 0; k < n_; ++k)
                    if (H_(m, j, k) != 0.0) a(m, j) += T(6.0 * H_(m, j, k)) * x[k];
        return a;
    }

    Jet jet(const Vec& x) const;

    double polar(const Vec& a, const Vec& b, const Vec& c) const;  // H(a,b,c)
    Vec contract2(const Vec& a, const Vec& b) const;               // H(a,b,.)
    Mat contract1(const Vec& a) const;                             // H(a,.,.)

    // Integer evaluation; empty when a coefficient is not an integer.
    std::optional<long long> value_exact(std::span<const long long> x) const;
    std::optional<std::vector<std::vector<long long>>> hessian_exact(std::span<const long long> x) const;

private:
    int n_ = 0;
    std::vector<Monomial> monomials_;
    Tensor3<double> H_;
};

enum class Family { I, II, III, a, b, c, d, e };

// n is the family parameter: the polynomial lives on R^{n+1}.
// k is only read for I, II, III.
struct FamilyTag {
    Family family = Family::a;
    int n = 3;
    int k = 0;

    int ambient_dim() const { return n + 1; }
};

std::string to_string(const FamilyTag& tag);
std::optional<Family> parse_family(const std::string& name);

void validate(const FamilyTag& tag);
CubicForm normal_form(const FamilyTag& tag);

struct HyperbolicityResult {
    bool hyperbolic = false;
    bool degenerate = false;
    double value = 0.0;
    SignatureReport signature;
};

HyperbolicityResult is_hyperbolic_point(const CubicForm& h, const Vec& p, double tol = 1e-9);

// Exact signature of an integer symmetric matrix, from the characteristic
// polynomial (Faddeev-LeVerrier) and Descartes' rule of signs, which is exact
// for polynomials with only real roots.
SignatureReport exact_signature(const std::vector<std::vector<long long>>& a);

struct DetIdentity {
    double lhs = 0.0;
    double rhs = 0.0;
};

DetIdentity hessian_det_identity(const FamilyTag& tag, const Vec& p);

bool component_membership(const FamilyTag& tag, const Vec& p, double tol = 1e-10);

Mat centroaffine_metric(const CubicForm& h, const Vec& p, const std::vector<Vec>& basis, double tol = 1e-9);

// Orthonormal basis of ker dh_p.
std::vector<Vec> tangent_basis(const CubicForm& h, const Vec& p);

// Rescales dir onto {h = 1} by bisection on t > 0; requires h(dir) > 0.
Vec point_on_level_set(const CubicForm& h, const Vec& dir);

// The series h = x (x^2 - y_1^2 - ... - y_{n-1}^2) in n variables (x first).
CubicForm series_cubic(int n);

}  // namespace qmap
