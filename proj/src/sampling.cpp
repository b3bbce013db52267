#include "qmap/sampling.hpp"

#include <cmath>
#include <numbers>

namespace qmap {

double CounterRng::normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vec CounterRng::normal_vec(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = normal();
    return v;
}

Vec sample_family_point(const FamilyTag& tag, CounterRng& rng, int max_tries) {
    const CubicForm h = normal_form(tag);
    for (int t = 0; t < max_tries; ++t) {
        const Vec dir = rng.normal_vec(h.dim());
        if (!(h.value(dir) > 0.0)) continue;
        const Vec p = point_on_level_set(h, dir);
        if (component_membership(tag, p, 1e-9)) return p;
    }
    throw Error(ErrorCode::InvalidParameters, "no component point found for " + to_string(tag));
}

Vec sample_series_domain(int n, CounterRng& rng, double spread) {
    Vec x(n);
    x[0] = 1.0;
    if (n > 1) {
        Vec y = rng.normal_vec(n - 1);
        const double r = spread * std::pow(rng.uniform(), 1.0 / (n - 1));
        y *= r / y.norm();
        x.tail(n - 1) = y;
    }
    return rng.uniform(0.5, 2.0) * x;
}

}  // namespace qmap
