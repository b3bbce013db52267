#pragma once

#include <cstdint>
#include <vector>

#include "qmap/cubic_form.hpp"
#include "qmap/linalg.hpp"

namespace qmap {

// Counter-based generator: the k-th draw of stream s under a seed is
// splitmix64(seed, s, k), independent of how many threads consume streams.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

    std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    double normal();
    Vec normal_vec(int n);

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Point of {h = 1} inside the given catalogue family's hyperbolic component(s),
// drawn by rejection from Gaussian directions rescaled onto the level set.
Vec sample_family_point(const FamilyTag& tag, CounterRng& rng, int max_tries = 100000);

// Domain point of the series cubic: x > 0 and |y| <= spread * x, scaled by
// a random factor in [0.5, 2].
Vec sample_series_domain(int n, CounterRng& rng, double spread = 0.7);

}  // namespace qmap
