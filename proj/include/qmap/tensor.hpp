#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace qmap {

// Dense cubical arrays of side n, row-major.
template <class T>
class Tensor3 {
public:
    Tensor3() = default;
    explicit Tensor3(int n, T fill = T(0)) : n_(n), data_(static_cast<std::size_t>(n) * n * n, fill) {}

    int size() const { return n_; }
    T& operator()(int i, int j, int k) { return data_[(static_cast<std::size_t>(i) * n_ + j) * n_ + k]; }
    const T& operator()(int i, int j, int k) const {
        return data_[(static_cast<std::size_t>(i) * n_ + j) * n_ + k];
    }
    const std::vector<T>& data() const { return data_; }
    std::vector<T>& data() { return data_; }

private:
    int n_ = 0;
    std::vector<T> data_;
};

template <class T>
class Tensor4 {
public:
    Tensor4() = default;
    explicit Tensor4(int n, T fill = T(0))
        : n_(n), data_(static_cast<std::size_t>(n) * n * n * n, fill) {}

    int size() const { return n_; }
    T& operator()(int i, int j, int k, int l) {
        return data_[((static_cast<std::size_t>(i) * n_ + j) * n_ + k) * n_ + l];
    }
    const T& operator()(int i, int j, int k, int l) const {
        return data_[((static_cast<std::size_t>(i) * n_ + j) * n_ + k) * n_ + l];
    }
    const std::vector<T>& data() const { return data_; }
    std::vector<T>& data() { return data_; }

private:
    int n_ = 0;
    std::vector<T> data_;
};

template <class Tn>
double max_abs_entry(const Tn& t) {
    double m = 0.0;
    for (const auto& v : t.data()) m = std::max(m, static_cast<double>(std::abs(v)));
    return m;
}

template <class Tn>
double max_abs_diff(const Tn& a, const Tn& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i)
        m = std::max(m, static_cast<double>(std::abs(a.data()[i] - b.data()[i])));
    return m;
}

}  // namespace qmap
