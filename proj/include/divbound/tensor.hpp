#pragma once

// Dense coordinate tensors with all indices in one chart, templated on the
// scalar (double at the value level, Jet<N> while derivatives are still live).
// Index order is row-major: T(i, j, k) is stored at (i * N + j) * N + k.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "divbound/jet.hpp"

namespace divbound {

constexpr int ipow(int base, int exp) {
    int r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

template <class Scalar, int N, int Rank>
class Tensor {
public:
    static_assert(Rank >= 1);
    static constexpr int dimension = N;
    static constexpr int rank = Rank;
    static constexpr int size = ipow(N, Rank);
    using scalar_type = Scalar;
    using Index = std::array<int, Rank>;

    Tensor() : data_(size, Scalar(0.0)) {}

    template <class... I>
    Scalar& operator()(I... idx) {
        static_assert(sizeof...(I) == Rank);
        return data_[flatten({static_cast<int>(idx)...})];
    }
    template <class... I>
    const Scalar& operator()(I... idx) const {
        static_assert(sizeof...(I) == Rank);
        return data_[flatten({static_cast<int>(idx)...})];
    }

    Scalar& operator[](int flat) { return data_[flat]; }
    const Scalar& operator[](int flat) const { return data_[flat]; }
    Scalar& at(const Index& idx) { return data_[flatten(idx)]; }
    const Scalar& at(const Index& idx) const { return data_[flatten(idx)]; }

    static int flatten(const Index& idx) {
        int f = 0;
        for (int v : idx) f = f * N + v;
        return f;
    }
    static Index unflatten(int flat) {
        Index idx{};
        for (int s = Rank - 1; s >= 0; --s) {
            idx[s] = flat % N;
            flat /= N;
        }
        return idx;
    }

    template <class F>
    auto map(F&& fn) const {
        Tensor<decltype(fn(data_[0])), N, Rank> out;
        for (int i = 0; i < size; ++i) out[i] = fn(data_[i]);
        return out;
    }

    Tensor& operator+=(const Tensor& o) {
        for (int i = 0; i < size; ++i) data_[i] += o.data_[i];
        return *this;
    }
    Tensor& operator-=(const Tensor& o) {
        for (int i = 0; i < size; ++i) data_[i] -= o.data_[i];
        return *this;
    }
    friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
    friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
    template <class S>
    friend Tensor operator*(const S& s, Tensor a) {
        for (auto& x : a.data_) x = s * x;
        return a;
    }

private:
    std::vector<Scalar> data_;
};

template <int N, int Rank>
using JetTensor = Tensor<Jet<N>, N, Rank>;

/// Value at the base point of every component.
template <int N, int Rank>
Tensor<double, N, Rank> values(const JetTensor<N, Rank>& t) {
    return t.map([](const Jet<N>& j) { return j.value(); });
}

template <class Scalar, int N>
Eigen::Matrix<double, N, N> to_matrix(const Tensor<Scalar, N, 2>& t) {
    Eigen::Matrix<double, N, N> m;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) m(i, j) = value_of(t(i, j));
    return m;
}

template <int N>
Tensor<double, N, 2> from_matrix(const Eigen::Matrix<double, N, N>& m) {
    Tensor<double, N, 2> t;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) t(i, j) = m(i, j);
    return t;
}

/// Partial derivatives, derivative index first: out(i, ...) = d_i t(...).
template <int N, int Rank>
JetTensor<N, Rank + 1> gradient(const JetTensor<N, Rank>& t) {
    JetTensor<N, Rank + 1> out;
    for (int i = 0; i < N; ++i)
        for (int f = 0; f < JetTensor<N, Rank>::size; ++f) out[i * JetTensor<N, Rank>::size + f] = t[f].partial(i);
    return out;
}

template <int N>
JetTensor<N, 1> gradient(const Jet<N>& s) {
    JetTensor<N, 1> out;
    for (int i = 0; i < N; ++i) out(i) = s.partial(i);
    return out;
}

/// Levi-Civita derivative of a fully covariant tensor, derivative index first.
/// `christoffel(k, i, j)` holds Gamma^k_ij.
template <int N, int Rank>
JetTensor<N, Rank + 1> covariant_derivative(const JetTensor<N, Rank>& t, const JetTensor<N, 3>& christoffel) {
    JetTensor<N, Rank + 1> out = gradient(t);
    for (int flat = 0; flat < JetTensor<N, Rank + 1>::size; ++flat) {
        const auto idx = JetTensor<N, Rank + 1>::unflatten(flat);
        const int i = idx[0];
        typename JetTensor<N, Rank>::Index sub{};
        for (int s = 0; s < Rank; ++s) sub[s] = idx[s + 1];
        Jet<N> correction;
        for (int slot = 0; slot < Rank; ++slot) {
            auto moved = sub;
            for (int s = 0; s < N; ++s) {
                moved[slot] = s;
                correction += christoffel(s, i, sub[slot]) * t.at(moved);
            }
        }
        out[flat] -= correction;
    }
    return out;
}

template <int N>
JetTensor<N, 1> covariant_derivative(const Jet<N>& s, const JetTensor<N, 3>&) {
    return gradient(s);
}

/// Raise one slot with the inverse metric.
template <class Scalar, int N, int Rank>
Tensor<Scalar, N, Rank> raise(const Tensor<Scalar, N, Rank>& t, const Tensor<Scalar, N, 2>& inverse_metric, int slot) {
    Tensor<Scalar, N, Rank> out;
    for (int flat = 0; flat < Tensor<Scalar, N, Rank>::size; ++flat) {
        auto idx = Tensor<Scalar, N, Rank>::unflatten(flat);
        const int free = idx[slot];
        Scalar acc(0.0);
        for (int a = 0; a < N; ++a) {
            idx[slot] = a;
            acc += inverse_metric(free, a) * t.at(idx);
        }
        out[flat] = acc;
    }
    return out;
}

template <class Scalar, int N, int Rank>
Tensor<Scalar, N, Rank> raise_all(Tensor<Scalar, N, Rank> t, const Tensor<Scalar, N, 2>& inverse_metric) {
    for (int s = 0; s < Rank; ++s) t = raise(t, inverse_metric, s);
    return t;
}

/// Componentwise pairing sum_I a_I b_I (one argument is expected to be raised).
template <class Scalar, int N, int Rank>
Scalar pair(const Tensor<Scalar, N, Rank>& a, const Tensor<Scalar, N, Rank>& b) {
    Scalar acc(0.0);
    for (int i = 0; i < Tensor<Scalar, N, Rank>::size; ++i) acc += a[i] * b[i];
    return acc;
}

/// Fully metric-contracted squared norm of a covariant tensor.
template <class Scalar, int N, int Rank>
Scalar norm_sq(const Tensor<Scalar, N, Rank>& t, const Tensor<Scalar, N, 2>& inverse_metric) {
    return pair(t, raise_all(t, inverse_metric));
}

template <class Scalar, int N, int Rank>
double max_abs(const Tensor<Scalar, N, Rank>& t) {
    double m = 0.0;
    for (int i = 0; i < Tensor<Scalar, N, Rank>::size; ++i) m = std::max(m, std::abs(value_of(t[i])));
    return m;
}

}  // namespace divbound
