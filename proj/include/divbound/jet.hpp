#pragma once

/**
 * @file jet.hpp
 * @brief Truncated multivariate Taylor arithmetic.
 *
 * A Jet<N> holds the Taylor coefficients d^a f / a! of a scalar function of N
 * chart variables at a base point, for every multi-index a with |a| <= order.
 * Arithmetic on jets is exact up to the truncation order, so curvature and
 * fourth-order identities come out at machine precision rather than with
 * finite-difference error.
 *
 * Storage is dense and graded: all degree-0 coefficients, then degree 1, and so
 * on, lexicographic within a degree. A jet of lower order is a prefix of the
 * table, so truncation never moves data.
 *
 * Elementary functions are composed through their univariate Taylor series at
 * the base value: with x = x0 + t and t nilpotent of order m + 1,
 *
 *     F(x) = sum_{k <= m} F^(k)(x0) / k! * t^k,
 *
 * which is evaluated by Horner's rule in jet arithmetic.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "divbound/errors.hpp"

namespace divbound {

inline constexpr int kMaxJetOrder = 4;

constexpr int binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return static_cast<int>(r);
}

template <int N>
using MultiIndex = std::array<int, N>;

template <int N>
constexpr int degree(const MultiIndex<N>& a) {
    int d = 0;
    for (int v : a) d += v;
    return d;
}

/// Index bookkeeping shared by all jets of dimension N.
template <int N>
class JetLayout {
public:
    static constexpr int capacity = binomial(N + kMaxJetOrder, kMaxJetOrder);

    struct Product {
        int lhs, rhs, out;
    };
    struct Shift {
        int src, dst;
        double factor;
    };

    static const JetLayout& get() {
        static const JetLayout layout;
        return layout;
    }

    static constexpr int size(int order) { return binomial(N + order, order); }

    const MultiIndex<N>& index(int flat) const { return indices_[flat]; }

    int find(const MultiIndex<N>& a) const {
        for (int v : a)
            if (v < 0) return -1;
        if (degree<N>(a) > kMaxJetOrder) return -1;
        const auto it = std::find(indices_.begin(), indices_.end(), a);
        return static_cast<int>(it - indices_.begin());
    }

    /// Products contributing to coefficients of degree <= order.
    std::span<const Product> products(int order) const {
        return {products_.data(), static_cast<std::size_t>(product_end_[order])};
    }

    /// Coefficient moves implementing d/dx_var, for an input of the given order.
    std::span<const Shift> shifts(int var, int order) const {
        return {shifts_[var].data(), static_cast<std::size_t>(shift_end_[var][order])};
    }

private:
    JetLayout() {
        for (int d = 0; d <= kMaxJetOrder; ++d) append_degree(d, 0, MultiIndex<N>{}, d);

        for (int i = 0; i < capacity; ++i)
            for (int j = 0; j < capacity; ++j) {
                MultiIndex<N> s{};
                for (int v = 0; v < N; ++v) s[v] = indices_[i][v] + indices_[j][v];
                if (degree<N>(s) <= kMaxJetOrder) products_.push_back({i, j, find(s)});
            }
        std::stable_sort(products_.begin(), products_.end(), [this](const Product& a, const Product& b) {
            return degree<N>(indices_[a.out]) < degree<N>(indices_[b.out]);
        });
        for (int m = 0; m <= kMaxJetOrder; ++m)
            product_end_[m] = static_cast<int>(std::count_if(products_.begin(), products_.end(), [&](const Product& p) {
                return degree<N>(indices_[p.out]) <= m;
            }));

        for (int v = 0; v < N; ++v) {
            for (int dst = 0; dst < capacity; ++dst) {
                MultiIndex<N> a = indices_[dst];
                a[v] += 1;
                if (degree<N>(a) <= kMaxJetOrder) shifts_[v].push_back({find(a), dst, static_cast<double>(a[v])});
            }
            // an order-m input yields an order-(m-1) output
            for (int m = 0; m <= kMaxJetOrder; ++m)
                shift_end_[v][m] = m == 0 ? 0 : static_cast<int>(std::count_if(shifts_[v].begin(), shifts_[v].end(), [&](const Shift& s) {
                    return degree<N>(indices_[s.dst]) <= m - 1;
                }));
        }
    }

    void append_degree(int remaining, int var, MultiIndex<N> a, int total) {
        if (var == N - 1) {
            a[var] = remaining;
            indices_.push_back(a);
            return;
        }
        for (int k = remaining; k >= 0; --k) {
            a[var] = k;
            append_degree(remaining - k, var + 1, a, total);
        }
    }

    std::vector<MultiIndex<N>> indices_;
    std::vector<Product> products_;
    std::array<int, kMaxJetOrder + 1> product_end_{};
    std::array<std::vector<Shift>, N> shifts_;
    std::array<std::array<int, kMaxJetOrder + 1>, N> shift_end_{};
};

template <int N>
class Jet {
public:
    static constexpr int dimension = N;
    static constexpr int capacity = JetLayout<N>::capacity;
    using Layout = JetLayout<N>;

    /// Zero, carrying the maximum order so it never truncates its partners.
    Jet() { coeffs_.fill(0.0); }
    Jet(double value) {  // NOLINT(google-explicit-constructor): constants mix freely with jets
        coeffs_.fill(0.0);
        coeffs_[0] = value;
    }

    static Jet constant(double value, int order = kMaxJetOrder) {
        Jet j(value);
        j.order_ = order;
        return j;
    }

    /// The coordinate function x_slot around a base point whose slot-th coordinate is `value`.
    static Jet variable(double value, int slot, int order) {
        if (order < 1 || order > kMaxJetOrder) throw OrderError("jet order must lie in [1, " + std::to_string(kMaxJetOrder) + "]");
        Jet j(value);
        j.order_ = order;
        j.coeffs_[1 + slot] = 1.0;
        return j;
    }

    int order() const noexcept { return order_; }
    int size() const noexcept { return Layout::size(order_); }
    double value() const noexcept { return coeffs_[0]; }

    double coefficient(int flat) const { return coeffs_[flat]; }
    double& coefficient(int flat) { return coeffs_[flat]; }

    double coefficient(const MultiIndex<N>& a) const {
        check_order(a);
        return coeffs_[Layout::get().find(a)];
    }

    /// d^a of the represented function at the base point.
    double derivative(const MultiIndex<N>& a) const {
        double fact = 1.0;
        for (int v : a)
            for (int k = 2; k <= v; ++k) fact *= k;
        return coefficient(a) * fact;
    }

    double gradient(int var) const { return coeffs_[1 + var]; }

    /// True when every coefficient above degree zero vanishes.
    bool is_constant() const {
        for (int i = 1; i < size(); ++i)
            if (coeffs_[i] != 0.0) return false;
        return true;
    }

    Jet truncated(int order) const {
        Jet r = *this;
        r.order_ = std::min(order_, order);
        for (int i = r.size(); i < capacity; ++i) r.coeffs_[i] = 0.0;
        return r;
    }

    /// d/dx_var; the result has one order less.
    Jet partial(int var) const {
        if (order_ < 1) throw OrderError("cannot differentiate an order-0 jet");
        Jet r;
        r.order_ = order_ - 1;
        for (const auto& s : Layout::get().shifts(var, order_)) r.coeffs_[s.dst] = s.factor * coeffs_[s.src];
        return r;
    }

    Jet operator-() const {
        Jet r = *this;
        for (int i = 0; i < size(); ++i) r.coeffs_[i] = -r.coeffs_[i];
        return r;
    }

    Jet& operator+=(const Jet& o) {
        order_ = std::min(order_, o.order_);
        for (int i = 0; i < size(); ++i) coeffs_[i] += o.coeffs_[i];
        clear_tail();
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        order_ = std::min(order_, o.order_);
        for (int i = 0; i < size(); ++i) coeffs_[i] -= o.coeffs_[i];
        clear_tail();
        return *this;
    }
    Jet& operator*=(double s) {
        for (int i = 0; i < size(); ++i) coeffs_[i] *= s;
        return *this;
    }
    Jet& operator*=(const Jet& o) { return *this = *this * o; }
    Jet& operator/=(const Jet& o) { return *this = *this / o; }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator+(Jet a, double s) { a.coeffs_[0] += s; return a; }
    friend Jet operator+(double s, Jet a) { a.coeffs_[0] += s; return a; }
    friend Jet operator-(Jet a, double s) { a.coeffs_[0] -= s; return a; }
    friend Jet operator-(double s, const Jet& a) { return (-a) + s; }

    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r;
        r.order_ = std::min(a.order_, b.order_);
        for (const auto& p : Layout::get().products(r.order_)) r.coeffs_[p.out] += a.coeffs_[p.lhs] * b.coeffs_[p.rhs];
        return r;
    }

    friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
    friend Jet operator/(const Jet& a, double s) {
        if (s == 0.0) throw DomainError("division by zero");
        return a * (1.0 / s);
    }
    friend Jet operator/(double s, const Jet& b) { return s * reciprocal(b); }

    /// Horner evaluation of sum_k taylor[k] * (x - x0)^k.
    friend Jet compose(const Jet& x, std::span<const double> taylor) {
        Jet shift = x;
        shift.coeffs_[0] = 0.0;
        const int m = std::min<int>(x.order_, static_cast<int>(taylor.size()) - 1);
        Jet r = Jet::constant(taylor[m], x.order_);
        for (int k = m - 1; k >= 0; --k) {
            r = r * shift;
            r.coeffs_[0] += taylor[k];
        }
        return r;
    }

    friend Jet reciprocal(const Jet& x) {
        const double x0 = x.value();
        if (x0 == 0.0) throw DomainError("division by zero");
        std::array<double, kMaxJetOrder + 1> t{};
        double p = 1.0 / x0;
        for (int k = 0; k <= kMaxJetOrder; ++k, p /= -x0) t[k] = p;
        return compose(x, t);
    }

    friend Jet exp(const Jet& x) {
        std::array<double, kMaxJetOrder + 1> t{};
        const double e = std::exp(x.value());
        double f = 1.0;
        for (int k = 0; k <= kMaxJetOrder; ++k) {
            if (k > 0) f *= k;
            t[k] = e / f;
        }
        return compose(x, t);
    }

    friend Jet log(const Jet& x) {
        const double x0 = x.value();
        if (!(x0 > 0.0)) throw DomainError("log of nonpositive value");
        std::array<double, kMaxJetOrder + 1> t{};
        t[0] = std::log(x0);
        for (int k = 1; k <= kMaxJetOrder; ++k) t[k] = ((k % 2) ? 1.0 : -1.0) / (k * std::pow(x0, k));
        return compose(x, t);
    }

    friend Jet sin(const Jet& x) { return trig(x, 0); }
    friend Jet cos(const Jet& x) { return trig(x, 1); }

    friend Jet sqrt(const Jet& x) {
        if (x.value() < 0.0) throw DomainError("sqrt of negative value");
        if (x.value() == 0.0 && !x.is_constant()) throw DomainError("sqrt is not differentiable at zero");
        if (x.value() == 0.0) return Jet::constant(0.0, x.order_);
        return pow(x, 0.5);
    }

    /// x^p for a constant exponent. Non-integer p requires a positive base.
    friend Jet pow(const Jet& x, double p) {
        const double x0 = x.value();
        const bool integral = p == std::round(p);
        if (!integral && !(x0 > 0.0)) throw DomainError("non-integer power of nonpositive base");
        if (integral && p < 0.0 && x0 == 0.0) throw DomainError("division by zero in negative power");
        std::array<double, kMaxJetOrder + 1> t{};
        double binom = 1.0;  // generalised binomial coefficient C(p, k)
        for (int k = 0; k <= kMaxJetOrder; ++k) {
            if (k > 0) binom *= (p - (k - 1)) / k;
            t[k] = binom == 0.0 ? 0.0 : binom * std::pow(x0, p - k);
        }
        return compose(x, t);
    }

    friend Jet pow(const Jet& x, const Jet& p) {
        if (p.is_constant()) return pow(x, p.value()).truncated(p.order_);
        if (!(x.value() > 0.0)) throw DomainError("variable power of nonpositive base");
        return exp(p * log(x));
    }

private:
    static Jet trig(const Jet& x, int phase) {
        std::array<double, kMaxJetOrder + 1> t{};
        const double s = std::sin(x.value()), c = std::cos(x.value());
        const std::array<double, 4> cycle{s, c, -s, -c};
        double f = 1.0;
        for (int k = 0; k <= kMaxJetOrder; ++k) {
            if (k > 0) f *= k;
            t[k] = cycle[(k + phase) % 4] / f;
        }
        return compose(x, t);
    }

    void check_order(const MultiIndex<N>& a) const {
        for (int v : a)
            if (v < 0) throw OrderError("negative multi-index entry");
        if (degree<N>(a) > order_)
            throw OrderError("derivative of order " + std::to_string(degree<N>(a)) + " requested from an order-" + std::to_string(order_) + " jet");
    }

    void clear_tail() {
        for (int i = size(); i < capacity; ++i) coeffs_[i] = 0.0;
    }

    std::array<double, capacity> coeffs_;
    int order_ = kMaxJetOrder;
};

/// Coordinate jets x_0..x_{N-1} around `point`.
template <int N>
std::array<Jet<N>, N> seed_variables(const std::array<double, N>& point, int order = kMaxJetOrder) {
    std::array<Jet<N>, N> seeds;
    for (int i = 0; i < N; ++i) seeds[i] = Jet<N>::variable(point[i], i, order);
    return seeds;
}

/// extract_derivative: d^a j at the base point.
template <int N>
double extract_derivative(const Jet<N>& j, const MultiIndex<N>& a) {
    return j.derivative(a);
}

inline double value_of(double x) { return x; }
template <int N>
double value_of(const Jet<N>& x) {
    return x.value();
}

}  // namespace divbound
