#pragma once

/**
 * @file geometry.hpp
 * @brief Local Riemannian geometry of an expression-defined metric at a point.
 *
 * Index conventions, fixed once for the whole library:
 *
 *  - christoffel(k, i, j) = Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij).
 *  - riemann(i, j, k, s) = g_im R^m_jks with
 *        R^m_jks = d_k Gamma^m_sj - d_s Gamma^m_kj + Gamma^m_kl Gamma^l_sj - Gamma^m_sl Gamma^l_kj,
 *    so a round sphere has riemann(i, j, i, j) > 0 and the Ricci tensor is the
 *    contraction of the first and third slots, ricci(j, s) = g^ik riemann(i, j, k, s).
 *    Under this sign the Ricci identity for a covariant 2-tensor reads
 *        nabla^2_ij P_ik = nabla^2_ji P_ik + R_ijis P_sk + R_ijks P_is.
 *  - weyl is what remains of riemann after removing
 *        -R/((n-1)(n-2)) (g_ik g_js - g_is g_jk) + 1/(n-2) (R_ik g_js - R_is g_jk + g_ik R_js - g_is R_jk).
 *  - Covariant derivatives put the derivative index first; norms are fully
 *    contracted with the inverse metric.
 */

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "divbound/errors.hpp"
#include "divbound/expr.hpp"
#include "divbound/jet.hpp"
#include "divbound/tensor.hpp"

namespace divbound {

template <int N>
using Point = std::array<double, N>;

/// Symmetric n x n array of component expressions over a chart.
class MetricField {
public:
    MetricField() = default;
    /// `components[i][j]` for i <= j; the lower triangle mirrors it.
    MetricField(int dimension, std::vector<Expr> upper_triangle, ParamSet params);

    static MetricField diagonal(std::vector<Expr> entries, ParamSet params);

    int dimension() const noexcept { return dimension_; }
    const Expr& operator()(int i, int j) const { return components_[i * dimension_ + j]; }
    const ParamSet& params() const noexcept { return params_; }
    MetricField with_params(ParamSet params) const {
        MetricField m = *this;
        m.params_ = std::move(params);
        return m;
    }

private:
    int dimension_ = 0;
    std::vector<Expr> components_;
    ParamSet params_;
};

inline constexpr double kPositiveDefiniteTolerance = 1e-12;

/// Leading principal minors; throws GeometryError at the first one not above tolerance.
template <int N>
void check_positive_definite(const Eigen::Matrix<double, N, N>& g) {
    for (int k = 1; k <= N; ++k) {
        const double minor = g.topLeftCorner(k, k).determinant();
        if (!(minor > kPositiveDefiniteTolerance))
            throw GeometryError("metric is not positive definite: leading minor " + std::to_string(k) + " = " + std::to_string(minor));
    }
}

/// Jets of g, g^-1 and Gamma around one point.
template <int N>
struct LocalChart {
    Point<N> point{};
    std::array<Jet<N>, N> coordinates;
    JetTensor<N, 2> metric;
    JetTensor<N, 2> inverse_metric;
    JetTensor<N, 3> christoffel;  // (k, i, j) = Gamma^k_ij
};

/// Truncated-series inverse: with G = G0 + E and E nilpotent, G^-1 = sum_k (-G0^-1 E)^k G0^-1.
template <int N>
JetTensor<N, 2> inverse(const JetTensor<N, 2>& g) {
    const Eigen::Matrix<double, N, N> g0_inv = to_matrix(g).inverse();
    const int order = g(0, 0).order();
    JetTensor<N, 2> step;  // -G0^-1 E
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            Jet<N> acc = Jet<N>::constant(0.0, order);
            for (int l = 0; l < N; ++l) {
                Jet<N> e = g(l, j);
                e.coefficient(0) = 0.0;
                acc += (-g0_inv(i, l)) * e;
            }
            step(i, j) = acc;
        }
    JetTensor<N, 2> term;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) term(i, j) = Jet<N>::constant(g0_inv(i, j), order);
    JetTensor<N, 2> sum = term;
    for (int k = 1; k <= order; ++k) {
        JetTensor<N, 2> next;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                Jet<N> acc = Jet<N>::constant(0.0, order);
                for (int l = 0; l < N; ++l) acc += step(i, l) * term(l, j);
                next(i, j) = acc;
            }
        term = next;
        sum += term;
    }
    return sum;
}

template <int N>
JetTensor<N, 3> christoffel_from(const JetTensor<N, 2>& g, const JetTensor<N, 2>& g_inv) {
    const JetTensor<N, 3> dg = gradient(g);  // dg(l, i, j) = d_l g_ij
    JetTensor<N, 3> lowered;                 // Gamma_lij = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
    for (int l = 0; l < N; ++l)
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) lowered(l, i, j) = 0.5 * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
    JetTensor<N, 3> gamma;
    for (int k = 0; k < N; ++k)
        for (int i = 0; i < N; ++i)
            for (int j = i; j < N; ++j) {
                Jet<N> acc;
                for (int l = 0; l < N; ++l) acc += g_inv(k, l) * lowered(l, i, j);
                gamma(k, i, j) = acc;
                gamma(k, j, i) = acc;
            }
    return gamma;
}

template <int N>
LocalChart<N> local_chart(const MetricField& metric, const Point<N>& point, int order = kMaxJetOrder) {
    if (metric.dimension() != N) throw GeometryError("metric dimension does not match the evaluation dimension");
    LocalChart<N> chart;
    chart.point = point;
    chart.coordinates = seed_variables<N>(point, order);
    for (int i = 0; i < N; ++i)
        for (int j = i; j < N; ++j) {
            const Jet<N> gij = evaluate<Jet<N>>(metric(i, j), chart.coordinates, metric.params()).truncated(order);
            chart.metric(i, j) = gij;
            chart.metric(j, i) = gij;
        }
    check_positive_definite<N>(to_matrix(chart.metric));
    chart.inverse_metric = inverse(chart.metric);
    chart.christoffel = christoffel_from(chart.metric, chart.inverse_metric);
    return chart;
}

/// Gamma^k_ij with live derivatives (one order below the chart).
template <int N>
JetTensor<N, 3> christoffel(const MetricField& metric, const Point<N>& point) {
    return local_chart<N>(metric, point).christoffel;
}

/// Curvature at one point. Tensors are values; Ricci and scalar curvature keep
/// one derivative so the contracted Bianchi identity can be checked.
template <int N>
struct CurvatureEval {
    LocalChart<N> chart;
    Tensor<double, N, 2> metric;
    Tensor<double, N, 2> inverse_metric;
    Tensor<double, N, 3> christoffel;
    Tensor<double, N, 4> riemann;
    Tensor<double, N, 2> ricci;
    Tensor<double, N, 2> traceless_ricci;  // z = Ric - (R/n) g
    double scalar = 0.0;
    Tensor<double, N, 4> weyl;
    JetTensor<N, 2> ricci_jet;
    Jet<N> scalar_jet;
};

/// Fully covariant Riemann tensor as jets (two orders below Gamma's source chart).
template <int N>
JetTensor<N, 4> riemann_jet(const LocalChart<N>& chart) {
    const JetTensor<N, 3>& gamma = chart.christoffel;
    const JetTensor<N, 4> dgamma = gradient(gamma);  // dgamma(a, m, i, j) = d_a Gamma^m_ij
    JetTensor<N, 4> up;                              // up(m, j, k, s) = R^m_jks
    for (int m = 0; m < N; ++m)
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k)
                for (int s = k + 1; s < N; ++s) {
                    Jet<N> r = dgamma(k, m, s, j) - dgamma(s, m, k, j);
                    for (int l = 0; l < N; ++l) r += gamma(m, k, l) * gamma(l, s, j) - gamma(m, s, l) * gamma(l, k, j);
                    up(m, j, k, s) = r;
                    up(m, j, s, k) = -r;
                }
    JetTensor<N, 4> down;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k)
                for (int s = 0; s < N; ++s) {
                    Jet<N> acc;
                    for (int m = 0; m < N; ++m) acc += chart.metric(i, m) * up(m, j, k, s);
                    down(i, j, k, s) = acc;
                }
    return down;
}

template <int N>
CurvatureEval<N> curvature(const LocalChart<N>& chart) {
    static_assert(N >= 3, "curvature decomposition needs n >= 3");
    CurvatureEval<N> c;
    c.chart = chart;
    c.metric = values(chart.metric);
    c.inverse_metric = values(chart.inverse_metric);
    c.christoffel = values(chart.christoffel);

    const JetTensor<N, 4> rm = riemann_jet(chart);
    c.riemann = values(rm);
    for (int j = 0; j < N; ++j)
        for (int s = 0; s < N; ++s) {
            Jet<N> acc;
            for (int i = 0; i < N; ++i)
                for (int k = 0; k < N; ++k) acc += chart.inverse_metric(i, k) * rm(i, j, k, s);
            c.ricci_jet(j, s) = acc;
        }
    Jet<N> scalar;
    for (int j = 0; j < N; ++j)
        for (int s = 0; s < N; ++s) scalar += chart.inverse_metric(j, s) * c.ricci_jet(j, s);
    c.scalar_jet = scalar;
    c.ricci = values(c.ricci_jet);
    c.scalar = scalar.value();

    const double n = N;
    const auto& g = c.metric;
    const auto& ric = c.ricci;
    for (int j = 0; j < N; ++j)
        for (int s = 0; s < N; ++s) c.traceless_ricci(j, s) = ric(j, s) - c.scalar / n * g(j, s);

    const double scalar_block = -c.scalar / ((n - 1) * (n - 2));
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k)
                for (int s = 0; s < N; ++s) {
                    const double pure_trace = scalar_block * (g(i, k) * g(j, s) - g(i, s) * g(j, k)) +
                                              (ric(i, k) * g(j, s) - ric(i, s) * g(j, k) + g(i, k) * ric(j, s) - g(i, s) * ric(j, k)) / (n - 2);
                    c.weyl(i, j, k, s) = c.riemann(i, j, k, s) - pure_trace;
                }
    return c;
}

/// The `riemann` operation: every curvature tensor of `metric` at `point`.
template <int N>
CurvatureEval<N> riemann(const MetricField& metric, const Point<N>& point) {
    return curvature(local_chart<N>(metric, point));
}

/// Covariant Hessian d_i d_j f - Gamma^k_ij d_k f, as jets two orders below f.
template <int N>
JetTensor<N, 2> hessian(const Jet<N>& f, const LocalChart<N>& chart) {
    const JetTensor<N, 1> df = gradient(f);
    return covariant_derivative(df, chart.christoffel);
}

template <int N>
Jet<N> laplacian(const Jet<N>& f, const LocalChart<N>& chart) {
    const JetTensor<N, 2> h = hessian(f, chart);
    Jet<N> acc;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) acc += chart.inverse_metric(i, j) * h(i, j);
    return acc;
}

/// f as a jet on the chart's coordinates.
template <int N>
Jet<N> scalar_jet(const Expr& f, const LocalChart<N>& chart, const ParamSet& params) {
    return evaluate<Jet<N>>(f, chart.coordinates, params).truncated(chart.coordinates[0].order());
}

template <int N>
Tensor<double, N, 2> hessian(const Expr& f, const MetricField& metric, const Point<N>& point) {
    const LocalChart<N> chart = local_chart<N>(metric, point);
    return values(hessian(scalar_jet(f, chart, metric.params()), chart));
}

template <int N>
double laplacian(const Expr& f, const MetricField& metric, const Point<N>& point) {
    const LocalChart<N> chart = local_chart<N>(metric, point);
    return laplacian(scalar_jet(f, chart, metric.params()), chart).value();
}

}  // namespace divbound
