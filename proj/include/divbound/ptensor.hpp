#pragma once

/**
 * @file ptensor.hpp
 * @brief The skew 2-tensor P = lambda(f) (df (x) d|grad f|^2 - d|grad f|^2 (x) df).
 *
 * Everything is evaluated on jets centred at the query point, so P keeps two
 * live derivative orders (from an order-4 chart), nabla P keeps one, and the
 * identities module can still take the Laplacian of |P|^2.
 *
 * Conventions: (div P)_k = g^ij nabla_i P_jk, and every squared norm is the
 * full metric contraction, e.g. |nabla P|^2 = g^ia g^jb g^kc nabla_i P_jk nabla_a P_bc.
 * The 2-form omega = lambda(f) df ^ d|grad f|^2 with the usual form norm
 * (sum over j < k) satisfies 2 |nabla omega|^2 = |nabla P|^2 and delta omega = -div P.
 */

#include <algorithm>
#include <array>
#include <cmath>

#include "divbound/expr.hpp"
#include "divbound/geometry.hpp"
#include "divbound/jet.hpp"
#include "divbound/tensor.hpp"

namespace divbound {

struct PTensorSpec {
    Expr lambda;  // univariate, its variable is f
    Expr f;       // chart scalar
    MetricField metric;

    const ParamSet& params() const noexcept { return metric.params(); }
};

/// Jet-level fields shared by analysis, frame construction and identity checks.
template <int N>
struct PFields {
    CurvatureEval<N> curvature;
    Jet<N> f;                   // order 4
    JetTensor<N, 1> df;         // order 3
    Jet<N> grad_f_sq;           // |grad f|^2, order 3
    Jet<N> lambda;              // lambda(f), order 4
    JetTensor<N, 2> p;          // order 2
    JetTensor<N, 3> nabla_p;    // nabla_i P_jk, order 1
    JetTensor<N, 1> div_p;      // order 1

    const LocalChart<N>& chart() const { return curvature.chart; }
};

template <int N>
JetTensor<N, 2> build_p(const Jet<N>& lambda, const JetTensor<N, 1>& df, const Jet<N>& grad_f_sq) {
    const JetTensor<N, 1> dq = gradient(grad_f_sq);
    JetTensor<N, 2> p;
    for (int j = 0; j < N; ++j)
        for (int k = j + 1; k < N; ++k) {
            const Jet<N> pjk = lambda * (df(j) * dq(k) - df(k) * dq(j));
            p(j, k) = pjk;
            p(k, j) = -pjk;
        }
    // diagonal stays exactly zero; give it the working order
    for (int j = 0; j < N; ++j) p(j, j) = Jet<N>::constant(0.0, p(0, N - 1).order());
    return p;
}

template <int N>
PFields<N> p_fields(const PTensorSpec& spec, const Point<N>& point) {
    PFields<N> out;
    out.curvature = curvature(local_chart<N>(spec.metric, point));
    const LocalChart<N>& chart = out.curvature.chart;
    out.f = scalar_jet(spec.f, chart, spec.params());
    out.df = gradient(out.f);
    Jet<N> q;
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) q += chart.inverse_metric(a, b) * out.df(a) * out.df(b);
    out.grad_f_sq = q;
    const std::array<Jet<N>, 1> arg{out.f};
    out.lambda = evaluate<Jet<N>>(spec.lambda, arg, spec.params()).truncated(out.f.order());
    out.p = build_p(out.lambda, out.df, out.grad_f_sq);
    out.nabla_p = covariant_derivative(out.p, chart.christoffel);
    for (int k = 0; k < N; ++k) {
        Jet<N> acc;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) acc += chart.inverse_metric(i, j) * out.nabla_p(i, j, k);
        out.div_p(k) = acc;
    }
    return out;
}

/// Pointwise summary of P and the two divergence bounds.
template <int N>
struct PTensorEval {
    Point<N> point{};
    Tensor<double, N, 2> p;
    Tensor<double, N, 3> nabla_p;
    Tensor<double, N, 1> div_p;
    double norm_p_sq = 0.0;
    double norm_nabla_p_sq = 0.0;
    double norm_div_p_sq = 0.0;
    /// |nabla P|^2 - 2 |div P|^2: negative values refute the claimed estimate.
    double violation = 0.0;
    /// |nabla P|^2 - 2/(n-1) |div P|^2, never negative.
    double sharp_margin = 0.0;
    /// |nabla P|^2 - 1/n |div P|^2, the crude always-valid bound.
    double weak_margin = 0.0;

    /// Form-language equivalents of the tensor quantities.
    double omega_nabla_sq() const { return norm_nabla_p_sq / 2.0; }
    Tensor<double, N, 1> codifferential() const { return -1.0 * div_p; }
};

template <int N>
PTensorEval<N> analyze(const PFields<N>& fields) {
    PTensorEval<N> e;
    e.point = fields.chart().point;
    const Tensor<double, N, 2>& g_inv = fields.curvature.inverse_metric;
    e.p = values(fields.p);
    e.nabla_p = values(fields.nabla_p);
    e.div_p = values(fields.div_p);
    e.norm_p_sq = norm_sq(e.p, g_inv);
    e.norm_nabla_p_sq = norm_sq(e.nabla_p, g_inv);
    e.norm_div_p_sq = norm_sq(e.div_p, g_inv);
    e.violation = e.norm_nabla_p_sq - 2.0 * e.norm_div_p_sq;
    e.sharp_margin = e.norm_nabla_p_sq - 2.0 / (N - 1) * e.norm_div_p_sq;
    e.weak_margin = e.norm_nabla_p_sq - 1.0 / N * e.norm_div_p_sq;
    return e;
}

template <int N>
PTensorEval<N> analyze(const PTensorSpec& spec, const Point<N>& point) {
    return analyze(p_fields<N>(spec, point));
}

template <int N>
Tensor<double, N, 2> build_P(const PTensorSpec& spec, const Point<N>& point) {
    return analyze<N>(spec, point).p;
}

template <int N>
Tensor<double, N, 3> nabla_P(const PTensorSpec& spec, const Point<N>& point) {
    return analyze<N>(spec, point).nabla_p;
}

template <int N>
Tensor<double, N, 1> div_P(const PTensorSpec& spec, const Point<N>& point) {
    return analyze<N>(spec, point).div_p;
}

/// max over (i, j, k) of |nabla_i P_jk + nabla_j P_ki + nabla_k P_ij|.
template <int N>
double cyclic_residual(const PFields<N>& fields) {
    const Tensor<double, N, 3> d = values(fields.nabla_p);
    double worst = 0.0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k) worst = std::max(worst, std::abs(d(i, j, k) + d(j, k, i) + d(k, i, j)));
    return worst;
}

template <int N>
double cyclic_residual(const PTensorSpec& spec, const Point<N>& point) {
    return cyclic_residual(p_fields<N>(spec, point));
}

}  // namespace divbound
