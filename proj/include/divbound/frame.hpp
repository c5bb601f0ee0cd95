#pragma once

/**
 * @file frame.hpp
 * @brief Orthonormal frame adapted to P and the frame form of div P.
 *
 * Where |P| != 0 the frame is E_1 = grad f / |grad f|, E_2 = A E_1 / |A E_1| with
 * (A X)^j = g^jm P_im X^i, completed by Gram-Schmidt over the coordinate
 * vectors. The completion pivot is the coordinate vector with the largest
 * residual norm (ties go to the lowest index). In this frame
 * P = u (theta^1 (x) theta^2 - theta^2 (x) theta^1) with u = P(E_1, E_2).
 *
 * The frame is not a coordinate frame, so its Lie brackets enter the
 * divergence:
 *
 *   (div P)(E_1) = -E_2(u) + sum_{i>=3} <E_i | [E_2, E_i]> u
 *   (div P)(E_2) =  E_1(u) - sum_{i>=3} <E_i | [E_1, E_i]> u
 *   (div P)(E_k) =  <E_k | [E_1, E_2]> u,   k >= 3
 *
 * Dropping the bracket terms gives -E_2(u) theta^1 + E_1(u) theta^2, which is
 * wrong whenever those brackets do not vanish.
 */

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <string>

#include "divbound/errors.hpp"
#include "divbound/ptensor.hpp"

namespace divbound {

inline constexpr double kDegeneratePTolerance = 1e-10;

template <int N>
using Vec = Eigen::Matrix<double, N, 1>;
template <int N>
using Mat = Eigen::Matrix<double, N, N>;

template <int N>
struct FrameEval {
    Point<N> point{};
    std::array<JetTensor<N, 1>, N> frame;  // coordinate components of E_a, as jets
    Mat<N> vectors;                        // column a = E_a
    Mat<N> coframe;                        // row a = theta^a
    std::array<int, N> completion_pivots{};  // coordinate index used for E_3..E_n, -1 for E_1, E_2
    Jet<N> u;
    Vec<N> frame_derivatives_u;            // E_a(u)
    Mat<N> p_in_frame;                     // P(E_a, E_b)
    Tensor<double, N, 3> connection;       // (i, j, k) = <nabla_{E_i} E_j, E_k>
    Tensor<double, N, 3> brackets;         // (i, j, c) = [E_i, E_j]^c
    Vec<N> true_div;                       // bracket form, frame components
    Vec<N> false_div;                      // bracket terms dropped
    Vec<N> coordinate_div;                 // coordinate div P evaluated on E_a

    double inner(int a, const Vec<N>& v) const;
};

template <int N>
Jet<N> metric_inner(const LocalChart<N>& chart, const JetTensor<N, 1>& x, const JetTensor<N, 1>& y) {
    Jet<N> acc;
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) acc += chart.metric(a, b) * x(a) * y(b);
    return acc;
}

template <int N>
double metric_inner(const Tensor<double, N, 2>& g, const Vec<N>& x, const Vec<N>& y) {
    return x.dot(to_matrix(g) * y);
}

template <int N>
JetTensor<N, 1> normalized(const LocalChart<N>& chart, const JetTensor<N, 1>& v) {
    const Jet<N> inv_norm = 1.0 / sqrt(metric_inner(chart, v, v));
    JetTensor<N, 1> out;
    for (int a = 0; a < N; ++a) out(a) = v(a) * inv_norm;
    return out;
}

template <int N>
Vec<N> value_vector(const JetTensor<N, 1>& v) {
    Vec<N> out;
    for (int a = 0; a < N; ++a) out(a) = v(a).value();
    return out;
}

/// Derivative of every component of v along the value of x: (x . d) v^c.
template <int N>
Vec<N> directional(const JetTensor<N, 1>& v, const Vec<N>& x) {
    Vec<N> out = Vec<N>::Zero();
    for (int c = 0; c < N; ++c)
        for (int b = 0; b < N; ++b) out(c) += x(b) * v(c).gradient(b);
    return out;
}

template <int N>
Vec<N> bracket_vector(const FrameEval<N>& fr, int i, int j) {
    Vec<N> v;
    for (int c = 0; c < N; ++c) v(c) = fr.brackets(i, j, c);
    return v;
}

template <int N>
double FrameEval<N>::inner(int a, const Vec<N>& v) const {
    return coframe.row(a).dot(v);
}

template <int N>
FrameEval<N> build_frame(const PFields<N>& fields) {
    static_assert(N >= 2);
    const LocalChart<N>& chart = fields.chart();
    const Tensor<double, N, 2>& g = fields.curvature.metric;
    const double norm_p = std::sqrt(std::max(0.0, norm_sq(values(fields.p), fields.curvature.inverse_metric)));
    if (norm_p < kDegeneratePTolerance)
        throw DegenerateFrameError("|P| = " + std::to_string(norm_p) + " at the requested point; the adapted frame needs |P| != 0");

    FrameEval<N> fr;
    fr.point = chart.point;
    fr.completion_pivots.fill(-1);

    JetTensor<N, 1> grad_f;
    for (int a = 0; a < N; ++a) {
        Jet<N> acc;
        for (int b = 0; b < N; ++b) acc += chart.inverse_metric(a, b) * fields.df(b);
        grad_f(a) = acc;
    }
    fr.frame[0] = normalized(chart, grad_f);

    JetTensor<N, 1> a_e1;  // (A E_1)^j = g^jm P_im E_1^i
    for (int j = 0; j < N; ++j) {
        Jet<N> acc;
        for (int m = 0; m < N; ++m)
            for (int i = 0; i < N; ++i) acc += chart.inverse_metric(j, m) * fields.p(i, m) * fr.frame[0](i);
        a_e1(j) = acc;
    }
    fr.frame[1] = normalized(chart, a_e1);

    for (int next = 2; next < N; ++next) {
        int pivot = -1;
        double best = -1.0;
        for (int c = 0; c < N; ++c) {
            Vec<N> r = Vec<N>::Unit(c);
            for (int e = 0; e < next; ++e) {
                const Vec<N> ev = value_vector(fr.frame[e]);
                r -= metric_inner<N>(g, Vec<N>::Unit(c), ev) * ev;
            }
            const double len = std::sqrt(std::max(0.0, metric_inner<N>(g, r, r)));
            if (len > best) {
                best = len;
                pivot = c;
            }
        }
        JetTensor<N, 1> residual;
        for (int a = 0; a < N; ++a) residual(a) = Jet<N>::constant(a == pivot ? 1.0 : 0.0);
        JetTensor<N, 1> unit = residual;
        for (int e = 0; e < next; ++e) {
            const Jet<N> proj = metric_inner(chart, unit, fr.frame[e]);
            for (int a = 0; a < N; ++a) residual(a) -= proj * fr.frame[e](a);
        }
        fr.frame[next] = normalized(chart, residual);
        fr.completion_pivots[next] = pivot;
    }

    for (int a = 0; a < N; ++a) fr.vectors.col(a) = value_vector(fr.frame[a]);
    fr.coframe = fr.vectors.transpose() * to_matrix(g);

    Jet<N> u;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) u += fields.p(i, j) * fr.frame[0](i) * fr.frame[1](j);
    fr.u = u;
    Vec<N> du;
    for (int b = 0; b < N; ++b) du(b) = u.gradient(b);
    for (int a = 0; a < N; ++a) fr.frame_derivatives_u(a) = fr.vectors.col(a).dot(du);

    const Mat<N> pv = to_matrix(values(fields.p));
    fr.p_in_frame = fr.vectors.transpose() * pv * fr.vectors;

    const Tensor<double, N, 3>& gamma = fields.curvature.christoffel;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            const Vec<N> ei = fr.vectors.col(i), ej = fr.vectors.col(j);
            Vec<N> cov = directional(fr.frame[j], ei);  // nabla_{E_i} E_j
            for (int c = 0; c < N; ++c)
                for (int a = 0; a < N; ++a)
                    for (int b = 0; b < N; ++b) cov(c) += gamma(c, a, b) * ei(a) * ej(b);
            for (int k = 0; k < N; ++k) fr.connection(i, j, k) = metric_inner<N>(g, cov, fr.vectors.col(k));
            const Vec<N> br = directional(fr.frame[j], ei) - directional(fr.frame[i], ej);
            for (int c = 0; c < N; ++c) fr.brackets(i, j, c) = br(c);
        }

    const double uv = u.value();
    fr.false_div = Vec<N>::Zero();
    fr.false_div(0) = -fr.frame_derivatives_u(1);
    fr.false_div(1) = fr.frame_derivatives_u(0);
    fr.true_div = fr.false_div;
    for (int i = 2; i < N; ++i) {
        fr.true_div(0) += fr.inner(i, bracket_vector(fr, 1, i)) * uv;
        fr.true_div(1) -= fr.inner(i, bracket_vector(fr, 0, i)) * uv;
    }
    for (int k = 2; k < N; ++k) fr.true_div(k) = fr.inner(k, bracket_vector(fr, 0, 1)) * uv;

    const Vec<N> div_values = value_vector(fields.div_p);
    for (int a = 0; a < N; ++a) fr.coordinate_div(a) = div_values.dot(fr.vectors.col(a));
    return fr;
}

template <int N>
FrameEval<N> build_frame(const PTensorSpec& spec, const Point<N>& point) {
    return build_frame(p_fields<N>(spec, point));
}

template <int N>
struct DivergenceComparison {
    Vec<N> true_div;
    Vec<N> false_div;
    Vec<N> discrepancy;  // true - false, frame components
};

template <int N>
DivergenceComparison<N> div_true_vs_false(const FrameEval<N>& fr) {
    return {fr.true_div, fr.false_div, fr.true_div - fr.false_div};
}

/// The same divergence through connection coefficients instead of brackets:
/// the bracket sums become <nabla_{E_i} E_i | E_2> and -<nabla_{E_i} E_i | E_1>,
/// and the k >= 3 entries become -<nabla_{E_1} E_k | E_2> + <nabla_{E_2} E_k | E_1>.
template <int N>
Vec<N> connection_form_div(const FrameEval<N>& fr) {
    const double uv = fr.u.value();
    Vec<N> d = Vec<N>::Zero();
    d(0) = -fr.frame_derivatives_u(1);
    d(1) = fr.frame_derivatives_u(0);
    for (int i = 2; i < N; ++i) {
        d(0) += fr.connection(i, i, 1) * uv;
        d(1) -= fr.connection(i, i, 0) * uv;
    }
    for (int k = 2; k < N; ++k) d(k) = (-fr.connection(0, k, 1) + fr.connection(1, k, 0)) * uv;
    return d;
}

/// Frame components w(E_a) to coordinate components w_b = sum_a w(E_a) theta^a_b.
template <int N>
Vec<N> to_coordinate_covector(const FrameEval<N>& fr, const Vec<N>& frame_components) {
    return fr.coframe.transpose() * frame_components;
}

}  // namespace divbound
