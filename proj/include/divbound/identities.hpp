#pragma once

// Residual checkers for the pointwise identities satisfied by P, and for the
// static and critical-point systems. Relative residuals divide by the largest
// participating term, floored at 1.

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <string>
#include <vector>

#include "divbound/errors.hpp"
#include "divbound/ptensor.hpp"

namespace divbound {

struct IdentityResidual {
    std::string name;
    std::vector<double> point;
    double lhs = 0.0;
    double rhs = 0.0;
    double absolute = 0.0;
    double relative = 0.0;
    double scale = 0.0;
};

template <std::size_t M>
IdentityResidual make_residual(std::string name, const std::array<double, M>& point, double lhs, double rhs,
                               std::initializer_list<double> terms) {
    IdentityResidual r;
    r.name = std::move(name);
    r.point.assign(point.begin(), point.end());
    r.lhs = lhs;
    r.rhs = rhs;
    r.absolute = std::abs(lhs - rhs);
    r.scale = std::abs(lhs);
    for (double t : terms) r.scale = std::max(r.scale, std::abs(t));
    r.relative = r.absolute / std::max(r.scale, 1.0);
    return r;
}

/// The pieces both Bochner forms are assembled from.
template <int N>
struct BochnerTerms {
    double half_laplacian_p_sq = 0.0;   // 1/2 Delta |P|^2
    double norm_nabla_p_sq = 0.0;       // |nabla P|^2
    double p_dot_nabla_div = 0.0;       // <P | nabla div P> = P^jk nabla_j (div P)_k
    double norm_p_sq = 0.0;             // |P|^2
    double ricci_pp = 0.0;              // R_js P_sk P_jk, fully contracted
    double weyl_pp = 0.0;               // W_ijks P_is P_jk, fully contracted
    double scalar = 0.0;                // R
    Tensor<double, N, 1> grad_p_sq;     // d |P|^2
};

template <int N>
BochnerTerms<N> bochner_terms(const PFields<N>& fields) {
    const LocalChart<N>& chart = fields.chart();
    const CurvatureEval<N>& curv = fields.curvature;
    const Tensor<double, N, 2>& g_inv = curv.inverse_metric;

    BochnerTerms<N> t;
    const Jet<N> p_sq = pair(fields.p, raise_all(fields.p, chart.inverse_metric));
    t.half_laplacian_p_sq = 0.5 * laplacian(p_sq, chart).value();
    t.grad_p_sq = values(gradient(p_sq));

    const Tensor<double, N, 2> p = values(fields.p);
    const Tensor<double, N, 2> p_up = raise_all(p, g_inv);
    t.norm_p_sq = pair(p, p_up);
    t.norm_nabla_p_sq = norm_sq(values(fields.nabla_p), g_inv);

    const Tensor<double, N, 2> nabla_div = values(covariant_derivative(fields.div_p, chart.christoffel));
    t.p_dot_nabla_div = pair(p_up, nabla_div);

    const Tensor<double, N, 2> ric_up = raise_all(curv.ricci, g_inv);
    double rpp = 0.0;
    for (int j = 0; j < N; ++j)
        for (int s = 0; s < N; ++s)
            for (int k = 0; k < N; ++k)
                for (int k2 = 0; k2 < N; ++k2) rpp += ric_up(j, s) * p(s, k) * p(j, k2) * g_inv(k, k2);
    t.ricci_pp = rpp;

    double wpp = 0.0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k)
                for (int s = 0; s < N; ++s) wpp += curv.weyl(i, j, k, s) * p_up(i, s) * p_up(j, k);
    t.weyl_pp = wpp;
    t.scalar = curv.scalar;
    return t;
}

/// Right-hand side of the general-dimension Bochner formula:
/// |nabla P|^2 + 2<P|nabla div P> + 2R/((n-1)(n-2))|P|^2 + 2(n-4)/(n-2) Ric(P,P) + 2 W(P,P).
template <int N>
double bochner_rhs(const BochnerTerms<N>& t) {
    const double n = N;
    return t.norm_nabla_p_sq + 2.0 * t.p_dot_nabla_div + 2.0 * t.scalar / ((n - 1) * (n - 2)) * t.norm_p_sq +
           2.0 * (n - 4) / (n - 2) * t.ricci_pp + 2.0 * t.weyl_pp;
}

/// Right-hand side of the three-dimensional form, where the Weyl term is absent:
/// |nabla P|^2 + 2<P|nabla div P> + R|P|^2 - 2 Ric(P,P).
template <int N>
double bochner3_rhs(const BochnerTerms<N>& t) {
    return t.norm_nabla_p_sq + 2.0 * t.p_dot_nabla_div + t.scalar * t.norm_p_sq - 2.0 * t.ricci_pp;
}

template <int N>
IdentityResidual bochner_residual(const PFields<N>& fields) {
    static_assert(N >= 3);
    const BochnerTerms<N> t = bochner_terms(fields);
    const double n = N;
    return make_residual("bochner", fields.chart().point, t.half_laplacian_p_sq, bochner_rhs(t),
                         {t.norm_nabla_p_sq, 2.0 * t.p_dot_nabla_div, 2.0 * t.scalar / ((n - 1) * (n - 2)) * t.norm_p_sq,
                          2.0 * (n - 4) / (n - 2) * t.ricci_pp, 2.0 * t.weyl_pp});
}

template <int N>
IdentityResidual bochner_residual(const PTensorSpec& spec, const Point<N>& point) {
    return bochner_residual(p_fields<N>(spec, point));
}

/// The n = 3 specialisation checked as an identity in its own right.
inline IdentityResidual bochner3_residual(const PFields<3>& fields) {
    const BochnerTerms<3> t = bochner_terms(fields);
    return make_residual("bochner_n3", fields.chart().point, t.half_laplacian_p_sq, bochner3_rhs(t),
                         {t.norm_nabla_p_sq, 2.0 * t.p_dot_nabla_div, t.scalar * t.norm_p_sq, 2.0 * t.ricci_pp});
}

struct ResidualPair {
    IdentityResidual tensor;
    IdentityResidual scalar;
};

namespace detail {

template <int N>
double tensor_norm(const Tensor<double, N, 2>& t, const Tensor<double, N, 2>& g_inv) {
    return std::sqrt(std::max(0.0, norm_sq(t, g_inv)));
}

}  // namespace detail

/// f Ric = nabla^2 f + (R/2) f g  and  Delta f = -(R/2) f.
template <int N>
ResidualPair static_residual(const MetricField& metric, const Expr& f, const Point<N>& point) {
    static_assert(N == 3, "the static system is three-dimensional");
    const CurvatureEval<N> curv = riemann<N>(metric, point);
    const LocalChart<N>& chart = curv.chart;
    const Jet<N> fj = scalar_jet(f, chart, metric.params());
    const double fv = fj.value();
    const Tensor<double, N, 2> hess = values(hessian(fj, chart));
    const double lap = laplacian(fj, chart).value();
    const double r = curv.scalar;

    const Tensor<double, N, 2> f_ric = fv * curv.ricci;
    const Tensor<double, N, 2> trace_part = (0.5 * r * fv) * curv.metric;
    const Tensor<double, N, 2> diff = f_ric - hess - trace_part;
    const auto& gi = curv.inverse_metric;
    ResidualPair out;
    out.tensor = make_residual("static_tensor", point, detail::tensor_norm(diff, gi), 0.0,
                               {detail::tensor_norm(f_ric, gi), detail::tensor_norm(hess, gi), detail::tensor_norm(trace_part, gi)});
    out.scalar = make_residual("static_scalar", point, lap, -0.5 * r * fv, {lap, 0.5 * r * fv});
    return out;
}

/// (1+f)(Ric - (R/n) g) = nabla^2 f + R/(n(n-1)) g  and  Delta f = -R/(n-1) f.
template <int N>
ResidualPair cpe_residual(const MetricField& metric, const Expr& f, const Point<N>& point) {
    static_assert(N >= 3);
    const CurvatureEval<N> curv = riemann<N>(metric, point);
    const LocalChart<N>& chart = curv.chart;
    const Jet<N> fj = scalar_jet(f, chart, metric.params());
    const double fv = fj.value();
    const Tensor<double, N, 2> hess = values(hessian(fj, chart));
    const double lap = laplacian(fj, chart).value();
    const double r = curv.scalar, n = N;

    const Tensor<double, N, 2> lhs = (1.0 + fv) * curv.traceless_ricci;
    const Tensor<double, N, 2> g_term = (r / (n * (n - 1))) * curv.metric;
    const Tensor<double, N, 2> diff = lhs - hess - g_term;
    const auto& gi = curv.inverse_metric;
    ResidualPair out;
    out.tensor = make_residual("cpe_tensor", point, detail::tensor_norm(diff, gi), 0.0,
                               {detail::tensor_norm(lhs, gi), detail::tensor_norm(hess, gi), detail::tensor_norm(g_term, gi)});
    out.scalar = make_residual("cpe_scalar", point, lap, -r / (n - 1) * fv, {lap, r / (n - 1) * fv});
    return out;
}

inline constexpr double kStaticPotentialFloor = 1e-8;

/// Bochner formula with the static equations substituted for Ric:
/// 1/2 Delta|P|^2 = |nabla P|^2 + 2<P|nabla div P> + (R/2)|P|^2 + (2/f) P(grad f, div P) - 1/(2f) <grad f | grad |P|^2>.
/// Only meaningful where the static residuals vanish.
inline IdentityResidual static_bochner_residual(const PFields<3>& fields) {
    const double fv = fields.f.value();
    if (std::abs(fv) < kStaticPotentialFloor) throw DomainError("static Bochner identity divides by f, which vanishes here");
    const BochnerTerms<3> t = bochner_terms(fields);
    const auto& gi = fields.curvature.inverse_metric;
    const Tensor<double, 3, 1> df = values(fields.df);
    const Tensor<double, 3, 1> grad_f = raise(df, gi, 0);
    const Tensor<double, 3, 1> div_up = raise(values(fields.div_p), gi, 0);
    const Tensor<double, 3, 2> p = values(fields.p);
    double p_grad_div = 0.0;
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) p_grad_div += p(j, k) * grad_f(j) * div_up(k);
    const double grad_dot = pair(grad_f, t.grad_p_sq);

    const double a = t.norm_nabla_p_sq, b = 2.0 * t.p_dot_nabla_div, c = 0.5 * t.scalar * t.norm_p_sq;
    const double d = 2.0 / fv * p_grad_div, e = -0.5 / fv * grad_dot;
    return make_residual("static_bochner", fields.chart().point, t.half_laplacian_p_sq, a + b + c + d + e, {a, b, c, d, e});
}

}  // namespace divbound
