#pragma once

// Finite-difference geometry computed straight from metric component values,
// sharing nothing with the jet pipeline except expression evaluation on doubles.
//
//   Gamma^k_ij = 1/2 g^kl (g_jl,i + g_il,j - g_ij,l)
//   R_abcd = 1/2 (g_ad,bc + g_bc,ad - g_ac,bd - g_bd,ac) + g_mn (Gamma^m_bc Gamma^n_ad - Gamma^m_bd Gamma^n_ac)

#include <Eigen/Dense>

#include <array>
#include <vector>

#include "divbound/finite_difference.hpp"
#include "divbound/geometry.hpp"

namespace oracle {

using divbound::MetricField;
using divbound::Tensor;

template <int N>
struct FdGeometry {
    Tensor<double, N, 2> g, g_inv;
    Tensor<double, N, 3> dg;          // (c, a, b) = d_c g_ab
    Tensor<double, N, 4> ddg;         // (c, d, a, b) = d_c d_d g_ab
    Tensor<double, N, 3> christoffel; // (k, i, j)
    Tensor<double, N, 4> riemann;     // (a, b, c, d)
};

template <int N>
FdGeometry<N> fd_geometry(const MetricField& metric, const divbound::Point<N>& point, double h = 1e-4) {
    FdGeometry<N> out;
    Eigen::VectorXd p(N);
    for (int i = 0; i < N; ++i) p[i] = point[i];
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
            const divbound::ScalarFieldFn gab = [&](const Eigen::VectorXd& x) {
                std::array<double, N> q;
                for (int i = 0; i < N; ++i) q[i] = x[i];
                return divbound::evaluate(metric(a, b), q, metric.params());
            };
            out.g(a, b) = gab(p);
            for (int c = 0; c < N; ++c) {
                std::vector<int> alpha(N, 0);
                alpha[c] = 1;
                out.dg(c, a, b) = divbound::finite_difference(gab, p, alpha, h);
                for (int d = 0; d < N; ++d) {
                    std::vector<int> beta(N, 0);
                    beta[c] += 1;
                    beta[d] += 1;
                    out.ddg(c, d, a, b) = divbound::finite_difference(gab, p, beta, h);
                }
            }
        }
    out.g_inv = divbound::from_matrix<N>(divbound::to_matrix(out.g).inverse());
    for (int k = 0; k < N; ++k)
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                double acc = 0.0;
                for (int l = 0; l < N; ++l) acc += 0.5 * out.g_inv(k, l) * (out.dg(i, j, l) + out.dg(j, i, l) - out.dg(l, i, j));
                out.christoffel(k, i, j) = acc;
            }
    const auto& G = out.christoffel;
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            for (int c = 0; c < N; ++c)
                for (int d = 0; d < N; ++d) {
                    double v = 0.5 * (out.ddg(b, c, a, d) + out.ddg(a, d, b, c) - out.ddg(b, d, a, c) - out.ddg(a, c, b, d));
                    for (int m = 0; m < N; ++m)
                        for (int n = 0; n < N; ++n) v += out.g(m, n) * (G(m, b, c) * G(n, a, d) - G(m, b, d) * G(n, a, c));
                    out.riemann(a, b, c, d) = v;
                }
    return out;
}

}  // namespace oracle
