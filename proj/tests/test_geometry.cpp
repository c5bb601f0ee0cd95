#include "doctest.h"

#include <cmath>

#include "divbound/geometry.hpp"
#include "divbound/scenario.hpp"
#include "oracles.hpp"

using namespace divbound;

namespace {

MetricField warped_metric(double k, double c) { return warped_canonical_scenario(k, c).metric_field(); }

template <int N>
double max_riemann_symmetry_error(const CurvatureEval<N>& e) {
    double worst = 0.0;
    const auto& R = e.riemann;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k)
                for (int s = 0; s < N; ++s) {
                    worst = std::max(worst, std::abs(R(i, j, k, s) + R(j, i, k, s)));
                    worst = std::max(worst, std::abs(R(i, j, k, s) + R(i, j, s, k)));
                    worst = std::max(worst, std::abs(R(i, j, k, s) - R(k, s, i, j)));
                    worst = std::max(worst, std::abs(R(i, j, k, s) + R(j, k, i, s) + R(k, i, j, s)));
                }
    return worst;
}

template <int N>
double max_weyl_trace(const CurvatureEval<N>& e) {
    double worst = 0.0;
    for (int j = 0; j < N; ++j)
        for (int s = 0; s < N; ++s) {
            double t = 0.0;
            for (int i = 0; i < N; ++i)
                for (int k = 0; k < N; ++k) t += e.inverse_metric(i, k) * e.weyl(i, j, k, s);
            worst = std::max(worst, std::abs(t));
        }
    return worst;
}

template <int N>
Point<N> first_point(const Scenario& s) {
    Point<N> p{};
    const auto pts = s.points();
    for (int i = 0; i < N; ++i) p[i] = pts.front()[i];
    return p;
}

}  // namespace

TEST_CASE("Euclidean geometry is flat") {
    const Scenario s = euclidean_scenario();
    const CurvatureEval<3> e = riemann<3>(s.metric_field(), {0.3, -0.2, 0.9});
    CHECK(max_abs(e.christoffel) == 0.0);
    CHECK(max_abs(e.riemann) == 0.0);
    CHECK(e.scalar == 0.0);
    CHECK(max_abs(e.traceless_ricci) == 0.0);
    CHECK(max_abs(e.weyl) == 0.0);

    const Expr half_x_sq = parse("x1^2/2", s.signature());
    const auto hess = hessian<3>(half_x_sq, s.metric_field(), {0.3, -0.2, 0.9});
    CHECK(hess(1, 1) == 1.0);
    CHECK(hess(0, 0) == 0.0);
    CHECK(hess(2, 2) == 0.0);
    CHECK(laplacian<3>(parse("r^2 + x1^2 + x2^2", s.signature()), s.metric_field(), {0.3, -0.2, 0.9}) == doctest::Approx(6.0));
    CHECK(norm_sq(e.metric, e.inverse_metric) == doctest::Approx(3.0));
}

TEST_CASE("warped Christoffel symbols") {
    const double k = 4, c = 1, r = 0.37;
    const CurvatureEval<3> e = riemann<3>(warped_metric(k, c), {r, 0.2, -0.4});
    const double phi = std::pow(r + c, -1 / k);
    const double phid = -1 / k * std::pow(r + c, -1 / k - 1);
    const auto& G = e.christoffel;
    for (int i = 1; i < 3; ++i) {
        CHECK(G(0, i, i) == doctest::Approx(-phi * phid).epsilon(1e-13));
        CHECK(G(i, 0, i) == doctest::Approx(phid / phi).epsilon(1e-13));
        CHECK(G(i, i, 0) == doctest::Approx(phid / phi).epsilon(1e-13));
    }
    int nonzero = 0;
    for (int f = 0; f < 27; ++f) nonzero += std::abs(G[f]) > 1e-14;
    CHECK(nonzero == 6);
}

TEST_CASE("warped Hessian of f = psi(x1)") {
    const double r = 0.5;
    const Scenario s = warped_canonical_scenario(4, 1);
    const CurvatureEval<3> e = riemann<3>(s.metric_field(), {r, 0.3, 0.0});
    const Expr f = parse("sin(x1)", s.signature());
    const auto h = values(hessian(scalar_jet(f, e.chart, s.params), e.chart));
    const double phi = std::pow(r + 1, -0.25), phid = -0.25 * std::pow(r + 1, -1.25);
    CHECK(h(1, 1) == doctest::Approx(-std::sin(0.3)).epsilon(1e-13));
    CHECK(h(1, 0) == doctest::Approx(-(phid / phi) * std::cos(0.3)).epsilon(1e-13));
    CHECK(h(0, 1) == doctest::Approx(h(1, 0)));
    CHECK(std::abs(h(0, 0)) < 1e-15);
    CHECK(std::abs(h(2, 2)) < 1e-15);
    CHECK(std::abs(h(1, 2)) < 1e-15);
}

TEST_CASE("round sphere: Einstein with R = 6, Hessian of cos r") {
    const Scenario s = round_sphere_static_scenario();
    for (const auto& pv : s.points()) {
        const Point<3> p{pv[0], pv[1], pv[2]};
        const CurvatureEval<3> e = riemann<3>(s.metric_field(), p);
        CHECK(e.scalar == doctest::Approx(6.0).epsilon(1e-10));
        CHECK(max_abs(e.ricci - 2.0 * e.metric) < 1e-10);
        CHECK(max_abs(e.traceless_ricci) < 1e-10);
        CHECK(e.christoffel(0, 1, 1) == doctest::Approx(-std::sin(p[0]) * std::cos(p[0])).epsilon(1e-12));
        const auto hess = values(hessian(scalar_jet(s.f_expr(), e.chart, {}), e.chart));
        CHECK(max_abs(hess + std::cos(p[0]) * e.metric) < 1e-10);
        CHECK(laplacian(scalar_jet(s.f_expr(), e.chart, {}), e.chart).value() == doctest::Approx(-3.0 * std::cos(p[0])).epsilon(1e-10));
        // sectional curvature 1: R_1212 = g_11 g_22 with R_ijij > 0
        CHECK(e.riemann(0, 1, 0, 1) == doctest::Approx(e.metric(1, 1)).epsilon(1e-10));
    }
    // Gamma^r_thth against the finite-difference oracle
    const Point<3> p{0.9, 1.1, 0.2};
    const auto fd = oracle::fd_geometry<3>(s.metric_field(), p);
    CHECK(std::abs(fd.christoffel(0, 1, 1) + std::sin(0.9) * std::cos(0.9)) < 1e-7);
}

TEST_CASE("non-positive-definite metrics are rejected") {
    const Signature sig = Signature::chart(3);
    const MetricField bad = MetricField::diagonal({parse("1", sig), parse("r", sig), parse("1", sig)}, {});
    CHECK_THROWS_AS(riemann<3>(bad, {-0.5, 0, 0}), GeometryError);
    CHECK_NOTHROW(riemann<3>(bad, {0.5, 0, 0}));
    CHECK_THROWS_AS(riemann<3>(bad, {0.0, 0, 0}), GeometryError);
    CHECK_THROWS_AS(MetricField(3, {parse("1", sig)}, {}), GeometryError);
}

TEST_CASE("curvature invariants and the finite-difference oracle on random metrics") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Scenario s3 = random_curved_scenario(seed, 3);
        const MetricField m3 = s3.metric_field();
        const Point<3> p3 = first_point<3>(s3);
        const CurvatureEval<3> e3 = riemann<3>(m3, p3);
        CHECK(max_riemann_symmetry_error(e3) < 1e-10);
        CHECK(max_abs(e3.weyl) < 1e-10);
        CHECK(std::abs(e3.scalar) > 1e-6);  // genuinely curved
        const auto fd = oracle::fd_geometry<3>(m3, p3);
        CHECK(max_abs(fd.christoffel - e3.christoffel) <= 1e-6 * std::max(1.0, max_abs(e3.christoffel)));
        CHECK(max_abs(fd.riemann - e3.riemann) <= 1e-6 * std::max(1.0, max_abs(e3.riemann)));
        // metric compatibility
        CHECK(max_abs(values(covariant_derivative(e3.chart.metric, e3.chart.christoffel))) < 1e-10);

        const Scenario s4 = random_curved_scenario(seed, 4);
        const Point<4> p4 = first_point<4>(s4);
        const CurvatureEval<4> e4 = riemann<4>(s4.metric_field(), p4);
        CHECK(max_riemann_symmetry_error(e4) < 1e-10);
        CHECK(max_weyl_trace(e4) < 1e-10);
        CHECK(max_abs(e4.weyl) > 1e-6);  // n = 4 Weyl is generically nonzero
        const auto fd4 = oracle::fd_geometry<4>(s4.metric_field(), p4);
        CHECK(max_abs(fd4.riemann - e4.riemann) <= 1e-6 * std::max(1.0, max_abs(e4.riemann)));
    }
}

TEST_CASE("contracted second Bianchi identity") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Scenario s = random_curved_scenario(seed, 3);
        const CurvatureEval<3> e = riemann<3>(s.metric_field(), first_point<3>(s));
        const auto nabla_ric = values(covariant_derivative(e.ricci_jet, e.chart.christoffel));  // (i, j, k) = nabla_i R_jk
        for (int k = 0; k < 3; ++k) {
            double div = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) div += e.inverse_metric(i, j) * nabla_ric(i, j, k);
            CHECK(std::abs(div - 0.5 * e.scalar_jet.gradient(k)) < 1e-8);
        }
    }
}
