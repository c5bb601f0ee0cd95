#include "doctest.h"

#include <cmath>

#include "divbound/frame.hpp"
#include "divbound/identities.hpp"
#include "divbound/ptensor.hpp"
#include "divbound/scenario.hpp"

using namespace divbound;

namespace {

template <int N>
Point<N> to_point(const std::vector<double>& v) {
    Point<N> p{};
    for (int i = 0; i < N; ++i) p[i] = v[i];
    return p;
}

}  // namespace

TEST_CASE("P on the warped family at r = 0") {
    const PTensorSpec spec = warped_canonical_scenario(4, 1).spec();
    const PTensorEval<3> e = analyze<3>(spec, {0.0, 0.0, 0.0});
    // P = 2 (phi'/phi^3)(dr (x) dx1 - dx1 (x) dr), phi'(0) = -1/4
    CHECK(e.p(0, 1) == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(e.p(1, 0) == -e.p(0, 1));
    CHECK(e.p(0, 2) == 0.0);
    CHECK(e.p(1, 2) == 0.0);
    CHECK(e.nabla_p(0, 1, 0) == doctest::Approx(-1.0 / 8).epsilon(1e-13));
    CHECK(std::abs(e.nabla_p(1, 1, 0)) < 1e-15);
    CHECK(e.nabla_p(2, 1, 2) == doctest::Approx(-1.0 / 8).epsilon(1e-13));
    CHECK(e.div_p(1) == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(std::abs(e.div_p(0)) < 1e-15);
    CHECK(std::abs(e.div_p(2)) < 1e-15);
    CHECK(std::abs(e.norm_nabla_p_sq - 1.0 / 16) < 1e-12);
    CHECK(std::abs(e.norm_div_p_sq - 1.0 / 16) < 1e-12);
    CHECK(std::abs(e.violation + 1.0 / 16) < 1e-12);
    CHECK(std::abs(e.sharp_margin) < 1e-12);
    CHECK(e.weak_margin > 0.0);
    CHECK(e.omega_nabla_sq() == doctest::Approx(e.norm_nabla_p_sq / 2));
    CHECK(e.codifferential()(1) == doctest::Approx(-0.25));
}

TEST_CASE("lambda = 1/2 gives the values of the coordinate computation with P = lambda psi'^3 phi'/phi^3") {
    Scenario s = warped_canonical_scenario(4, 1);
    s.lambda = "1/2";
    const PTensorEval<3> e = analyze<3>(s.spec(), {0.0, 0.0, 0.0});
    CHECK(std::abs(e.norm_nabla_p_sq - 1.0 / 64) < 1e-12);
    CHECK(std::abs(e.norm_div_p_sq - 1.0 / 64) < 1e-12);
    CHECK(std::abs(e.violation + 1.0 / 64) < 1e-12);
    const FrameEval<3> fr = build_frame<3>(s.spec(), {0.0, 0.0, 0.0});
    CHECK(std::abs(to_coordinate_covector(fr, div_true_vs_false(fr).discrepancy)(1) - 0.0625) < 1e-12);
}

TEST_CASE("P vanishes when d|grad f|^2 is parallel to df") {
    for (const Scenario& s : {euclidean_scenario(), round_sphere_static_scenario()}) {
        const PTensorSpec spec = s.spec();
        for (const auto& pv : s.points()) {
            const PTensorEval<3> e = analyze<3>(spec, to_point<3>(pv));
            CHECK(max_abs(e.p) <= 1e-12);
            CHECK(max_abs(e.nabla_p) <= 1e-12);
            CHECK(max_abs(e.div_p) <= 1e-12);
            CHECK(std::abs(e.violation) <= 1e-12);
            CHECK(cyclic_residual<3>(spec, to_point<3>(pv)) <= 1e-12);
        }
    }
}

TEST_CASE("skewness, bounds and the cyclic identity on random scenarios") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        const Scenario s3 = random_curved_scenario(seed, 3);
        const PTensorSpec spec3 = s3.spec();
        for (const auto& pv : s3.points()) {
            const PFields<3> fields = p_fields<3>(spec3, to_point<3>(pv));
            const PTensorEval<3> e = analyze(fields);
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) CHECK(e.p(j, k) == -e.p(k, j));
            CHECK(e.norm_p_sq > 1e-8);
            CHECK(e.sharp_margin >= -1e-12);
            CHECK(e.weak_margin >= -1e-12);
            CHECK(cyclic_residual(fields) <= 1e-10);
        }
        const Scenario s4 = random_curved_scenario(seed, 4);
        const PTensorEval<4> e4 = analyze<4>(s4.spec(), to_point<4>(s4.points().front()));
        CHECK(e4.sharp_margin >= -1e-12);
        CHECK(cyclic_residual<4>(s4.spec(), to_point<4>(s4.points().front())) <= 1e-10);
    }
}

TEST_CASE("adapted frame at the warped point") {
    const PTensorSpec spec = warped_canonical_scenario(4, 1).spec();
    const FrameEval<3> fr = build_frame<3>(spec, {0.0, 0.0, 0.0});
    const Mat<3> g = to_matrix(p_fields<3>(spec, {0.0, 0.0, 0.0}).curvature.metric);
    CHECK((fr.vectors.transpose() * g * fr.vectors - Mat<3>::Identity()).cwiseAbs().maxCoeff() < 1e-10);
    // E_1 = (1/phi) d/dx1 with phi = 1; E_2 = +-d/dr
    CHECK(fr.vectors(1, 0) == doctest::Approx(1.0));
    CHECK(std::abs(fr.vectors(0, 0)) < 1e-15);
    CHECK(std::abs(std::abs(fr.vectors(0, 1)) - 1.0) < 1e-14);
    CHECK(std::abs(std::abs(fr.u.value()) - 0.5) < 1e-14);
    // u = P(E_1, E_2) and the sign of E_2 travels with u
    CHECK(fr.u.value() * fr.vectors(0, 1) == doctest::Approx(0.5));
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            const bool pair12 = (a == 0 && b == 1) || (a == 1 && b == 0);
            if (!pair12) CHECK(std::abs(fr.p_in_frame(a, b)) < 1e-14);
        }
    CHECK(fr.p_in_frame(0, 1) == doctest::Approx(fr.u.value()));
    CHECK(fr.p_in_frame(1, 0) == doctest::Approx(-fr.u.value()));

    const auto cmp = div_true_vs_false(fr);
    CHECK((cmp.true_div - fr.coordinate_div).cwiseAbs().maxCoeff() < 1e-10);
    const Vec<3> disc = to_coordinate_covector(fr, cmp.discrepancy);
    CHECK(std::abs(disc(1) - 0.125) < 1e-12);
    CHECK(std::abs(disc(0)) < 1e-12);
    CHECK(std::abs(disc(2)) < 1e-12);
    CHECK((connection_form_div(fr) - cmp.true_div).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("frame invariants on random scenarios") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Scenario s = random_curved_scenario(seed, 3);
        const PTensorSpec spec = s.spec();
        const Point<3> p = to_point<3>(s.points().back());
        const PFields<3> fields = p_fields<3>(spec, p);
        const FrameEval<3> fr = build_frame(fields);
        const Mat<3> g = to_matrix(fields.curvature.metric);
        CHECK((fr.vectors.transpose() * g * fr.vectors - Mat<3>::Identity()).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((fr.p_in_frame - fr.u.value() * (Mat<3>() << 0, 1, 0, -1, 0, 0, 0, 0, 0).finished()).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((fr.true_div - fr.coordinate_div).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((connection_form_div(fr) - fr.true_div).cwiseAbs().maxCoeff() < 1e-10);

        // discrepancy against bracket projections computed from the raw frame jets
        const double u = fr.u.value();
        const auto bracket = [&](int i, int j) {
            Vec<3> v;
            const Vec<3> ei = fr.vectors.col(i), ej = fr.vectors.col(j);
            for (int c = 0; c < 3; ++c) {
                v(c) = 0.0;
                for (int b = 0; b < 3; ++b) v(c) += ei(b) * fr.frame[j](c).gradient(b) - ej(b) * fr.frame[i](c).gradient(b);
            }
            return v;
        };
        const auto proj = [&](int a, const Vec<3>& v) { return fr.vectors.col(a).dot(g * v); };
        const Vec<3> disc = div_true_vs_false(fr).discrepancy;
        CHECK(std::abs(disc(0) - proj(2, bracket(1, 2)) * u) < 1e-10);
        CHECK(std::abs(disc(1) + proj(2, bracket(0, 2)) * u) < 1e-10);
        CHECK(std::abs(disc(2) - proj(2, bracket(0, 1)) * u) < 1e-10);
    }
    const Scenario s4 = random_curved_scenario(3, 4);
    const FrameEval<4> fr4 = build_frame<4>(s4.spec(), to_point<4>(s4.points().front()));
    CHECK((fr4.true_div - fr4.coordinate_div).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("degenerate frame") {
    const PTensorSpec spec = euclidean_scenario().spec();
    CHECK_THROWS_AS(build_frame<3>(spec, {0.2, 0.1, 0.3}), DegenerateFrameError);
}
