#include "doctest.h"

#include <cmath>

#include "divbound/identities.hpp"
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

TEST_CASE("make_residual normalisation") {
    const IdentityResidual small = make_residual<1>("x", {0.0}, 1e-3, 0.0, {1e-3});
    CHECK(small.relative == small.absolute);  // scale floored at 1
    const IdentityResidual big = make_residual<1>("x", {0.0}, 100.0, 99.0, {50.0, 200.0});
    CHECK(big.scale == 200.0);
    CHECK(big.relative == doctest::Approx(1.0 / 200.0));
}

TEST_CASE("Bochner identity on the warped grid") {
    const Scenario s = warped_canonical_scenario(4, 1);
    const PTensorSpec spec = s.spec();
    for (const auto& pv : s.points()) {
        const PFields<3> fields = p_fields<3>(spec, to_point<3>(pv));
        const IdentityResidual general = bochner_residual(fields);
        const IdentityResidual three = bochner3_residual(fields);
        CHECK(general.relative <= 1e-8);
        CHECK(three.relative <= 1e-8);
        CHECK(std::abs(general.rhs - three.rhs) <= 1e-12 * std::max(1.0, general.scale));
        CHECK(general.lhs != 0.0);
    }
}

TEST_CASE("Bochner identity on random scenarios in dimensions 3 and 4") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Scenario s3 = random_curved_scenario(seed, 3);
        for (const auto& pv : s3.points()) {
            const PFields<3> fields = p_fields<3>(s3.spec(), to_point<3>(pv));
            CHECK(bochner_residual(fields).relative <= 1e-8);
            const BochnerTerms<3> t = bochner_terms(fields);
            CHECK(std::abs(bochner_rhs(t) - bochner3_rhs(t)) <= 1e-12 * std::max(1.0, std::abs(bochner_rhs(t))));
        }
        const Scenario s4 = random_curved_scenario(seed, 4);
        const PFields<4> f4 = p_fields<4>(s4.spec(), to_point<4>(s4.points().front()));
        const IdentityResidual r4 = bochner_residual(f4);
        CHECK(r4.relative <= 1e-8);
        const BochnerTerms<4> t4 = bochner_terms(f4);
        CHECK(std::abs(t4.weyl_pp) > 1e-10);  // the Weyl term is exercised
    }
}

TEST_CASE("flat metric with P = 0") {
    const Scenario s = euclidean_scenario();
    const IdentityResidual r = bochner_residual<3>(s.spec(), {0.1, 0.2, 0.3});
    CHECK(r.lhs == 0.0);
    CHECK(r.rhs == 0.0);
}

TEST_CASE("static system") {
    const Scenario sphere = round_sphere_static_scenario();
    for (const auto& pv : sphere.points()) {
        const ResidualPair st = static_residual<3>(sphere.metric_field(), sphere.f_expr(), to_point<3>(pv));
        CHECK(st.tensor.absolute <= 1e-10);
        CHECK(st.scalar.absolute <= 1e-10);
        const PFields<3> fields = p_fields<3>(sphere.spec(), to_point<3>(pv));
        CHECK(static_bochner_residual(fields).absolute <= 1e-8);
    }
    const Scenario flat = euclidean_scenario();
    const Expr one = parse("1", flat.signature());
    const ResidualPair fl = static_residual<3>(flat.metric_field(), one, {0.3, 0.1, -0.2});
    CHECK(fl.tensor.absolute == 0.0);
    CHECK(fl.scalar.absolute == 0.0);

    const Scenario warped = warped_canonical_scenario(4, 1);
    const ResidualPair w = static_residual<3>(warped.metric_field(), warped.f_expr(), {0.5, 0.2, 0.1});
    CHECK(w.tensor.absolute > 1e-6);
}

TEST_CASE("static Bochner refuses points where f vanishes") {
    const Scenario sphere = round_sphere_static_scenario();
    const PFields<3> fields = p_fields<3>(sphere.spec(), {std::acos(0.0), 1.0, 1.0});
    CHECK_THROWS_AS(static_bochner_residual(fields), DomainError);
}

TEST_CASE("critical point equation diagnostics") {
    const Scenario flat = euclidean_scenario();
    const Expr zero = parse("0", flat.signature());
    const ResidualPair fl = cpe_residual<3>(flat.metric_field(), zero, {0.3, 0.1, -0.2});
    CHECK(fl.tensor.absolute == 0.0);
    CHECK(fl.scalar.absolute == 0.0);

    // round sphere with f = 0: the tensor equation is off by |R/(n(n-1)) g| = sqrt(3)
    const Scenario sphere = round_sphere_static_scenario();
    const ResidualPair sp = cpe_residual<3>(sphere.metric_field(), parse("0", sphere.signature()), {1.0, 1.0, 0.5});
    CHECK(sp.tensor.absolute == doctest::Approx(std::sqrt(3.0)).epsilon(1e-10));
    CHECK(sp.scalar.absolute <= 1e-12);

    const Scenario r4 = random_curved_scenario(5, 4);
    const ResidualPair rr = cpe_residual<4>(r4.metric_field(), r4.f_expr(), to_point<4>(r4.points().front()));
    CHECK(std::isfinite(rr.tensor.absolute));
}
