#include "doctest.h"

#include <cmath>
#include <numbers>
#include <cstring>
#include <random>

#include "divbound/expr.hpp"
#include "divbound/finite_difference.hpp"

using namespace divbound;

TEST_CASE("parse builds a precedence-respecting tree") {
    const Signature sig = Signature::chart(3, {"k", "c"});
    const Expr phi = parse("(r+c)^(-1/k)", sig);
    CHECK(phi.root().kind == Expr::Kind::Pow);
    CHECK(phi.root().lhs->kind == Expr::Kind::Add);
    CHECK(phi.root().rhs->kind == Expr::Kind::Div);
    CHECK(phi.root().rhs->lhs->kind == Expr::Kind::Neg);

    const Expr zero = parse("0", sig);
    CHECK(zero.root().kind == Expr::Kind::Literal);
    CHECK(zero.root().literal == 0.0);

    // '^' binds tighter than unary minus; same-precedence operators go left
    CHECK(parse("-r^2", sig).root().kind == Expr::Kind::Neg);
    CHECK(parse("r-x1-x2", sig) == parse("(r-x1)-x2", sig));
    CHECK(parse("r/x1*x2", sig) == parse("(r/x1)*x2", sig));
    CHECK(parse("r^2^3", sig) == parse("(r^2)^3", sig));
    CHECK(parse("r + x1*x2", sig) == parse("r+(x1*x2)", sig));
    CHECK(parse("  r\t* 2 ", sig) == parse("r*2", sig));
}

TEST_CASE("evaluate on doubles") {
    const Signature sig = Signature::chart(3, {"k", "c"});
    const ParamSet params{{"k", 4.0}, {"c", 1.0}};
    const std::array<double, 3> origin{0.0, 0.0, 0.0};
    CHECK(evaluate(parse("(r+c)^(-1/k)", sig), origin, params) == 1.0);
    const std::array<double, 3> p{0.3, -1.7, 2.5};
    CHECK(evaluate(parse("x1", sig), p, params) == -1.7);
    CHECK(evaluate(parse("x_2", sig), p, params) == -1.7);
    CHECK(evaluate(parse("x_3", sig), p, params) == 2.5);
    const std::array<double, 3> q{std::numbers::pi / 6, 0.0, 0.0};
    CHECK(evaluate(parse("sin(r)*sin(r)", sig), q, params) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("evaluate under jets carries exact derivatives") {
    const Signature sig = Signature::chart(3, {"k", "c"});
    const ParamSet params{{"k", 4.0}, {"c", 1.0}};
    const auto x = seed_variables<3>({0.0, 0.0, 0.0}, 2);
    const Jet<3> phi = evaluate<Jet<3>>(parse("(r+c)^(-1/k)", sig), x, params);
    CHECK(phi.value() == doctest::Approx(1.0));
    CHECK(phi.derivative({1, 0, 0}) == doctest::Approx(-0.25).epsilon(1e-15));
    CHECK(phi.derivative({2, 0, 0}) == doctest::Approx(0.3125).epsilon(1e-15));
    // cross-check against central differences at h = 1e-5
    const Expr e = parse("(r+c)^(-1/k)", sig);
    const ScalarFieldFn fn = [&](const Eigen::VectorXd& v) { return evaluate(e, std::array<double, 3>{v[0], v[1], v[2]}, params); };
    CHECK(std::abs(finite_difference(fn, Eigen::Vector3d::Zero(), {1, 0, 0}, 1e-5) + 0.25) < 1e-9);
}

TEST_CASE("parse errors") {
    const Signature sig = Signature::chart(3, {"k"});
    CHECK_THROWS_AS(parse("", sig), ParseError);
    CHECK_THROWS_AS(parse("r +", sig), ParseError);
    CHECK_THROWS_AS(parse("(r", sig), ParseError);
    CHECK_THROWS_AS(parse("sin r", sig), ParseError);
    try {
        parse("r + 2*q", sig);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 6);
        const std::string msg = e.what();
        CHECK(msg.find("'q'") != std::string::npos);
        CHECK(msg.find("x_1") != std::string::npos);
        CHECK(msg.find("k") != std::string::npos);
    }
    // x1 is an alias only in dimension 3
    CHECK_THROWS_AS(parse("x1", Signature::chart(4)), ParseError);
    CHECK_NOTHROW(parse("x_4", Signature::chart(4)));
}

TEST_CASE("domain errors name the subexpression") {
    const Signature sig = Signature::chart(3);
    const std::array<double, 3> p{-1.0, 0.0, 0.0};
    try {
        evaluate(parse("1 + log(r)", sig), p, {});
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("log(r)") != std::string::npos);
        CHECK(msg.find("byte 4") != std::string::npos);
    }
    CHECK_THROWS_AS(evaluate(parse("1/x1", sig), p, {}), DomainError);
    CHECK_THROWS_AS(evaluate(parse("sqrt(r)", sig), p, {}), DomainError);
    CHECK_THROWS_AS(evaluate(parse("r^0.5", sig), p, {}), DomainError);
    CHECK(evaluate(parse("r^3", sig), p, {}) == -1.0);
    CHECK_THROWS_AS(evaluate(parse("r^k", Signature::chart(3, {"k"})), p, {}), DomainError);  // unbound parameter
}

namespace {

// Random expression source over r, x1, x2 whose value stays inside the safe domain on [-1, 1]^3.
std::string random_source(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, 9);
    std::uniform_real_distribution<double> coef(0.2, 1.5);
    const char* vars[] = {"r", "x1", "x2"};
    if (depth == 0) {
        const int v = pick(rng);
        if (v < 3) return std::to_string(coef(rng));
        return vars[v % 3];
    }
    const std::string a = random_source(rng, depth - 1), b = random_source(rng, depth - 1);
    switch (pick(rng)) {
        case 0: return "(" + a + " + " + b + ")";
        case 1: return "(" + a + " - " + b + ")";
        case 2: return "(" + a + ") * (" + b + ")";
        case 3: return "(" + a + ") / (2.5 + sin(" + b + "))";
        case 4: return "sin(" + a + ")";
        case 5: return "cos(" + a + ")";
        case 6: return "exp(0.3*(" + a + "))";
        case 7: return "log(3 + sin(" + a + "))";
        case 8: return "sqrt(2 + cos(" + a + "))";
        default: return "(2 + cos(" + a + "))^(" + std::to_string(coef(rng)) + ")";
    }
}

}  // namespace

TEST_CASE("print-parse round trip and jet/finite-difference agreement on random expressions") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    const Signature sig = Signature::chart(3);
    int checked = 0;
    for (int trial = 0; trial < 25; ++trial) {
        const Expr e = parse(random_source(rng, 3), sig);
        const Expr again = parse(e.str(), sig);
        CHECK(again == e);
        CHECK(again.str() == e.str());

        const std::array<double, 3> p{u(rng), u(rng), u(rng)};
        const auto x = seed_variables<3>(p, 1);
        const Jet<3> j = evaluate<Jet<3>>(e, x, {});
        CHECK(j.value() == evaluate(e, p, {}));  // same arithmetic route for the value
        const ScalarFieldFn fn = [&](const Eigen::VectorXd& v) { return evaluate(e, std::array<double, 3>{v[0], v[1], v[2]}, {}); };
        Eigen::Vector3d pv(p[0], p[1], p[2]);
        for (int v = 0; v < 3; ++v) {
            std::vector<int> a{0, 0, 0};
            a[v] = 1;
            const double fd = finite_difference(fn, pv, a, 1e-4);
            const double exact = j.gradient(v);
            CHECK(std::abs(fd - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
        }
        ++checked;
    }
    CHECK(checked >= 20);
}

TEST_CASE("evaluation is pure") {
    const Signature sig = Signature::chart(3, {"k"});
    const Expr e = parse("exp(sin(r*x1))/(k + x2^2)", sig);
    const ParamSet params{{"k", 2.0}};
    const std::array<double, 3> p{0.1, 0.2, 0.3};
    const double a = evaluate(e, p, params), b = evaluate(e, p, params);
    CHECK(std::memcmp(&a, &b, sizeof a) == 0);
}
