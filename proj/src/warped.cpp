#include "divbound/warped.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace divbound {

namespace {

std::vector<std::string> names_of(const ParamSet& params) {
    std::vector<std::string> out;
    for (const auto& [name, value] : params) out.push_back(name);
    return out;
}

double param_or_nan(const ParamSet& params, const char* name) {
    const auto it = params.find(name);
    return it == params.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
}

Jet<1> eval1(const Expr& e, const Jet<1>& x, const ParamSet& params) {
    const std::array<Jet<1>, 1> arg{x};
    return evaluate<Jet<1>>(e, arg, params);
}

Expr squared(const Expr& e) {
    auto two = std::make_shared<Expr::Node>();
    two->kind = Expr::Kind::Literal;
    two->literal = 2.0;
    auto node = std::make_shared<Expr::Node>();
    node->kind = Expr::Kind::Pow;
    node->lhs = std::make_shared<Expr::Node>(e.root());
    node->rhs = two;
    return Expr(node, e.dimension());
}

double relative_gap(double engine, double closed, double scale) {
    const double d = std::abs(engine - closed);
    return scale > 0.0 ? d / scale : d;
}

}  // namespace

WarpedSpec WarpedSpec::canonical(double k, double c, std::string_view lambda, std::string_view psi) {
    return from_source("(r+c)^(-1/k)", psi, lambda, ParamSet{{"k", k}, {"c", c}});
}

WarpedSpec WarpedSpec::from_source(std::string_view phi, std::string_view psi, std::string_view lambda, ParamSet params) {
    const auto names = names_of(params);
    WarpedSpec s;
    s.phi = parse(phi, Signature::univariate("r", names));
    s.psi = parse(psi, Signature::univariate("x1", names));
    s.lambda = parse(lambda, Signature::univariate("f", names));
    s.params = std::move(params);
    return s;
}

ViolationRow closed_form_eval(const WarpedSpec& spec, double r, double x1) {
    const Jet<1> phi_j = eval1(spec.phi, Jet<1>::variable(r, 0, 2), spec.params);
    const double phi = phi_j.value(), pd = phi_j.derivative({1}), pdd = phi_j.derivative({2});
    if (!(phi > 0.0)) throw DomainError("warping function must be positive, got phi(" + std::to_string(r) + ") = " + std::to_string(phi));

    const Jet<1> psi_j = eval1(spec.psi, Jet<1>::variable(x1, 0, 2), spec.params);
    const Jet<1> psi_d = psi_j.partial(0);
    const Jet<1> lam = eval1(spec.lambda, psi_j, spec.params).truncated(1);
    const Jet<1> big_phi = 2.0 * lam * psi_d * psi_d * psi_d;
    const double F = big_phi.value(), Fd = big_phi.derivative({1});

    ViolationRow row;
    row.r = r;
    row.x1 = x1;
    row.k = param_or_nan(spec.params, "k");
    row.c = param_or_nan(spec.params, "c");
    row.phi = phi;
    row.phi_d = pd;
    row.phi_dd = pdd;

    const double phi2 = phi * phi, phi3 = phi2 * phi, phi4 = phi2 * phi2;
    row.p_r1 = F * pd / phi3;
    const double a = -(pdd / phi3 - 4.0 * pd * pd / phi4) * F;
    const double b = -(pd / phi3) * Fd;
    const double d = -(pd * pd / phi2) * F;
    row.nabla_r_p_1r = a;
    row.nabla_1_p_1r = b;
    row.nabla_2_p_12 = d;
    row.div_r = -(pd / (phi4 * phi)) * Fd;
    row.div_1 = F * (pdd / phi3 - 3.0 * pd * pd / phi4);
    row.false_div_1 = F * (pdd / phi3 - 4.0 * pd * pd / phi4);
    row.discrepancy_1 = row.div_1 - row.false_div_1;

    // g^rr = 1, g^11 = g^22 = phi^-2
    row.norm_p_sq = 2.0 * row.p_r1 * row.p_r1 / phi2;
    row.norm_nabla_p_sq = 2.0 * a * a / phi2 + 2.0 * b * b / phi4 + 2.0 * d * d / (phi4 * phi2);
    row.norm_div_p_sq = row.div_r * row.div_r + row.div_1 * row.div_1 / phi2;
    row.violation = row.norm_nabla_p_sq - 2.0 * row.norm_div_p_sq;
    row.compact_violation = 4.0 * F * F * pd * pd / (phi4 * phi4) * (4.0 * pd * pd / phi2 - pdd / phi);
    row.sharp_margin = row.norm_nabla_p_sq - row.norm_div_p_sq;
    return row;
}

PTensorSpec engine_spec(const WarpedSpec& spec) {
    const Expr phi = rebind(spec.phi, 3, 0);
    const Expr one = parse("1", Signature::chart(3));
    const Expr phi_sq = squared(phi);
    return PTensorSpec{spec.lambda, rebind(spec.psi, 3, 1), MetricField::diagonal({one, phi_sq, phi_sq}, spec.params)};
}

CrossValidation cross_validate(const WarpedSpec& spec, const std::vector<Point<3>>& grid) {
    const PTensorSpec engine = engine_spec(spec);
    CrossValidation cv;
    for (const Point<3>& p : grid) {
        const ViolationRow row = closed_form_eval(spec, p[0], p[1]);
        const PTensorEval<3> e = analyze<3>(engine, p);
        const double scale = std::max(std::abs(row.norm_nabla_p_sq), 2.0 * std::abs(row.norm_div_p_sq));
        const double gaps[] = {
            relative_gap(e.norm_p_sq, row.norm_p_sq, scale),
            relative_gap(e.norm_nabla_p_sq, row.norm_nabla_p_sq, scale),
            relative_gap(e.norm_div_p_sq, row.norm_div_p_sq, scale),
            relative_gap(e.violation, row.violation, scale),
            relative_gap(e.sharp_margin, row.sharp_margin, scale),
            relative_gap(e.div_p(0), row.div_r, std::sqrt(scale)),
            relative_gap(e.div_p(1) / row.phi, row.div_1 / row.phi, std::sqrt(scale)),
            relative_gap(e.div_p(2) / row.phi, 0.0, std::sqrt(scale)),
            relative_gap(e.p(0, 1) / row.phi, row.p_r1 / row.phi, std::sqrt(scale)),
        };
        const double worst = *std::max_element(std::begin(gaps), std::end(gaps));
        cv.closed_form.push_back(row);
        cv.engine.push_back(e);
        cv.discrepancy.push_back(worst);
        cv.max_discrepancy = std::max(cv.max_discrepancy, worst);
    }
    return cv;
}

ViolationReport violation_report(const WarpedSpec& spec, const std::vector<Point<3>>& grid, std::string scenario) {
    const CrossValidation cv = cross_validate(spec, grid);
    ViolationReport rep;
    rep.scenario = std::move(scenario);
    rep.rows = cv.closed_form;
    rep.max_discrepancy = cv.max_discrepancy;
    if (rep.rows.empty()) return rep;
    rep.min_violation = rep.max_violation = rep.rows.front().violation;
    bool neg = false, pos = false, zero = false;
    for (const auto& row : rep.rows) {
        rep.min_violation = std::min(rep.min_violation, row.violation);
        rep.max_violation = std::max(rep.max_violation, row.violation);
        if (row.violation < -kViolationZeroTolerance)
            neg = true;
        else if (row.violation > kViolationZeroTolerance)
            pos = true;
        else
            zero = true;
    }
    const int kinds = int(neg) + int(pos) + int(zero);
    rep.sign_summary = kinds > 1 ? "mixed" : neg ? "negative" : pos ? "positive" : "zero";
    return rep;
}

}  // namespace divbound
