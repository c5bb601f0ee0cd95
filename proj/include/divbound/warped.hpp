#pragma once

/**
 * @file warped.hpp
 * @brief Closed-form P analysis on g = dr^2 + phi(r)^2 (dx1^2 + dx2^2) with f = psi(x1).
 *
 * Only univariate derivatives of phi, psi and lambda enter here; no tensor
 * machinery. Since d|grad f|^2 = 2 nabla^2 f(grad f, .), the definition of P
 * gives P_r1 = 2 lambda psi'^3 phi'/phi^3. With Phi = 2 lambda(psi) psi'^3:
 *
 *   P            = Phi phi'/phi^3 (dr (x) dx1 - dx1 (x) dr)
 *   nabla_r P_1r = -(phi''/phi^3 - 4 phi'^2/phi^4) Phi
 *   nabla_1 P_1r = -(phi'/phi^3) Phi'
 *   nabla_2 P_12 = -(phi'^2/phi^2) Phi
 *   div P        = -(phi'/phi^5) Phi' dr + (phi''/phi^3 - 3 phi'^2/phi^4) Phi dx1
 *
 * and |nabla P|^2 - 2|div P|^2 = 4 Phi^2 phi'^2/phi^8 (4 phi'^2/phi^2 - phi''/phi) when Phi' = 0.
 * Writing the same formulas with Phi = lambda psi'^3 amounts to evaluating
 * them for lambda/2. The formula that drops the frame brackets predicts
 * -4 phi'^2/phi^4 in place of -3 phi'^2/phi^4 in the dx1 coefficient.
 */

#include <string>
#include <string_view>
#include <vector>

#include "divbound/expr.hpp"
#include "divbound/ptensor.hpp"

namespace divbound {

struct WarpedSpec {
    Expr phi;     // variable r
    Expr psi;     // variable x1
    Expr lambda;  // variable f
    ParamSet params;

    /// phi = (r+c)^(-1/k).
    static WarpedSpec canonical(double k, double c, std::string_view lambda = "1", std::string_view psi = "x1");
    static WarpedSpec from_source(std::string_view phi, std::string_view psi, std::string_view lambda, ParamSet params);
};

/// One evaluated point; the P components are the coordinate components listed above.
struct ViolationRow {
    double r = 0.0;
    double x1 = 0.0;
    double k = 0.0;  // NaN when phi has no such parameter
    double c = 0.0;
    double phi = 0.0, phi_d = 0.0, phi_dd = 0.0;
    double p_r1 = 0.0;
    double nabla_r_p_1r = 0.0;
    double nabla_1_p_1r = 0.0;
    double nabla_2_p_12 = 0.0;
    double div_r = 0.0;
    double div_1 = 0.0;
    double false_div_1 = 0.0;
    double discrepancy_1 = 0.0;  // div_1 - false_div_1
    double norm_p_sq = 0.0;
    double norm_nabla_p_sq = 0.0;
    double norm_div_p_sq = 0.0;
    double violation = 0.0;
    double compact_violation = 0.0;  // the one-line formula, exact only where Phi' = 0
    double sharp_margin = 0.0;       // n = 3, so the constant is 1
};

ViolationRow closed_form_eval(const WarpedSpec& spec, double r, double x1);

/// The same geometry as a generic chart scenario for the tensor engine.
PTensorSpec engine_spec(const WarpedSpec& spec);

struct CrossValidation {
    std::vector<ViolationRow> closed_form;
    std::vector<PTensorEval<3>> engine;
    std::vector<double> discrepancy;  // per point
    double max_discrepancy = 0.0;
};

/// Compares |P|^2, |nabla P|^2, |div P|^2, the violation and the margin, each
/// divided by s = max(|nabla P|^2, 2|div P|^2) of the closed-form row, and the
/// orthonormal components of P and div P divided by sqrt(s). Differences stay
/// absolute when s = 0.
CrossValidation cross_validate(const WarpedSpec& spec, const std::vector<Point<3>>& grid);

struct ViolationReport {
    std::string scenario;
    std::vector<ViolationRow> rows;
    double min_violation = 0.0;
    double max_violation = 0.0;
    std::string sign_summary;  // negative, positive, zero or mixed
    double max_discrepancy = 0.0;
};

inline constexpr double kViolationZeroTolerance = 1e-12;

ViolationReport violation_report(const WarpedSpec& spec, const std::vector<Point<3>>& grid, std::string scenario);

}  // namespace divbound
