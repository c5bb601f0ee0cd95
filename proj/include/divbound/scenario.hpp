#pragma once

/**
 * @file scenario.hpp
 * @brief Named chart scenarios: metric, f, lambda, parameters and a sample grid.
 *
 * Scenario files are line based. Blank lines and text after '#' are ignored.
 *
 *     name = warped-k5
 *     dimension = 3
 *     f = sin(x1)
 *     lambda = f^2
 *     param.k = 5
 *     param.c = 2
 *     static = false
 *     warped.phi = (r+c)^(-1/k)     # optional, enables the closed-form check
 *     warped.psi = sin(x1)
 *     [metric]
 *     g11 = 1
 *     g22 = ((r+c)^(-1/k))^2
 *     g33 = ((r+c)^(-1/k))^2
 *     [grid]
 *     r = 0:1:3                     # min:max:count
 *     x1 = -1:1:3
 *
 * Metric entries are g<i><j> with 1-based indices (g_<i>_<j> also works), and
 * giving g12 or g21 sets both. Omitted off-diagonal entries are 0, omitted
 * diagonal entries are an error. Omitted grid axes are the single value 0.
 * Expression values may be wrapped in double quotes.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "divbound/expr.hpp"
#include "divbound/geometry.hpp"
#include "divbound/ptensor.hpp"
#include "divbound/warped.hpp"

namespace divbound {

struct GridAxis {
    double min = 0.0;
    double max = 0.0;
    int count = 1;

    /// count evenly spaced values; a single value sits at min.
    std::vector<double> values() const;
};

struct Scenario {
    std::string name;
    int dimension = 3;
    std::vector<std::string> metric;  // upper triangle, row by row
    std::string f;
    std::string lambda = "1";
    ParamSet params;
    std::vector<GridAxis> grid;  // one per chart variable
    bool is_static = false;
    std::string warped_phi;  // set together with warped_psi for warped products
    std::string warped_psi;

    Signature signature() const;
    MetricField metric_field() const;
    Expr f_expr() const;
    PTensorSpec spec() const;
    std::optional<WarpedSpec> warped() const;
    /// Row-major over the axes, first axis slowest.
    std::vector<std::vector<double>> points() const;
    /// Parses every expression; throws on the first problem.
    void validate() const;
};

Scenario euclidean_scenario();
Scenario round_sphere_static_scenario();
Scenario warped_canonical_scenario(double k = 4.0, double c = 1.0);
/// g = delta + eps (A + B x + x^T C x) with symmetric random coefficients and
/// eps set from a Gershgorin bound so that g >= 0.5 on the box [-1, 1]^n;
/// f is a random cubic plus a sine term and lambda = 1 + a f + b f^2.
Scenario random_curved_scenario(std::uint64_t seed, int dimension = 3);

std::vector<std::string> builtin_scenario_names();

/// Built-in name, "random-curved:<seed>", or a path to a scenario file.
/// `seed` and `dimension` apply to random-curved when the name carries no seed.
Scenario resolve_scenario(std::string_view name, std::uint64_t seed = 1, int dimension = 3);

Scenario parse_scenario(std::string_view text);
Scenario load_scenario_file(const std::string& path);

/// "k=4" style override; adds the parameter when it is new.
void set_param(Scenario& s, std::string_view assignment);
/// "axis:min:max:count" with axis a chart variable name.
void set_grid(Scenario& s, std::string_view spec);

/// Shortest text that reads back to the same double.
std::string format_double(double v);

}  // namespace divbound
