// divbound: verify identities, reproduce the warped counterexample, search
// the canonical family, and print frame diagnostics.
//
// Exit status: 0 when every verdict passes (or a violation was exhibited for
// counterexample/search), 1 on a failed verdict, no violation, or a degenerate
// frame, 2 on usage, parse, scenario or domain errors.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "divbound/errors.hpp"
#include "divbound/frame.hpp"
#include "divbound/report.hpp"
#include "divbound/scenario.hpp"

using namespace divbound;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Common {
    std::string out;
    std::string format;
    double tolerance = 1e-12;
};

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ScenarioError("cannot write '" + path + "'");
    f << text;
    if (!f) throw ScenarioError("write to '" + path + "' failed");
}

void print_verdicts(const Report& rep) {
    for (const auto& v : rep.verdicts) std::cerr << (v.pass ? "PASS " : "FAIL ") << v.name << ": " << v.detail << "\n";
}

std::string render(const Report& rep, const std::string& format) {
    if (format == "json") return to_json(rep);
    if (format == "csv") return to_csv(rep);
    throw ScenarioError("unknown format '" + format + "' (csv or json)");
}

std::vector<double> parse_point(const std::string& text, int dimension) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(cell, &used));
            if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw ScenarioError("bad coordinate '" + cell + "' in --point");
        }
    }
    if (static_cast<int>(out.size()) != dimension)
        throw ScenarioError("--point needs " + std::to_string(dimension) + " comma-separated coordinates");
    return out;
}

Interval parse_interval(const std::string& text, const std::string& name) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ScenarioError("bound for " + name + " must be lo:hi");
    try {
        return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
    } catch (const std::exception&) {
        throw ScenarioError("bad bound '" + text + "' for " + name);
    }
}

template <int N>
std::string frame_text(const FrameEval<N>& fr, const PTensorEval<N>& e) {
    std::ostringstream o;
    o.precision(17);
    auto vec = [&](const Vec<N>& v) {
        o << "(";
        for (int i = 0; i < N; ++i) o << (i ? ", " : "") << v(i);
        o << ")";
    };
    o << "point: (";
    for (int i = 0; i < N; ++i) o << (i ? ", " : "") << fr.point[i];
    o << ")\n";
    for (int a = 0; a < N; ++a) {
        o << "E_" << a + 1 << " = ";
        vec(fr.vectors.col(a));
        if (fr.completion_pivots[a] >= 0) o << "  (Gram-Schmidt from coordinate " << fr.completion_pivots[a] + 1 << ")";
        o << "\n";
    }
    o << "u = P(E_1, E_2) = " << fr.u.value() << "\n";
    o << "E_a(u) = ";
    vec(fr.frame_derivatives_u);
    o << "\n";
    const auto cmp = div_true_vs_false(fr);
    o << "div P, bracket form (frame) = ";
    vec(cmp.true_div);
    o << "\ndiv P, coordinates on E_a   = ";
    vec(fr.coordinate_div);
    o << "\ndiv P, brackets dropped     = ";
    vec(cmp.false_div);
    o << "\ndiscrepancy (frame)         = ";
    vec(cmp.discrepancy);
    o << "\ndiscrepancy (coordinates)   = ";
    vec(to_coordinate_covector(fr, cmp.discrepancy));
    o << "\nbracket terms:\n";
    for (int i = 2; i < N; ++i) {
        o << "  <E_" << i + 1 << " | [E_2, E_" << i + 1 << "]> u = " << fr.inner(i, bracket_vector(fr, 1, i)) * fr.u.value() << "\n";
        o << "  <E_" << i + 1 << " | [E_1, E_" << i + 1 << "]> u = " << fr.inner(i, bracket_vector(fr, 0, i)) * fr.u.value() << "\n";
        o << "  <E_" << i + 1 << " | [E_1, E_2]> u = " << fr.inner(i, bracket_vector(fr, 0, 1)) * fr.u.value() << "\n";
    }
    o << "|nabla P|^2 = " << e.norm_nabla_p_sq << "\n|div P|^2 = " << e.norm_div_p_sq << "\nviolation = " << e.violation
      << "\nsharp_margin = " << e.sharp_margin << "\n";
    return o.str();
}

template <int N>
int run_frame_n(const Scenario& s, const std::vector<double>& pv, const std::string& out) {
    Point<N> p{};
    for (int i = 0; i < N; ++i) p[i] = pv[i];
    const PFields<N> fields = p_fields<N>(s.spec(), p);
    const PTensorEval<N> e = analyze(fields);
    const FrameEval<N> fr = build_frame(fields);
    emit(frame_text(fr, e), out);
    const double agree = (fr.true_div - fr.coordinate_div).cwiseAbs().maxCoeff();
    if (agree > 1e-10) {
        std::cerr << "FAIL bracket-form div P disagrees with coordinate div P by " << agree << "\n";
        return kExitFail;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact-derivative checks of divergence bounds for skew 2-tensors"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    Common common;
    std::string scenario_name = "warped-canonical";
    std::vector<std::string> params, grids;
    std::uint64_t seed = 1;
    int dimension = 3;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", common.out, "Output path (default: stdout)");
        sub->add_option("--format", common.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--tolerance", common.tolerance, "Sign floor: margins must be >= -T, violations count below -T")
            ->check(CLI::NonNegativeNumber);
    };

    auto* verify = app.add_subcommand("verify", "Check identities and bounds over a scenario grid");
    verify->add_option("--scenario", scenario_name, "Built-in name, random-curved:<seed>[:<dim>], or scenario file");
    verify->add_option("--param", params, "Parameter override name=value (repeatable)");
    verify->add_option("--grid", grids, "Grid axis axis:min:max:count (repeatable)");
    verify->add_option("--seed", seed, "Seed for random-curved");
    verify->add_option("--dimension", dimension, "Dimension for random-curved")->check(CLI::Range(3, 4));
    add_common(verify);

    CounterexampleOptions cx;
    std::vector<std::string> cx_grids;
    auto* counter = app.add_subcommand("counterexample", "Closed-form and engine values on the warped family");
    counter->add_option("--param", params, "k=..., c=..., or extra parameters used by --phi/--psi/--lambda");
    counter->add_option("--lambda", cx.lambda, "lambda as an expression in f");
    counter->add_option("--psi", cx.psi, "psi as an expression in x1");
    counter->add_option("--phi", cx.phi, "phi as an expression in r");
    counter->add_option("--grid", cx_grids, "r:min:max:count and/or x1:min:max:count");
    add_common(counter);

    std::vector<std::string> bounds_text;
    int iterations = 1000;
    std::uint64_t search_seed = 42;
    auto* search = app.add_subcommand("search", "Minimise the violation over (k, c, r)");
    search->add_option("--bounds", bounds_text, "name:lo:hi for k, c or r (repeatable; defaults k:1:6 c:0.5:2 r:0:1)");
    search->add_option("--seed", search_seed, "Random seed");
    search->add_option("--iterations", iterations, "Objective evaluations")->check(CLI::PositiveNumber);
    add_common(search);

    std::string point_text;
    auto* frame = app.add_subcommand("frame", "Adapted frame and both divergence formulas at a point");
    frame->add_option("--scenario", scenario_name, "Built-in name, random-curved:<seed>[:<dim>], or scenario file");
    frame->add_option("--param", params, "Parameter override name=value (repeatable)");
    frame->add_option("--point", point_text, "Comma-separated coordinates")->required();
    frame->add_option("--seed", seed, "Seed for random-curved");
    frame->add_option("--dimension", dimension, "Dimension for random-curved")->check(CLI::Range(3, 4));
    frame->add_option("--out", common.out, "Output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        Tolerances tol;
        tol.sign_floor = common.tolerance;
        if (*verify) {
            if (common.format.empty()) common.format = "json";
            Scenario s = resolve_scenario(scenario_name, seed, dimension);
            for (const auto& p : params) set_param(s, p);
            for (const auto& g : grids) set_grid(s, g);
            const Report rep = run_verify(s, tol);
            emit(render(rep, common.format), common.out);
            print_verdicts(rep);
            return rep.all_pass() ? 0 : kExitFail;
        }
        if (*counter) {
            if (common.format.empty()) common.format = "csv";
            Scenario holder;  // reuses the name=value and axis parsers
            holder.params = {{"k", cx.k}, {"c", cx.c}};
            for (const auto& p : params) set_param(holder, p);
            cx.k = holder.params.at("k");
            cx.c = holder.params.at("c");
            holder.params.erase("k");
            holder.params.erase("c");
            cx.extra_params = holder.params;
            holder.grid = {cx.r, cx.x1, GridAxis{}};
            for (const auto& g : cx_grids) {
                if (!g.starts_with("r:") && !g.starts_with("x1:")) throw ScenarioError("counterexample grids are r:... or x1:...");
                set_grid(holder, g);
            }
            cx.r = holder.grid[0];
            cx.x1 = holder.grid[1];
            const Report rep = run_counterexample(cx, tol);
            emit(render(rep, common.format), common.out);
            print_verdicts(rep);
            const Verdict* cross = rep.verdict("warped_cross_validation");
            const Verdict* shown = rep.verdict("violation_exhibited");
            if (cross && !cross->pass) return kExitFail;
            return shown && shown->pass ? 0 : kExitFail;
        }
        if (*search) {
            if (common.format.empty()) common.format = "csv";
            SearchBounds b;
            for (const auto& t : bounds_text) {
                const auto colon = t.find(':');
                const std::string name = t.substr(0, colon);
                Interval* slot = name == "k" ? &b.k : name == "c" ? &b.c : name == "r" ? &b.r : nullptr;
                if (!slot || colon == std::string::npos) throw ScenarioError("--bounds expects k:lo:hi, c:lo:hi or r:lo:hi");
                *slot = parse_interval(t.substr(colon + 1), name);
            }
            const Report rep = run_search(b, search_seed, iterations, tol);
            emit(render(rep, common.format), common.out);
            print_verdicts(rep);
            return rep.all_pass() ? 0 : kExitFail;
        }
        if (*frame) {
            Scenario s = resolve_scenario(scenario_name, seed, dimension);
            for (const auto& p : params) set_param(s, p);
            s.validate();
            const auto pv = parse_point(point_text, s.dimension);
            return s.dimension == 3 ? run_frame_n<3>(s, pv, common.out) : run_frame_n<4>(s, pv, common.out);
        }
    } catch (const DegenerateFrameError& e) {
        std::cerr << "degenerate frame: " << e.what() << "\n";
        return kExitFail;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const GeometryError& e) {
        std::cerr << "geometry error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
