#include "divbound/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "divbound/errors.hpp"
#include "divbound/identities.hpp"

namespace divbound {

namespace {

using nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* kOmegaNote =
    "omega = lambda(f) df ^ d|grad f|^2 has |nabla omega|^2 = |nabla P|^2 / 2 and delta omega = -div P, "
    "so |nabla omega|^2 >= |delta omega|^2 reads |nabla P|^2 >= 2 |div P|^2 and violation = |nabla P|^2 - 2 |div P|^2";

template <int N>
Point<N> to_point(const std::vector<double>& v) {
    Point<N> p{};
    for (int i = 0; i < N; ++i) p[i] = v[i];
    return p;
}

template <int N>
PointRow verify_point(const Scenario& s, const PTensorSpec& spec, const std::optional<WarpedSpec>& warped, const std::vector<double>& pv,
                      const Tolerances& tol) {
    const Point<N> p = to_point<N>(pv);
    const PFields<N> fields = p_fields<N>(spec, p);
    const PTensorEval<N> e = analyze(fields);
    PointRow row;
    row.point = pv;
    row.norm_p_sq = e.norm_p_sq;
    row.norm_nabla_p_sq = e.norm_nabla_p_sq;
    row.norm_div_p_sq = e.norm_div_p_sq;
    row.violation = e.violation;
    row.sharp_margin = e.sharp_margin;
    row.weak_margin = e.weak_margin;
    row.cyclic = cyclic_residual(fields);
    const BochnerTerms<N> terms = bochner_terms(fields);
    const IdentityResidual b = bochner_residual(fields);
    row.bochner_abs = b.absolute;
    row.bochner_rel = b.relative;
    row.bochner_forms_gap = kNaN;
    row.static_tensor = row.static_scalar = row.static_bochner = kNaN;
    row.cross_validation = kNaN;
    if constexpr (N == 3) {
        row.bochner_forms_gap = std::abs(bochner_rhs(terms) - bochner3_rhs(terms)) / std::max(1.0, b.scale);
        if (s.is_static) {
            const ResidualPair st = static_residual<3>(spec.metric, spec.f, p);
            row.static_tensor = st.tensor.absolute;
            row.static_scalar = st.scalar.absolute;
            if (std::abs(fields.f.value()) >= kStaticPotentialFloor && st.tensor.absolute <= tol.static_abs &&
                st.scalar.absolute <= tol.static_abs)
                row.static_bochner = static_bochner_residual(fields).relative;
        }
        if (warped) {
            const CrossValidation cv = cross_validate(*warped, {p});
            row.cross_validation = cv.max_discrepancy;
        }
    }
    return row;
}

template <int N>
std::vector<PointRow> verify_rows(const Scenario& s, const Tolerances& tol) {
    const PTensorSpec spec = s.spec();
    const std::optional<WarpedSpec> warped = s.warped();
    const auto pts = s.points();
    std::vector<PointRow> rows(pts.size());
    parallel_for(static_cast<int>(pts.size()), [&](int i) { rows[i] = verify_point<N>(s, spec, warped, pts[i], tol); });
    return rows;
}

void track(ResidualSummary& sum, double abs_value, double rel_value, const std::vector<double>& point) {
    if (std::isnan(abs_value)) return;
    ++sum.samples;
    if (sum.samples == 1 || rel_value > sum.max_rel) sum.worst_point = point;
    sum.max_abs = std::max(sum.max_abs, abs_value);
    sum.max_rel = std::max(sum.max_rel, rel_value);
}

std::string format_scientific(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

void add_bound_verdict(Report& rep, const std::string& name, double worst, double limit, bool upper) {
    const bool pass = upper ? worst <= limit : worst >= limit;
    rep.verdicts.push_back({name, pass, (upper ? "max " : "min ") + format_scientific(worst) + (upper ? " <= " : " >= ") + format_scientific(limit)});
}

ordered_json scenario_json(const Scenario& s) {
    ordered_json j;
    j["name"] = s.name;
    j["dimension"] = s.dimension;
    j["metric"] = s.metric;
    j["f"] = s.f;
    j["lambda"] = s.lambda;
    ordered_json params = ordered_json::object();
    for (const auto& [k, v] : s.params) params[k] = v;
    j["params"] = params;
    ordered_json grid = ordered_json::array();
    for (const auto& a : s.grid) grid.push_back({{"min", a.min}, {"max", a.max}, {"count", a.count}});
    j["grid"] = grid;
    j["static"] = s.is_static;
    if (!s.warped_phi.empty()) {
        j["warped_phi"] = s.warped_phi;
        j["warped_psi"] = s.warped_psi;
    }
    return j;
}

ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json violation_row_json(const ViolationRow& r, double discrepancy) {
    return ordered_json{{"r", r.r},
                        {"x1", r.x1},
                        {"k", number(r.k)},
                        {"c", number(r.c)},
                        {"P_r1", r.p_r1},
                        {"nabla_r_P_1r", r.nabla_r_p_1r},
                        {"nabla_1_P_1r", r.nabla_1_p_1r},
                        {"nabla_2_P_12", r.nabla_2_p_12},
                        {"div_P_r", r.div_r},
                        {"div_P_1", r.div_1},
                        {"false_div_P_1", r.false_div_1},
                        {"div_discrepancy_1", r.discrepancy_1},
                        {"norm_P_sq", r.norm_p_sq},
                        {"norm_nabla_P_sq", r.norm_nabla_p_sq},
                        {"norm_div_P_sq", r.norm_div_p_sq},
                        {"violation", r.violation},
                        {"sharp_margin", r.sharp_margin},
                        {"engine_discrepancy", number(discrepancy)}};
}

ordered_json point_row_json(const PointRow& r) {
    return ordered_json{{"point", r.point},
                        {"norm_P_sq", r.norm_p_sq},
                        {"norm_nabla_P_sq", r.norm_nabla_p_sq},
                        {"norm_div_P_sq", r.norm_div_p_sq},
                        {"violation", r.violation},
                        {"sharp_margin", r.sharp_margin},
                        {"weak_margin", r.weak_margin},
                        {"cyclic_residual", r.cyclic},
                        {"bochner_abs", r.bochner_abs},
                        {"bochner_rel", r.bochner_rel},
                        {"bochner_forms_gap", number(r.bochner_forms_gap)},
                        {"static_tensor", number(r.static_tensor)},
                        {"static_scalar", number(r.static_scalar)},
                        {"static_bochner_rel", number(r.static_bochner)},
                        {"cross_validation", number(r.cross_validation)}};
}

ordered_json candidate_json(const SearchCandidate& c) {
    return ordered_json{{"k", c.k}, {"c", c.c}, {"r", c.r}, {"violation", number(c.violation)}};
}

}  // namespace

bool Report::all_pass() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

const Verdict* Report::verdict(const std::string& name) const {
    for (const auto& v : verdicts)
        if (v.name == name) return &v;
    return nullptr;
}

void parallel_for(int count, const std::function<void(int)>& fn, int threads) {
    if (count <= 0) return;
    if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, count);
    std::atomic<int> next{0};
    std::mutex mu;
    int failed_index = -1;
    std::exception_ptr failure;
    auto worker = [&] {
        for (int i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (failed_index < 0 || i < failed_index) {
                    failed_index = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
}

static ResidualSummary named(const char* name) {
    ResidualSummary s;
    s.name = name;
    return s;
}

void summarize(Report& rep) {
    rep.residuals.clear();
    rep.verdicts.clear();
    const Tolerances& tol = rep.tolerances;

    if (rep.kind == "verify") {
        ResidualSummary cyclic = named("cyclic_identity"), bochner = named("bochner"), forms = named("bochner_n3_form"),
                        st_t = named("static_tensor"), st_s = named("static_scalar"), st_b = named("static_bochner"),
                        cross = named("warped_cross_validation"), p_norm = named("static_P_norm");
        double min_sharp = std::numeric_limits<double>::infinity(), min_weak = min_sharp;
        for (const PointRow& r : rep.points) {
            track(cyclic, r.cyclic, r.cyclic, r.point);
            track(bochner, r.bochner_abs, r.bochner_rel, r.point);
            track(forms, r.bochner_forms_gap, r.bochner_forms_gap, r.point);
            track(st_t, r.static_tensor, r.static_tensor, r.point);
            track(st_s, r.static_scalar, r.static_scalar, r.point);
            track(st_b, r.static_bochner, r.static_bochner, r.point);
            track(cross, r.cross_validation, r.cross_validation, r.point);
            if (!std::isnan(r.static_tensor)) track(p_norm, std::sqrt(std::max(0.0, r.norm_p_sq)), std::sqrt(std::max(0.0, r.norm_p_sq)), r.point);
            min_sharp = std::min(min_sharp, r.sharp_margin);
            min_weak = std::min(min_weak, r.weak_margin);
        }
        for (ResidualSummary* s : {&cyclic, &bochner, &forms, &st_t, &st_s, &p_norm, &st_b, &cross})
            if (s->samples > 0) rep.residuals.push_back(*s);

        add_bound_verdict(rep, "cyclic_identity", cyclic.max_abs, tol.cyclic, true);
        add_bound_verdict(rep, "bochner", bochner.max_rel, tol.bochner_rel, true);
        if (forms.samples > 0) add_bound_verdict(rep, "bochner_n3_form", forms.max_rel, tol.bochner_forms, true);
        if (!rep.points.empty()) {
            add_bound_verdict(rep, "sharp_bound", min_sharp, -tol.sign_floor, false);
            add_bound_verdict(rep, "weak_bound", min_weak, -tol.sign_floor, false);
        }
        if (st_t.samples > 0) {
            add_bound_verdict(rep, "static_tensor", st_t.max_abs, tol.static_abs, true);
            add_bound_verdict(rep, "static_scalar", st_s.max_abs, tol.static_abs, true);
            add_bound_verdict(rep, "static_P_norm", p_norm.max_abs, tol.static_p, true);
        }
        if (st_b.samples > 0) add_bound_verdict(rep, "static_bochner", st_b.max_rel, tol.static_bochner, true);
        if (cross.samples > 0) add_bound_verdict(rep, "warped_cross_validation", cross.max_abs, tol.cross_validation, true);
    } else if (rep.kind == "counterexample" && rep.violations) {
        ResidualSummary cross = named("warped_cross_validation");
        double min_sharp = std::numeric_limits<double>::infinity(), min_violation = min_sharp;
        for (std::size_t i = 0; i < rep.violations->rows.size(); ++i) {
            const ViolationRow& r = rep.violations->rows[i];
            const double d = i < rep.row_discrepancy.size() ? rep.row_discrepancy[i] : kNaN;
            track(cross, d, d, {r.r, r.x1});
            min_sharp = std::min(min_sharp, r.sharp_margin);
            min_violation = std::min(min_violation, r.violation);
        }
        if (cross.samples > 0) rep.residuals.push_back(cross);
        add_bound_verdict(rep, "warped_cross_validation", cross.max_abs, tol.cross_validation, true);
        add_bound_verdict(rep, "sharp_bound", min_sharp, -tol.sign_floor, false);
        rep.verdicts.push_back({"violation_exhibited", min_violation < -tol.sign_floor,
                                "min violation " + format_scientific(min_violation) + " vs -" + format_scientific(tol.sign_floor)});
    } else if (rep.kind == "search" && rep.search) {
        const double v = rep.search->best.violation;
        rep.verdicts.push_back({"violation_exhibited", v < -tol.sign_floor, "best violation " + format_scientific(v)});
    }
}

Report run_verify(const Scenario& scenario, const Tolerances& tol) {
    scenario.validate();
    Report rep;
    rep.kind = "verify";
    rep.scenario = scenario;
    rep.tolerances = tol;
    if (scenario.dimension == 3)
        rep.points = verify_rows<3>(scenario, tol);
    else if (scenario.dimension == 4)
        rep.points = verify_rows<4>(scenario, tol);
    else
        throw ScenarioError("verify supports dimension 3 or 4");

    if (const auto warped = scenario.warped()) {
        std::vector<Point<3>> pts;
        for (const auto& pv : scenario.points()) pts.push_back(to_point<3>(pv));
        rep.violations = violation_report(*warped, pts, scenario.name);
        for (const PointRow& r : rep.points) rep.row_discrepancy.push_back(r.cross_validation);
    }
    if (scenario.is_static) rep.notes.push_back("static residuals: |f Ric - Hess f - (R/2) f g| and |Delta f + (R/2) f|; static_bochner is evaluated only where both vanish and |f| >= 1e-8");
    rep.notes.push_back(kOmegaNote);
    summarize(rep);
    return rep;
}

Report run_counterexample(const CounterexampleOptions& o, const Tolerances& tol) {
    ParamSet params = o.extra_params;
    params["k"] = o.k;
    params["c"] = o.c;
    const WarpedSpec spec = WarpedSpec::from_source(o.phi, o.psi, o.lambda, params);

    Report rep;
    rep.kind = "counterexample";
    rep.tolerances = tol;
    Scenario& s = rep.scenario;
    s.name = "warped-counterexample";
    s.params = params;
    s.lambda = o.lambda;
    s.f = o.psi;
    s.warped_phi = o.phi;
    s.warped_psi = o.psi;
    const std::string phi_sq = "(" + o.phi + ")^2";
    s.metric = {"1", "0", "0", phi_sq, "0", phi_sq};
    s.grid = {o.r, o.x1, GridAxis{}};

    std::vector<Point<3>> pts;
    for (double r : o.r.values())
        for (double x1 : o.x1.values()) pts.push_back({r, x1, 0.0});
    const CrossValidation cv = cross_validate(spec, pts);
    rep.violations = violation_report(spec, pts, s.name);
    rep.row_discrepancy = cv.discrepancy;
    rep.notes.push_back(kOmegaNote);
    rep.notes.push_back("P follows lambda (df (x) d|grad f|^2 - d|grad f|^2 (x) df); since d|grad f|^2 = 2 Hess f(grad f, .), P_r1 = 2 lambda psi'^3 phi'/phi^3");
    summarize(rep);
    return rep;
}

Report run_search(const SearchBounds& bounds, std::uint64_t seed, int iterations, const Tolerances& tol) {
    Report rep;
    rep.kind = "search";
    rep.tolerances = tol;
    rep.scenario.name = "warped-canonical-search";
    rep.scenario.f = "x1";
    rep.scenario.warped_phi = "(r+c)^(-1/k)";
    rep.scenario.warped_psi = "x1";
    rep.search = search_violation(bounds, seed, iterations);
    rep.search_bounds = bounds;
    rep.search_seed = seed;
    rep.search_iterations = iterations;
    rep.notes.push_back("objective: closed-form violation at x1 = 0 with lambda = 1, psi = x1, phi = (r+c)^(-1/k)");
    summarize(rep);
    return rep;
}

std::string csv_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string to_json(const Report& rep) {
    ordered_json j;
    j["version"] = rep.version;
    j["kind"] = rep.kind;
    j["scenario"] = scenario_json(rep.scenario);
    ordered_json residuals = ordered_json::array();
    for (const auto& r : rep.residuals)
        residuals.push_back({{"name", r.name}, {"max_abs", r.max_abs}, {"max_rel", r.max_rel}, {"worst_point", r.worst_point}, {"samples", r.samples}});
    j["residuals"] = residuals;

    ordered_json rows = ordered_json::array();
    if (rep.kind == "verify") {
        for (const auto& r : rep.points) rows.push_back(point_row_json(r));
    } else if (rep.violations) {
        for (std::size_t i = 0; i < rep.violations->rows.size(); ++i)
            rows.push_back(violation_row_json(rep.violations->rows[i], i < rep.row_discrepancy.size() ? rep.row_discrepancy[i] : kNaN));
    }
    j["violations"] = rows;
    if (rep.violations) {
        const ViolationReport& v = *rep.violations;
        j["violation_summary"] = {{"min_violation", v.min_violation},
                                  {"max_violation", v.max_violation},
                                  {"sign", v.sign_summary},
                                  {"max_engine_discrepancy", v.max_discrepancy}};
    }
    if (rep.search) {
        const SearchResult& s = *rep.search;
        ordered_json starts = ordered_json::array();
        for (const auto& c : s.starts) starts.push_back(candidate_json(c));
        const SearchBounds& b = rep.search_bounds;
        j["search"] = {{"seed", rep.search_seed},
                       {"iterations", rep.search_iterations},
                       {"bounds", {{"k", {b.k.lo, b.k.hi}}, {"c", {b.c.lo, b.c.hi}}, {"r", {b.r.lo, b.r.hi}}}},
                       {"evaluations", s.evaluations},
                       {"random_samples", s.random_samples},
                       {"best", candidate_json(s.best)},
                       {"starts", starts}};
    }
    ordered_json verdicts = ordered_json::array();
    for (const auto& v : rep.verdicts) verdicts.push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
    j["verdicts"] = verdicts;
    j["notes"] = rep.notes;
    return j.dump(2) + "\n";
}

std::string to_csv(const Report& rep) {
    std::ostringstream out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
        out << '\n';
    };
    if (rep.kind == "verify") {
        std::vector<std::string> head;
        for (int a = 0; a < rep.scenario.dimension; ++a)
            head.push_back(rep.scenario.dimension == 3 ? std::vector<std::string>{"r", "x1", "x2"}[a] : "x_" + std::to_string(a + 1));
        for (const char* c : {"norm_P_sq", "norm_nabla_P_sq", "norm_div_P_sq", "violation", "sharp_margin", "weak_margin", "cyclic_residual",
                              "bochner_rel", "static_tensor", "static_scalar", "cross_validation"})
            head.push_back(c);
        line(head);
        for (const auto& r : rep.points) {
            std::vector<std::string> cells;
            for (double x : r.point) cells.push_back(csv_number(x));
            for (double x : {r.norm_p_sq, r.norm_nabla_p_sq, r.norm_div_p_sq, r.violation, r.sharp_margin, r.weak_margin, r.cyclic, r.bochner_rel,
                             r.static_tensor, r.static_scalar, r.cross_validation})
                cells.push_back(csv_number(x));
            line(cells);
        }
    } else if (rep.kind == "counterexample" && rep.violations) {
        line({"r", "x1", "k", "c", "norm_nabla_P_sq", "norm_div_P_sq", "violation", "sharp_margin"});
        for (const auto& r : rep.violations->rows)
            line({csv_number(r.r), csv_number(r.x1), csv_number(r.k), csv_number(r.c), csv_number(r.norm_nabla_p_sq), csv_number(r.norm_div_p_sq),
                  csv_number(r.violation), csv_number(r.sharp_margin)});
    } else if (rep.kind == "search" && rep.search) {
        line({"role", "k", "c", "r", "violation"});
        const auto row = [&](const std::string& role, const SearchCandidate& c) {
            line({role, csv_number(c.k), csv_number(c.c), csv_number(c.r), csv_number(c.violation)});
        };
        row("best", rep.search->best);
        for (std::size_t i = 0; i < rep.search->starts.size(); ++i) row("start" + std::to_string(i + 1), rep.search->starts[i]);
    }
    return out.str();
}

}  // namespace divbound
