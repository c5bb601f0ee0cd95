#pragma once

/**
 * @file report.hpp
 * @brief Grid sweeps over a scenario and their CSV/JSON serialisation.
 *
 * A Report carries per-point rows, residual summaries computed from those
 * rows, and verdicts computed from the summaries. JSON follows
 *
 *     {version, scenario, residuals: [{name, max_abs, max_rel, worst_point}],
 *      violations: [rows], verdicts: [{name, pass}], notes}
 *
 * CSV is one row per point with '.' decimals, 17 significant digits and LF
 * line endings.
 */

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "divbound/scenario.hpp"
#include "divbound/search.hpp"
#include "divbound/warped.hpp"

namespace divbound {

inline constexpr const char* kVersion = DIVBOUND_VERSION;

/// Fixed identity tolerances. The sign floor (--tolerance) is separate.
struct Tolerances {
    double cyclic = 1e-10;
    double bochner_rel = 1e-8;
    double bochner_forms = 1e-12;  // general formula vs the n = 3 form
    double static_abs = 1e-10;
    double static_p = 1e-12;
    double static_bochner = 1e-8;
    double cross_validation = 1e-10;
    /// sharp/weak margins must be >= -sign_floor; |violation| <= sign_floor counts as zero
    double sign_floor = 1e-12;
};

struct ResidualSummary {
    std::string name;
    double max_abs = 0.0;
    double max_rel = 0.0;
    std::vector<double> worst_point;
    int samples = 0;
};

struct Verdict {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// One grid point of a verify sweep. NaN marks quantities not computed there.
struct PointRow {
    std::vector<double> point;
    double norm_p_sq = 0.0;
    double norm_nabla_p_sq = 0.0;
    double norm_div_p_sq = 0.0;
    double violation = 0.0;
    double sharp_margin = 0.0;
    double weak_margin = 0.0;
    double cyclic = 0.0;
    double bochner_abs = 0.0;
    double bochner_rel = 0.0;
    double bochner_forms_gap = 0.0;  // NaN for n = 4
    double static_tensor = 0.0;      // NaN unless the scenario is static
    double static_scalar = 0.0;
    double static_bochner = 0.0;     // NaN where skipped
    double cross_validation = 0.0;   // NaN unless a warped closed form is attached
};

struct Report {
    std::string kind;  // verify, counterexample, search
    std::string version = kVersion;
    Scenario scenario;
    std::vector<ResidualSummary> residuals;
    std::vector<PointRow> points;                   // verify
    std::optional<ViolationReport> violations;      // counterexample, warped verify
    std::vector<double> row_discrepancy;            // per violation row
    std::optional<SearchResult> search;             // search
    SearchBounds search_bounds;
    std::uint64_t search_seed = 0;
    int search_iterations = 0;
    std::vector<Verdict> verdicts;
    std::vector<std::string> notes;
    Tolerances tolerances;

    bool all_pass() const;
    const Verdict* verdict(const std::string& name) const;
};

/// Runs fn(i) for i in [0, count) on a small thread pool. The first exception
/// (lowest index) is rethrown after all workers finish.
void parallel_for(int count, const std::function<void(int)>& fn, int threads = 0);

Report run_verify(const Scenario& scenario, const Tolerances& tol = {});

struct CounterexampleOptions {
    double k = 4.0;
    double c = 1.0;
    std::string lambda = "1";
    std::string psi = "x1";
    std::string phi = "(r+c)^(-1/k)";
    ParamSet extra_params;
    GridAxis r{0.0, 1.0, 5};
    GridAxis x1{0.0, 0.0, 1};
};

Report run_counterexample(const CounterexampleOptions& opts, const Tolerances& tol = {});

Report run_search(const SearchBounds& bounds, std::uint64_t seed, int iterations, const Tolerances& tol = {});

/// Recomputes residual summaries and verdicts from the rows alone.
void summarize(Report& report);

std::string to_json(const Report& report);
std::string to_csv(const Report& report);

/// %.17g formatting, independent of the global locale.
std::string csv_number(double v);

}  // namespace divbound
