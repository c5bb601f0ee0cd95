#include "divbound/search.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "divbound/errors.hpp"
#include "divbound/warped.hpp"

namespace divbound {

namespace {

bool better(const SearchCandidate& a, const SearchCandidate& b) {
    return std::tie(a.violation, a.k, a.c, a.r) < std::tie(b.violation, b.k, b.c, b.r);
}

SearchCandidate evaluate_at(const WarpedSpec& base, double k, double c, double r) {
    SearchCandidate cand{k, c, r, std::numeric_limits<double>::infinity()};
    WarpedSpec spec = base;
    spec.params["k"] = k;
    spec.params["c"] = c;
    try {
        const double v = closed_form_eval(spec, r, 0.0).violation;
        if (std::isfinite(v)) cand.violation = v;
    } catch (const DomainError&) {
    }
    return cand;
}

SearchCandidate pattern_search(const WarpedSpec& base, const SearchBounds& bounds, SearchCandidate start, int budget, int& used) {
    const std::array<Interval, 3> box{bounds.k, bounds.c, bounds.r};
    std::array<double, 3> step;
    for (int i = 0; i < 3; ++i) step[i] = 0.25 * (box[i].hi - box[i].lo);
    SearchCandidate best = start;
    while (budget > 0) {
        bool improved = false;
        for (int axis = 0; axis < 3 && budget > 0; ++axis) {
            if (step[axis] <= 0.0) continue;
            for (double sign : {1.0, -1.0}) {
                if (budget <= 0) break;
                std::array<double, 3> x{best.k, best.c, best.r};
                const double current = x[axis];
                x[axis] = std::clamp(current + sign * step[axis], box[axis].lo, box[axis].hi);
                if (x[axis] == current) continue;
                const SearchCandidate trial = evaluate_at(base, x[0], x[1], x[2]);
                --budget;
                ++used;
                if (trial.violation < best.violation) {
                    best = trial;
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) {
            bool alive = false;
            for (int i = 0; i < 3; ++i) {
                step[i] *= 0.5;
                alive = alive || step[i] > 1e-12 * std::max(1.0, box[i].hi - box[i].lo);
            }
            if (!alive) break;
        }
    }
    return best;
}

}  // namespace

double canonical_violation(double k, double c, double r) {
    return closed_form_eval(WarpedSpec::canonical(k, c), r, 0.0).violation;
}

SearchResult search_violation(const SearchBounds& bounds, std::uint64_t seed, int iterations) {
    if (iterations < 1) throw std::invalid_argument("search needs at least one iteration");
    for (const Interval& iv : {bounds.k, bounds.c, bounds.r})
        if (!(iv.lo <= iv.hi)) throw std::invalid_argument("search bounds must satisfy lo <= hi");

    const WarpedSpec base = WarpedSpec::canonical(4.0, 1.0);
    std::mt19937_64 rng(seed);
    auto draw = [&rng](const Interval& iv) {
        return iv.lo == iv.hi ? iv.lo : std::uniform_real_distribution<double>(iv.lo, iv.hi)(rng);
    };

    SearchResult result;
    result.random_samples = std::max(1, iterations / 5);
    std::vector<SearchCandidate> samples;
    samples.reserve(result.random_samples);
    for (int i = 0; i < result.random_samples; ++i) {
        const double k = draw(bounds.k), c = draw(bounds.c), r = draw(bounds.r);
        samples.push_back(evaluate_at(base, k, c, r));
    }
    std::sort(samples.begin(), samples.end(), better);
    result.evaluations = result.random_samples;

    const int remaining = iterations - result.random_samples;
    const int starts = remaining > 0 ? std::min<int>(kMaxSearchStarts, static_cast<int>(samples.size())) : 0;
    std::vector<SearchCandidate> refined(starts);
    std::vector<int> used(starts, 0);
    std::vector<std::thread> workers;
    for (int s = 0; s < starts; ++s) {
        const int budget = remaining / starts + (s < remaining % starts ? 1 : 0);
        workers.emplace_back([&, s, budget] { refined[s] = pattern_search(base, bounds, samples[s], budget, used[s]); });
    }
    for (auto& w : workers) w.join();
    for (int u : used) result.evaluations += u;
    std::sort(refined.begin(), refined.end(), better);
    result.starts = refined;
    result.best = samples.front();
    if (!refined.empty() && better(refined.front(), result.best)) result.best = refined.front();
    return result;
}

}  // namespace divbound
