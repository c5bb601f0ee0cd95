#pragma once

// Derivative-free minimisation of the closed-form violation over the canonical
// family phi = (r+c)^(-1/k), lambda = 1, psi = x1, evaluated at x1 = 0.
//
// The budget counts objective evaluations. A fifth of it (at least one) goes
// to uniform random samples; the rest is split evenly over coordinate pattern
// searches started from the best few samples. Starts run on separate threads
// and are merged by (violation, k, c, r), so the result depends only on the seed.

#include <cstdint>
#include <vector>

namespace divbound {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct SearchBounds {
    Interval k{1.0, 6.0};
    Interval c{0.5, 2.0};
    Interval r{0.0, 1.0};
};

struct SearchCandidate {
    double k = 0.0;
    double c = 0.0;
    double r = 0.0;
    double violation = 0.0;  // +inf where the closed form is undefined
};

struct SearchResult {
    SearchCandidate best;
    int evaluations = 0;
    int random_samples = 0;
    std::vector<SearchCandidate> starts;  // pattern-search results, merge order
};

inline constexpr int kMaxSearchStarts = 4;

/// Closed-form violation of the canonical family at (r, x1 = 0).
double canonical_violation(double k, double c, double r);

SearchResult search_violation(const SearchBounds& bounds, std::uint64_t seed, int iterations);

}  // namespace divbound
