#pragma once

// Central-difference derivative estimates. These are the independent oracle
// for the jet machinery and only ever call the field on plain doubles.
//
// Truncation error is O(h^2) for every supported stencil:
//   first order:   (f(x+h) - f(x-h)) / 2h
//   second, pure:  (f(x+h) - 2 f(x) + f(x-h)) / h^2
//   second, mixed: (f(++) - f(+-) - f(-+) + f(--)) / 4h^2

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include "divbound/errors.hpp"

namespace divbound {

using ScalarFieldFn = std::function<double(const Eigen::VectorXd&)>;

inline double finite_difference(const ScalarFieldFn& field, const Eigen::VectorXd& point, const std::vector<int>& multi_index,
                                double h = 1e-4) {
    if (static_cast<Eigen::Index>(multi_index.size()) != point.size())
        throw OrderError("multi-index length does not match the point dimension");
    std::vector<int> axes;
    for (int v = 0; v < static_cast<int>(multi_index.size()); ++v) {
        if (multi_index[v] < 0) throw OrderError("negative multi-index entry");
        for (int k = 0; k < multi_index[v]; ++k) axes.push_back(v);
    }
    if (axes.size() > 2) throw OrderError("finite-difference oracle supports derivatives up to order 2");

    auto at = [&](double s0, double s1) {
        Eigen::VectorXd x = point;
        if (!axes.empty()) x[axes[0]] += s0;
        if (axes.size() == 2) x[axes[1]] += s1;
        try {
            return field(x);
        } catch (const DomainError& e) {
            throw DomainError(std::string("finite-difference stencil leaves the field's domain: ") + e.what());
        }
    };

    switch (axes.size()) {
        case 0:
            return at(0, 0);
        case 1:
            return (at(h, 0) - at(-h, 0)) / (2 * h);
        default:
            if (axes[0] == axes[1]) {
                const double mid = at(0, 0);
                return (at(h, 0) - 2 * mid + at(-h, 0)) / (h * h);
            }
            return (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
    }
}

}  // namespace divbound
