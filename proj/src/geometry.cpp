#include "divbound/geometry.hpp"

namespace divbound {

MetricField::MetricField(int dimension, std::vector<Expr> upper_triangle, ParamSet params)
    : dimension_(dimension), components_(static_cast<std::size_t>(dimension * dimension)), params_(std::move(params)) {
    if (static_cast<int>(upper_triangle.size()) != dimension * (dimension + 1) / 2)
        throw GeometryError("metric needs n(n+1)/2 upper-triangle components");
    std::size_t next = 0;
    for (int i = 0; i < dimension; ++i)
        for (int j = i; j < dimension; ++j) {
            Expr& e = upper_triangle[next++];
            if (e.empty()) throw GeometryError("missing metric component g_" + std::to_string(i + 1) + std::to_string(j + 1));
            if (e.dimension() != dimension) throw GeometryError("metric component parsed against the wrong chart dimension");
            components_[i * dimension + j] = e;
            components_[j * dimension + i] = e;
        }
}

MetricField MetricField::diagonal(std::vector<Expr> entries, ParamSet params) {
    const int n = static_cast<int>(entries.size());
    std::vector<Expr> upper;
    const Expr zero = parse("0", Signature::chart(n));
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) upper.push_back(i == j ? entries[i] : zero);
    return MetricField(n, std::move(upper), std::move(params));
}

}  // namespace divbound
