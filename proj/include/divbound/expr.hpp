#pragma once

/**
 * @file expr.hpp
 * @brief Scalar expressions for metric components and potentials.
 *
 * Grammar (whitespace insignificant):
 *
 *     expr     := term (('+' | '-') term)*
 *     term     := unary (('*' | '/') unary)*
 *     unary    := ('-' | '+') unary | power
 *     power    := primary ('^' exponent)*
 *     exponent := ('-' | '+') exponent | primary
 *     primary  := number | name | func '(' expr ')' | '(' expr ')'
 *     func     := sin | cos | exp | log | sqrt
 *
 * Binding strength is '^' > unary minus > '*' '/' > '+' '-'; all binary
 * operators associate to the left, so a^b^c is (a^b)^c. Names resolve against
 * a Signature (chart variables plus declared parameters) at parse time;
 * parameter values are bound only at evaluation.
 */

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <stdexcept>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "divbound/errors.hpp"
#include "divbound/jet.hpp"

namespace divbound {

using ParamSet = std::map<std::string, double, std::less<>>;

/// The names an expression may reference: positional variables and named parameters.
class Signature {
public:
    /// Chart variables x_1..x_n. In dimension 3 the aliases r, x1, x2 name the same three slots.
    static Signature chart(int dimension, std::vector<std::string> parameters = {});
    /// One variable called `name`, e.g. "f" for lambda or "r" for a warping function.
    static Signature univariate(std::string name, std::vector<std::string> parameters = {});

    int dimension() const noexcept { return dimension_; }
    std::optional<int> variable(std::string_view name) const;
    bool has_parameter(std::string_view name) const;
    const std::vector<std::string>& parameters() const noexcept { return parameters_; }
    /// Every name that resolves, for error messages.
    std::vector<std::string> names() const;

private:
    int dimension_ = 0;
    std::vector<std::pair<std::string, int>> variables_;
    std::vector<std::string> parameters_;
};

class Expr {
public:
    enum class Kind { Literal, Variable, Parameter, Neg, Sin, Cos, Exp, Log, Sqrt, Add, Sub, Mul, Div, Pow };

    struct Node {
        Kind kind;
        double literal = 0.0;
        int variable = -1;
        std::string name;
        std::shared_ptr<const Node> lhs, rhs;
        std::size_t offset = 0;
    };

    Expr() = default;
    Expr(std::shared_ptr<const Node> root, int dimension) : root_(std::move(root)), dimension_(dimension) {}

    const Node& root() const { return *root_; }
    bool empty() const noexcept { return root_ == nullptr; }
    int dimension() const noexcept { return dimension_; }

    /// Fully parenthesised text that parses back to the same tree.
    std::string str() const;
    /// Parameter names referenced anywhere in the tree.
    std::set<std::string> parameters() const;

    friend bool operator==(const Expr& a, const Expr& b);

private:
    std::shared_ptr<const Node> root_;
    int dimension_ = 0;
};

Expr parse(std::string_view source, const Signature& signature);

/// Copy of a univariate expression whose variable is chart slot `slot` of a
/// `dimension`-dimensional chart. Parameters are left untouched.
Expr rebind(const Expr& univariate, int dimension, int slot);

std::string to_string(const Expr::Node& node);

namespace detail {

[[noreturn]] void domain_failure(const Expr::Node& node, const char* what);

template <class Scalar>
Scalar power(const Expr::Node& node, const Scalar& base, const Scalar& exponent) {
    using std::pow;
    const double b = value_of(base), e = value_of(exponent);
    const bool integral = e == std::round(e);
    if constexpr (std::is_same_v<Scalar, double>) {
        if (!integral && !(b > 0.0)) domain_failure(node, "non-integer power of nonpositive base");
        if (integral && e < 0.0 && b == 0.0) domain_failure(node, "division by zero in negative power");
        return pow(base, exponent);
    } else {
        if (!exponent.is_constant()) {
            if (!(b > 0.0)) domain_failure(node, "variable power of nonpositive base");
        } else {
            if (!integral && !(b > 0.0)) domain_failure(node, "non-integer power of nonpositive base");
            if (integral && e < 0.0 && b == 0.0) domain_failure(node, "division by zero in negative power");
        }
        return pow(base, exponent);
    }
}

template <class Scalar>
Scalar eval_node(const Expr::Node& n, std::span<const Scalar> point, const ParamSet& params) {
    using std::cos;
    using std::exp;
    using std::log;
    using std::sin;
    using std::sqrt;
    using K = Expr::Kind;
    switch (n.kind) {
        case K::Literal:
            return Scalar(n.literal);
        case K::Variable:
            return point[n.variable];
        case K::Parameter: {
            const auto it = params.find(n.name);
            if (it == params.end()) throw DomainError("parameter '" + n.name + "' has no value");
            return Scalar(it->second);
        }
        default:
            break;
    }
    const Scalar a = eval_node(*n.lhs, point, params);
    switch (n.kind) {
        case K::Neg:
            return -a;
        case K::Sin:
            return sin(a);
        case K::Cos:
            return cos(a);
        case K::Exp:
            return exp(a);
        case K::Log:
            if (!(value_of(a) > 0.0)) domain_failure(n, "log of nonpositive value");
            return log(a);
        case K::Sqrt:
            if (value_of(a) < 0.0) domain_failure(n, "sqrt of negative value");
            if constexpr (!std::is_same_v<Scalar, double>) {
                if (value_of(a) == 0.0 && !a.is_constant()) domain_failure(n, "sqrt is not differentiable at zero");
            }
            return sqrt(a);
        default:
            break;
    }
    const Scalar b = eval_node(*n.rhs, point, params);
    switch (n.kind) {
        case K::Add:
            return a + b;
        case K::Sub:
            return a - b;
        case K::Mul:
            return a * b;
        case K::Div:
            if (value_of(b) == 0.0) domain_failure(n, "division by zero");
            return a / b;
        case K::Pow:
            return power(n, a, b);
        default:
            throw std::logic_error("unhandled expression node");
    }
}

}  // namespace detail

/// Evaluate under any numeric semantics with the usual arithmetic and elementary functions (double, Jet<N>).
template <class Scalar>
Scalar evaluate(const Expr& e, std::span<const Scalar> point, const ParamSet& params) {
    if (static_cast<int>(point.size()) != e.dimension())
        throw DomainError("point has " + std::to_string(point.size()) + " coordinates, expression expects " + std::to_string(e.dimension()));
    return detail::eval_node<Scalar>(e.root(), point, params);
}

template <class Scalar, std::size_t M>
Scalar evaluate(const Expr& e, const std::array<Scalar, M>& point, const ParamSet& params) {
    return evaluate<Scalar>(e, std::span<const Scalar>(point), params);
}

}  // namespace divbound
