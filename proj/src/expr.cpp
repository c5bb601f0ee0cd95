#include "divbound/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <stdexcept>

namespace divbound {

namespace {
constexpr const char* kChartAliases[3] = {"r", "x1", "x2"};
}

Signature Signature::chart(int dimension, std::vector<std::string> parameters) {
    Signature s;
    s.dimension_ = dimension;
    for (int i = 0; i < dimension; ++i) s.variables_.emplace_back("x_" + std::to_string(i + 1), i);
    if (dimension == 3) {
        for (int i = 0; i < 3; ++i) s.variables_.emplace_back(kChartAliases[i], i);
    }
    s.parameters_ = std::move(parameters);
    return s;
}

Signature Signature::univariate(std::string name, std::vector<std::string> parameters) {
    Signature s;
    s.dimension_ = 1;
    s.variables_.emplace_back(std::move(name), 0);
    s.parameters_ = std::move(parameters);
    return s;
}

std::optional<int> Signature::variable(std::string_view name) const {
    for (const auto& [n, slot] : variables_)
        if (n == name) return slot;
    return std::nullopt;
}

bool Signature::has_parameter(std::string_view name) const {
    return std::find(parameters_.begin(), parameters_.end(), name) != parameters_.end();
}

std::vector<std::string> Signature::names() const {
    std::vector<std::string> out;
    for (const auto& v : variables_) out.push_back(v.first);
    out.insert(out.end(), parameters_.begin(), parameters_.end());
    return out;
}

namespace {

using Kind = Expr::Kind;
using NodePtr = std::shared_ptr<const Expr::Node>;

bool is_function(std::string_view name, Kind& kind) {
    static const std::pair<std::string_view, Kind> table[] = {
        {"sin", Kind::Sin}, {"cos", Kind::Cos}, {"exp", Kind::Exp}, {"log", Kind::Log}, {"sqrt", Kind::Sqrt}};
    for (const auto& [n, k] : table)
        if (n == name) {
            kind = k;
            return true;
        }
    return false;
}

NodePtr make(Kind kind, std::size_t offset, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = kind;
    n->offset = offset;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

class Parser {
public:
    Parser(std::string_view src, const Signature& sig) : src_(src), sig_(sig) {}

    NodePtr run() {
        skip();
        if (pos_ == src_.size()) throw ParseError("empty expression", pos_);
        NodePtr e = expr();
        skip();
        if (pos_ != src_.size()) throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
        return e;
    }

private:
    void skip() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= src_.size()) throw ParseError(std::string("expected '") + c + "' before end of input", pos_);
            throw ParseError(std::string("expected '") + c + "', found '" + src_[pos_] + "'", pos_);
        }
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            skip();
            const std::size_t at = pos_;
            if (accept('+'))
                lhs = make(Kind::Add, at, lhs, term());
            else if (accept('-'))
                lhs = make(Kind::Sub, at, lhs, term());
            else
                return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            skip();
            const std::size_t at = pos_;
            if (accept('*'))
                lhs = make(Kind::Mul, at, lhs, unary());
            else if (accept('/'))
                lhs = make(Kind::Div, at, lhs, unary());
            else
                return lhs;
        }
    }

    NodePtr unary() {
        skip();
        const std::size_t at = pos_;
        if (accept('-')) return make(Kind::Neg, at, unary());
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        for (;;) {
            skip();
            const std::size_t at = pos_;
            if (!accept('^')) return base;
            base = make(Kind::Pow, at, base, exponent());
        }
    }

    NodePtr exponent() {
        skip();
        const std::size_t at = pos_;
        if (accept('-')) return make(Kind::Neg, at, exponent());
        if (accept('+')) return exponent();
        return primary();
    }

    NodePtr primary() {
        skip();
        const std::size_t at = pos_;
        if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
        throw ParseError(std::string("unexpected '") + c + "'", at);
    }

    NodePtr number() {
        const std::size_t at = pos_;
        double v = 0.0;
        const auto [end, ec] = std::from_chars(src_.data() + pos_, src_.data() + src_.size(), v);
        if (ec != std::errc()) throw ParseError("malformed number", at);
        pos_ = static_cast<std::size_t>(end - src_.data());
        auto n = std::make_shared<Expr::Node>();
        n->kind = Kind::Literal;
        n->literal = v;
        n->offset = at;
        return n;
    }

    NodePtr name() {
        const std::size_t at = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
        const std::string_view id = src_.substr(at, pos_ - at);

        Kind fn;
        if (is_function(id, fn)) {
            skip();
            if (pos_ < src_.size() && src_[pos_] == '(') {
                ++pos_;
                NodePtr arg = expr();
                expect(')');
                return make(fn, at, arg);
            }
            throw ParseError("function '" + std::string(id) + "' needs a parenthesised argument", at);
        }

        auto n = std::make_shared<Expr::Node>();
        n->offset = at;
        n->name = std::string(id);
        if (const auto slot = sig_.variable(id)) {
            n->kind = Kind::Variable;
            n->variable = *slot;
            return n;
        }
        if (sig_.has_parameter(id)) {
            n->kind = Kind::Parameter;
            return n;
        }
        std::string valid;
        for (const auto& v : sig_.names()) valid += (valid.empty() ? "" : ", ") + v;
        throw ParseError("unknown identifier '" + std::string(id) + "'; valid names: " + valid, at);
    }

    std::string_view src_;
    const Signature& sig_;
    std::size_t pos_ = 0;
};

std::string format_literal(double v) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, end);
    return v < 0 ? "(" + s + ")" : s;
}

const char* function_name(Kind k) {
    switch (k) {
        case Kind::Sin: return "sin";
        case Kind::Cos: return "cos";
        case Kind::Exp: return "exp";
        case Kind::Log: return "log";
        case Kind::Sqrt: return "sqrt";
        default: return nullptr;
    }
}

char operator_symbol(Kind k) {
    switch (k) {
        case Kind::Add: return '+';
        case Kind::Sub: return '-';
        case Kind::Mul: return '*';
        case Kind::Div: return '/';
        case Kind::Pow: return '^';
        default: return '?';
    }
}

bool same_tree(const Expr::Node* a, const Expr::Node* b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case Kind::Literal: return a->literal == b->literal;
        case Kind::Variable: return a->variable == b->variable;
        case Kind::Parameter: return a->name == b->name;
        default: return same_tree(a->lhs.get(), b->lhs.get()) && same_tree(a->rhs.get(), b->rhs.get());
    }
}

}  // namespace

Expr parse(std::string_view source, const Signature& signature) {
    return Expr(Parser(source, signature).run(), signature.dimension());
}

Expr rebind(const Expr& e, int dimension, int slot) {
    if (e.empty()) return e;
    if (e.dimension() != 1) throw std::invalid_argument("rebind expects a univariate expression");
    if (slot < 0 || slot >= dimension) throw std::invalid_argument("rebind slot outside the chart");
    const std::string chart_name = dimension == 3 ? std::string(kChartAliases[slot]) : "x_" + std::to_string(slot + 1);
    std::function<NodePtr(const Expr::Node&)> copy = [&](const Expr::Node& n) {
        auto out = std::make_shared<Expr::Node>(n);
        if (n.kind == Kind::Variable) {
            out->variable = slot;
            out->name = chart_name;
        }
        if (n.lhs) out->lhs = copy(*n.lhs);
        if (n.rhs) out->rhs = copy(*n.rhs);
        return out;
    };
    return Expr(copy(e.root()), dimension);
}

std::string to_string(const Expr::Node& n) {
    switch (n.kind) {
        case Kind::Literal: return format_literal(n.literal);
        case Kind::Variable:
        case Kind::Parameter: return n.name;
        case Kind::Neg: return "(-" + to_string(*n.lhs) + ")";
        default: break;
    }
    if (const char* fn = function_name(n.kind)) return std::string(fn) + "(" + to_string(*n.lhs) + ")";
    return "(" + to_string(*n.lhs) + operator_symbol(n.kind) + to_string(*n.rhs) + ")";
}

std::string Expr::str() const { return root_ ? to_string(*root_) : std::string(); }

std::set<std::string> Expr::parameters() const {
    std::set<std::string> out;
    std::function<void(const Node*)> walk = [&](const Node* n) {
        if (!n) return;
        if (n->kind == Kind::Parameter) out.insert(n->name);
        walk(n->lhs.get());
        walk(n->rhs.get());
    };
    walk(root_.get());
    return out;
}

bool operator==(const Expr& a, const Expr& b) {
    return a.dimension_ == b.dimension_ && same_tree(a.root_.get(), b.root_.get());
}

namespace detail {

void domain_failure(const Expr::Node& node, const char* what) {
    throw DomainError(std::string(what) + " in '" + to_string(node) + "' at byte " + std::to_string(node.offset));
}

}  // namespace detail

}  // namespace divbound
