#include "divbound/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "divbound/errors.hpp"

namespace divbound {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string unquote(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return std::string(s);
}

double to_number(std::string_view text, const std::string& what) {
    text = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) throw ScenarioError("bad number '" + std::string(text) + "' for " + what);
    return v;
}

int to_count(std::string_view text, const std::string& what) {
    text = trim(text);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || v < 1)
        throw ScenarioError("grid count for " + what + " must be an integer >= 1, got '" + std::string(text) + "'");
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<std::string> param_names(const ParamSet& params) {
    std::vector<std::string> out;
    for (const auto& [name, value] : params) out.push_back(name);
    return out;
}

int axis_index(const Scenario& s, std::string_view axis) {
    const auto slot = Signature::chart(s.dimension).variable(axis);
    if (!slot) throw ScenarioError("unknown grid axis '" + std::string(axis) + "' for dimension " + std::to_string(s.dimension));
    return *slot;
}

GridAxis parse_axis(std::string_view text, const std::string& what) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ScenarioError("grid axis " + what + " needs min:max:count");
    GridAxis a{to_number(parts[0], what), to_number(parts[1], what), to_count(parts[2], what)};
    if (a.max < a.min) throw ScenarioError("grid axis " + what + " has max < min");
    return a;
}

std::string upper_triangle_key(int i, int j) { return "g" + std::to_string(i + 1) + std::to_string(j + 1); }

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

std::vector<double> GridAxis::values() const {
    std::vector<double> out;
    if (count <= 1) return {min};
    for (int i = 0; i < count; ++i) out.push_back(min + (max - min) * i / (count - 1));
    return out;
}

Signature Scenario::signature() const { return Signature::chart(dimension, param_names(params)); }

MetricField Scenario::metric_field() const {
    const Signature sig = signature();
    std::vector<Expr> upper;
    for (const auto& src : metric) upper.push_back(parse(src, sig));
    return MetricField(dimension, std::move(upper), params);
}

Expr Scenario::f_expr() const { return parse(f, signature()); }

PTensorSpec Scenario::spec() const {
    return PTensorSpec{parse(lambda, Signature::univariate("f", param_names(params))), f_expr(), metric_field()};
}

std::optional<WarpedSpec> Scenario::warped() const {
    if (warped_phi.empty() || warped_psi.empty()) return std::nullopt;
    return WarpedSpec::from_source(warped_phi, warped_psi, lambda, params);
}

std::vector<std::vector<double>> Scenario::points() const {
    std::vector<std::vector<double>> axes;
    for (int a = 0; a < dimension; ++a) axes.push_back(a < static_cast<int>(grid.size()) ? grid[a].values() : std::vector<double>{0.0});
    std::vector<std::vector<double>> out{{}};
    for (const auto& axis : axes) {
        std::vector<std::vector<double>> next;
        for (const auto& prefix : out)
            for (double v : axis) {
                auto p = prefix;
                p.push_back(v);
                next.push_back(std::move(p));
            }
        out = std::move(next);
    }
    return out;
}

void Scenario::validate() const {
    if (dimension < 3 || dimension > 4) throw ScenarioError("dimension must be 3 or 4");
    if (static_cast<int>(metric.size()) != dimension * (dimension + 1) / 2) throw ScenarioError("metric needs n(n+1)/2 entries");
    if (f.empty()) throw ScenarioError("scenario '" + name + "' has no f");
    for (const auto& axis : grid)
        if (axis.count < 1) throw ScenarioError("grid counts must be >= 1");
    (void)spec();
    if (!warped_phi.empty() || !warped_psi.empty()) {
        if (dimension != 3) throw ScenarioError("warped scenarios are three-dimensional");
        (void)warped();
    }
}

Scenario euclidean_scenario() {
    Scenario s;
    s.name = "euclidean";
    s.metric = {"1", "0", "0", "1", "0", "1"};
    s.f = "(r^2 + x1^2 + x2^2)/2";
    s.grid = {{-1.0, 1.0, 3}, {-1.0, 1.0, 3}, {-1.0, 1.0, 3}};
    return s;
}

Scenario round_sphere_static_scenario() {
    Scenario s;
    s.name = "round-sphere-static";
    s.metric = {"1", "0", "0", "sin(r)^2", "0", "sin(r)^2*sin(x1)^2"};
    s.f = "cos(r)";
    s.is_static = true;
    s.grid = {{0.4, 2.7, 3}, {0.4, 2.7, 3}, {0.0, 3.0, 3}};
    return s;
}

Scenario warped_canonical_scenario(double k, double c) {
    Scenario s;
    s.name = "warped-canonical";
    s.metric = {"1", "0", "0", "((r+c)^(-1/k))^2", "0", "((r+c)^(-1/k))^2"};
    s.f = "x1";
    s.params = {{"k", k}, {"c", c}};
    s.grid = {{0.0, 1.0, 3}, {-1.0, 1.0, 3}, {-1.0, 1.0, 3}};
    s.warped_phi = "(r+c)^(-1/k)";
    s.warped_psi = "x1";
    return s;
}

Scenario random_curved_scenario(std::uint64_t seed, int dimension) {
    if (dimension < 3 || dimension > 4) throw ScenarioError("random-curved supports dimension 3 or 4");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto coef = [&] { return std::round(u(rng) * 1000.0) / 1000.0; };
    const int n = dimension;
    const auto var = [n](int i) { return "x_" + std::to_string(i + 1); };
    const auto term = [](double c, const std::string& mono) {
        return std::string(" + ") + (c < 0 ? "(" + format_double(c) + ")" : format_double(c)) + (mono.empty() ? "" : "*" + mono);
    };

    std::vector<std::string> perturbation;
    std::vector<double> bound;  // sup over the box of each perturbation entry
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double b = 0.0;
            std::string p;
            const double a = coef();
            p += term(a, "");
            b += std::abs(a);
            for (int k = 0; k < n; ++k) {
                const double c = coef();
                p += term(c, var(k));
                b += std::abs(c);
            }
            for (int k = 0; k < n; ++k)
                for (int l = k; l < n; ++l) {
                    const double c = coef();
                    p += term(c, var(k) + "*" + var(l));
                    b += std::abs(c);
                }
            perturbation.push_back(p.substr(3));
            bound.push_back(b);
        }
    double gershgorin = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) {
            const int a = std::min(i, j), b = std::max(i, j);
            row += bound[a * n - a * (a - 1) / 2 + (b - a)];
        }
        gershgorin = std::max(gershgorin, row);
    }
    const double eps = 0.5 / gershgorin;

    Scenario s;
    s.name = "random-curved:" + std::to_string(seed) + (n == 3 ? "" : ":" + std::to_string(n));
    s.dimension = n;
    s.params = {{"eps", eps}};
    std::size_t next = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) s.metric.push_back((i == j ? "1 + eps*(" : "eps*(") + perturbation[next++] + ")");

    std::string f;
    for (int k = 0; k < n; ++k) f += term(coef(), var(k));
    for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l) f += term(coef(), var(k) + "*" + var(l));
    for (int k = 0; k < n; ++k) f += term(coef(), var(k) + "*" + var((k + 1) % n) + "*" + var((k + 2) % n));
    f += term(coef(), "sin(" + var(0) + " + " + var(n - 1) + ")");
    s.f = f.substr(3);
    const double la = coef(), lb = coef();
    s.lambda = "1" + term(0.5 * la, "f") + term(0.25 * lb, "f^2");

    std::vector<double> centre(n);
    for (auto& c : centre) c = 0.5 * coef();
    for (int a = 0; a < n; ++a) s.grid.push_back({centre[a] - 0.25, centre[a] + 0.25, 2});
    return s;
}

std::vector<std::string> builtin_scenario_names() {
    return {"euclidean", "round-sphere-static", "warped-canonical", "random-curved"};
}

Scenario resolve_scenario(std::string_view name, std::uint64_t seed, int dimension) {
    if (name == "euclidean") return euclidean_scenario();
    if (name == "round-sphere-static") return round_sphere_static_scenario();
    if (name == "warped-canonical") return warped_canonical_scenario();
    if (name == "random-curved") return random_curved_scenario(seed, dimension);
    if (name.starts_with("random-curved:")) {
        const auto parts = split(name.substr(14), ':');
        std::uint64_t s = 0;
        const auto [ptr, ec] = std::from_chars(parts[0].data(), parts[0].data() + parts[0].size(), s);
        if (ec != std::errc() || ptr != parts[0].data() + parts[0].size()) throw ScenarioError("bad seed in '" + std::string(name) + "'");
        const int dim = parts.size() > 1 ? to_count(parts[1], "dimension") : dimension;
        return random_curved_scenario(s, dim);
    }
    std::ifstream probe{std::string(name)};
    if (!probe) {
        std::string known;
        for (const auto& n : builtin_scenario_names()) known += (known.empty() ? "" : ", ") + n;
        throw ScenarioError("unknown scenario '" + std::string(name) + "' (not a built-in and not a readable file); built-ins: " + known);
    }
    return load_scenario_file(std::string(name));
}

Scenario parse_scenario(std::string_view text) {
    Scenario s;
    s.name = "file";
    std::vector<std::pair<std::string, std::string>> metric_entries, grid_entries;
    std::vector<std::size_t> metric_offsets;
    std::string section;
    std::size_t offset = 0;
    for (std::string_view raw : split(text, '\n')) {
        const std::size_t line_offset = offset;
        offset += raw.size() + 1;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError("unterminated section header", line_offset);
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section != "metric" && section != "grid") throw ParseError("unknown section '" + section + "'", line_offset);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected key = value", line_offset);
        const std::string key(trim(line.substr(0, eq)));
        const std::string value = unquote(line.substr(eq + 1));
        if (key.empty()) throw ParseError("empty key", line_offset);
        try {
            if (section == "metric") {
                metric_entries.emplace_back(key, value);
                metric_offsets.push_back(line_offset);
            } else if (section == "grid") {
                grid_entries.emplace_back(key, value);
            } else if (key == "name") {
                s.name = value;
            } else if (key == "dimension") {
                s.dimension = to_count(value, "dimension");
            } else if (key == "f") {
                s.f = value;
            } else if (key == "lambda") {
                s.lambda = value;
            } else if (key == "static") {
                if (value != "true" && value != "false") throw ScenarioError("static must be true or false");
                s.is_static = value == "true";
            } else if (key == "warped.phi") {
                s.warped_phi = value;
            } else if (key == "warped.psi") {
                s.warped_psi = value;
            } else if (key.starts_with("param.")) {
                s.params[key.substr(6)] = to_number(value, key);
            } else {
                throw ScenarioError("unknown key '" + key + "'");
            }
        } catch (const ScenarioError& e) {
            throw ParseError(e.what(), line_offset);
        }
    }
    if (s.dimension < 3 || s.dimension > 4) throw ScenarioError("dimension must be 3 or 4");

    const int n = s.dimension;
    std::vector<std::string> full(static_cast<std::size_t>(n * n));
    for (std::size_t e = 0; e < metric_entries.size(); ++e) {
        std::string key = metric_entries[e].first;
        key.erase(std::remove(key.begin(), key.end(), '_'), key.end());
        if (key.size() != 3 || key[0] != 'g' || key[1] < '1' || key[2] < '1' || key[1] - '1' >= n || key[2] - '1' >= n)
            throw ParseError("metric key '" + metric_entries[e].first + "' is not g<i><j> with indices 1.." + std::to_string(n), metric_offsets[e]);
        const int i = key[1] - '1', j = key[2] - '1';
        if (!full[i * n + j].empty()) throw ParseError("metric entry " + metric_entries[e].first + " given twice", metric_offsets[e]);
        full[i * n + j] = full[j * n + i] = metric_entries[e].second;
    }
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            std::string entry = full[i * n + j];
            if (entry.empty()) {
                if (i == j) throw ScenarioError("metric entry " + upper_triangle_key(i, j) + " is missing");
                entry = "0";
            }
            s.metric.push_back(entry);
        }
    s.grid.assign(n, GridAxis{});
    for (const auto& [axis, value] : grid_entries) s.grid[axis_index(s, axis)] = parse_axis(value, axis);
    s.validate();
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError("cannot read scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

void set_param(Scenario& s, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw ScenarioError("--param expects name=value, got '" + std::string(assignment) + "'");
    const std::string name(trim(assignment.substr(0, eq)));
    if (name.empty()) throw ScenarioError("--param has an empty name");
    s.params[name] = to_number(assignment.substr(eq + 1), name);
}

void set_grid(Scenario& s, std::string_view spec) {
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) throw ScenarioError("--grid expects axis:min:max:count, got '" + std::string(spec) + "'");
    const std::string axis(trim(spec.substr(0, colon)));
    const int a = axis_index(s, axis);
    if (static_cast<int>(s.grid.size()) < s.dimension) s.grid.resize(s.dimension);
    s.grid[a] = parse_axis(spec.substr(colon + 1), axis);
}

}  // namespace divbound
