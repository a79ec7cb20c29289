#include "fracbs/pricing.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "fracbs/error.hpp"

namespace fracbs::pricing {

using expr::Expr;
using expr::Var;
using json = nlohmann::json;

std::string_view coordinates_name(Coordinates c) noexcept {
    return c == Coordinates::LogPrice ? "logprice" : "identity";
}

Coordinates coordinates_from_name(std::string_view name) {
    if (name == "logprice") return Coordinates::LogPrice;
    if (name == "identity") return Coordinates::Identity;
    throw ValidationError(fmt::format("unknown coordinates '{}' (expected 'logprice' or 'identity')", name));
}

namespace {

[[noreturn]] void field_error(std::string_view path, std::string_view message) {
    throw ValidationError(fmt::format("{}: {}", path, message));
}

const json& require(const json& j, std::string_view key, std::string_view path) {
    if (!j.is_object()) field_error(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) field_error(fmt::format("{}{}{}", path, path.empty() ? "" : ".", key), "missing field");
    return *it;
}

std::string join(std::string_view path, std::string_view key) {
    return path.empty() ? std::string(key) : fmt::format("{}.{}", path, key);
}

double number(const json& j, std::string_view key, std::string_view path) {
    const json& v = require(j, key, path);
    if (!v.is_number()) field_error(join(path, key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) field_error(join(path, key), "expected a finite number");
    return x;
}

double number_or(const json& j, std::string_view key, std::string_view path, double fallback) {
    return j.contains(key) ? number(j, key, path) : fallback;
}

std::string text(const json& j, std::string_view key, std::string_view path) {
    const json& v = require(j, key, path);
    if (!v.is_string()) field_error(join(path, key), "expected a string");
    return v.get<std::string>();
}

std::vector<double> number_list(const json& v, std::string_view path) {
    if (!v.is_array() || v.empty()) field_error(path, "expected a non-empty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) field_error(fmt::format("{}[{}]", path, i), "expected a number");
        out.push_back(v[i].get<double>());
    }
    return out;
}

Expr rename(Expr e, std::initializer_list<std::pair<Var, Var>> map) {
    for (auto [from, to] : map) e = expr::substitute(e, from, expr::var(to));
    return expr::simplify(e);
}

std::string field_of(std::string_view message) {
    if (message.starts_with("sigma1") || message.starts_with("sigma2") || message.starts_with("|rho|") ||
        message.starts_with("alpha") || message.starts_with("strike") || message.starts_with("r ") ||
        message.starts_with("w1") || message.starts_with("w2")) {
        return "params";
    }
    if (message.starts_with("maturity")) return "maturity_months";
    return "params";
}

}  // namespace

void Scenario::validate() const {
    if (id.empty()) field_error("id", "must not be empty");
    try {
        params.validate();
    } catch (const ValidationError& e) {
        field_error(field_of(e.what()), e.what());
    }
    if (!(maturity_months > 0.0)) field_error("maturity_months", "must be > 0");
    auto check_grid = [](const std::vector<double>& g, std::string_view path) {
        if (g.empty()) field_error(path, "must not be empty");
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (!std::isfinite(g[k])) field_error(fmt::format("{}[{}]", path, k), "must be finite");
            if (k > 0 && !(g[k] > g[k - 1])) field_error(path, "must be strictly increasing");
        }
    };
    check_grid(s1_grid, "grid.s1");
    check_grid(s2_grid, "grid.s2");
    if (coordinates == Coordinates::LogPrice) {
        if (params.space_mode != solver::SpaceMode::Log) field_error("coordinates", "logprice needs space_mode 'log'");
        if (s1_grid.front() <= 0.0) field_error("grid.s1", "log-price coordinates need positive prices");
        if (s2_grid.front() <= 0.0) field_error("grid.s2", "log-price coordinates need positive prices");
    }
    if (published_table) {
        if (published_table->rows != s2_grid.size() || published_table->cols != s1_grid.size()) {
            field_error("published_table",
                        fmt::format("is {}x{} but the grid needs {} rows (s2) by {} columns (s1)", published_table->rows,
                                    published_table->cols, s2_grid.size(), s1_grid.size()));
        }
    }
    try {
        (void)seed();
    } catch (const ParseError& e) {
        field_error("initial_condition", e.what());
    }
    if (published_closed_form) {
        try {
            (void)expr::parse_expr(*published_closed_form);
        } catch (const ParseError& e) {
            field_error("published_closed_form", e.what());
        }
    }
}

Expr Scenario::seed() const {
    Expr ic = expr::parse_expr(initial_condition);
    try {
        ic = expr::strip_max(ic);
    } catch (const ValidationError& e) {
        field_error("initial_condition", e.what());
    }
    if (params.space_mode == solver::SpaceMode::Log) {
        return rename(ic, {{Var::s1, Var::u}, {Var::x, Var::u}, {Var::s2, Var::v}, {Var::y, Var::v}});
    }
    if (ic.depends_on(Var::u) || ic.depends_on(Var::v)) {
        field_error("initial_condition", "asset mode does not accept the log variables u, v");
    }
    return rename(ic, {{Var::x, Var::s1}, {Var::y, Var::s2}});
}

solver::Box Scenario::box() const {
    const double a0 = s1_grid.front(), a1 = s1_grid.back();
    const double b0 = s2_grid.front(), b1 = s2_grid.back();
    if (coordinates == Coordinates::Identity) return {a0, a1, b0, b1};
    solver::Box box{INFINITY, -INFINITY, INFINITY, -INFINITY};
    for (double t : {0.0, params.maturity}) {
        for (auto [s1, s2] : {std::pair{a0, b0}, std::pair{a1, b1}}) {
            const auto [u, v] = solver::to_log_space(s1, s2, t, params);
            box.x0 = std::min(box.x0, u);
            box.x1 = std::max(box.x1, u);
            box.y0 = std::min(box.y0, v);
            box.y1 = std::max(box.y1, v);
        }
    }
    return box;
}

std::array<double, 2> Scenario::node(std::size_t i, std::size_t j, double t) const {
    const double s1 = s1_grid.at(j), s2 = s2_grid.at(i);
    if (coordinates == Coordinates::Identity) return {s1, s2};
    const auto [u, v] = solver::to_log_space(s1, s2, t, params);
    return {u, v};
}

Scenario scenario_from_json(std::string_view text_in) {
    json j;
    try {
        j = json::parse(text_in);
    } catch (const json::parse_error& e) {
        throw ValidationError(fmt::format("scenario is not valid JSON: {}", e.what()));
    }
    if (!j.is_object()) field_error("$", "expected a JSON object");

    Scenario sc;
    sc.id = text(j, "id", "");
    if (j.contains("title")) sc.title = text(j, "title", "");
    sc.initial_condition = text(j, "initial_condition", "");

    const json& p = require(j, "params", "");
    sc.params.sigma1 = number(p, "sigma1", "params");
    sc.params.sigma2 = number(p, "sigma2", "params");
    sc.params.r = number(p, "r", "params");
    sc.params.rho = number(p, "rho", "params");
    sc.params.alpha = number(p, "alpha", "params");
    sc.params.w1 = number_or(p, "w1", "params", 1.0);
    sc.params.w2 = number_or(p, "w2", "params", 1.0);
    sc.params.strike = number_or(p, "strike", "params", 0.0);

    sc.maturity_months = number(j, "maturity_months", "");
    sc.params.maturity = sc.maturity_months / 12.0;
    try {
        sc.params.space_mode = solver::mode_from_name(text(j, "space_mode", ""));
    } catch (const ValidationError& e) {
        if (std::string_view(e.what()).starts_with("space_mode")) throw;
        field_error("space_mode", e.what());
    }
    if (j.contains("coordinates")) {
        try {
            sc.coordinates = coordinates_from_name(text(j, "coordinates", ""));
        } catch (const ValidationError& e) {
            if (std::string_view(e.what()).starts_with("coordinates")) throw;
            field_error("coordinates", e.what());
        }
    }

    const json& grid = require(j, "grid", "");
    sc.s1_grid = number_list(require(grid, "s1", "grid"), "grid.s1");
    sc.s2_grid = number_list(require(grid, "s2", "grid"), "grid.s2");

    if (j.contains("published_table") && !j["published_table"].is_null()) {
        const json& t = j["published_table"];
        if (!t.is_array() || t.empty()) field_error("published_table", "expected an array of rows");
        Matrix m;
        m.rows = t.size();
        for (std::size_t i = 0; i < t.size(); ++i) {
            auto row = number_list(t[i], fmt::format("published_table[{}]", i));
            if (i == 0) m.cols = row.size();
            if (row.size() != m.cols) field_error(fmt::format("published_table[{}]", i), "row length differs");
            m.data.insert(m.data.end(), row.begin(), row.end());
        }
        sc.published_table = std::move(m);
    }
    if (j.contains("published_closed_form") && !j["published_closed_form"].is_null()) {
        sc.published_closed_form = text(j, "published_closed_form", "");
    }
    if (j.contains("table_kind")) {
        sc.table_kind = text(j, "table_kind", "");
        if (sc.table_kind != "call" && sc.table_kind != "put") field_error("table_kind", "expected 'call' or 'put'");
    }
    if (j.contains("notes")) sc.notes = text(j, "notes", "");
    sc.validate();
    return sc;
}

std::string scenario_to_json(const Scenario& sc) {
    json j;
    j["id"] = sc.id;
    j["title"] = sc.title;
    j["initial_condition"] = sc.initial_condition;
    j["params"] = {{"sigma1", sc.params.sigma1}, {"sigma2", sc.params.sigma2}, {"r", sc.params.r},
                   {"rho", sc.params.rho},       {"alpha", sc.params.alpha},   {"w1", sc.params.w1},
                   {"w2", sc.params.w2},         {"strike", sc.params.strike}};
    j["maturity_months"] = sc.maturity_months;
    j["space_mode"] = std::string(solver::mode_name(sc.params.space_mode));
    j["coordinates"] = std::string(coordinates_name(sc.coordinates));
    j["grid"] = {{"s1", sc.s1_grid}, {"s2", sc.s2_grid}};
    if (sc.published_table) {
        json rows = json::array();
        for (std::size_t i = 0; i < sc.published_table->rows; ++i) {
            json row = json::array();
            for (std::size_t k = 0; k < sc.published_table->cols; ++k) row.push_back((*sc.published_table)(i, k));
            rows.push_back(row);
        }
        j["published_table"] = rows;
    }
    if (sc.published_closed_form) j["published_closed_form"] = *sc.published_closed_form;
    j["table_kind"] = sc.table_kind;
    j["notes"] = sc.notes;
    return j.dump(2);
}

PriceTable price_grid(const Scenario& sc, std::size_t N, std::optional<double> t_opt) {
    sc.validate();
    const double t = t_opt.value_or(sc.params.maturity);
    if (!(t >= 0.0) || t > sc.params.maturity) {
        throw ValidationError(fmt::format("evaluation time {} must lie in [0, {}]", t, sc.params.maturity));
    }
    const solver::SeriesSolution series = solver::build_series(sc.seed(), sc.params, N, sc.box());

    const std::size_t rows = sc.s2_grid.size(), cols = sc.s1_grid.size();
    std::vector<double> xs(rows * cols), ys(rows * cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            const auto pt = sc.node(i, j, t);
            xs[i * cols + j] = pt[0];
            ys[i * cols + j] = pt[1];
        }
    }
    PriceTable table;
    table.scenario_id = sc.id;
    table.s1_grid = sc.s1_grid;
    table.s2_grid = sc.s2_grid;
    table.price = {rows, cols, std::vector<double>(rows * cols)};
    try {
        series.evaluate(xs, ys, t, table.price.data);
    } catch (const DomainError& e) {
        throw DomainError(fmt::format("scenario {}: {}", sc.id, e.what()));
    }
    table.t = t;
    table.terms = N;
    table.tail_bound = solver::truncation_estimate(series, t);
    return table;
}

namespace {

DeviationSummary compare(const PriceTable& pt, const Matrix& reference) {
    DeviationSummary s;
    const std::size_t n = reference.data.size();
    for (std::size_t i = 0; i < reference.rows; ++i) {
        for (std::size_t j = 0; j < reference.cols; ++j) {
            CellDeviation c;
            c.s1 = pt.s1_grid[j];
            c.s2 = pt.s2_grid[i];
            c.computed = pt.price(i, j);
            c.reference = reference(i, j);
            c.abs_dev = std::abs(c.computed - c.reference);
            c.rel_dev = c.reference != 0.0 ? c.abs_dev / std::abs(c.reference) : c.abs_dev;
            s.max_abs = std::max(s.max_abs, c.abs_dev);
            s.max_rel = std::max(s.max_rel, c.rel_dev);
            s.mean_abs += c.abs_dev / static_cast<double>(n);
            s.mean_rel += c.rel_dev / static_cast<double>(n);
            s.cells.push_back(c);
        }
    }
    return s;
}

Matrix evaluate_closed_form(const std::string& text, const PriceTable& pt) {
    const Expr cf = expr::parse_expr(text);
    Matrix m{pt.s2_grid.size(), pt.s1_grid.size(), {}};
    m.data.resize(m.rows * m.cols);
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            const double a = pt.s1_grid[j], b = pt.s2_grid[i];
            expr::Bindings env{{Var::s1, a}, {Var::x, a}, {Var::u, a}, {Var::s2, b}, {Var::y, b}, {Var::v, b}};
            m(i, j) = expr::eval_expr(cf, env);
        }
    }
    return m;
}

}  // namespace

ReconciliationReport reconcile(const PriceTable& pt, const Scenario& sc) {
    if (!sc.published_table) throw ValidationError(fmt::format("scenario {} has no published table", sc.id));
    const Matrix& table = *sc.published_table;
    if (pt.price.rows != table.rows || pt.price.cols != table.cols || pt.s1_grid.size() != table.cols ||
        pt.s2_grid.size() != table.rows) {
        throw ValidationError(fmt::format("price table is {}x{} but the published table is {}x{}", pt.price.rows,
                                          pt.price.cols, table.rows, table.cols));
    }
    ReconciliationReport r;
    r.scenario_id = sc.id;
    r.versus_table = compare(pt, table);
    if (sc.published_closed_form) {
        const Matrix cf = evaluate_closed_form(*sc.published_closed_form, pt);
        r.versus_closed_form = compare(pt, cf);
        PriceTable as_table = pt;
        as_table.price = cf;
        ClosedFormCheck check;
        check.closed_form = *sc.published_closed_form;
        check.versus_table = compare(as_table, table);
        check.inconsistent = check.versus_table.max_rel > kInconsistencyThreshold;
        r.internal = std::move(check);
    }
    return r;
}

namespace {

json summary_json(const DeviationSummary& s) {
    json cells = json::array();
    for (const auto& c : s.cells) {
        cells.push_back({{"s1", c.s1},
                         {"s2", c.s2},
                         {"computed", c.computed},
                         {"reference", c.reference},
                         {"abs_dev", c.abs_dev},
                         {"rel_dev", c.rel_dev}});
    }
    return {{"max_abs", s.max_abs}, {"mean_abs", s.mean_abs}, {"max_rel", s.max_rel},
            {"mean_rel", s.mean_rel}, {"cells", cells}};
}

}  // namespace

std::string report_to_json(const ReconciliationReport& r, const PriceTable& pt) {
    json j;
    j["scenario"] = r.scenario_id;
    j["t"] = pt.t;
    j["terms"] = pt.terms;
    j["tail_bound"] = pt.tail_bound;
    j["versus_published_table"] = summary_json(r.versus_table);
    if (r.versus_closed_form) j["versus_published_closed_form"] = summary_json(*r.versus_closed_form);
    if (r.internal) {
        j["closed_form_vs_table"] = summary_json(r.internal->versus_table);
        j["closed_form_vs_table"]["closed_form"] = r.internal->closed_form;
        j["closed_form_vs_table"]["inconsistent"] = r.internal->inconsistent;
        j["closed_form_vs_table"]["threshold_rel"] = kInconsistencyThreshold;
    }
    return j.dump(2);
}

}  // namespace fracbs::pricing
