#include "fracbs/cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "fracbs/error.hpp"
#include "fracbs/oracle.hpp"
#include "fracbs/pricing.hpp"
#include "fracbs/solver.hpp"
#include "fracbs/sumudu.hpp"

namespace fracbs::cli {

namespace {

using json = nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError(fmt::format("cannot read '{}'", path));
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << content;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError(fmt::format("cannot write '{}'", path));
    f << content;
    if (!f) throw ValidationError(fmt::format("failed writing '{}'", path));
}

std::string num(double v, int precision) { return fmt::format("{:.{}g}", v, precision); }

std::string table_csv(const pricing::PriceTable& t, const RunConfig& cfg) {
    std::string s;
    if (cfg.matrix) {
        s += "s2\\s1";
        for (double a : t.s1_grid) s += "," + num(a, cfg.precision);
        s += "\n";
        for (std::size_t i = 0; i < t.s2_grid.size(); ++i) {
            s += num(t.s2_grid[i], cfg.precision);
            for (std::size_t j = 0; j < t.s1_grid.size(); ++j) s += "," + num(t.price(i, j), cfg.precision);
            s += "\n";
        }
        return s;
    }
    s += "s1,s2,price\n";
    for (std::size_t i = 0; i < t.s2_grid.size(); ++i) {
        for (std::size_t j = 0; j < t.s1_grid.size(); ++j) {
            s += fmt::format("{},{},{}\n", num(t.s1_grid[j], cfg.precision), num(t.s2_grid[i], cfg.precision),
                             num(t.price(i, j), cfg.precision));
        }
    }
    return s;
}

void print_summary(const pricing::Scenario& sc, const pricing::PriceTable& t,
                   const std::optional<pricing::ReconciliationReport>& r, std::ostream& err) {
    err << fmt::format("scenario {}: {} mode, {} coordinates, t = {:.6g} y, N = {}, tail bound {:.3g}\n", sc.id,
                       solver::mode_name(sc.params.space_mode), pricing::coordinates_name(sc.coordinates), t.t,
                       t.terms, t.tail_bound);
    if (!r) return;
    err << fmt::format("  vs published table: max abs {:.6g}, max rel {:.3g}, mean rel {:.3g}\n", r->versus_table.max_abs,
                       r->versus_table.max_rel, r->versus_table.mean_rel);
    if (r->versus_closed_form) {
        err << fmt::format("  vs published closed form: max rel {:.3g}\n", r->versus_closed_form->max_rel);
    }
    if (r->internal) {
        err << fmt::format("  closed form vs its own table: max rel {:.3g}{}\n", r->internal->versus_table.max_rel,
                           r->internal->inconsistent ? "  [INCONSISTENT]" : "");
    }
}

std::string default_report_path(const std::string& out) {
    if (out.empty() || out == "-") return {};
    std::filesystem::path p(out);
    p.replace_extension(".report.json");
    return p.string();
}

pricing::Scenario load_scenario(const RunConfig& cfg) {
    pricing::Scenario sc = cfg.config_path.empty() ? pricing::builtin_scenario(cfg.scenario_id)
                                                   : pricing::scenario_from_json(read_file(cfg.config_path));
    if (cfg.space_mode) {
        sc.params.space_mode = solver::mode_from_name(*cfg.space_mode);
        sc.validate();
    }
    return sc;
}

int run_pricing(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const pricing::Scenario sc = load_scenario(cfg);
    const pricing::PriceTable t = pricing::price_grid(sc, cfg.terms, cfg.time);
    write_output(cfg.output_path, table_csv(t, cfg), out);
    std::optional<pricing::ReconciliationReport> report;
    if (sc.published_table) {
        report = pricing::reconcile(t, sc);
        const std::string path = cfg.report_path.empty() ? default_report_path(cfg.output_path) : cfg.report_path;
        if (!path.empty()) write_output(path, pricing::report_to_json(*report, t) + "\n", out);
    }
    if (cfg.verbosity >= 0) print_summary(sc, t, report, err);
    return kOk;
}

int run_plot_data(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    pricing::Scenario sc = load_scenario(cfg);
    const std::size_t n = cfg.plot_points;
    if (n < 2) throw ValidationError("--points must be at least 2");
    auto refine = [n](const std::vector<double>& g) {
        std::vector<double> r(n);
        for (std::size_t k = 0; k < n; ++k) {
            r[k] = g.front() + (g.back() - g.front()) * static_cast<double>(k) / static_cast<double>(n - 1);
        }
        return r;
    };
    sc.s1_grid = refine(sc.s1_grid);
    sc.s2_grid = refine(sc.s2_grid);
    sc.published_table.reset();
    const pricing::PriceTable t = pricing::price_grid(sc, cfg.terms, cfg.time);
    std::string s = "# s1 s2 price\n";
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            s += fmt::format("{} {} {}\n", num(t.s1_grid[j], cfg.precision), num(t.s2_grid[i], cfg.precision),
                             num(t.price(i, j), cfg.precision));
        }
        s += "\n";
    }
    write_output(cfg.output_path, s, out);
    if (cfg.verbosity > 0) print_summary(sc, t, std::nullopt, err);
    return kOk;
}

double get_number(const json& j, const char* key, const std::string& path, std::optional<double> fallback = {}) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw ValidationError(fmt::format("{}{}: missing field", path, key));
    }
    if (!j[key].is_number()) throw ValidationError(fmt::format("{}{}: expected a number", path, key));
    return j[key].get<double>();
}

std::size_t get_count(const json& j, const char* key, const std::string& path, std::size_t fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_unsigned()) {
        throw ValidationError(fmt::format("{}{}: expected a non-negative integer", path, key));
    }
    return j[key].get<std::size_t>();
}

int run_oracle(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    json j;
    try {
        j = json::parse(read_file(cfg.config_path));
    } catch (const json::parse_error& e) {
        throw ValidationError(fmt::format("oracle config is not valid JSON: {}", e.what()));
    }
    if (!j.is_object() || !j.contains("params") || !j["params"].is_object()) {
        throw ValidationError("params: missing field");
    }
    const json& p = j["params"];
    solver::ModelParams mp;
    mp.sigma1 = get_number(p, "sigma1", "params.");
    mp.sigma2 = get_number(p, "sigma2", "params.");
    mp.r = get_number(p, "r", "params.");
    mp.rho = get_number(p, "rho", "params.");
    mp.alpha = get_number(p, "alpha", "params.");
    mp.space_mode = solver::SpaceMode::Log;
    if (j.contains("maturity_months")) {
        mp.maturity = get_number(j, "maturity_months", "") / 12.0;
    } else {
        mp.maturity = get_number(j, "maturity_years", "");
    }
    try {
        mp.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(fmt::format("params: {}", e.what()));
    }
    if (!j.contains("initial_condition") || !j["initial_condition"].is_string()) {
        throw ValidationError("initial_condition: expected a string");
    }
    expr::Expr ic;
    try {
        ic = expr::strip_max(expr::parse_expr(j["initial_condition"].get<std::string>()));
    } catch (const ValidationError& e) {
        throw ValidationError(fmt::format("initial_condition: {}", e.what()));
    }

    oracle::GridSpec spec;
    const json g = j.value("grid", json::object());
    spec.u0 = get_number(g, "u0", "grid.", -1.0);
    spec.u1 = get_number(g, "u1", "grid.", 1.0);
    spec.v0 = get_number(g, "v0", "grid.", -1.0);
    spec.v1 = get_number(g, "v1", "grid.", 1.0);
    spec.nu = get_count(g, "nu", "grid.", 31);
    spec.nv = get_count(g, "nv", "grid.", 31);
    spec.steps = get_count(g, "steps", "grid.", 200);
    spec.fully_implicit = g.value("fully_implicit", false);
    spec.cross_guard = g.value("cross_guard", false);
    spec.t_final = mp.maturity;
    const std::size_t terms = get_count(j.value("boundary", json::object()), "terms", "boundary.", 40);

    const solver::SeriesSolution series =
        solver::build_series(ic, mp, terms, {spec.u0, spec.u1, spec.v0, spec.v1});
    const oracle::OracleGrid grid = oracle::solve_fd(mp, ic, spec, oracle::series_boundary(series));

    std::string s = "u,v,value\n";
    for (std::size_t i = 0; i < grid.rows(); ++i) {
        for (std::size_t k = 0; k < grid.cols(); ++k) {
            s += fmt::format("{},{},{}\n", num(grid.u(i), cfg.precision), num(grid.v(k), cfg.precision),
                             num(grid.at(grid.M, i, k), cfg.precision));
        }
    }
    write_output(cfg.output_path, s, out);
    if (cfg.verbosity > 0) {
        err << fmt::format("oracle: {}x{} interior, {} steps, dt = {:.4g}, max residual {:.3g}\n", grid.nu, grid.nv,
                           grid.M, grid.dt, grid.max_residual);
    }
    return kOk;
}

int run_sumudu_check(const RunConfig& cfg, std::ostream& out) {
    const auto checks = sumudu::run_identity_suite();
    std::size_t failed = 0;
    std::string s = fmt::format("{:<52} {:>16} {:>16} {:>10} {:>8}  {}\n", "identity", "lhs", "rhs", "deviation",
                                "tol", "status");
    for (const auto& c : checks) {
        s += fmt::format("{:<52} {:>16.10g} {:>16.10g} {:>10.2e} {:>8.0e}  {}\n", c.name, c.lhs, c.rhs, c.deviation,
                         c.tolerance, c.passed ? "ok" : "FAIL");
        if (!c.passed) ++failed;
    }
    s += fmt::format("{} checks, {} failed\n", checks.size(), failed);
    write_output(cfg.output_path, s, out);
    return failed == 0 ? kOk : kNumerical;
}

}  // namespace

int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Two-asset time-fractional Black-Scholes pricing", "fracbs"};
    app.require_subcommand(1);
    app.fallthrough();
    bool quiet = false;
    app.add_flag("-v,--verbose", cfg.verbosity, "More diagnostics on stderr");
    app.add_flag("-q,--quiet", quiet, "No summary on stderr");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--terms,-N", cfg.terms, "Series terms beyond g0")->check(CLI::PositiveNumber);
        sub->add_option("--out,-o", cfg.output_path, "Output file (stdout when absent)");
        sub->add_option("--precision", cfg.precision, "Significant digits")->check(CLI::Range(1, 17));
        sub->add_option("--mode", cfg.space_mode, "Override the operator space: log or asset");
        sub->add_option("--time", cfg.time, "Evaluation time in years (default: maturity)");
    };

    auto* scenario = app.add_subcommand("scenario", "Price a built-in scenario and reconcile it");
    scenario->add_option("id", cfg.scenario_id, "ex1, ex1-literal, ex1-logprice, ex2 ... ex5")->required();
    add_common(scenario);
    scenario->add_option("--report", cfg.report_path, "Reconciliation report JSON path");
    scenario->add_flag("--matrix", cfg.matrix, "Matrix layout (rows s2, columns s1)");

    auto* price = app.add_subcommand("price", "Price a scenario from a JSON config");
    price->add_option("--config", cfg.config_path, "Scenario JSON")->required();
    add_common(price);
    price->add_option("--report", cfg.report_path, "Reconciliation report JSON path");
    price->add_flag("--matrix", cfg.matrix, "Matrix layout (rows s2, columns s1)");

    auto* orc = app.add_subcommand("oracle", "Run the finite-difference solver from a JSON config");
    orc->add_option("--config", cfg.config_path, "Oracle JSON")->required();
    orc->add_option("--out,-o", cfg.output_path, "Output file (stdout when absent)");
    orc->add_option("--precision", cfg.precision, "Significant digits")->check(CLI::Range(1, 17));

    auto* sumudu_check = app.add_subcommand("sumudu-check", "Run the transform identity suite");
    sumudu_check->add_option("--out,-o", cfg.output_path, "Output file (stdout when absent)");

    auto* plot = app.add_subcommand("plot-data", "Emit s1 s2 price triples on a refined grid");
    plot->add_option("id", cfg.scenario_id, "Built-in scenario id");
    plot->add_option("--config", cfg.config_path, "Scenario JSON instead of a built-in id");
    plot->add_option("--points", cfg.plot_points, "Nodes per axis");
    add_common(plot);

    std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    }
    if (quiet) cfg.verbosity = -1;

    try {
        if (scenario->parsed()) {
            cfg.command = "scenario";
            return run_pricing(cfg, out, err);
        }
        if (price->parsed()) {
            cfg.command = "price";
            return run_pricing(cfg, out, err);
        }
        if (orc->parsed()) {
            cfg.command = "oracle";
            return run_oracle(cfg, out, err);
        }
        if (sumudu_check->parsed()) {
            cfg.command = "sumudu-check";
            return run_sumudu_check(cfg, out);
        }
        if (plot->parsed()) {
            cfg.command = "plot-data";
            if (cfg.scenario_id.empty() == cfg.config_path.empty()) {
                throw ValidationError("plot-data needs exactly one of a scenario id or --config");
            }
            return run_plot_data(cfg, out, err);
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kNumerical;
    }
    err << "error: no command\n";
    return kValidation;
}

int run_cli(const std::vector<std::string>& argv) { return run_cli(argv, std::cout, std::cerr); }

}  // namespace fracbs::cli
