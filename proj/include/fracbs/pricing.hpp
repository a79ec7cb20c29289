#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fracbs/expr.hpp"
#include "fracbs/solver.hpp"

namespace fracbs::pricing {

/// How a grid node (S1, S2) becomes a point in solution coordinates.
///   LogPrice: log mode, (u, v) = to_log_space(S1, S2, t)
///   Identity: (S1, S2) used directly as the solution variables
enum class Coordinates { LogPrice, Identity };

std::string_view coordinates_name(Coordinates c) noexcept;
Coordinates coordinates_from_name(std::string_view name);

/// Row-major matrix; rows follow the s2 grid, columns the s1 grid.
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> data;

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

struct Scenario {
    std::string id;
    std::string title;
    std::string initial_condition;
    solver::ModelParams params;
    double maturity_months = 12.0;
    Coordinates coordinates = Coordinates::Identity;
    std::vector<double> s1_grid;
    std::vector<double> s2_grid;
    std::optional<Matrix> published_table;
    std::optional<std::string> published_closed_form;
    /// "call" or "put", as labelled on the source table.
    std::string table_kind = "call";
    std::string notes;

    /// Throws ValidationError with the offending field path.
    void validate() const;
    /// Stripped-max initial condition with variables renamed to the mode's.
    expr::Expr seed() const;
    /// Bounding box of the grid in solution coordinates over [0, maturity].
    solver::Box box() const;
    /// Solution coordinates of grid node (i over s2, j over s1) at time t.
    std::array<double, 2> node(std::size_t i, std::size_t j, double t) const;
};

/// Parses a scenario document; errors name the JSON field path.
Scenario scenario_from_json(std::string_view text);
std::string scenario_to_json(const Scenario& sc);

/// Built-in ids: ex1-literal, ex1-logprice, ex2 … ex5. "ex1" resolves to ex1-logprice.
std::vector<std::string> builtin_ids();
Scenario builtin_scenario(std::string_view id);

struct PriceTable {
    std::string scenario_id;
    std::vector<double> s1_grid;
    std::vector<double> s2_grid;
    Matrix price;
    double t = 0.0;
    std::size_t terms = 0;
    double tail_bound = 0.0;
};

/// Prices every grid node at t (the scenario maturity when absent).
PriceTable price_grid(const Scenario& sc, std::size_t N, std::optional<double> t = std::nullopt);

struct CellDeviation {
    double s1 = 0.0, s2 = 0.0;
    double computed = 0.0;
    double reference = 0.0;
    double abs_dev = 0.0;
    double rel_dev = 0.0;
};

struct DeviationSummary {
    std::vector<CellDeviation> cells;
    double max_abs = 0.0, mean_abs = 0.0;
    double max_rel = 0.0, mean_rel = 0.0;
};

struct ClosedFormCheck {
    std::string closed_form;
    DeviationSummary versus_table;
    /// Set when the closed form and its own table disagree by more than 1e-2 relative.
    bool inconsistent = false;
};

constexpr double kInconsistencyThreshold = 1e-2;

struct ReconciliationReport {
    std::string scenario_id;
    DeviationSummary versus_table;
    std::optional<DeviationSummary> versus_closed_form;
    std::optional<ClosedFormCheck> internal;
};

/// Compares computed prices against the published table and closed form. Only
/// a dimension mismatch throws; disagreement is reported.
ReconciliationReport reconcile(const PriceTable& pt, const Scenario& sc);

std::string report_to_json(const ReconciliationReport& r, const PriceTable& pt);

}  // namespace fracbs::pricing
