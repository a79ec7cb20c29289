#include <fmt/format.h>

#include <string>
#include <string_view>

#include "fracbs/error.hpp"
#include "fracbs/pricing.hpp"

namespace fracbs::pricing {

namespace {

// Tables are transcribed verbatim: rows follow s2 = 50, 80, 120, 180, 200 and
// columns s1 = 20, 40, 70, 100, 150.

constexpr std::string_view kEx1Table = R"([
  [42.193, 62.744, 93.569, 124.39, 175.77],
  [107.13, 127.68, 158.5, 189.33, 240.7],
  [193.7, 214.25, 245.08, 275.9, 327.28],
  [323.57, 344.12, 374.94, 405.77, 457.15],
  [366.86, 387.41, 418.23, 449.06, 500.43]])";

constexpr std::string_view kEx2Table = R"([
  [98.861, 96.764, 94.274, 96.115, 98.926],
  [43.341, 41.244, 38.754, 40.595, 43.406],
  [20.404, 18.307, 15.817, 17.658, 20.469],
  [57.17, 55.072, 52.583, 54.424, 57.235],
  [71.267, 69.17, 66.68, 68.521, 71.332]])";

constexpr std::string_view kEx3Table = R"([
  [40.648, 88.334, 142.39, 185.17, 242.47],
  [60.194, 107.88, 161.94, 204.71, 262.02],
  [78.847, 126.53, 180.59, 223.36, 280.67],
  [99.157, 146.84, 200.9, 243.67, 300.98],
  [104.71, 152.39, 206.45, 249.22, 306.53]])";

constexpr std::string_view kEx4Table = R"([
  [28.452, 46.868, 60.826, 68.965, 77.391],
  [31.964, 52.15, 67.538, 76.588, 86.049],
  [34.994, 56.708, 73.328, 83.164, 93.519],
  [38.025, 61.265, 79.119, 89.74, 100.99],
  [38.812, 62.45, 80.623, 91.449, 102.93]])";

constexpr std::string_view kEx5Table = R"([
  [50.18, 59.961, 69.412, 76.156, 84.502],
  [58.571, 68.353, 77.803, 84.548, 92.894],
  [66.592, 76.374, 85.824, 92.568, 100.91],
  [75.335, 85.117, 94.568, 101.31, 109.66],
  [77.725, 87.507, 96.958, 103.7, 112.05]])";

constexpr std::string_view kGrid = R"("grid": {"s1": [20, 40, 70, 100, 150], "s2": [50, 80, 120, 180, 200]})";

std::string ex1(std::string_view id, std::string_view coordinates, std::string_view notes) {
    return fmt::format(R"js({{
  "id": "{}",
  "title": "Two-stock call, exponential portfolio",
  "initial_condition": "max(exp(s1) + 2*exp(s2) - 80, 0)",
  "params": {{"sigma1": 0.40, "sigma2": 0.25, "r": 0.08, "rho": 0.75, "alpha": 0.005,
             "w1": 2, "w2": 2, "strike": 80}},
  "maturity_months": 8,
  "space_mode": "log",
  "coordinates": "{}",
  {},
  "published_table": {},
  "published_closed_form": "1.0512*exp(s1) + 2.1274*exp(s2) - 86.942",
  "table_kind": "call",
  "notes": "{}"
}})js",
                       id, coordinates, kGrid, kEx1Table, notes);
}

std::string scenario_json(std::string_view id) {
    if (id == "ex1-logprice") {
        return ex1(id, "logprice",
                   "s1, s2 in the initial condition are read as log-prices u, v; nodes map through "
                   "u = ln S1 - (r - sigma1^2/2)t. Declared w1 = 2 is not used by the initial condition.");
    }
    if (id == "ex1-literal") {
        return ex1(id, "identity",
                   "exp(s1) taken literally: grid values are substituted for the series variables. "
                   "Declared w1 = 2 is not used by the initial condition.");
    }
    if (id == "ex2") {
        return fmt::format(R"js({{
  "id": "ex2",
  "title": "Two-stock put, trigonometric payoff",
  "initial_condition": "max(60 - 3*sin(pi*s1) - 5*cos(pi*s2), 0)",
  "params": {{"sigma1": 0.45, "sigma2": 0.85, "r": 0.03, "rho": 0.65, "alpha": 0.755,
             "w1": 3, "w2": 5, "strike": 60}},
  "maturity_months": 2,
  "space_mode": "log",
  "coordinates": "identity",
  {},
  "published_table": {},
  "published_closed_form": "27.459*cos(3.1416*s2) - 2.0559*cos(3.1416*s1) - 1.4938*sin(3.1416*s1) - 32.852*sin(3.1416*s2) + 60.514",
  "table_kind": "put",
  "notes": "Labelled a put; the printed initial condition is used as is. Trigonometric terms are eigenfunctions of the log-space operator."
}})js",
                           kGrid, kEx2Table);
    }
    if (id == "ex3") {
        return fmt::format(R"js({{
  "id": "ex3",
  "title": "Two-stock call, polynomial payoff",
  "initial_condition": "max(2*s1^3 + 5*s2^2, 0)",
  "params": {{"sigma1": 0.40, "sigma2": 0.65, "r": 0.07, "rho": 0.85, "alpha": 0.125,
             "w1": 2, "w2": 5, "strike": 90}},
  "maturity_months": 2,
  "space_mode": "asset",
  "coordinates": "identity",
  {},
  "published_table": {},
  "published_closed_form": "2.1517*s1^3 + 5.3794*s2^2 - 99.777",
  "table_kind": "call",
  "notes": "The printed closed form evaluates to about 3.06e4 at (20, 50) against the table's 40.648."
}})js",
                           kGrid, kEx3Table);
    }
    if (id == "ex4") {
        return fmt::format(R"js({{
  "id": "ex4",
  "title": "Two-stock put, quadratic-logarithmic payoff",
  "initial_condition": "max(2*(x^2 + y^2) - ln(y) + ln(x), 0)",
  "params": {{"sigma1": 0.40, "sigma2": 0.20, "r": 0.08, "rho": 0.75, "alpha": 0.125,
             "w1": 1, "w2": 1, "strike": 0}},
  "maturity_months": 5,
  "space_mode": "asset",
  "coordinates": "identity",
  {},
  "published_table": {},
  "published_closed_form": "2.1735*x^2 - 1.0868*ln(y) - 1.0868*ln(x) + 0.073569/x^3 + 0.14482/x^6 + 1.2248/x^9 + 2.1735*y^2 + 0.047084/y^2 + 0.05932/y^6 + 0.32106/y^9 - 48.905",
  "table_kind": "put",
  "notes": "Exercise price printed as the expression 2(x^2 + y^2); strike is 0 and the initial condition is stored verbatim with x -> s1, y -> s2."
}})js",
                           kGrid, kEx4Table);
    }
    if (id == "ex5") {
        return fmt::format(R"js({{
  "id": "ex5",
  "title": "Two-stock call, mixed trigonometric payoff",
  "initial_condition": "max(-5*s1*sin(x) - 8*y + 5*x*y, 0)",
  "params": {{"sigma1": 0.40, "sigma2": 0.20, "r": 0.08, "rho": 0.75, "alpha": 0.125,
             "w1": 1, "w2": 1, "strike": 0}},
  "maturity_months": 5,
  "space_mode": "log",
  "coordinates": "identity",
  {},
  "published_table": {},
  "published_closed_form": "5.4338*x*y - 0.18377*cos(x) - 5.4278*sin(x) - 8.6942*y - 0.22071",
  "table_kind": "call",
  "notes": "Exercise price printed as 25xy; strike is 0. Log mode with s1, x -> u and y -> v: in asset mode the s1*sin(s1) term gains two powers of s1 per term and the truncated series does not converge on the grid."
}})js",
                           kGrid, kEx5Table);
    }
    throw ValidationError(fmt::format("unknown scenario '{}' (known: ex1, ex1-literal, ex1-logprice, ex2, ex3, ex4, ex5)", id));
}

}  // namespace

std::vector<std::string> builtin_ids() { return {"ex1-literal", "ex1-logprice", "ex2", "ex3", "ex4", "ex5"}; }

Scenario builtin_scenario(std::string_view id) {
    if (id == "ex1") id = "ex1-logprice";
    return scenario_from_json(scenario_json(id));
}

}  // namespace fracbs::pricing
