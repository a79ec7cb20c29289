#include "fracbs/solver.hpp"

#include <cmath>
#include <fmt/format.h>

#include "fracbs/error.hpp"
#include "fracbs/kernels.hpp"
#include "fracbs/specfun.hpp"

namespace fracbs::solver {

using expr::Expr;
using expr::Var;

std::string_view mode_name(SpaceMode m) noexcept { return m == SpaceMode::Log ? "log" : "asset"; }

SpaceMode mode_from_name(std::string_view name) {
    if (name == "log") return SpaceMode::Log;
    if (name == "asset") return SpaceMode::Asset;
    throw ValidationError(fmt::format("unknown space mode '{}' (expected 'log' or 'asset')", name));
}

std::array<Var, 2> mode_variables(SpaceMode m) noexcept {
    return m == SpaceMode::Log ? std::array{Var::u, Var::v} : std::array{Var::s1, Var::s2};
}

void ModelParams::validate() const {
    auto finite = [](double x, const char* name) {
        if (!std::isfinite(x)) throw ValidationError(fmt::format("{} must be finite", name));
    };
    finite(sigma1, "sigma1");
    finite(sigma2, "sigma2");
    finite(r, "r");
    finite(rho, "rho");
    finite(alpha, "alpha");
    finite(w1, "w1");
    finite(w2, "w2");
    finite(strike, "strike");
    finite(maturity, "maturity");
    if (sigma1 < 0.0) throw ValidationError(fmt::format("sigma1 must be >= 0, got {}", sigma1));
    if (sigma2 < 0.0) throw ValidationError(fmt::format("sigma2 must be >= 0, got {}", sigma2));
    if (std::abs(rho) > 1.0) throw ValidationError(fmt::format("|rho| must be <= 1, got {}", rho));
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw ValidationError(fmt::format("alpha must satisfy 0 < alpha <= 1, got {}", alpha));
    }
    if (!(maturity > 0.0)) throw ValidationError(fmt::format("maturity must be > 0, got {}", maturity));
    if (strike < 0.0) throw ValidationError(fmt::format("strike must be >= 0, got {}", strike));
}

std::pair<double, double> to_log_space(double s1, double s2, double t, const ModelParams& p) {
    if (!(s1 > 0.0) || !(s2 > 0.0)) {
        throw DomainError(fmt::format("log-price map needs positive prices, got ({}, {})", s1, s2));
    }
    return {std::log(s1) - (p.r - 0.5 * p.sigma1 * p.sigma1) * t,
            std::log(s2) - (p.r - 0.5 * p.sigma2 * p.sigma2) * t};
}

std::pair<double, double> from_log_space(double u, double v, double t, const ModelParams& p) {
    return {std::exp(u + (p.r - 0.5 * p.sigma1 * p.sigma1) * t),
            std::exp(v + (p.r - 0.5 * p.sigma2 * p.sigma2) * t)};
}

namespace {

void check_variables(const Expr& g, SpaceMode mode) {
    const auto [a, b] = mode_variables(mode);
    const unsigned allowed = (1u << static_cast<unsigned>(a)) | (1u << static_cast<unsigned>(b));
    const unsigned extra = g.var_mask() & ~allowed;
    if (extra == 0) return;
    for (std::size_t i = 0; i < expr::kVarCount; ++i) {
        if ((extra >> i) & 1u) {
            throw ValidationError(fmt::format("variable '{}' is not allowed in {} mode (expected {} and {})",
                                              expr::var_name(static_cast<Var>(i)), mode_name(mode),
                                              expr::var_name(a), expr::var_name(b)));
        }
    }
}

}  // namespace

Expr spatial_operator(const Expr& g, const ModelParams& p) {
    if (g.contains_max()) throw ValidationError("spatial operator needs a max-free expression");
    check_variables(g, p.space_mode);
    const auto [a, b] = mode_variables(p.space_mode);
    const Expr ga = expr::differentiate(g, a);
    const Expr gb = expr::differentiate(g, b);
    const Expr gaa = expr::differentiate(ga, a);
    const Expr gbb = expr::differentiate(gb, b);
    const Expr gab = expr::differentiate(ga, b);
    const double c1 = 0.5 * p.sigma1 * p.sigma1;
    const double c2 = 0.5 * p.sigma2 * p.sigma2;
    const double c12 = p.rho * p.sigma1 * p.sigma2;
    using expr::num;
    if (p.space_mode == SpaceMode::Log) {
        return expr::simplify(num(c1) * gaa + num(c2) * gbb + num(c12) * gab - num(p.r) * g);
    }
    const Expr x = expr::var(a), y = expr::var(b);
    return expr::simplify(num(c1) * x * x * gaa + num(c2) * y * y * gbb + num(c12) * x * y * gab +
                          num(p.r) * x * ga + num(p.r) * y * gb - num(p.r) * g);
}

Expr next_term(const Expr& g_n, const ModelParams& p) { return expr::simplify(-spatial_operator(g_n, p)); }

std::vector<double> series_weights(double alpha, std::size_t N, double t) {
    if (t < 0.0) throw ValidationError("series time must be >= 0");
    std::vector<double> w(N + 1, 0.0);
    w[0] = 1.0;
    if (t == 0.0) return w;
    const double log_t = std::log(t);
    for (std::size_t n = 1; n <= N; ++n) {
        const double nd = static_cast<double>(n);
        if (alpha == 1.0) {
            w[n] = w[n - 1] * t / nd;
        } else {
            w[n] = std::exp(nd * alpha * log_t - std::lgamma(1.0 + nd * alpha));
        }
    }
    return w;
}

namespace {

double sup_on_box(const expr::Program& prog, SpaceMode mode, const Box& box) {
    constexpr std::size_t n = kSupSamples;
    std::vector<double> xs(n * n), ys(n * n), out(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double fx = static_cast<double>(i) / static_cast<double>(n - 1);
            const double fy = static_cast<double>(j) / static_cast<double>(n - 1);
            xs[i * n + j] = box.x0 + fx * (box.x1 - box.x0);
            ys[i * n + j] = box.y0 + fy * (box.y1 - box.y0);
        }
    }
    expr::Columns cols;
    const auto [a, b] = mode_variables(mode);
    cols[static_cast<std::size_t>(a)] = xs;
    cols[static_cast<std::size_t>(b)] = ys;
    prog.evaluate(cols, out);
    return kernels::max_abs(out);
}

}  // namespace

SeriesSolution build_series(const Expr& g0, const ModelParams& p, std::size_t N, const Box& box,
                            const SeriesOptions& options) {
    p.validate();
    if (N < 1) throw ValidationError("series needs at least one term beyond g0 (N >= 1)");
    if (!(box.x0 <= box.x1 && box.y0 <= box.y1) || !std::isfinite(box.x0) || !std::isfinite(box.x1) ||
        !std::isfinite(box.y0) || !std::isfinite(box.y1)) {
        throw ValidationError("series box must be bounded and ordered");
    }
    if (g0.contains_max()) throw ValidationError("series seed must be max-free; strip max first");
    check_variables(g0, p.space_mode);

    SeriesSolution s;
    s.alpha_ = p.alpha;
    s.maturity_ = p.maturity;
    s.mode_ = p.space_mode;
    s.terms_.reserve(N + 1);
    s.terms_.push_back(expr::simplify(g0));
    for (std::size_t n = 1; n <= N; ++n) {
        Expr next = next_term(s.terms_.back(), p);
        if (n == 1 && options.source) {
            check_variables(*options.source, p.space_mode);
            next = expr::simplify(*options.source + next);
        }
        if (next.node_count() > kMaxTermNodes) {
            throw NumericalError(fmt::format("series term g_{} has {} nodes, above the limit of {}", n,
                                             next.node_count(), kMaxTermNodes));
        }
        s.terms_.push_back(std::move(next));
    }
    for (const Expr& g : s.terms_) s.programs_.push_back(std::make_shared<const expr::Program>(g));

    s.meta_.terms = N;
    s.meta_.box = box;
    s.meta_.sup_last = sup_on_box(*s.programs_.back(), p.space_mode, box);
    s.meta_.tail = s.meta_.sup_last * series_weights(p.alpha, N, p.maturity)[N];
    return s;
}

void SeriesSolution::evaluate(std::span<const double> x, std::span<const double> y, double t,
                              std::span<double> out) const {
    if (x.size() != out.size() || y.size() != out.size()) throw ValidationError("coordinate sizes differ");
    const std::vector<double> w = series_weights(alpha_, terms_.size() - 1, t);
    const std::size_t n = out.size();
    expr::Columns cols;
    const auto [a, b] = variables();
    cols[static_cast<std::size_t>(a)] = x;
    cols[static_cast<std::size_t>(b)] = y;

    std::vector<double> term(n), comp(n, 0.0);
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t k = 0; k < terms_.size(); ++k) {
        if (w[k] == 0.0) continue;
        programs_[k]->evaluate(cols, term);
        kernels::compensated_axpy(w[k], term, out, comp);
    }
    kernels::add(out, comp, out);
    if (!kernels::all_finite(out)) throw DomainError("series value is not finite");
}

double eval_series(const SeriesSolution& s, std::array<double, 2> point, double t) {
    double out = 0.0;
    s.evaluate(std::span(&point[0], 1), std::span(&point[1], 1), t, std::span(&out, 1));
    return out;
}

double truncation_estimate(const SeriesSolution& s, double t) {
    const auto& m = s.truncation();
    if (m.sup_last == 0.0) return 0.0;
    return m.sup_last * series_weights(s.alpha(), m.terms, t)[m.terms];
}

}  // namespace fracbs::solver
