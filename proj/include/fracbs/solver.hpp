#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fracbs/expr.hpp"
#include "fracbs/program.hpp"

namespace fracbs::solver {

enum class SpaceMode { Log, Asset };

std::string_view mode_name(SpaceMode m) noexcept;
/// "log" or "asset"; throws ValidationError otherwise.
SpaceMode mode_from_name(std::string_view name);

/// Solution variables of a mode: (u, v) in log mode, (s1, s2) in asset mode.
std::array<expr::Var, 2> mode_variables(SpaceMode m) noexcept;

struct ModelParams {
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    double r = 0.0;
    double rho = 0.0;
    double alpha = 1.0;
    double w1 = 1.0;
    double w2 = 1.0;
    double strike = 0.0;
    /// Years.
    double maturity = 1.0;
    SpaceMode space_mode = SpaceMode::Log;

    /// Throws ValidationError naming the violated invariant.
    void validate() const;
};

/// u = ln s1 - (r - σ₁²/2)t, v = ln s2 - (r - σ₂²/2)t.
std::pair<double, double> to_log_space(double s1, double s2, double t, const ModelParams& p);
std::pair<double, double> from_log_space(double u, double v, double t, const ModelParams& p);

/// Log mode:   L g = (σ₁²/2)g_uu + (σ₂²/2)g_vv + ρσ₁σ₂g_uv - r g
/// Asset mode: L g = (σ₁²/2)s1²g_s1s1 + (σ₂²/2)s2²g_s2s2 + ρσ₁σ₂s1s2g_s1s2
///                 + r s1 g_s1 + r s2 g_s2 - r g
/// Throws ValidationError if g uses variables outside the mode.
expr::Expr spatial_operator(const expr::Expr& g, const ModelParams& p);

/// simplify(-L g_n).
expr::Expr next_term(const expr::Expr& g_n, const ModelParams& p);

/// Closed rectangle in solution coordinates.
struct Box {
    double x0 = 0.0, x1 = 0.0;
    double y0 = 0.0, y1 = 0.0;
};

constexpr std::size_t kDefaultTerms = 25;
constexpr std::size_t kMaxTermNodes = 20'000;
constexpr std::size_t kSupSamples = 33;

struct TruncationMeta {
    std::size_t terms = 0;
    Box box;
    /// Largest |g_N| over the kSupSamples² sample of box.
    double sup_last = 0.0;
    /// sup_last · T^{Nα}/Γ(1+Nα) at the declared maturity.
    double tail = 0.0;
};

struct SeriesOptions {
    /// Constant-in-time source f: g₁ = f - L g₀. Extension point; unvalidated.
    std::optional<expr::Expr> source;
};

class SeriesSolution {
public:
    double alpha() const noexcept { return alpha_; }
    SpaceMode space_mode() const noexcept { return mode_; }
    std::array<expr::Var, 2> variables() const noexcept { return mode_variables(mode_); }
    const std::vector<expr::Expr>& terms() const noexcept { return terms_; }
    const TruncationMeta& truncation() const noexcept { return meta_; }
    double maturity() const noexcept { return maturity_; }

    /// Σ eval(g_n)·t^{nα}/Γ(1+nα) at each (x[k], y[k]) in solution coordinates.
    void evaluate(std::span<const double> x, std::span<const double> y, double t, std::span<double> out) const;

private:
    friend SeriesSolution build_series(const expr::Expr&, const ModelParams&, std::size_t, const Box&,
                                       const SeriesOptions&);
    double alpha_ = 1.0;
    double maturity_ = 0.0;
    SpaceMode mode_ = SpaceMode::Log;
    std::vector<expr::Expr> terms_;
    std::vector<std::shared_ptr<const expr::Program>> programs_;
    TruncationMeta meta_;
};

/// Terms g₀ … g_N. Throws NumericalError if a term exceeds kMaxTermNodes.
SeriesSolution build_series(const expr::Expr& g0, const ModelParams& p, std::size_t N, const Box& box,
                            const SeriesOptions& options = {});

/// t^{nα}/Γ(1+nα) for n = 0 … N.
std::vector<double> series_weights(double alpha, std::size_t N, double t);

double eval_series(const SeriesSolution& s, std::array<double, 2> point, double t);

/// |g_N|_box · t^{Nα}/Γ(1+Nα).
double truncation_estimate(const SeriesSolution& s, double t);

}  // namespace fracbs::solver
