#include <gtest/gtest.h>

#include <array>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <boost/numeric/odeint.hpp>

#include "fracbs/error.hpp"
#include "fracbs/expr.hpp"
#include "fracbs/solver.hpp"
#include "fracbs/specfun.hpp"

using namespace fracbs;
using expr::Var;
using solver::ModelParams;
using solver::SpaceMode;

namespace {

ModelParams example1(double alpha = 0.5, SpaceMode mode = SpaceMode::Log) {
    ModelParams p;
    p.sigma1 = 0.40;
    p.sigma2 = 0.25;
    p.r = 0.08;
    p.rho = 0.75;
    p.alpha = alpha;
    p.w1 = 2.0;
    p.w2 = 2.0;
    p.strike = 80.0;
    p.maturity = 1.0;
    p.space_mode = mode;
    return p;
}

const solver::Box kUnitBox{-1.0, 1.0, -1.0, 1.0};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(LogSpace, Examples) {
    auto p = example1();
    auto [u0, v0] = solver::to_log_space(1.0, 1.0, 0.0, p);
    EXPECT_EQ(u0, 0.0);
    EXPECT_EQ(v0, 0.0);
    for (double t : {0.0, 0.3, 2.0}) {
        EXPECT_NEAR(solver::to_log_space(std::exp(1.0), 1.0, t, p).first, 1.0, 1e-15);
    }
    EXPECT_NEAR(solver::to_log_space(100.0, 1.0, 0.5, p).first, 4.6051702, 1e-7);
    EXPECT_THROW(solver::to_log_space(0.0, 1.0, 0.0, p), DomainError);
}

TEST(LogSpace, RoundTrip) {
    auto p = example1();
    for (double s1 : {0.5, 20.0, 150.0}) {
        for (double t : {0.0, 0.7}) {
            auto [u, v] = solver::to_log_space(s1, 80.0, t, p);
            auto [a, b] = solver::from_log_space(u, v, t, p);
            EXPECT_NEAR(a, s1, 1e-12 * s1);
            EXPECT_NEAR(b, 80.0, 1e-12 * 80.0);
        }
    }
}

TEST(ModelParams, Validation) {
    auto p = example1();
    EXPECT_NO_THROW(p.validate());
    p.alpha = 1.5;
    EXPECT_THROW(p.validate(), ValidationError);
    p = example1();
    p.rho = -1.2;
    EXPECT_THROW(p.validate(), ValidationError);
    p = example1();
    p.sigma2 = -0.1;
    EXPECT_THROW(p.validate(), ValidationError);
    p = example1();
    p.maturity = 0.0;
    EXPECT_THROW(p.validate(), ValidationError);
    p = example1();
    p.strike = -1.0;
    EXPECT_THROW(p.validate(), ValidationError);
}

TEST(SpatialOperator, ConstantInLogMode) {
    auto p = example1();
    auto Lg = solver::spatial_operator(expr::num(7.0), p);
    ASSERT_TRUE(Lg.is_constant());
    EXPECT_NEAR(Lg.value(), -0.08 * 7.0, 1e-15);
}

TEST(SpatialOperator, ExponentialInLogMode) {
    auto p = example1();
    const double a = 0.7, b = -0.3;
    auto g = expr::parse_expr("exp(0.7*u - 0.3*v)");
    auto Lg = solver::spatial_operator(g, p);
    const double coeff = 0.5 * 0.16 * a * a + 0.5 * 0.0625 * b * b + 0.75 * 0.4 * 0.25 * a * b - 0.08;
    for (double u : {-0.5, 0.2}) {
        for (double v : {-0.1, 0.9}) {
            expr::Bindings env{{Var::u, u}, {Var::v, v}};
            EXPECT_NEAR(expr::eval_expr(Lg, env), coeff * expr::eval_expr(g, env), 1e-14);
        }
    }
}

TEST(SpatialOperator, CubeInAssetMode) {
    auto p = example1(0.5, SpaceMode::Asset);
    p.r = 0.07;
    auto Lg = solver::spatial_operator(expr::parse_expr("s1^3"), p);
    ASSERT_EQ(Lg.kind(), expr::Kind::Mul) << expr::to_string(Lg);
    ASSERT_EQ(Lg.args().size(), 2u);
    ASSERT_TRUE(Lg.arg(0).is_constant());
    EXPECT_NEAR(Lg.arg(0).value(), 0.62, 1e-15);
    EXPECT_EQ(Lg.arg(1), expr::simplify(expr::parse_expr("s1^3")));
    expr::Bindings env{{Var::s1, 1.3}, {Var::s2, 2.0}};
    EXPECT_NEAR(expr::eval_expr(Lg, env), 0.62 * std::pow(1.3, 3), 1e-13);
}

TEST(SpatialOperator, RejectsWrongVariables) {
    EXPECT_THROW(solver::spatial_operator(expr::parse_expr("s1 + u"), example1()), ValidationError);
    EXPECT_THROW(solver::spatial_operator(expr::parse_expr("u*v"), example1(0.5, SpaceMode::Asset)),
                 ValidationError);
    EXPECT_THROW(solver::spatial_operator(expr::parse_expr_raw("max(u, 0)"), example1()), ValidationError);
}

TEST(NextTerm, Examples) {
    auto p = example1();
    auto g1 = solver::next_term(expr::num(-80.0), p);
    ASSERT_TRUE(g1.is_constant());
    EXPECT_NEAR(g1.value(), -6.4, 1e-14);

    EXPECT_TRUE(solver::next_term(expr::parse_expr("exp(u)"), p).is_constant(0.0));

    ModelParams null_op = p;
    null_op.sigma1 = null_op.sigma2 = null_op.r = 0.0;
    EXPECT_TRUE(solver::next_term(expr::parse_expr("u^3*sin(v) + exp(u*v)"), null_op).is_constant(0.0));
}

TEST(BuildSeries, NullOperator) {
    auto p = example1();
    p.sigma1 = p.sigma2 = p.r = 0.0;
    auto g0 = expr::parse_expr("u^2 + cos(v)");
    auto s = solver::build_series(g0, p, 5, kUnitBox);
    ASSERT_EQ(s.terms().size(), 6u);
    EXPECT_EQ(s.terms()[0], g0);
    for (std::size_t n = 1; n <= 5; ++n) EXPECT_TRUE(s.terms()[n].is_constant(0.0));
    EXPECT_EQ(s.truncation().tail, 0.0);
}

TEST(BuildSeries, ConstantPayoff) {
    auto s = solver::build_series(expr::num(-80.0), example1(), 3, kUnitBox);
    const double expected[] = {-80.0, -6.4, -0.512, -0.04096};
    for (std::size_t n = 0; n <= 3; ++n) {
        ASSERT_TRUE(s.terms()[n].is_constant());
        EXPECT_NEAR(s.terms()[n].value(), expected[n], 1e-14);
    }
}

TEST(BuildSeries, SharedEigenvalue) {
    auto p = example1();
    p.sigma1 = p.sigma2 = 0.2;
    p.r = 0.1;
    auto s = solver::build_series(expr::parse_expr("exp(u) + exp(v)"), p, 2, kUnitBox);
    for (std::size_t n = 1; n <= 2; ++n) {
        auto expected = expr::simplify(expr::num(std::pow(0.08, n)) * expr::parse_expr("exp(u) + exp(v)"));
        for (double u : {-0.4, 0.6}) {
            expr::Bindings env{{Var::u, u}, {Var::v, 0.3}};
            EXPECT_NEAR(expr::eval_expr(s.terms()[n], env), expr::eval_expr(expected, env), 1e-15);
        }
    }
}

TEST(BuildSeries, RejectsBadInput) {
    EXPECT_THROW(solver::build_series(expr::num(1.0), example1(), 0, kUnitBox), ValidationError);
    EXPECT_THROW(solver::build_series(expr::parse_expr_raw("max(u, 1)"), example1(), 3, kUnitBox),
                 ValidationError);
    EXPECT_THROW(solver::build_series(expr::num(1.0), example1(), 3, solver::Box{1.0, 0.0, 0.0, 1.0}),
                 ValidationError);
}

TEST(BuildSeries, GrowthGuard) {
    auto g0 = expr::parse_expr("exp(sin(u)*cos(v))");
    EXPECT_THROW(solver::build_series(g0, example1(), 30, kUnitBox), NumericalError);
}

TEST(EvalSeries, TimeZeroIsSeed) {
    auto g0 = expr::parse_expr("exp(0.5*u) + u*v^2 - 3");
    auto s = solver::build_series(g0, example1(), 10, kUnitBox);
    expr::Bindings env{{Var::u, 0.3}, {Var::v, -0.7}};
    EXPECT_EQ(solver::eval_series(s, {0.3, -0.7}, 0.0), expr::eval_expr(g0, env));
}

TEST(EvalSeries, ZeroEigenvalue) {
    auto s = solver::build_series(expr::parse_expr("exp(u)"), example1(0.3), 10, kUnitBox);
    for (double t : {0.1, 1.0, 5.0}) EXPECT_NEAR(solver::eval_series(s, {0.4, 0.0}, t), std::exp(0.4), 1e-15);
}

TEST(EvalSeries, ClassicalLimit) {
    auto p = example1(1.0);
    auto s = solver::build_series(expr::num(100.0), p, 25, kUnitBox);
    const double value = solver::eval_series(s, {0.0, 0.0}, 1.0);
    EXPECT_NEAR(value, 108.328707, 1e-6);
    EXPECT_NEAR(value, 100.0 * std::exp(0.08), 1e-12);
}

TEST(EvalSeries, LinearAssetPayoffIsStructurallyConstant) {
    auto p = example1(0.7, SpaceMode::Asset);
    const double K = 80.0;
    auto s = solver::build_series(expr::parse_expr("2*s1 + 2*s2 - 80"), p, 8, solver::Box{1, 200, 1, 200});
    for (std::size_t n = 1; n < s.terms().size(); ++n) {
        const auto& g = s.terms()[n];
        ASSERT_TRUE(g.is_constant()) << expr::to_string(g);
        EXPECT_NEAR(g.value(), -K * std::pow(p.r, n), 1e-15 * K);
    }
    EXPECT_TRUE(solver::spatial_operator(expr::parse_expr("s1"), p).is_constant(0.0));
    EXPECT_TRUE(solver::spatial_operator(expr::parse_expr("s2"), p).is_constant(0.0));
}

TEST(EvalSeries, EigenfunctionIdentity) {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> coord(-1.0, 1.0), time(0.0, 1.0);
    const double coeffs[] = {0.0, 0.5, -0.5, 1.0};
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (double alpha : {0.25, 0.5, 0.75, 1.0}) {
        auto p = example1(alpha);
        for (double a : coeffs) {
            for (double b : coeffs) {
                auto g0 = expr::simplify(expr::exp(expr::num(a) * expr::var(Var::u) + expr::num(b) * expr::var(Var::v)));
                auto s = solver::build_series(g0, p, 40, kUnitBox);
                const double lambda = p.r - 0.5 * p.sigma1 * p.sigma1 * a * a - 0.5 * p.sigma2 * p.sigma2 * b * b -
                                      p.rho * p.sigma1 * p.sigma2 * a * b;
                for (int k = 0; k < 50; ++k) {
                    const double u = coord(rng), v = coord(rng), t = time(rng);
                    const double exact =
                        std::exp(a * u + b * v) * specfun::mittag_leffler(alpha, lambda * std::pow(t, alpha)).value;
                    worst = std::max(worst, rel(solver::eval_series(s, {u, v}, t), exact));
                }
            }
        }
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_LE(worst, 1e-9);
    EXPECT_LE(seconds, 5.0);
}

TEST(EvalSeries, Linearity) {
    auto p = example1(0.6);
    auto f = expr::parse_expr("exp(0.5*u)*cos(v) + u^2");
    auto g = expr::parse_expr("sin(u - v) + 3*v");
    const double a = 2.5, b = -1.25;
    auto sf = solver::build_series(f, p, 20, kUnitBox);
    auto sg = solver::build_series(g, p, 20, kUnitBox);
    auto sh = solver::build_series(expr::simplify(expr::num(a) * f + expr::num(b) * g), p, 20, kUnitBox);
    for (double u : {-0.8, 0.1, 0.9}) {
        for (double t : {0.2, 1.0}) {
            const double lhs = solver::eval_series(sh, {u, 0.4}, t);
            const double rhs = a * solver::eval_series(sf, {u, 0.4}, t) + b * solver::eval_series(sg, {u, 0.4}, t);
            EXPECT_LE(std::abs(lhs - rhs), 1e-10 * std::max(1.0, std::abs(rhs)));
        }
    }
}

TEST(EvalSeries, ContinuityAtTimeZero) {
    auto p = example1(0.5);
    auto g0 = expr::parse_expr("exp(0.5*u + 0.3*v) + u*v");
    auto s = solver::build_series(g0, p, 15, kUnitBox);
    const std::array<double, 2> pt{0.3, -0.2};
    expr::Bindings env{{Var::u, pt[0]}, {Var::v, pt[1]}};
    const double g0v = expr::eval_expr(g0, env);
    const double g1v = std::abs(expr::eval_expr(s.terms()[1], env));
    for (double t : {1e-2, 1e-4, 1e-6, 1e-8}) {
        const double bound = 2.0 * g1v * std::pow(t, p.alpha) / std::tgamma(1.0 + p.alpha);
        EXPECT_LE(std::abs(solver::eval_series(s, pt, t) - g0v), bound) << t;
    }
}

TEST(EvalSeries, ClassicalLimitMatchesOdeOnEigenAtoms) {
    // c = A cos(πu)cos(πv) + B sin(πu)sin(πv) + C e^{u/2} stays in this span
    // under L; at α = 1 the coefficients obey a linear ODE.
    auto p = example1(1.0);
    const double pi = std::numbers::pi;
    const double d = 0.5 * p.sigma1 * p.sigma1 * pi * pi + 0.5 * p.sigma2 * p.sigma2 * pi * pi + p.r;
    const double k = p.rho * p.sigma1 * p.sigma2 * pi * pi;
    const double c = p.r - 0.125 * p.sigma1 * p.sigma1;
    using State = std::array<double, 3>;
    auto rhs = [&](const State& x, State& dx, double) {
        dx[0] = d * x[0] - k * x[1];
        dx[1] = d * x[1] - k * x[0];
        dx[2] = c * x[2];
    };
    State x{2.0, -1.0, 3.0};
    namespace ode = boost::numeric::odeint;
    ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_fehlberg78<State>>(1e-15, 1e-15), rhs, x, 0.0, 1.0,
                            1e-3);

    auto g0 = expr::parse_expr("2*cos(pi*u)*cos(pi*v) - sin(pi*u)*sin(pi*v) + 3*exp(0.5*u)");
    auto s = solver::build_series(g0, p, 40, kUnitBox);
    for (double u : {-0.7, 0.15, 0.5}) {
        for (double v : {-0.3, 0.8}) {
            const double ode_value = x[0] * std::cos(pi * u) * std::cos(pi * v) +
                                     x[1] * std::sin(pi * u) * std::sin(pi * v) + x[2] * std::exp(0.5 * u);
            EXPECT_LE(std::abs(solver::eval_series(s, {u, v}, 1.0) - ode_value), 1e-8 * std::max(1.0, std::abs(ode_value)));
        }
    }
}

TEST(Truncation, ConstantPayoffTail) {
    auto p = example1(1.0);
    const std::size_t N = 6;
    auto s = solver::build_series(expr::num(-80.0), p, N, kUnitBox);
    const double t = 0.75;
    const double expected = 80.0 * std::pow(p.r * t, N) / std::tgamma(N + 1.0);
    EXPECT_NEAR(solver::truncation_estimate(s, t), expected, 1e-15 * 80.0);
    EXPECT_EQ(solver::truncation_estimate(s, 0.0), 0.0);
    EXPECT_NEAR(s.truncation().tail, 80.0 * std::pow(p.r, N) / std::tgamma(N + 1.0), 1e-15 * 80.0);
}

TEST(Truncation, BoundsLastContribution) {
    auto p = example1(0.5);
    auto s = solver::build_series(expr::parse_expr("exp(0.5*u)*sin(v) + v^2"), p, 12, kUnitBox);
    const double t = 0.8;
    const double bound = solver::truncation_estimate(s, t);
    const auto w = solver::series_weights(p.alpha, 12, t);
    for (double u : {-1.0, 0.0, 1.0}) {
        for (double v : {-1.0, 0.5, 1.0}) {
            expr::Bindings env{{Var::u, u}, {Var::v, v}};
            EXPECT_LE(std::abs(expr::eval_expr(s.terms()[12], env)) * w[12], bound * (1.0 + 1e-12));
        }
    }
}

TEST(SeriesWeights, MatchGamma) {
    const auto w1 = solver::series_weights(1.0, 10, 0.5);
    for (std::size_t n = 0; n <= 10; ++n) EXPECT_NEAR(w1[n], std::pow(0.5, n) / std::tgamma(n + 1.0), 1e-17);
    const auto w = solver::series_weights(0.3, 10, 2.0);
    for (std::size_t n = 0; n <= 10; ++n) {
        EXPECT_LE(rel(w[n], std::pow(2.0, 0.3 * n) / std::tgamma(1.0 + 0.3 * n)), 1e-13);
    }
    EXPECT_EQ(solver::series_weights(0.5, 3, 0.0)[0], 1.0);
    EXPECT_EQ(solver::series_weights(0.5, 3, 0.0)[2], 0.0);
}
