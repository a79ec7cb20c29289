#include <gtest/gtest.h>

#include <cmath>

#include "fracbs/error.hpp"
#include "fracbs/sumudu.hpp"

namespace su = fracbs::sumudu;

namespace {

su::SampledFunction power(int n) {
    su::SampledFunction f;
    f.f = [n](double t) { return std::pow(t, n); };
    f.derivative = [n](double t) { return n == 0 ? 0.0 : n * std::pow(t, n - 1); };
    f.growth_m = su::power_growth_constant(n, 0.05);
    f.growth_c = 0.05;
    return f;
}

}  // namespace

TEST(Sumudu, PowersMatchFactorial) {
    for (int n = 0; n <= 3; ++n) {
        for (double w : {0.1, 0.25, 0.5}) {
            const double expected = std::tgamma(n + 1.0) * std::pow(w, n);
            EXPECT_NEAR(su::sumudu_transform(power(n), w), expected, 1e-10) << n << " " << w;
        }
    }
}

TEST(Sumudu, Exponential) {
    su::SampledFunction f{[](double t) { return std::exp(0.3 * t); }, {}, 1.0, 0.3};
    for (double w : {0.1, 0.5, 2.0}) {
        EXPECT_NEAR(su::sumudu_transform(f, w), 1.0 / (1.0 - 0.3 * w), 1e-10);
    }
}

TEST(Sumudu, GrowthBoundEnforced) {
    su::SampledFunction f{[](double t) { return std::exp(t); }, {}, 1.0, 1.0};
    EXPECT_THROW(su::sumudu_transform(f, 1.0), fracbs::ValidationError);
    EXPECT_THROW(su::sumudu_transform(power(1), 0.0), fracbs::ValidationError);
}

TEST(Caputo, PowerRule) {
    for (double a : {0.3, 0.5, 0.8}) {
        for (int n = 1; n <= 3; ++n) {
            const double t = 1.7;
            const double expected = std::tgamma(n + 1.0) / std::tgamma(n + 1.0 - a) * std::pow(t, n - a);
            EXPECT_NEAR(su::caputo_derivative(power(n), a, t), expected, 1e-10 * (1.0 + expected));
        }
        EXPECT_NEAR(su::caputo_derivative(power(0), a, 1.0), 0.0, 1e-14);
    }
}

TEST(Caputo, NumericDerivativeFallback) {
    su::SampledFunction f{[](double t) { return t * t; }, {}, 1.0, 0.05};
    const double expected = 2.0 / std::tgamma(2.5) * std::pow(2.0, 1.5);
    EXPECT_NEAR(su::caputo_derivative(f, 0.5, 2.0), expected, 1e-7);
}

TEST(RiemannLiouville, PowerRule) {
    for (double a : {0.3, 0.5, 1.0, 1.5}) {
        for (int n = 0; n <= 3; ++n) {
            const double t = 0.9;
            const double expected = std::tgamma(n + 1.0) / std::tgamma(n + 1.0 + a) * std::pow(t, n + a);
            EXPECT_NEAR(su::riemann_liouville_integral(power(n), a, t), expected, 1e-11);
        }
    }
    EXPECT_EQ(su::riemann_liouville_integral(power(2), 0.5, 0.0), 0.0);
}

TEST(IdentitySuite, AllChecksPassWithinTolerance) {
    const auto checks = su::run_identity_suite();
    EXPECT_GE(checks.size(), 60u);
    for (const auto& c : checks) {
        EXPECT_TRUE(c.passed) << c.name << " deviation " << c.deviation;
        EXPECT_LE(c.tolerance, 1e-5) << c.name;
        EXPECT_LE(c.deviation, 1e-5) << c.name;
    }
}
