#include "fracbs/sumudu.hpp"

#include <boost/math/differentiation/finite_difference.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numbers>

#include "fracbs/error.hpp"
#include "fracbs/specfun.hpp"

namespace fracbs::sumudu {

namespace {

using Quad = boost::math::quadrature::gauss_kronrod<double, 15>;

constexpr double kAbsoluteTarget = 1e-9;
constexpr double kBaseHorizon = 40.0;
constexpr unsigned kMaxDepth = 20;

double checked(double v, double err, double target, const char* what) {
    if (!std::isfinite(v)) throw NumericalError(std::string(what) + ": integrand is not finite");
    if (err > target * std::max(1.0, std::abs(v))) {
        throw NumericalError(fmt::format("{}: quadrature did not converge (error estimate {:.3g})", what, err));
    }
    return v;
}

template <class F>
double integrate(F&& f, double a, double b, double target, const char* what) {
    double err = 0.0;
    const double v = Quad::integrate(f, a, b, kMaxDepth, 1e-13, &err);
    return checked(v, err, target, what);
}

// Double-exponential rule for integrands with an algebraic endpoint singularity.
template <class F>
double integrate_endpoint(F&& f, double a, double b, double target, const char* what) {
    thread_local boost::math::quadrature::tanh_sinh<double> rule;
    double err = 0.0, l1 = 0.0;
    const double v = rule.integrate([&f](double x) { return f(x); }, a, b, 1e-13, &err, &l1);
    return checked(v, err, target, what);
}

double derivative_at(const SampledFunction& f, double t) {
    if (f.derivative) return f.derivative(t);
    // One-sided near 0 so f is never sampled at negative time.
    if (t < 1e-3) {
        const double h = 1e-5;
        return (-3.0 * f(t) + 4.0 * f(t + h) - f(t + 2.0 * h)) / (2.0 * h);
    }
    return boost::math::differentiation::finite_difference_derivative<decltype(f.f), double, 6>(f.f, t);
}

}  // namespace

double power_growth_constant(double p, double delta) {
    if (p <= 0.0) return 1.0;
    return std::pow(p / (std::numbers::e * delta), p);
}

double sumudu_transform(const SampledFunction& f, double w) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ValidationError("sumudu_transform requires w > 0");
    const double decay = 1.0 - f.growth_c * w;
    if (!(decay > 0.0)) {
        throw ValidationError(fmt::format("growth bound violated: c*w = {} must be < 1", f.growth_c * w));
    }
    auto integrand = [&](double t) { return f(w * t) * std::exp(-t); };

    // Extend past the base horizon until the declared bound makes the
    // remaining tail M·e^{-(1-cw)T}/(1-cw) negligible.
    const double tail_target = 1e-3 * kAbsoluteTarget;
    double horizon = kBaseHorizon;
    const double needed = std::log(f.growth_m / (decay * tail_target)) / decay;
    if (needed > horizon) horizon = needed;

    double value = integrate_endpoint(integrand, 0.0, kBaseHorizon, kAbsoluteTarget, "sumudu_transform");
    if (horizon > kBaseHorizon) {
        value += integrate(integrand, kBaseHorizon, horizon, kAbsoluteTarget, "sumudu_transform tail");
    }
    return value;
}

double caputo_derivative(const SampledFunction& f, double alpha, double t) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("caputo_derivative requires 0 < alpha < 1");
    if (!(t > 0.0)) throw ValidationError("caputo_derivative requires t > 0");
    // τ = t(1 - σ^{1/(1-α)}) absorbs the (t-τ)^{-α} singularity:
    // D^α f(t) = t^{1-α}/Γ(2-α) ∫₀¹ f′(τ(σ)) dσ.
    const double beta = 1.0 / (1.0 - alpha);
    auto integrand = [&](double s) { return derivative_at(f, t * (1.0 - std::pow(s, beta))); };
    const double integral = integrate_endpoint(integrand, 0.0, 1.0, 1e-10, "caputo_derivative");
    return std::pow(t, 1.0 - alpha) / specfun::gamma(2.0 - alpha) * integral;
}

double riemann_liouville_integral(const SampledFunction& g, double alpha, double t) {
    if (!(alpha > 0.0)) throw ValidationError("riemann_liouville_integral requires alpha > 0");
    if (!(t >= 0.0)) throw ValidationError("riemann_liouville_integral requires t >= 0");
    if (t == 0.0) return 0.0;
    // τ = t(1 - σ^{1/α}): I^α g(t) = t^α/Γ(1+α) ∫₀¹ g(τ(σ)) dσ.
    const double beta = 1.0 / alpha;
    auto integrand = [&](double s) { return g(t * (1.0 - std::pow(s, beta))); };
    const double integral = integrate_endpoint(integrand, 0.0, 1.0, 1e-10, "riemann_liouville_integral");
    return std::pow(t, alpha) / specfun::gamma(1.0 + alpha) * integral;
}

SampledFunction caputo_function(const SampledFunction& f, double alpha, double m1) {
    // |D^α f(t)| ≤ m1·e^{ct}·t^{1-α}/Γ(2-α) ≤ M'·e^{(c+δ)t}.
    const double delta = 0.05;
    SampledFunction d;
    d.f = [f, alpha](double t) { return t > 0.0 ? caputo_derivative(f, alpha, t) : 0.0; };
    d.growth_c = f.growth_c + delta;
    d.growth_m = m1 * power_growth_constant(1.0 - alpha, delta) / specfun::gamma(2.0 - alpha);
    return d;
}

SampledFunction riemann_liouville_function(const SampledFunction& g, double alpha) {
    // |I^α g(t)| ≤ M·e^{ct}·t^α/Γ(1+α).
    const double delta = 0.05;
    SampledFunction r;
    r.f = [g, alpha](double t) { return riemann_liouville_integral(g, alpha, t); };
    r.growth_c = g.growth_c + delta;
    r.growth_m = g.growth_m * power_growth_constant(alpha, delta) / specfun::gamma(1.0 + alpha);
    return r;
}

std::vector<IdentityCheck> run_identity_suite() {
    constexpr double tol = 1e-5;
    std::vector<IdentityCheck> out;
    auto record = [&](std::string name, double lhs, double rhs, double tolerance) {
        const double dev = std::abs(lhs - rhs);
        out.push_back({std::move(name), lhs, rhs, dev, tolerance, dev <= tolerance});
    };

    auto power = [](int n) {
        SampledFunction p;
        p.f = [n](double t) { return std::pow(t, n); };
        p.derivative = [n](double t) { return n == 0 ? 0.0 : n * std::pow(t, n - 1); };
        p.growth_c = n == 0 ? 0.0 : 0.05;
        p.growth_m = power_growth_constant(n, 0.05);
        return p;
    };
    SampledFunction expo;
    expo.f = [](double t) { return std::exp(0.3 * t); };
    expo.derivative = [](double t) { return 0.3 * std::exp(0.3 * t); };
    expo.growth_c = 0.3;

    const double ws[] = {0.1, 0.25, 0.5};
    const double alphas[] = {0.3, 0.5, 0.8};

    for (int n = 0; n <= 3; ++n) {
        for (double w : ws) {
            record(fmt::format("S[t^{}]({}) = {}!*w^{}", n, w, n, n), sumudu_transform(power(n), w),
                   std::tgamma(n + 1.0) * std::pow(w, n), tol);
        }
    }

    struct Named {
        const char* name;
        SampledFunction f;
        double m1;  // bound on |f′| relative to e^{ct}
    };
    const Named fs[] = {
        {"t", power(1), 1.0},
        {"t^2", power(2), 2.0 * power_growth_constant(1, 0.05)},
        {"exp(0.3t)", expo, 0.3},
    };
    for (const auto& [name, f, m1] : fs) {
        for (double a : alphas) {
            const SampledFunction d = caputo_function(f, a, m1);
            for (double w : ws) {
                const double lhs = sumudu_transform(d, w);
                const double rhs = std::pow(w, -a) * (sumudu_transform(f, w) - f(0.0));
                record(fmt::format("S[D^{} {}]({}) = w^-a(S[f] - f(0))", a, name, w), lhs, rhs, tol);
            }
        }
    }

    for (int n = 0; n <= 3; ++n) {
        for (double a : alphas) {
            const SampledFunction ig = riemann_liouville_function(power(n), a);
            for (double w : ws) {
                record(fmt::format("S[I^{} t^{}]({}) = w^a S[g]", a, n, w), sumudu_transform(ig, w),
                       std::pow(w, a) * sumudu_transform(power(n), w), tol);
            }
        }
    }

    for (double w : ws) {
        SampledFunction mix;
        mix.f = [](double t) { return 2.5 * t * t - 1.5 * std::exp(0.3 * t); };
        mix.growth_c = 0.3;
        mix.growth_m = 2.5 * power_growth_constant(2, 0.3) + 1.5;
        record(fmt::format("S[2.5 t^2 - 1.5 exp(0.3t)]({}) linear", w), sumudu_transform(mix, w),
               2.5 * sumudu_transform(power(2), w) - 1.5 * sumudu_transform(expo, w), 1e-10);
    }
    for (double a : alphas) {
        SampledFunction mix;
        mix.f = [](double t) { return 2.5 * t * t - 1.5 * std::exp(0.3 * t); };
        mix.derivative = [](double t) { return 5.0 * t - 0.45 * std::exp(0.3 * t); };
        record(fmt::format("D^{}[2.5 t^2 - 1.5 exp(0.3t)](1) linear", a), caputo_derivative(mix, a, 1.0),
               2.5 * caputo_derivative(power(2), a, 1.0) - 1.5 * caputo_derivative(expo, a, 1.0), 1e-10);
    }
    return out;
}

}  // namespace fracbs::sumudu
