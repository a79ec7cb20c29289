#pragma once

// Numeric Sumudu transform S[f](w) = ∫₀^∞ f(wt)e^{-t} dt, the Caputo
// derivative and the Riemann-Liouville integral, plus the identity suite
// relating them.

#include <functional>
#include <string>
#include <vector>

namespace fracbs::sumudu {

/// A time profile f on [0, ∞) with a declared bound |f(t)| ≤ M·e^{ct}.
struct SampledFunction {
    std::function<double(double)> f;
    /// f′; optional. When absent, caputo_derivative differentiates f numerically.
    std::function<double(double)> derivative;
    double growth_m = 1.0;
    double growth_c = 0.0;

    double operator()(double t) const { return f(t); }
};

/// M such that |t^p| ≤ M·e^{δt} on t ≥ 0.
double power_growth_constant(double p, double delta);

/// ∫₀^∞ f(wt)e^{-t} dt, absolute error target 1e-9. Requires w > 0 and c·w < 1.
/// Throws ValidationError on a violated growth bound, NumericalError if the
/// quadrature does not converge.
double sumudu_transform(const SampledFunction& f, double w);

/// Caputo derivative of order α ∈ (0,1) at t > 0.
double caputo_derivative(const SampledFunction& f, double alpha, double t);

/// Riemann-Liouville integral of order α > 0 at t ≥ 0.
double riemann_liouville_integral(const SampledFunction& g, double alpha, double t);

/// D^α f as a SampledFunction, with a growth bound derived from f′'s bound
/// |f′(t)| ≤ m1·e^{ct}.
SampledFunction caputo_function(const SampledFunction& f, double alpha, double m1);
/// I^α g as a SampledFunction.
SampledFunction riemann_liouville_function(const SampledFunction& g, double alpha);

struct IdentityCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double deviation = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

/// S[tⁿ] = n!wⁿ, S[D^α f] = w^{-α}(S[f] - f(0)), S[I^α g] = w^α S[g] and
/// linearity of S over the standard function, order and w sets.
std::vector<IdentityCheck> run_identity_suite();

}  // namespace fracbs::sumudu
