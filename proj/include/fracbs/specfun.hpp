#pragma once

#include <cstddef>

namespace fracbs::specfun {

/// Γ(x) for x > 0. Throws ValidationError otherwise.
double gamma(double x);
/// ln Γ(x) for x > 0.
double log_gamma(double x);

struct MLResult {
    double value = 0.0;
    std::size_t terms_used = 0;
    /// Bound on |E_α(z) - value|: the truncated tail plus accumulated rounding.
    double tail_bound = 0.0;
};

constexpr double kMaxMittagLefflerArgument = 100.0;

/// One-parameter Mittag-Leffler E_α(z) = Σ zⁿ/Γ(1+nα) by direct summation,
/// for 0 < α ≤ 1 and |z| ≤ 100, accumulated in extended precision. Stops once
/// a term falls below 1e-18 of the partial sum with n > |z|^{1/α} and the remaining terms decrease
/// geometrically. Throws NumericalError if that needs more than max_terms.
MLResult mittag_leffler(double alpha, double z, std::size_t max_terms = 1'000'000);

/// 1/Γ(1+nα) computed without overflow as exp(-lnΓ(1+nα)), or 1/n! at α = 1.
double inverse_gamma_weight(double alpha, std::size_t n);

}  // namespace fracbs::specfun
