#include "fracbs/specfun.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fracbs/error.hpp"

namespace fracbs::specfun {

namespace {

void require_positive(double x, const char* fn) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw ValidationError(std::string(fn) + " requires a finite positive argument, got " + std::to_string(x));
    }
}

double log_gamma_1p(double alpha, std::size_t n) {
    const double x = 1.0 + static_cast<double>(n) * alpha;
    return std::lgamma(x);
}

}  // namespace

double gamma(double x) {
    require_positive(x, "gamma");
    const double g = std::tgamma(x);
    if (!std::isfinite(g)) throw NumericalError("gamma overflows at x = " + std::to_string(x));
    return g;
}

double log_gamma(double x) {
    require_positive(x, "log_gamma");
    return std::lgamma(x);
}

double inverse_gamma_weight(double alpha, std::size_t n) {
    if (alpha == 1.0 && n <= 170) {
        double f = 1.0;
        for (std::size_t k = 2; k <= n; ++k) f *= static_cast<double>(k);
        return 1.0 / f;
    }
    const double x = 1.0 + static_cast<double>(n) * alpha;
    if (x < 171.0) return 1.0 / std::tgamma(x);
    return std::exp(-log_gamma_1p(alpha, n));
}

MLResult mittag_leffler(double alpha, double z, std::size_t max_terms) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw ValidationError("mittag_leffler requires 0 < alpha <= 1, got " + std::to_string(alpha));
    }
    if (!std::isfinite(z) || std::abs(z) > kMaxMittagLefflerArgument) {
        throw ValidationError("mittag_leffler supports |z| <= 100, got " + std::to_string(z));
    }
    if (z == 0.0) return {1.0, 1, 0.0};

    using ld = long double;
    const ld az = std::abs(static_cast<ld>(z));
    const ld log_az = std::log(az);
    const double n_min = std::pow(std::abs(z), 1.0 / alpha);
    constexpr ld eps_ld = std::numeric_limits<ld>::epsilon();
    constexpr double eps = std::numeric_limits<double>::epsilon();

    auto magnitude = [&](std::size_t n) {
        const ld x = 1.0L + static_cast<ld>(n) * static_cast<ld>(alpha);
        const ld log_pow = static_cast<ld>(n) * log_az;
        if (x < 1700.0L && log_pow < 11000.0L) return std::pow(az, static_cast<ld>(n)) / std::tgamma(x);
        return std::exp(log_pow - std::lgamma(x));
    };

    ld sum = 1.0L, comp = 0.0L, largest = 1.0L;
    ld last = 1.0L;
    std::size_t n = 1;
    for (;; ++n) {
        if (n >= max_terms) {
            throw NumericalError("mittag_leffler did not converge within " + std::to_string(max_terms) +
                                 " terms (alpha = " + std::to_string(alpha) + ", z = " + std::to_string(z) + ")");
        }
        const ld m = magnitude(n);
        const ld term = (z < 0.0 && (n & 1u)) ? -m : m;
        const ld t = sum + term;
        comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
        largest = std::max(largest, m);
        last = m;

        if (static_cast<double>(n) > n_min && m < 1e-18L * std::abs(sum + comp)) {
            const ld next = magnitude(n + 1);
            const ld ratio = next / m;
            // Term ratios |z|Γ(1+kα)/Γ(1+(k+1)α) decrease in k, so the tail
            // after n is dominated by a geometric series with this ratio.
            if (ratio < 1.0L) {
                const double value = static_cast<double>(sum + comp);
                const ld tail = std::max(next / (1.0L - ratio), last);
                const ld rounding = 8.0L * static_cast<ld>(n + 1) * eps_ld * largest;
                if (!std::isfinite(value)) {
                    throw NumericalError("mittag_leffler overflows at alpha = " + std::to_string(alpha) +
                                         ", z = " + std::to_string(z));
                }
                return {value, n + 1, static_cast<double>(tail + rounding) + eps * std::abs(value)};
            }
        }
    }
}

}  // namespace fracbs::specfun
