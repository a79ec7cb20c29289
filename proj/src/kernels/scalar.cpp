// Reference kernels. Compiled without FMA contraction so that results are
// reproducible and serve as the baseline for the SIMD variants.

#include <cmath>

#include "fracbs/kernels.hpp"
#include "kernels_internal.hpp"

namespace fracbs::kernels::scalar {

void add(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void sub(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void div(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] / b[i];
}

void max(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] > b[i] ? a[i] : b[i];
}

void scale(double a, const double* x, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i];
}

void shift(double a, const double* x, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + a;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void compensated_axpy(double a, const double* x, double* sum, double* comp, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double p = a * x[i];
        const double s = sum[i];
        const double t = s + p;
        comp[i] += std::abs(s) >= std::abs(p) ? (s - t) + p : (p - t) + s;
        sum[i] = t;
    }
}

double max_abs(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = std::abs(x[i]);
        m = v > m ? v : m;
    }
    return m;
}

bool all_finite(const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(x[i])) return false;
    }
    return true;
}

void stencil9(const Stencil9& s, const double* above, const double* row, const double* below,
              double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double c = s.center * row[i];
        const double we = s.west * row[i - 1] + s.east * row[i + 1];
        const double sn = s.south * below[i] + s.north * above[i];
        const double x = (above[i + 1] - above[i - 1]) - (below[i + 1] - below[i - 1]);
        out[i] = c + we + sn + s.cross * x;
    }
}

}  // namespace fracbs::kernels::scalar

namespace fracbs::kernels {

const Table& scalar_table() noexcept {
    static const Table table{
        Isa::Scalar,
        "scalar",
        scalar::add,
        scalar::sub,
        scalar::mul,
        scalar::div,
        scalar::max,
        scalar::scale,
        scalar::shift,
        scalar::axpy,
        scalar::compensated_axpy,
        scalar::max_abs,
        scalar::all_finite,
        scalar::stencil9,
    };
    return table;
}

}  // namespace fracbs::kernels
