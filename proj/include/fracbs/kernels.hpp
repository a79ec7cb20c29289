#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference version and,
// where the CPU supports it, an AVX2+FMA version with identical semantics.
// The variant is chosen once at first use; tests can force one with select().
//
// Elementwise kernels accept aliasing between `out` and any input.

#include <cstddef>
#include <span>

namespace fracbs::kernels {

enum class Isa { Scalar, Avx2 };

/// Coefficients of a 9-point stencil on a row-major grid:
///   out = center*x + west*x[-1] + east*x[+1] + south*below + north*above
///       + cross*(above[+1] - above[-1] - below[+1] + below[-1])
struct Stencil9 {
    double center = 0.0;
    double west = 0.0;
    double east = 0.0;
    double south = 0.0;
    double north = 0.0;
    double cross = 0.0;
};

struct Table {
    Isa isa;
    const char* name;

    void (*add)(const double* a, const double* b, double* out, std::size_t n);
    void (*sub)(const double* a, const double* b, double* out, std::size_t n);
    void (*mul)(const double* a, const double* b, double* out, std::size_t n);
    void (*div)(const double* a, const double* b, double* out, std::size_t n);
    void (*max)(const double* a, const double* b, double* out, std::size_t n);
    /// out = a * x
    void (*scale)(double a, const double* x, double* out, std::size_t n);
    /// out = x + a
    void (*shift)(double a, const double* x, double* out, std::size_t n);
    /// y += a * x (the AVX2 variant fuses the multiply-add)
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    /// Neumaier-compensated sum += a * x, running error in comp.
    void (*compensated_axpy)(double a, const double* x, double* sum, double* comp, std::size_t n);
    double (*max_abs)(const double* x, std::size_t n);
    bool (*all_finite)(const double* x, std::size_t n);
    /// Reads row[-1 .. n], above[-1 .. n] and below[-1 .. n].
    void (*stencil9)(const Stencil9& s, const double* above, const double* row, const double* below,
                     double* out, std::size_t n);
};

const Table& scalar_table() noexcept;
/// nullptr when the AVX2 variant is not compiled in.
const Table* avx2_table() noexcept;

bool cpu_supports(Isa isa) noexcept;
/// Table used by the span wrappers below.
const Table& active() noexcept;
/// Forces a variant. Throws ValidationError if the CPU or build lacks it.
void select(Isa isa);

// Span wrappers over active(). Sizes must agree; they are not checked.

inline void add(std::span<const double> a, std::span<const double> b, std::span<double> out) {
    active().add(a.data(), b.data(), out.data(), out.size());
}
inline void mul(std::span<const double> a, std::span<const double> b, std::span<double> out) {
    active().mul(a.data(), b.data(), out.data(), out.size());
}
inline void scale(double a, std::span<const double> x, std::span<double> out) {
    active().scale(a, x.data(), out.data(), out.size());
}
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
    active().axpy(a, x.data(), y.data(), y.size());
}
inline void compensated_axpy(double a, std::span<const double> x, std::span<double> sum,
                             std::span<double> comp) {
    active().compensated_axpy(a, x.data(), sum.data(), comp.data(), sum.size());
}
inline double max_abs(std::span<const double> x) { return active().max_abs(x.data(), x.size()); }
inline bool all_finite(std::span<const double> x) { return active().all_finite(x.data(), x.size()); }

}  // namespace fracbs::kernels
