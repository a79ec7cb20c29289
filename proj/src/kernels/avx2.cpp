// AVX2 variants. Built with -mavx2 -mfma; only reached after a CPUID check.
// Except for axpy, which fuses, each kernel performs the same IEEE operations
// in the same order as the scalar reference and is bitwise identical to it.

#include <immintrin.h>

#include <cmath>

#include "kernels_internal.hpp"

namespace fracbs::kernels::avx2 {

namespace {

constexpr std::size_t W = 4;

inline __m256d abs_pd(__m256d x) {
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
}

template <class VecOp, class ScalarOp>
inline void binary(const double* a, const double* b, double* out, std::size_t n, VecOp vop,
                   ScalarOp sop) {
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        _mm256_storeu_pd(out + i, vop(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    }
    for (; i < n; ++i) out[i] = sop(a[i], b[i]);
}

}  // namespace

void add(const double* a, const double* b, double* out, std::size_t n) {
    binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_add_pd(x, y); },
           [](double x, double y) { return x + y; });
}

void sub(const double* a, const double* b, double* out, std::size_t n) {
    binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_sub_pd(x, y); },
           [](double x, double y) { return x - y; });
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
    binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_mul_pd(x, y); },
           [](double x, double y) { return x * y; });
}

void div(const double* a, const double* b, double* out, std::size_t n) {
    binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_div_pd(x, y); },
           [](double x, double y) { return x / y; });
}

void max(const double* a, const double* b, double* out, std::size_t n) {
    // maxpd returns the second operand unless the first is strictly greater,
    // which is exactly `a > b ? a : b`.
    binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_max_pd(x, y); },
           [](double x, double y) { return x > y ? x : y; });
}

void scale(double a, const double* x, double* out, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + W <= n; i += W) _mm256_storeu_pd(out + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) out[i] = a * x[i];
}

void shift(double a, const double* x, double* out, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + W <= n; i += W) _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(x + i), va));
    for (; i < n; ++i) out[i] = x[i] + a;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 2 * W <= n; i += 2 * W) {
        __m256d y0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        __m256d y1 = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + W), _mm256_loadu_pd(y + i + W));
        _mm256_storeu_pd(y + i, y0);
        _mm256_storeu_pd(y + i + W, y1);
    }
    for (; i + W <= n; i += W) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void compensated_axpy(double a, const double* x, double* sum, double* comp, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        const __m256d p = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
        const __m256d s = _mm256_loadu_pd(sum + i);
        const __m256d t = _mm256_add_pd(s, p);
        const __m256d big_s = _mm256_add_pd(_mm256_sub_pd(s, t), p);
        const __m256d big_p = _mm256_add_pd(_mm256_sub_pd(p, t), s);
        const __m256d s_wins = _mm256_cmp_pd(abs_pd(s), abs_pd(p), _CMP_GE_OQ);
        const __m256d err = _mm256_blendv_pd(big_p, big_s, s_wins);
        _mm256_storeu_pd(comp + i, _mm256_add_pd(_mm256_loadu_pd(comp + i), err));
        _mm256_storeu_pd(sum + i, t);
    }
    for (; i < n; ++i) {
        const double p = a * x[i];
        const double s = sum[i];
        const double t = s + p;
        comp[i] += std::abs(s) >= std::abs(p) ? (s - t) + p : (p - t) + s;
        sum[i] = t;
    }
}

double max_abs(const double* x, std::size_t n) {
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + W <= n; i += W) m = _mm256_max_pd(abs_pd(_mm256_loadu_pd(x + i)), m);
    alignas(32) double lanes[W];
    _mm256_store_pd(lanes, m);
    double r = 0.0;
    for (double v : lanes) r = v > r ? v : r;
    for (; i < n; ++i) {
        const double v = std::abs(x[i]);
        r = v > r ? v : r;
    }
    return r;
}

bool all_finite(const double* x, std::size_t n) {
    // x - x is 0 for finite x and NaN for infinities and NaN.
    __m256d bad = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        const __m256d v = _mm256_loadu_pd(x + i);
        bad = _mm256_or_pd(bad, _mm256_cmp_pd(_mm256_sub_pd(v, v), _mm256_sub_pd(v, v), _CMP_UNORD_Q));
    }
    if (_mm256_movemask_pd(bad) != 0) return false;
    for (; i < n; ++i) {
        if (!std::isfinite(x[i])) return false;
    }
    return true;
}

void stencil9(const Stencil9& s, const double* above, const double* row, const double* below,
              double* out, std::size_t n) {
    const __m256d cc = _mm256_set1_pd(s.center), cw = _mm256_set1_pd(s.west),
                  ce = _mm256_set1_pd(s.east), cs = _mm256_set1_pd(s.south),
                  cn = _mm256_set1_pd(s.north), cx = _mm256_set1_pd(s.cross);
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        const __m256d c = _mm256_mul_pd(cc, _mm256_loadu_pd(row + i));
        const __m256d we = _mm256_add_pd(_mm256_mul_pd(cw, _mm256_loadu_pd(row + i - 1)),
                                         _mm256_mul_pd(ce, _mm256_loadu_pd(row + i + 1)));
        const __m256d sn = _mm256_add_pd(_mm256_mul_pd(cs, _mm256_loadu_pd(below + i)),
                                         _mm256_mul_pd(cn, _mm256_loadu_pd(above + i)));
        const __m256d x = _mm256_sub_pd(
            _mm256_sub_pd(_mm256_loadu_pd(above + i + 1), _mm256_loadu_pd(above + i - 1)),
            _mm256_sub_pd(_mm256_loadu_pd(below + i + 1), _mm256_loadu_pd(below + i - 1)));
        _mm256_storeu_pd(out + i,
                         _mm256_add_pd(_mm256_add_pd(_mm256_add_pd(c, we), sn), _mm256_mul_pd(cx, x)));
    }
    for (; i < n; ++i) {
        const double c = s.center * row[i];
        const double we = s.west * row[i - 1] + s.east * row[i + 1];
        const double sn = s.south * below[i] + s.north * above[i];
        const double x = (above[i + 1] - above[i - 1]) - (below[i + 1] - below[i - 1]);
        out[i] = c + we + sn + s.cross * x;
    }
}

}  // namespace fracbs::kernels::avx2

namespace fracbs::kernels {

const Table& avx2_table_impl() noexcept {
    static const Table table{
        Isa::Avx2,
        "avx2",
        avx2::add,
        avx2::sub,
        avx2::mul,
        avx2::div,
        avx2::max,
        avx2::scale,
        avx2::shift,
        avx2::axpy,
        avx2::compensated_axpy,
        avx2::max_abs,
        avx2::all_finite,
        avx2::stencil9,
    };
    return table;
}

}  // namespace fracbs::kernels
