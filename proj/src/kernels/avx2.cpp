#include "polaron/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace polaron::kernels::detail {
namespace {

void axpy_avx2(std::size_t n, double a, const double* x, double* y) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d y0 = _mm256_loadu_pd(y + i);
        __m256d y1 = _mm256_loadu_pd(y + i + 4);
        y0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), y0);
        y1 = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4), y1);
        _mm256_storeu_pd(y + i, y0);
        _mm256_storeu_pd(y + i + 4, y1);
    }
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void hadamard_avx2(std::size_t n, const double* d, const double* x, double* y) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_mul_pd(_mm256_loadu_pd(d + i), _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) y[i] = d[i] * x[i];
}

double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(std::size_t n, const double* x, const double* y) {
    __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
        s1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), s1);
    }
    for (; i + 4 <= n; i += 4) s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
    double s = hsum(_mm256_add_pd(s0, s1));
    for (; i < n; ++i) s = std::fma(x[i], y[i], s);
    return s;
}

// Lane-wise Dot2; the four (sum, error) lane pairs are merged with scalar
// error-free additions at the end.
double dot2_avx2(std::size_t n, const double* x, const double* y) {
    __m256d s = _mm256_setzero_pd(), c = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d a = _mm256_loadu_pd(x + i);
        const __m256d b = _mm256_loadu_pd(y + i);
        const __m256d p = _mm256_mul_pd(a, b);
        const __m256d pe = _mm256_fmsub_pd(a, b, p);
        const __m256d t = _mm256_add_pd(s, p);
        const __m256d z = _mm256_sub_pd(t, s);
        const __m256d e = _mm256_add_pd(_mm256_sub_pd(s, _mm256_sub_pd(t, z)), _mm256_sub_pd(p, z));
        c = _mm256_add_pd(c, _mm256_add_pd(e, pe));
        s = t;
    }
    alignas(32) double sl[4], cl[4];
    _mm256_store_pd(sl, s);
    _mm256_store_pd(cl, c);
    double acc = 0.0, err = cl[0] + cl[1] + cl[2] + cl[3];
    auto two_sum = [&](double v) {
        const double t = acc + v;
        const double z = t - acc;
        err += (acc - (t - z)) + (v - z);
        acc = t;
    };
    for (double v : sl) two_sum(v);
    for (; i < n; ++i) {
        const double p = x[i] * y[i];
        err += std::fma(x[i], y[i], -p);
        two_sum(p);
    }
    return acc + err;
}

}  // namespace

const Table& avx2_table() {
    static const Table t{"avx2", axpy_avx2, hadamard_avx2, dot_avx2, dot2_avx2};
    return t;
}

}  // namespace polaron::kernels::detail
