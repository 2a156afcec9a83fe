// Compiled with -mavx2 only; reached through the dispatch table after a CPU check.
#include <immintrin.h>

#include <cmath>
#include <limits>

#include "ustat/simd.hpp"

namespace ustat::simd::detail {

namespace {

void add_avx2(const double* x, double* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
    }
    for (; i < n; ++i) y[i] += x[i];
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d p0 = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
        const __m256d p1 = _mm256_mul_pd(va, _mm256_loadu_pd(x + i + 4));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), p0));
        _mm256_storeu_pd(y + i + 4, _mm256_add_pd(_mm256_loadu_pd(y + i + 4), p1));
    }
    for (; i + 4 <= n; i += 4) {
        const __m256d p0 = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), p0));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void sub_avx2(const double* x, const double* c, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(c + i)));
    }
    for (; i < n; ++i) out[i] = x[i] - c[i];
}

void scale_avx2(double a, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, _mm256_mul_pd(_mm256_loadu_pd(y + i), va));
    for (; i < n; ++i) y[i] *= a;
}

void sign_diff_avx2(const double* x, const double* y, double* out, std::size_t n) {
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        const __m256d vy = _mm256_loadu_pd(y + i);
        const __m256d gt = _mm256_and_pd(_mm256_cmp_pd(vx, vy, _CMP_GT_OQ), one);
        const __m256d lt = _mm256_and_pd(_mm256_cmp_pd(vx, vy, _CMP_LT_OQ), one);
        _mm256_storeu_pd(out + i, _mm256_sub_pd(gt, lt));
    }
    for (; i < n; ++i) {
        out[i] = static_cast<double>(x[i] > y[i]) - static_cast<double>(x[i] < y[i]);
    }
}

void outer_upper_avx2(const double* a, const double* b, double* out, std::size_t p) {
    for (std::size_t j = 0; j + 1 < p; ++j) {
        const std::size_t len = p - j - 1;
        const double* bk = b + j + 1;
        const __m256d va = _mm256_set1_pd(a[j]);
        std::size_t t = 0;
        for (; t + 4 <= len; t += 4) {
            const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(bk + t));
            _mm256_storeu_pd(out + t, _mm256_add_pd(_mm256_loadu_pd(out + t), prod));
        }
        for (; t < len; ++t) out[t] += a[j] * bk[t];
        out += len;
    }
}

double horizontal_max(__m256d v) {
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, v);
    double m = lanes[0];
    for (int k = 1; k < 4; ++k) {
        if (lanes[k] > m) m = lanes[k];
    }
    return m;
}

double max_abs_avx2(const double* x, std::size_t n) {
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_max_pd(acc, _mm256_andnot_pd(sign_mask, _mm256_loadu_pd(x + i)));
    }
    double m = horizontal_max(acc);
    for (; i < n; ++i) {
        const double v = std::fabs(x[i]);
        if (v > m) m = v;
    }
    return m;
}

double max_value_avx2(const double* x, std::size_t n) {
    __m256d acc = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(x + i));
    double m = horizontal_max(acc);
    for (; i < n; ++i) {
        if (x[i] > m) m = x[i];
    }
    return m + 0.0;
}

}  // namespace

const Ops& avx2_ops() {
    static const Ops table{Level::Avx2,      add_avx2,       axpy_avx2,
                           sub_avx2,         scale_avx2,     sign_diff_avx2,
                           outer_upper_avx2, max_abs_avx2,   max_value_avx2};
    return table;
}

}  // namespace ustat::simd::detail
