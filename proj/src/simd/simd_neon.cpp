// AArch64 only; Advanced SIMD is part of the base ISA there.
#if defined(__aarch64__)
#include <arm_neon.h>

#include <cmath>
#include <limits>

#include "ustat/simd.hpp"

namespace ustat::simd::detail {

namespace {

void add_neon(const double* x, double* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += x[i];
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void sub_neon(const double* x, const double* c, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vsubq_f64(vld1q_f64(x + i), vld1q_f64(c + i)));
    for (; i < n; ++i) out[i] = x[i] - c[i];
}

void scale_neon(double a, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vmulq_f64(vld1q_f64(y + i), va));
    for (; i < n; ++i) y[i] *= a;
}

void sign_diff_neon(const double* x, const double* y, double* out, std::size_t n) {
    const float64x2_t one = vdupq_n_f64(1.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t vx = vld1q_f64(x + i);
        const float64x2_t vy = vld1q_f64(y + i);
        const float64x2_t gt = vreinterpretq_f64_u64(vandq_u64(vcgtq_f64(vx, vy), vreinterpretq_u64_f64(one)));
        const float64x2_t lt = vreinterpretq_f64_u64(vandq_u64(vcltq_f64(vx, vy), vreinterpretq_u64_f64(one)));
        vst1q_f64(out + i, vsubq_f64(gt, lt));
    }
    for (; i < n; ++i) {
        out[i] = static_cast<double>(x[i] > y[i]) - static_cast<double>(x[i] < y[i]);
    }
}

void outer_upper_neon(const double* a, const double* b, double* out, std::size_t p) {
    for (std::size_t j = 0; j + 1 < p; ++j) {
        const std::size_t len = p - j - 1;
        const double* bk = b + j + 1;
        const float64x2_t va = vdupq_n_f64(a[j]);
        std::size_t t = 0;
        for (; t + 2 <= len; t += 2) {
            vst1q_f64(out + t, vaddq_f64(vld1q_f64(out + t), vmulq_f64(va, vld1q_f64(bk + t))));
        }
        for (; t < len; ++t) out[t] += a[j] * bk[t];
        out += len;
    }
}

double max_abs_neon(const double* x, std::size_t n) {
    double m = -std::numeric_limits<double>::infinity();
    std::size_t i = 0;
    if (n >= 2) {
        float64x2_t acc = vabsq_f64(vld1q_f64(x));
        for (i = 2; i + 2 <= n; i += 2) acc = vmaxq_f64(acc, vabsq_f64(vld1q_f64(x + i)));
        m = vmaxvq_f64(acc);
    }
    for (; i < n; ++i) {
        const double v = std::fabs(x[i]);
        if (v > m) m = v;
    }
    return m;
}

double max_value_neon(const double* x, std::size_t n) {
    double m = -std::numeric_limits<double>::infinity();
    std::size_t i = 0;
    if (n >= 2) {
        float64x2_t acc = vld1q_f64(x);
        for (i = 2; i + 2 <= n; i += 2) acc = vmaxq_f64(acc, vld1q_f64(x + i));
        m = vmaxvq_f64(acc);
    }
    for (; i < n; ++i) {
        if (x[i] > m) m = x[i];
    }
    return m + 0.0;
}

}  // namespace

const Ops& neon_ops() {
    static const Ops table{Level::Neon,      add_neon,       axpy_neon,
                           sub_neon,         scale_neon,     sign_diff_neon,
                           outer_upper_neon, max_abs_neon,   max_value_neon};
    return table;
}

}  // namespace ustat::simd::detail
#endif
