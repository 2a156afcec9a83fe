#include <cmath>
#include <limits>

#include "ustat/simd.hpp"

namespace ustat::simd::detail {

namespace {

void add_scalar(const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += x[i];
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void sub_scalar(const double* x, const double* c, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - c[i];
}

void scale_scalar(double a, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] *= a;
}

void sign_diff_scalar(const double* x, const double* y, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = static_cast<double>(x[i] > y[i]) - static_cast<double>(x[i] < y[i]);
    }
}

void outer_upper_scalar(const double* a, const double* b, double* out, std::size_t p) {
    for (std::size_t j = 0; j + 1 < p; ++j) {
        const double aj = a[j];
        const std::size_t len = p - j - 1;
        const double* bk = b + j + 1;
        for (std::size_t t = 0; t < len; ++t) out[t] += aj * bk[t];
        out += len;
    }
}

double max_abs_scalar(const double* x, std::size_t n) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double v = std::fabs(x[i]);
        if (v > m) m = v;
    }
    return m;
}

double max_value_scalar(const double* x, std::size_t n) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i] > m) m = x[i];
    }
    return m + 0.0;  // folds -0 into +0
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops table{Level::Scalar,       add_scalar,         axpy_scalar,
                           sub_scalar,          scale_scalar,       sign_diff_scalar,
                           outer_upper_scalar,  max_abs_scalar,     max_value_scalar};
    return table;
}

}  // namespace ustat::simd::detail
