#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loops over the d output coordinates.
//
// Every routine vectorizes across coordinates only, never across a
// summation index, and uses separate multiply and add (no FMA). Each output
// element therefore sees the same sequence of IEEE operations at every
// level, and all levels are bit-identical to the scalar reference.

namespace ustat::simd {

enum class Level { Scalar, Avx2, Neon };

struct Ops {
    Level level;
    // y[i] += x[i]
    void (*add)(const double* x, double* y, std::size_t n);
    // y[i] += a * x[i]
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // out[i] = x[i] - c[i]
    void (*sub)(const double* x, const double* c, double* out, std::size_t n);
    // y[i] *= a
    void (*scale)(double a, double* y, std::size_t n);
    // out[i] = sign(x[i] - y[i]) with sign(0) = 0
    void (*sign_diff)(const double* x, const double* y, double* out, std::size_t n);
    // out[pair(j,k)] += a[j] * b[k] over j < k, row-major upper triangle of a p x p grid
    void (*outer_upper)(const double* a, const double* b, double* out, std::size_t p);
    double (*max_abs)(const double* x, std::size_t n);
    double (*max_value)(const double* x, std::size_t n);
};

bool supported(Level level) noexcept;
std::string_view name(Level level) noexcept;

/// Table for a specific level; throws ustat::DomainError when unsupported here.
const Ops& ops(Level level);

/// The level used by the library. Chosen once from CPU features (best
/// supported), overridable with USTAT_SIMD=scalar|avx2|neon or set_level().
const Ops& active();
void set_level(Level level);

// Span conveniences over the active table.
void add(std::span<const double> x, std::span<double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void sub(std::span<const double> x, std::span<const double> c, std::span<double> out);
void scale(double a, std::span<double> y);
void sign_diff(std::span<const double> x, std::span<const double> y, std::span<double> out);
void outer_upper(std::span<const double> a, std::span<const double> b, std::span<double> out);
double max_abs(std::span<const double> x);
double max_value(std::span<const double> x);

namespace detail {
const Ops& scalar_ops();
#if defined(__x86_64__)
const Ops& avx2_ops();
#endif
#if defined(__aarch64__)
const Ops& neon_ops();
#endif
}  // namespace detail

}  // namespace ustat::simd
