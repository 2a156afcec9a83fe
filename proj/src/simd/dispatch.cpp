#include <atomic>
#include <cstdlib>
#include <string>

#include "ustat/errors.hpp"
#include "ustat/simd.hpp"

namespace ustat::simd {

bool supported(Level level) noexcept {
    switch (level) {
        case Level::Scalar:
            return true;
        case Level::Avx2:
#if defined(__x86_64__)
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
        case Level::Neon:
#if defined(__aarch64__)
            return true;
#else
            return false;
#endif
    }
    return false;
}

std::string_view name(Level level) noexcept {
    switch (level) {
        case Level::Scalar:
            return "scalar";
        case Level::Avx2:
            return "avx2";
        case Level::Neon:
            return "neon";
    }
    return "unknown";
}

const Ops& ops(Level level) {
    if (!supported(level)) {
        throw DomainError("SIMD level '" + std::string(name(level)) + "' is not supported on this CPU");
    }
    switch (level) {
#if defined(__x86_64__)
        case Level::Avx2:
            return detail::avx2_ops();
#endif
#if defined(__aarch64__)
        case Level::Neon:
            return detail::neon_ops();
#endif
        default:
            return detail::scalar_ops();
    }
}

namespace {

const Ops* initial_table() {
    if (const char* env = std::getenv("USTAT_SIMD")) {
        const std::string want(env);
        for (Level level : {Level::Scalar, Level::Avx2, Level::Neon}) {
            if (want == name(level) && supported(level)) return &ops(level);
        }
    }
    for (Level level : {Level::Avx2, Level::Neon}) {
        if (supported(level)) return &ops(level);
    }
    return &detail::scalar_ops();
}

std::atomic<const Ops*>& table_slot() {
    static std::atomic<const Ops*> slot{initial_table()};
    return slot;
}

}  // namespace

const Ops& active() { return *table_slot().load(std::memory_order_relaxed); }

void set_level(Level level) { table_slot().store(&ops(level), std::memory_order_relaxed); }

void add(std::span<const double> x, std::span<double> y) { active().add(x.data(), y.data(), y.size()); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
    active().axpy(a, x.data(), y.data(), y.size());
}

void sub(std::span<const double> x, std::span<const double> c, std::span<double> out) {
    active().sub(x.data(), c.data(), out.data(), out.size());
}

void scale(double a, std::span<double> y) { active().scale(a, y.data(), y.size()); }

void sign_diff(std::span<const double> x, std::span<const double> y, std::span<double> out) {
    active().sign_diff(x.data(), y.data(), out.data(), out.size());
}

void outer_upper(std::span<const double> a, std::span<const double> b, std::span<double> out) {
    active().outer_upper(a.data(), b.data(), out.data(), a.size());
}

double max_abs(std::span<const double> x) { return active().max_abs(x.data(), x.size()); }

double max_value(std::span<const double> x) { return active().max_value(x.data(), x.size()); }

}  // namespace ustat::simd
