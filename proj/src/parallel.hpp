#pragma once

// Internal helpers for deterministic parallel loops and reductions.

#include <cstddef>
#include <exception>
#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

#include "ustat/simd.hpp"

namespace ustat::detail {

inline bool in_parallel() {
#if defined(_OPENMP)
    return omp_in_parallel() != 0;
#else
    return false;
#endif
}

/// fn(i) for i in [0, count); iterations must write disjoint storage. If
/// iterations throw, the exception of the lowest failing index is rethrown
/// after the loop.
template <class Fn>
void parallel_for(std::size_t count, const Fn& fn) {
#if defined(_OPENMP)
    if (!in_parallel() && count > 1 && omp_get_max_threads() > 1) {
        const auto n = static_cast<long long>(count);
        std::exception_ptr error;
        long long error_index = n;
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < n; ++i) {
            try {
                fn(static_cast<std::size_t>(i));
            } catch (...) {
#pragma omp critical(ustat_parallel_for_error)
                if (i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
            }
        }
        if (error) std::rethrow_exception(error);
        return;
    }
#endif
    for (std::size_t i = 0; i < count; ++i) fn(i);
}

inline constexpr std::size_t kPairwiseLeaf = 32;
inline constexpr int kTaskDepth = 6;

/// Sum over [0, count) with a fixed binary tree: ranges of at most
/// kPairwiseLeaf items go to leaf(lo, hi, out), which must overwrite out with
/// the left-to-right sum of its items; larger ranges split at their midpoint.
/// The tree depends only on count, so the result is the same for every
/// thread count.
template <class Leaf>
void pairwise_sum_range(std::size_t lo, std::size_t hi, std::size_t d, const Leaf& leaf, double* out,
                        int depth) {
    if (hi - lo <= kPairwiseLeaf) {
        leaf(lo, hi, out);
        return;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    std::vector<double> right(d);
#if defined(_OPENMP)
#pragma omp task if (depth < kTaskDepth) default(none) shared(leaf) firstprivate(lo, mid, d, depth, out)
    pairwise_sum_range(lo, mid, d, leaf, out, depth + 1);
    pairwise_sum_range(mid, hi, d, leaf, right.data(), depth + 1);
#pragma omp taskwait
#else
    pairwise_sum_range(lo, mid, d, leaf, out, depth + 1);
    pairwise_sum_range(mid, hi, d, leaf, right.data(), depth + 1);
#endif
    simd::active().add(right.data(), out, d);
}

template <class Leaf>
std::vector<double> pairwise_sum(std::size_t count, std::size_t d, const Leaf& leaf) {
    std::vector<double> out(d, 0.0);
    if (count == 0) return out;
#if defined(_OPENMP)
    if (!in_parallel() && omp_get_max_threads() > 1 && count > kPairwiseLeaf) {
        std::exception_ptr error;
        auto guarded = [&](std::size_t lo, std::size_t hi, double* dst) {
            try {
                leaf(lo, hi, dst);
            } catch (...) {
#pragma omp critical(ustat_pairwise_error)
                if (!error) error = std::current_exception();
            }
        };
#pragma omp parallel
#pragma omp single
        pairwise_sum_range(0, count, d, guarded, out.data(), 0);
        if (error) std::rethrow_exception(error);
        return out;
    }
#endif
    pairwise_sum_range(0, count, d, leaf, out.data(), kTaskDepth);
    return out;
}

/// Leaf for pairwise_sum over materialized rows: row(i, scratch) returns a
/// pointer to d values.
template <class Row>
auto row_leaf(std::size_t d, const Row& row) {
    return [d, &row](std::size_t lo, std::size_t hi, double* out) {
        std::vector<double> scratch(d);
        for (std::size_t j = 0; j < d; ++j) out[j] = 0.0;
        for (std::size_t i = lo; i < hi; ++i) simd::active().add(row(i, scratch.data()), out, d);
    };
}

}  // namespace ustat::detail
