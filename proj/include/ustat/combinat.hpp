#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ustat/count.hpp"
#include "ustat/rng.hpp"

namespace ustat {

/// Strictly increasing, 0-based observation indices.
using IndexTuple = std::vector<std::uint32_t>;

/// C(n, r) exactly. Throws DomainError for r > n and OverflowError when the
/// value does not fit in 128 bits.
Count count(std::uint64_t n, std::uint64_t r);

/// Like count() but returns nullopt instead of throwing on overflow; r > n gives 0.
std::optional<Count> try_count(std::uint64_t n, std::uint64_t r) noexcept;

/// The index set I_{n,r} = {(i_1 < ... < i_r) : 0 <= i_j < n}.
class IndexSpace {
public:
    /// I_{1,1}.
    IndexSpace() = default;
    IndexSpace(std::uint32_t n, std::uint32_t r);

    std::uint32_t n() const noexcept { return n_; }
    std::uint32_t r() const noexcept { return r_; }
    Count cardinality() const noexcept { return cardinality_; }

private:
    std::uint32_t n_ = 1;
    std::uint32_t r_ = 1;
    Count cardinality_ = 1;
};

/// Writes the rank-th tuple in lexicographic order into out (length r).
void unrank_into(const IndexSpace& space, Count rank, std::span<std::uint32_t> out);
IndexTuple unrank(const IndexSpace& space, Count rank);

/// Lexicographic position of a tuple; inverse of unrank.
Count rank_of(const IndexSpace& space, std::span<const std::uint32_t> tuple);

/// Advances tuple to its lexicographic successor; false when it was the last.
bool next_tuple(std::span<std::uint32_t> tuple, std::uint32_t n) noexcept;

/// m distinct ranks drawn uniformly from [0, universe), returned ascending.
/// Partial shuffle when the universe is <= 1e6 and m >= universe/64, Floyd's
/// algorithm otherwise.
std::vector<Count> sample_distinct_ranks(Count universe, Count m, RngStream& rng);

/// m distinct tuples, a uniform m-subset of I_{n,r}, in lexicographic order.
/// Storage is flat: tuple j occupies [j*r, (j+1)*r).
std::vector<std::uint32_t> sample_without_replacement(const IndexSpace& space, Count m,
                                                      RngStream& rng);

/// Exact Bin(trials, p) variate. Chop-down inversion when trials*p < 30,
/// Stadlober's ratio-of-uniforms rejection otherwise.
Count draw_binomial(Count trials, double p, RngStream& rng);

inline constexpr Count kShuffleUniverseLimit = 1'000'000;

}  // namespace ustat
