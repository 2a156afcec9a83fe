#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ustat/count.hpp"

namespace ustat {

/// A reproducible random stream identified by a master seed and a path of
/// (label, index) pairs.
///
/// The engine seed is a pure function of (master_seed, path): each path step
/// folds the FNV-1a hash of the label and the index into a splitmix64 chain.
/// Child streams are derived from the identity, never from the parent's
/// consumed state, so two tasks holding sibling streams can run in any order.
///
/// Only the engine (std::mt19937_64, whose output sequence is fixed by the
/// standard) comes from the library; uniform, normal and gamma variates are
/// produced here so results match across standard library implementations.
class RngStream {
public:
    using Path = std::vector<std::pair<std::string, std::uint64_t>>;

    explicit RngStream(std::uint64_t master_seed, Path path = {});

    RngStream substream(std::string_view label, std::uint64_t index = 0) const;

    std::uint64_t master_seed() const noexcept { return master_seed_; }
    const Path& path() const noexcept { return path_; }

    /// "seed/label:index/..." for provenance records.
    std::string describe() const;

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on the open interval (0, 1).
    double uniform();

    /// Uniform integer in [0, bound); bound must be positive.
    std::uint64_t uniform_below(std::uint64_t bound);
    Count uniform_below(Count bound);

    double normal();
    double gamma(double shape);
    double chi_square(double df) { return 2.0 * gamma(0.5 * df); }

private:
    std::uint64_t master_seed_;
    Path path_;
    std::mt19937_64 engine_;
    bool has_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace ustat
