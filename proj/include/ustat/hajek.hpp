#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ustat/count.hpp"
#include "ustat/dataset.hpp"
#include "ustat/kernels.hpp"
#include "ustat/rng.hpp"

namespace ustat {

enum class HajekMethod { DC, RS, JackknifeOracle };
enum class RsNorm { ByM, ByMHat };

std::string to_string(HajekMethod method);

struct HajekConfig {
    HajekMethod method = HajekMethod::DC;
    /// 0-based observation indices; empty means all n.
    std::vector<std::uint32_t> s1;
    // Divide and conquer: block size L (default r-1) and count K (default floor((n-1)/L)).
    std::optional<std::size_t> dc_block_size;
    std::optional<std::size_t> dc_block_count;
    // Random sampling: budget M (default min(2(n-1), C(n-1, r-1))).
    std::optional<Count> rs_budget;
    RsNorm rs_norm = RsNorm::ByM;
};

struct HajekEstimate {
    /// n1 x d row-major; row i holds the estimate at observation s1[i].
    std::vector<double> g_hat;
    std::vector<double> g_bar;
    std::size_t n1 = 0;
    std::size_t d = 0;
    /// Configuration with every default filled in.
    HajekConfig config;
    /// Realized M-hat for RS, 0 otherwise.
    Count m_hat = 0;
    std::string seed_record;

    std::span<const double> row(std::size_t i) const { return {g_hat.data() + i * d, d}; }
};

/// 1-based index-skip map {1..n-1} -> {1..n} \ {i1}.
std::size_t sigma_skip(std::size_t i1, std::size_t ell, std::size_t n);

HajekEstimate estimate_dc(const Dataset& data, const Kernel& kernel, const HajekConfig& config,
                          const RngStream& rng);
HajekEstimate estimate_rs(const Dataset& data, const Kernel& kernel, const HajekConfig& config,
                          RngStream rng);

inline constexpr Count kJackknifeGuard = 1'000'000;

/// Exact leave-one-out averages over all C(n-1, r-1) tuples.
HajekEstimate jackknife_oracle(const Dataset& data, const Kernel& kernel,
                               std::span<const std::uint32_t> s1 = {});

/// Dispatches on config.method.
HajekEstimate estimate_hajek(const Dataset& data, const Kernel& kernel, const HajekConfig& config,
                             const RngStream& rng);

/// Default RS budget for a sample of size n and kernel order r.
Count default_rs_budget(std::size_t n, std::uint32_t r);

}  // namespace ustat
