#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ustat/combinat.hpp"
#include "ustat/count.hpp"
#include "ustat/dataset.hpp"
#include "ustat/kernels.hpp"
#include "ustat/rng.hpp"

namespace ustat {

enum class Sampling {
    BernoulliRandomNorm,         // divide by the realized count
    BernoulliDeterministicNorm,  // divide by the budget N
    WithReplacement,
};

std::string to_string(Sampling sampling);

struct SamplingScheme {
    Sampling variant = Sampling::BernoulliRandomNorm;
    Count budget = 0;  // N

    bool is_bernoulli() const noexcept { return variant != Sampling::WithReplacement; }
};

/// The realized random design: the chosen tuples of I_{n,r}.
/// Bernoulli tuples are distinct and in lexicographic order; with-replacement
/// tuples keep draw order and multiplicities.
class SamplingRealization {
public:
    SamplingRealization() = default;
    SamplingRealization(IndexSpace space, SamplingScheme scheme, std::vector<std::uint32_t> tuples,
                        std::string seed_record = {});

    const IndexSpace& space() const noexcept { return space_; }
    const SamplingScheme& scheme() const noexcept { return scheme_; }
    std::uint32_t order() const noexcept { return space_.r(); }

    /// Number of realized tuples, N-hat for Bernoulli designs.
    std::size_t size() const noexcept { return tuples_.size() / space_.r(); }
    Count n_hat() const noexcept { return size(); }

    std::span<const std::uint32_t> tuple(std::size_t j) const noexcept {
        return {tuples_.data() + j * space_.r(), space_.r()};
    }
    std::span<const std::uint32_t> flat() const noexcept { return tuples_; }

    /// N-hat under random normalization, N otherwise.
    double divisor() const noexcept;

    const std::string& seed_record() const noexcept { return seed_record_; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }
    void add_warning(std::string message) { warnings_.push_back(std::move(message)); }

private:
    IndexSpace space_;
    SamplingScheme scheme_;
    std::vector<std::uint32_t> tuples_;
    std::string seed_record_;
    std::vector<std::string> warnings_;
};

struct IncompleteUStat {
    std::vector<double> theta_hat;
    SamplingRealization realization;
    /// Sum of h over the realized tuples, accumulated with the fixed tree.
    std::vector<double> eval_sum;
    /// size() x d row-major kernel values; empty unless retention was requested.
    std::vector<double> kernel_evals;

    std::size_t dim() const noexcept { return theta_hat.size(); }
    bool has_kernel_evals() const noexcept { return !kernel_evals.empty(); }
    /// Mean of the realized kernel values (sum / number of tuples).
    std::vector<double> eval_mean() const;
};

inline constexpr Count kCompleteOracleGuard = 10'000'000;

/// Average of h over all of I_{n,r} in lexicographic order.
/// BudgetError when C(n, r) exceeds kCompleteOracleGuard.
std::vector<double> complete_ustat(const Dataset& data, const Kernel& kernel);

/// Draws the design. Bernoulli: N-hat ~ Bin(|I|, N/|I|) then N-hat distinct
/// tuples; with replacement: N uniform ranks, each unranked.
/// EmptyDesignError if a Bernoulli draw realizes zero tuples.
SamplingRealization sample_design(const IndexSpace& space, const SamplingScheme& scheme,
                                  RngStream& rng);

IncompleteUStat incomplete_ustat(const Dataset& data, const Kernel& kernel,
                                 const SamplingRealization& realization, bool retain_evals = false);

/// Evaluates h on the given observation indices into out.
void eval_at(const Dataset& data, const Kernel& kernel, std::span<const std::uint32_t> indices,
             std::span<double> out);

}  // namespace ustat
