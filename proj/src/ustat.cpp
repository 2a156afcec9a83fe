#include "ustat/ustat.hpp"

#include <array>
#include <sstream>

#include "parallel.hpp"
#include "ustat/errors.hpp"

namespace ustat {

namespace {

// Largest design materialized in memory (tuples, not bytes).
constexpr Count kMaxRealizedTuples = Count{1} << 31;

constexpr std::uint32_t kMaxOrder = 16;

void check_kernel_data(const Dataset& data, const Kernel& kernel) {
    if (kernel.input_dim() != 0 && kernel.input_dim() != data.p()) {
        throw DomainError("kernel expects observations of dimension " +
                          std::to_string(kernel.input_dim()) + ", data has " +
                          std::to_string(data.p()));
    }
    if (kernel.order() > kMaxOrder) throw DomainError("kernel order above 16 is not supported");
    if (data.n() < kernel.order()) throw DomainError("need at least r observations");
}

std::vector<double> divide(std::vector<double> values, double divisor) {
    for (double& v : values) v = v / divisor;
    return values;
}

}  // namespace

std::string to_string(Sampling sampling) {
    switch (sampling) {
        case Sampling::BernoulliRandomNorm: return "bernoulli";
        case Sampling::BernoulliDeterministicNorm: return "bernoulli-det";
        case Sampling::WithReplacement: return "replacement";
    }
    return "unknown";
}

SamplingRealization::SamplingRealization(IndexSpace space, SamplingScheme scheme,
                                         std::vector<std::uint32_t> tuples, std::string seed_record)
    : space_(space), scheme_(scheme), tuples_(std::move(tuples)), seed_record_(std::move(seed_record)) {
    if (tuples_.size() % space_.r() != 0) throw DomainError("tuple storage is not a multiple of r");
    for (std::uint32_t i : tuples_) {
        if (i >= space_.n()) throw DomainError("tuple index out of range");
    }
}

double SamplingRealization::divisor() const noexcept {
    if (scheme_.variant == Sampling::BernoulliRandomNorm) return static_cast<double>(size());
    return to_double(scheme_.budget);
}

std::vector<double> IncompleteUStat::eval_mean() const {
    return divide(eval_sum, static_cast<double>(realization.size()));
}

void eval_at(const Dataset& data, const Kernel& kernel, std::span<const std::uint32_t> indices,
             std::span<double> out) {
    std::array<const double*, kMaxOrder> args{};
    for (std::size_t a = 0; a < indices.size(); ++a) args[a] = data.row(indices[a]).data();
    kernel.eval(KernelArgs(args.data(), indices.size()), out);
}

std::vector<double> complete_ustat(const Dataset& data, const Kernel& kernel) {
    check_kernel_data(data, kernel);
    const IndexSpace space(static_cast<std::uint32_t>(data.n()), kernel.order());
    if (space.cardinality() > kCompleteOracleGuard) {
        throw BudgetError("complete U-statistic over " + to_string(space.cardinality()) +
                          " tuples exceeds the guard of " + to_string(kCompleteOracleGuard));
    }
    const auto total = static_cast<std::size_t>(space.cardinality());
    const std::size_t d = kernel.output_dim();
    const std::uint32_t r = space.r();
    auto leaf = [&](std::size_t lo, std::size_t hi, double* out) {
        std::vector<double> scratch(d);
        std::vector<std::uint32_t> tuple(r);
        unrank_into(space, lo, tuple);
        for (std::size_t j = 0; j < d; ++j) out[j] = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            if (i > lo) next_tuple(tuple, space.n());
            eval_at(data, kernel, tuple, scratch);
            simd::active().add(scratch.data(), out, d);
        }
    };
    return divide(detail::pairwise_sum(total, d, leaf), static_cast<double>(total));
}

SamplingRealization sample_design(const IndexSpace& space, const SamplingScheme& scheme,
                                  RngStream& rng) {
    const Count universe = space.cardinality();
    const Count budget = scheme.budget;
    if (budget == 0) throw ConfigError("sampling budget N must be at least 1");
    std::vector<std::string> warnings;
    std::vector<std::uint32_t> tuples;
    if (scheme.is_bernoulli()) {
        if (budget > universe) {
            throw ConfigError("Bernoulli budget N = " + to_string(budget) + " exceeds |I_{n,r}| = " +
                              to_string(universe));
        }
        const double p_n = budget == universe ? 1.0 : to_double(budget) / to_double(universe);
        if (p_n > 0.5) {
            std::ostringstream msg;
            msg << "sampling probability N/|I_{n,r}| = " << p_n << " exceeds 1/2";
            warnings.push_back(msg.str());
        }
        const Count n_hat = draw_binomial(universe, p_n, rng);
        if (n_hat == 0) throw EmptyDesignError("Bernoulli design realized no tuples");
        if (n_hat > kMaxRealizedTuples) {
            throw BudgetError("realized design of " + to_string(n_hat) + " tuples is too large");
        }
        tuples = sample_without_replacement(space, n_hat, rng);
    } else {
        if (budget > kMaxRealizedTuples) {
            throw BudgetError("budget of " + to_string(budget) + " tuples is too large");
        }
        const auto m = static_cast<std::size_t>(budget);
        const std::uint32_t r = space.r();
        tuples.resize(m * r);
        for (std::size_t j = 0; j < m; ++j) {
            unrank_into(space, rng.uniform_below(universe), {tuples.data() + j * r, r});
        }
    }
    SamplingRealization realization(space, scheme, std::move(tuples), rng.describe());
    for (auto& w : warnings) realization.add_warning(std::move(w));
    return realization;
}

IncompleteUStat incomplete_ustat(const Dataset& data, const Kernel& kernel,
                                 const SamplingRealization& realization, bool retain_evals) {
    check_kernel_data(data, kernel);
    if (realization.space().n() != data.n() || realization.order() != kernel.order()) {
        throw DomainError("realization was drawn for a different (n, r)");
    }
    const std::size_t count = realization.size();
    if (count == 0 && realization.scheme().variant == Sampling::BernoulliRandomNorm) {
        throw EmptyDesignError("no realized tuples under random normalization");
    }
    const std::size_t d = kernel.output_dim();
    IncompleteUStat result{{}, realization, {}, {}};
    if (retain_evals) {
        result.kernel_evals.resize(count * d);
        double* evals = result.kernel_evals.data();
        detail::parallel_for(count, [&](std::size_t j) {
            eval_at(data, kernel, realization.tuple(j), {evals + j * d, d});
        });
        auto row = [evals, d](std::size_t j, double*) -> const double* { return evals + j * d; };
        result.eval_sum = detail::pairwise_sum(count, d, detail::row_leaf(d, row));
    } else {
        auto row = [&](std::size_t j, double* scratch) -> const double* {
            eval_at(data, kernel, realization.tuple(j), {scratch, d});
            return scratch;
        };
        result.eval_sum = detail::pairwise_sum(count, d, detail::row_leaf(d, row));
    }
    result.theta_hat = divide(result.eval_sum, realization.divisor());
    return result;
}

}  // namespace ustat
