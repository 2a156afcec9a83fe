#include "ustat/hajek.hpp"

#include <algorithm>
#include <numeric>

#include "parallel.hpp"
#include "ustat/combinat.hpp"
#include "ustat/errors.hpp"
#include "ustat/ustat.hpp"

namespace ustat {

namespace {

std::vector<std::uint32_t> resolve_s1(std::span<const std::uint32_t> s1, std::size_t n) {
    std::vector<std::uint32_t> out;
    if (s1.empty()) {
        out.resize(n);
        std::iota(out.begin(), out.end(), 0u);
        return out;
    }
    for (std::uint32_t i : s1) {
        if (i >= n) throw DomainError("S1 index out of range");
    }
    out.assign(s1.begin(), s1.end());
    return out;
}

void check_inputs(const Dataset& data, const Kernel& kernel) {
    if (kernel.order() < 2) throw DomainError("Hajek projection estimates need r >= 2");
    if (data.n() < kernel.order()) throw DomainError("need at least r observations");
    if (data.n() > UINT32_MAX) throw DomainError("too many observations");
}

// Sums h(X_{i1}, X_{others[t_1]}, ..., X_{others[t_{r-1}]}) over the position
// tuples t stored flat in `positions`, left to right.
void sum_rows_at(const Dataset& data, const Kernel& kernel, std::uint32_t i1,
                 std::span<const std::uint32_t> others, std::span<const std::uint32_t> positions,
                 std::span<double> sum, std::span<double> scratch) {
    const std::uint32_t q = kernel.order() - 1;
    std::vector<std::uint32_t> tuple(kernel.order());
    tuple[0] = i1;
    std::fill(sum.begin(), sum.end(), 0.0);
    for (std::size_t off = 0; off < positions.size(); off += q) {
        for (std::uint32_t a = 0; a < q; ++a) tuple[a + 1] = others[positions[off + a]];
        eval_at(data, kernel, tuple, scratch);
        simd::add(scratch, sum);
    }
}

// All (r-1)-subsets of [0, m) in lexicographic order, flat.
std::vector<std::uint32_t> all_tuples(std::uint32_t m, std::uint32_t q) {
    const IndexSpace space(m, q);
    std::vector<std::uint32_t> out;
    out.reserve(static_cast<std::size_t>(space.cardinality()) * q);
    std::vector<std::uint32_t> t(q);
    std::iota(t.begin(), t.end(), 0u);
    do {
        out.insert(out.end(), t.begin(), t.end());
    } while (next_tuple(t, m));
    return out;
}

// {0..n-1} \ {i1} in increasing order, i.e. the 0-based sigma map.
std::vector<std::uint32_t> others_of(std::uint32_t i1, std::size_t n) {
    std::vector<std::uint32_t> out(n - 1);
    for (std::uint32_t l = 0; l + 1 < n; ++l) out[l] = l < i1 ? l : l + 1;
    return out;
}

void finish(HajekEstimate& est) {
    est.g_bar.assign(est.d, 0.0);
    for (std::size_t i = 0; i < est.n1; ++i) simd::add(est.row(i), est.g_bar);
    for (double& v : est.g_bar) v = v / static_cast<double>(est.n1);
}

HajekEstimate shell(const Kernel& kernel, HajekConfig config, std::vector<std::uint32_t> s1) {
    HajekEstimate est;
    est.n1 = s1.size();
    est.d = kernel.output_dim();
    est.g_hat.assign(est.n1 * est.d, 0.0);
    config.s1 = std::move(s1);
    est.config = std::move(config);
    return est;
}

// Rows computed from one shared list of position tuples over [0, n-1),
// divided by `divisor`.
void fill_shared_design(HajekEstimate& est, const Dataset& data, const Kernel& kernel,
                        std::span<const std::uint32_t> positions, double divisor) {
    const std::size_t d = est.d;
    detail::parallel_for(est.n1, [&](std::size_t i) {
        const std::uint32_t i1 = est.config.s1[i];
        const auto others = others_of(i1, data.n());
        std::vector<double> scratch(d);
        std::span<double> row(est.g_hat.data() + i * d, d);
        sum_rows_at(data, kernel, i1, others, positions, row, scratch);
        for (double& v : row) v = v / divisor;
    });
    finish(est);
}

}  // namespace

std::string to_string(HajekMethod method) {
    switch (method) {
        case HajekMethod::DC: return "dc";
        case HajekMethod::RS: return "rs";
        case HajekMethod::JackknifeOracle: return "jackknife";
    }
    return "unknown";
}

std::size_t sigma_skip(std::size_t i1, std::size_t ell, std::size_t n) {
    if (n < 2 || i1 < 1 || i1 > n || ell < 1 || ell > n - 1) {
        throw DomainError("sigma_skip needs 1 <= i1 <= n and 1 <= ell <= n-1");
    }
    return ell < i1 ? ell : ell + 1;
}

Count default_rs_budget(std::size_t n, std::uint32_t r) {
    const Count cap = count(n - 1, r - 1);
    const Count suggested = 2 * static_cast<Count>(n - 1);
    return std::min(suggested, cap);
}

HajekEstimate estimate_dc(const Dataset& data, const Kernel& kernel, const HajekConfig& config,
                          const RngStream& rng) {
    check_inputs(data, kernel);
    const std::size_t n = data.n();
    const std::uint32_t q = kernel.order() - 1;
    const std::size_t L = config.dc_block_size.value_or(q);
    if (L < q) throw ConfigError("DC block size L must be at least r-1");
    const std::size_t K = config.dc_block_count.value_or((n - 1) / L);
    if (K == 0 || K * L > n - 1) {
        throw ConfigError("DC needs 1 <= K and K*L <= n-1 (K=" + std::to_string(K) +
                          ", L=" + std::to_string(L) + ", n=" + std::to_string(n) + ")");
    }
    if (count(L, q) > kJackknifeGuard) throw BudgetError("DC block enumeration exceeds the guard");

    HajekConfig resolved = config;
    resolved.method = HajekMethod::DC;
    resolved.dc_block_size = L;
    resolved.dc_block_count = K;
    auto est = shell(kernel, resolved, resolve_s1(config.s1, n));
    est.seed_record = rng.describe();

    const auto block_subsets = all_tuples(static_cast<std::uint32_t>(L), q);
    const double per_block = static_cast<double>(block_subsets.size() / q);
    const std::size_t d = est.d;
    detail::parallel_for(est.n1, [&](std::size_t i) {
        const std::uint32_t i1 = est.config.s1[i];
        const auto others = others_of(i1, n);
        std::vector<double> scratch(d);
        std::vector<double> block_sum(d);
        std::span<double> row(est.g_hat.data() + i * d, d);
        for (std::size_t k = 0; k < K; ++k) {
            std::span<const std::uint32_t> block(others.data() + k * L, L);
            sum_rows_at(data, kernel, i1, block, block_subsets, block_sum, scratch);
            for (std::size_t j = 0; j < d; ++j) row[j] += block_sum[j] / per_block;
        }
        for (double& v : row) v = v / static_cast<double>(K);
    });
    finish(est);
    return est;
}

HajekEstimate estimate_rs(const Dataset& data, const Kernel& kernel, const HajekConfig& config,
                          RngStream rng) {
    check_inputs(data, kernel);
    const std::size_t n = data.n();
    const std::uint32_t q = kernel.order() - 1;
    const IndexSpace space(static_cast<std::uint32_t>(n - 1), q);
    const Count M = config.rs_budget.value_or(default_rs_budget(n, kernel.order()));
    if (M == 0 || M > space.cardinality()) {
        throw ConfigError("RS budget M = " + to_string(M) + " must lie in [1, C(n-1, r-1)] = [1, " +
                          to_string(space.cardinality()) + "]");
    }
    HajekConfig resolved = config;
    resolved.method = HajekMethod::RS;
    resolved.rs_budget = M;
    auto est = shell(kernel, resolved, resolve_s1(config.s1, n));
    est.seed_record = rng.describe();

    const double p = M == space.cardinality() ? 1.0 : to_double(M) / to_double(space.cardinality());
    const Count m_hat = draw_binomial(space.cardinality(), p, rng);
    est.m_hat = m_hat;
    if (m_hat == 0 && config.rs_norm == RsNorm::ByMHat) {
        throw EmptyDesignError("RS design realized no tuples");
    }
    const auto positions = sample_without_replacement(space, m_hat, rng);
    const double divisor = config.rs_norm == RsNorm::ByM ? to_double(M) : to_double(m_hat);
    if (m_hat == 0) {
        finish(est);
        return est;
    }
    fill_shared_design(est, data, kernel, positions, divisor);
    return est;
}

HajekEstimate jackknife_oracle(const Dataset& data, const Kernel& kernel,
                               std::span<const std::uint32_t> s1) {
    check_inputs(data, kernel);
    const std::size_t n = data.n();
    const std::uint32_t q = kernel.order() - 1;
    const Count total = count(n - 1, q);
    if (total > kJackknifeGuard) {
        throw BudgetError("jackknife over C(n-1, r-1) = " + to_string(total) +
                          " tuples exceeds the guard of " + to_string(kJackknifeGuard));
    }
    HajekConfig config;
    config.method = HajekMethod::JackknifeOracle;
    auto est = shell(kernel, config, resolve_s1(s1, n));
    const auto positions = all_tuples(static_cast<std::uint32_t>(n - 1), q);
    fill_shared_design(est, data, kernel, positions, to_double(total));
    return est;
}

HajekEstimate estimate_hajek(const Dataset& data, const Kernel& kernel, const HajekConfig& config,
                             const RngStream& rng) {
    switch (config.method) {
        case HajekMethod::DC: return estimate_dc(data, kernel, config, rng);
        case HajekMethod::RS: return estimate_rs(data, kernel, config, rng);
        case HajekMethod::JackknifeOracle: return jackknife_oracle(data, kernel, config.s1);
    }
    throw ConfigError("unknown Hajek method");
}

}  // namespace ustat
