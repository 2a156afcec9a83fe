#include "ustat/bootstrap.hpp"

#include <algorithm>
#include <cmath>

#include "parallel.hpp"
#include "ustat/errors.hpp"
#include "ustat/simd.hpp"

namespace ustat {

std::string to_string(Procedure procedure) {
    switch (procedure) {
        case Procedure::MbDg: return "mb-dg";
        case Procedure::MbNdgDc: return "mb-ndg-dc";
        case Procedure::MbNdgRs: return "mb-ndg-rs";
        case Procedure::MbNdgPartialA: return "mb-ndg-partial-a";
    }
    return "unknown";
}

std::string to_string(MaxStatistic statistic) {
    return statistic == MaxStatistic::MaxAbs ? "max-abs" : "max";
}

namespace {

// out[b] = scale * sum_j xi_bj rows[j], with xi_bj drawn from rngs[b] in row
// order. Rows are visited in cache-sized tiles shared by the whole batch; each
// output still sees the same operations as a row-by-row loop.
void multiplier_sums(const std::vector<double>& rows, std::size_t count, std::size_t d, double scale,
                     std::span<RngStream> rngs, std::span<double> out) {
    if (out.size() != rngs.size() * d) throw DomainError("multiplier output has the wrong length");
    std::fill(out.begin(), out.end(), 0.0);
    const auto& ops = simd::active();
    const std::size_t tile = std::max<std::size_t>(1, 16384 / std::max<std::size_t>(d, 1));
    for (std::size_t lo = 0; lo < count; lo += tile) {
        const std::size_t hi = std::min(count, lo + tile);
        for (std::size_t b = 0; b < rngs.size(); ++b) {
            double* o = out.data() + b * d;
            for (std::size_t j = lo; j < hi; ++j) ops.axpy(rngs[b].normal(), rows.data() + j * d, o, d);
        }
    }
    for (std::size_t b = 0; b < rngs.size(); ++b) ops.scale(scale, out.data() + b * d, d);
}

}  // namespace

bool needs_hajek(Procedure procedure) noexcept { return procedure != Procedure::MbDg; }

Procedure default_procedure(const Kernel& kernel) noexcept {
    return kernel.spec().degeneracy_order > 0 ? Procedure::MbDg : Procedure::MbNdgDc;
}

UbSampler::UbSampler(const IncompleteUStat& ustat)
    : d_(ustat.dim()), count_(ustat.realization.size()) {
    if (!ustat.has_kernel_evals()) {
        throw StateError("U_B sharp needs the kernel evaluations; estimate with retention enabled");
    }
    const auto mean = ustat.eval_mean();
    centered_.resize(count_ * d_);
    sigma_sq_.assign(d_, 0.0);
    for (std::size_t j = 0; j < count_; ++j) {
        const double* h = ustat.kernel_evals.data() + j * d_;
        double* c = centered_.data() + j * d_;
        simd::active().sub(h, mean.data(), c, d_);
        for (std::size_t k = 0; k < d_; ++k) sigma_sq_[k] += c[k] * c[k];
    }
    for (double& v : sigma_sq_) v = v / static_cast<double>(count_);
}

void UbSampler::draw(RngStream& rng, std::span<double> out) const {
    if (out.size() != d_) throw DomainError("U_B sharp output has the wrong length");
    draw_batch({&rng, 1}, out);
}

void UbSampler::draw_batch(std::span<RngStream> rngs, std::span<double> out) const {
    multiplier_sums(centered_, count_, d_, 1.0 / std::sqrt(static_cast<double>(count_)), rngs, out);
}

UaSampler::UaSampler(const HajekEstimate& hajek, std::uint32_t r)
    : d_(hajek.d), n1_(hajek.n1) {
    if (n1_ == 0) throw StateError("U_A sharp needs at least one Hajek row");
    factor_ = static_cast<double>(r) / std::sqrt(static_cast<double>(n1_));
    centered_.resize(n1_ * d_);
    sigma_sq_.assign(d_, 0.0);
    for (std::size_t i = 0; i < n1_; ++i) {
        double* c = centered_.data() + i * d_;
        simd::active().sub(hajek.row(i).data(), hajek.g_bar.data(), c, d_);
        for (std::size_t k = 0; k < d_; ++k) sigma_sq_[k] += c[k] * c[k];
    }
    const double rr = static_cast<double>(r) * static_cast<double>(r);
    for (double& v : sigma_sq_) v = rr * v / static_cast<double>(n1_);
}

void UaSampler::draw(RngStream& rng, std::span<double> out) const {
    if (out.size() != d_) throw DomainError("U_A sharp output has the wrong length");
    draw_batch({&rng, 1}, out);
}

void UaSampler::draw_batch(std::span<RngStream> rngs, std::span<double> out) const {
    multiplier_sums(centered_, n1_, d_, factor_, rngs, out);
}

std::vector<double> draw_ub_sharp(const IncompleteUStat& ustat, RngStream& rng) {
    const UbSampler sampler(ustat);
    std::vector<double> out(sampler.dim());
    sampler.draw(rng, out);
    return out;
}

std::vector<double> draw_ua_sharp(const HajekEstimate& hajek, std::uint32_t r, RngStream& rng) {
    const UaSampler sampler(hajek, r);
    std::vector<double> out(sampler.dim());
    sampler.draw(rng, out);
    return out;
}

VarianceEstimates variance_estimators(const IncompleteUStat& ustat, const HajekEstimate* hajek,
                                      std::uint32_t r) {
    VarianceEstimates out;
    out.sigma_b_sq = UbSampler(ustat).sigma_sq();
    if (hajek != nullptr) out.sigma_a_sq = UaSampler(*hajek, r).sigma_sq();
    return out;
}

std::vector<double> normalized_statistic(const IncompleteUStat& ustat,
                                         std::span<const double> sigma_sq, NormalizationMode mode) {
    if (sigma_sq.size() != ustat.dim()) throw DomainError("variance vector has the wrong length");
    const double scale = mode == NormalizationMode::NDG
                             ? std::sqrt(static_cast<double>(ustat.realization.space().n()))
                             : std::sqrt(to_double(ustat.realization.scheme().budget));
    std::vector<double> out(ustat.dim());
    for (std::size_t j = 0; j < out.size(); ++j) {
        if (!(sigma_sq[j] > 0.0)) {
            throw DegenerateVarianceError("estimated variance of coordinate " + std::to_string(j) +
                                          " is zero");
        }
        out[j] = scale * ustat.theta_hat[j] / std::sqrt(sigma_sq[j]);
    }
    return out;
}

double bootstrap_quantile(std::span<const double> sorted, double alpha) {
    if (sorted.empty()) throw DomainError("no bootstrap replicates");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("quantile level must lie in (0, 1)");
    const auto B = static_cast<double>(sorted.size());
    // ceil((1 - alpha) B) = B - floor(alpha B); the slack absorbs representation error in alpha.
    const double k = B - std::floor(alpha * B + 1e-9);
    const auto idx = static_cast<std::size_t>(std::clamp(k, 1.0, B)) - 1;
    return sorted[idx];
}

double max_statistic(std::span<const double> v, MaxStatistic statistic) {
    return statistic == MaxStatistic::MaxAbs ? simd::max_abs(v) : simd::max_value(v);
}

double bootstrap_p_value(std::span<const double> replicates, double observed) {
    const auto exceed = std::count_if(replicates.begin(), replicates.end(),
                                      [observed](double rep) { return rep >= observed; });
    return (1.0 + static_cast<double>(exceed)) / (static_cast<double>(replicates.size()) + 1.0);
}

BootstrapInputs prepare_bootstrap(const Dataset& data, const Kernel& kernel,
                                  const SamplingScheme& scheme, const BootstrapConfig& config) {
    const RngStream root(config.seed);
    const IndexSpace space(static_cast<std::uint32_t>(data.n()), kernel.order());
    RngStream design_rng = root.substream("design");
    auto realization = sample_design(space, scheme, design_rng);
    BootstrapInputs inputs{incomplete_ustat(data, kernel, realization, true), std::nullopt};
    if (needs_hajek(config.procedure)) {
        HajekConfig hc = config.hajek;
        if (config.procedure == Procedure::MbNdgDc) hc.method = HajekMethod::DC;
        if (config.procedure == Procedure::MbNdgRs) hc.method = HajekMethod::RS;
        const RngStream hajek_rng = root.substream("hajek", static_cast<std::uint64_t>(hc.method));
        inputs.hajek = estimate_hajek(data, kernel, hc, hajek_rng);
    }
    return inputs;
}

BootstrapResult run_bootstrap(BootstrapInputs inputs, std::uint32_t r, const BootstrapConfig& config) {
    if (config.B == 0) throw ConfigError("bootstrap needs B >= 1");
    const auto& ustat = inputs.ustat;
    const std::size_t d = ustat.dim();
    const double n = static_cast<double>(ustat.realization.space().n());
    const double budget = to_double(ustat.realization.scheme().budget);
    const bool uses_a = needs_hajek(config.procedure);
    const bool uses_b = config.procedure != Procedure::MbNdgPartialA;
    if (uses_a && !inputs.hajek) throw StateError("procedure needs a Hajek estimate");

    BootstrapResult result;
    result.procedure = config.procedure;
    result.statistic = config.statistic;
    result.studentize = config.studentize;
    result.alpha_n = config.alpha_n.value_or(n / budget);
    if (!(result.alpha_n >= 0.0) || !std::isfinite(result.alpha_n)) {
        throw ConfigError("alpha_n must be a finite non-negative number");
    }
    result.scale = config.procedure == Procedure::MbDg ? std::sqrt(budget) : std::sqrt(n);
    result.seed_record = RngStream(config.seed).substream("boot").describe();

    const UbSampler ub(ustat);
    std::optional<UaSampler> ua;
    if (uses_a) ua.emplace(*inputs.hajek, r);
    result.sigma_b_sq = ub.sigma_sq();
    if (ua) result.sigma_a_sq = ua->sigma_sq();

    const double root_alpha = std::sqrt(result.alpha_n);
    const bool add_b = uses_b && (!uses_a || result.alpha_n > 0.0);
    if (config.studentize) {
        result.sigma.resize(d);
        for (std::size_t j = 0; j < d; ++j) {
            double var = 0.0;
            if (config.procedure == Procedure::MbDg) {
                var = result.sigma_b_sq[j];
            } else if (config.procedure == Procedure::MbNdgPartialA) {
                var = result.sigma_a_sq[j];
            } else {
                var = result.sigma_a_sq[j] + result.alpha_n * result.sigma_b_sq[j];
            }
            if (!(var > 0.0)) {
                throw DegenerateVarianceError("estimated variance of coordinate " + std::to_string(j) +
                                              " is zero; cannot studentize");
            }
            result.sigma[j] = std::sqrt(var);
        }
    }

    result.replicates.resize(config.B);
    if (config.store_replicates) result.replicate_vectors.resize(config.B * d);
    const RngStream boot_root = RngStream(config.seed).substream("boot");
    // Replicates in batches, so each pass over the centered rows serves several draws.
    constexpr std::size_t kBatch = 16;
    const std::size_t batches = (config.B + kBatch - 1) / kBatch;
    detail::parallel_for(batches, [&](std::size_t t) {
        const std::size_t first = t * kBatch;
        const std::size_t m = std::min(config.B, first + kBatch) - first;
        std::vector<double> v(m * d, 0.0);
        std::vector<double> tmp(m * d);
        std::vector<RngStream> streams;
        streams.reserve(m);
        if (ua) {
            for (std::size_t b = 0; b < m; ++b) streams.push_back(boot_root.substream("rep", first + b).substream("A"));
            ua->draw_batch(streams, v);
        }
        if (add_b) {
            streams.clear();
            for (std::size_t b = 0; b < m; ++b) streams.push_back(boot_root.substream("rep", first + b).substream("B"));
            ub.draw_batch(streams, tmp);
            simd::axpy(uses_a ? root_alpha : 1.0, tmp, v);
        }
        for (std::size_t b = 0; b < m; ++b) {
            std::span<double> row(v.data() + b * d, d);
            if (config.studentize) {
                for (std::size_t j = 0; j < d; ++j) row[j] = row[j] / result.sigma[j];
            }
            result.replicates[first + b] = max_statistic(row, config.statistic);
            if (config.store_replicates) {
                std::copy(row.begin(), row.end(), result.replicate_vectors.begin() + (first + b) * d);
            }
        }
    });

    std::vector<double> sorted = result.replicates;
    std::sort(sorted.begin(), sorted.end());
    for (double alpha : config.alphas) result.quantile_table[alpha] = bootstrap_quantile(sorted, alpha);
    result.inputs = std::move(inputs);
    return result;
}

BootstrapResult run_bootstrap(const Dataset& data, const Kernel& kernel, const SamplingScheme& scheme,
                              const BootstrapConfig& config) {
    return run_bootstrap(prepare_bootstrap(data, kernel, scheme, config), kernel.order(), config);
}

}  // namespace ustat
