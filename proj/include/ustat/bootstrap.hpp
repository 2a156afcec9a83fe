#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ustat/dataset.hpp"
#include "ustat/hajek.hpp"
#include "ustat/kernels.hpp"
#include "ustat/rng.hpp"
#include "ustat/ustat.hpp"

namespace ustat {

enum class Procedure {
    MbDg,           // U_B sharp alone, for degenerate kernels
    MbNdgDc,        // U_A sharp + sqrt(alpha_n) U_B sharp, divide-and-conquer g
    MbNdgRs,        // same, random-sampling g
    MbNdgPartialA,  // U_A sharp alone
};

enum class MaxStatistic { MaxAbs, Max };

std::string to_string(Procedure procedure);
std::string to_string(MaxStatistic statistic);

bool needs_hajek(Procedure procedure) noexcept;

/// MB-NDG-DC for non-degenerate kernels, MB-DG for degenerate ones.
Procedure default_procedure(const Kernel& kernel) noexcept;

struct BootstrapConfig {
    Procedure procedure = Procedure::MbNdgDc;
    std::size_t B = 200;
    /// n/N from the sampling budget when unset.
    std::optional<double> alpha_n;
    /// Method is forced to DC or RS by MbNdgDc / MbNdgRs.
    HajekConfig hajek;
    MaxStatistic statistic = MaxStatistic::MaxAbs;
    /// Divide every coordinate by its estimated standard deviation before the max.
    bool studentize = false;
    bool store_replicates = false;
    std::vector<double> alphas = {0.01, 0.05, 0.10};
    std::uint64_t seed = 0;
};

struct VarianceEstimates {
    std::vector<double> sigma_a_sq;  // empty without a Hajek estimate
    std::vector<double> sigma_b_sq;
};

/// The data-dependent pieces fixed before the replicate loop.
struct BootstrapInputs {
    IncompleteUStat ustat;
    std::optional<HajekEstimate> hajek;
};

struct BootstrapResult {
    Procedure procedure = Procedure::MbNdgDc;
    MaxStatistic statistic = MaxStatistic::MaxAbs;
    bool studentize = false;
    double alpha_n = 0.0;
    /// sqrt(n) for the non-degenerate procedures, sqrt(N) for MB-DG. Replicates
    /// live on the scale of scale * U'.
    double scale = 1.0;
    std::vector<double> replicates;        // B max-statistics
    std::vector<double> replicate_vectors;  // B x d, only with store_replicates
    std::map<double, double> quantile_table;
    std::vector<double> sigma_b_sq;
    std::vector<double> sigma_a_sq;
    /// Per-coordinate standard deviations used when studentizing.
    std::vector<double> sigma;
    std::string seed_record;
    BootstrapInputs inputs;
};

/// Precomputed centered kernel values h(X_j) - mean; draws U_B sharp.
class UbSampler {
public:
    explicit UbSampler(const IncompleteUStat& ustat);
    void draw(RngStream& rng, std::span<double> out) const;
    /// One draw per stream into consecutive rows of out (rngs.size() x d).
    /// Same values as calling draw() on each stream in turn.
    void draw_batch(std::span<RngStream> rngs, std::span<double> out) const;
    std::size_t dim() const noexcept { return d_; }
    const std::vector<double>& sigma_sq() const noexcept { return sigma_sq_; }

private:
    std::size_t d_;
    std::size_t count_;
    std::vector<double> centered_;
    std::vector<double> sigma_sq_;
};

/// Precomputed centered Hajek rows; draws U_A sharp.
class UaSampler {
public:
    UaSampler(const HajekEstimate& hajek, std::uint32_t r);
    void draw(RngStream& rng, std::span<double> out) const;
    void draw_batch(std::span<RngStream> rngs, std::span<double> out) const;
    std::size_t dim() const noexcept { return d_; }
    const std::vector<double>& sigma_sq() const noexcept { return sigma_sq_; }

private:
    std::size_t d_;
    std::size_t n1_;
    double factor_;
    std::vector<double> centered_;
    std::vector<double> sigma_sq_;
};

/// (1/sqrt(#tuples)) sum_j xi_j (h(X_j) - mean). StateError without retained evals.
std::vector<double> draw_ub_sharp(const IncompleteUStat& ustat, RngStream& rng);

/// (r/sqrt(n1)) sum_i xi_i (g_hat_i - g_bar).
std::vector<double> draw_ua_sharp(const HajekEstimate& hajek, std::uint32_t r, RngStream& rng);

VarianceEstimates variance_estimators(const IncompleteUStat& ustat, const HajekEstimate* hajek,
                                      std::uint32_t r);

enum class NormalizationMode { NDG, DG };

/// sqrt(n) U'_j / sigma_j (NDG) or sqrt(N) U'_j / sigma_j (DG), from the
/// variances sigma_sq. DegenerateVarianceError if any variance is 0.
std::vector<double> normalized_statistic(const IncompleteUStat& ustat,
                                         std::span<const double> sigma_sq, NormalizationMode mode);

/// ceil((1 - alpha) B)-th smallest replicate, clamped to [1, B].
double bootstrap_quantile(std::span<const double> sorted_replicates, double alpha);

/// max_j |v_j| or max_j v_j.
double max_statistic(std::span<const double> v, MaxStatistic statistic);

/// (1 + #{replicates >= observed}) / (B + 1), observed on the replicate scale.
double bootstrap_p_value(std::span<const double> replicates, double observed);

/// Estimates the incomplete U-statistic (and g when needed) from substreams of
/// config.seed, then runs the replicate loop.
BootstrapResult run_bootstrap(const Dataset& data, const Kernel& kernel, const SamplingScheme& scheme,
                              const BootstrapConfig& config);

/// Replicate loop over already-fixed inputs. inputs.ustat must retain evals.
BootstrapResult run_bootstrap(BootstrapInputs inputs, std::uint32_t r, const BootstrapConfig& config);

/// Fixes the data-dependent inputs: "design" and "hajek" substreams of config.seed.
BootstrapInputs prepare_bootstrap(const Dataset& data, const Kernel& kernel,
                                  const SamplingScheme& scheme, const BootstrapConfig& config);

}  // namespace ustat
