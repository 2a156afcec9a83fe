#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ustat/bootstrap.hpp"
#include "ustat/dataset.hpp"
#include "ustat/rng.hpp"
#include "ustat/ustat.hpp"

namespace ustat {

struct Generator {
    enum class Kind { NoncentralT, GaussianPair, IidUniform };
    Kind kind = Kind::NoncentralT;
    double df = 3.0;
    double ncp = 2.0;
    double correlation = 0.0;

    static Generator noncentral_t(double df, double ncp) { return {Kind::NoncentralT, df, ncp, 0.0}; }
    static Generator gaussian_pair(double a) { return {Kind::GaussianPair, 0.0, 0.0, a}; }
    static Generator iid_uniform() { return {Kind::IidUniform, 0.0, 0.0, 0.0}; }
};

std::string to_string(const Generator& generator);

/// n x p matrix. NoncentralT and IidUniform fill every entry independently;
/// GaussianPair needs p = 2 and gives unit-variance columns with the given correlation.
Dataset generate(const Generator& generator, std::size_t n, std::size_t p, RngStream& rng);

/// Budget N as a function of n: floor(c * n^(a/b)). Parses "600", "2n",
/// "n^4/3", "4n^3/2", "0.5n".
struct BudgetRule {
    double coefficient = 1.0;
    std::uint64_t exp_num = 1;
    std::uint64_t exp_den = 1;
    bool literal = false;
    Count literal_value = 0;

    static BudgetRule parse(std::string_view text);
    static BudgetRule fixed(Count value) { return {1.0, 1, 1, true, value}; }
    static BudgetRule power(double c, std::uint64_t a, std::uint64_t b) { return {c, a, b, false, 0}; }

    Count evaluate(std::uint64_t n) const;
    std::string describe() const;
};

/// alpha from 0.01 to 0.10 by 0.005, then 0.15 to 0.95 by 0.05.
std::vector<double> default_alpha_grid();

struct ExperimentSpec {
    Generator generator;
    std::size_t n = 300;
    std::size_t p = 30;
    std::string kernel = "spearman";
    Sampling sampling = Sampling::BernoulliRandomNorm;
    BudgetRule budget = BudgetRule::power(2.0, 1, 1);
    BootstrapConfig bootstrap;
    std::size_t reps = 100;
    std::vector<double> alpha_grid = default_alpha_grid();
    std::uint64_t seed = 0;
};

struct SizeReport {
    std::map<double, double> rejection;
    std::map<double, std::size_t> rejections;
    double uniform_error = 0.0;
    std::size_t reps = 0;
    double seconds = 0.0;
};

/// Fraction of reps rejecting at each grid level; reps draw fresh data,
/// design and multipliers from substream ("rep", i) of spec.seed.
SizeReport run_size_experiment(const ExperimentSpec& spec);

/// max |R(alpha) - alpha| over grid levels in [0.01, 0.10].
double uniform_error_in_size(const std::map<double, double>& rejection);

struct PpPoint {
    double empirical;
    double reference;
};

struct PpOptions {
    std::size_t reference_reps = 2000;
    std::size_t grid_size = 99;
    std::size_t auxiliary_n = 2000;
    std::size_t gamma_h_tuples = 20000;
    std::size_t gamma_g_points = 400;
    std::size_t gamma_g_tuples = 2000;
};

/// For grid levels u_k = k/(G+1): (share of empirical draws <= the reference
/// u_k-quantile, u_k).
std::vector<PpPoint> pp_pairs(std::vector<double> empirical, std::vector<double> reference,
                              std::size_t grid_size);

/// P-P data of the scaled max statistic against its Gaussian approximation
/// with covariance r^2 Gamma_g + alpha_n Gamma_h (Gamma_h alone for MB-DG),
/// both estimated from an auxiliary sample.
std::vector<PpPoint> pp_plot_data(const ExperimentSpec& spec, const PpOptions& options = {});

struct CopulaRow {
    std::size_t rep;
    double theta_rand;
    double theta_det;
    double z_rand;
    double z_det;
};

struct CopulaSummary {
    double a = 0.0;
    double theta0 = 0.0;
    std::size_t n = 0;
    Count budget = 0;
    double mean_rand = 0.0;
    double mean_det = 0.0;
    double var_rand = 0.0;
    double var_det = 0.0;
    double se_rand = 0.0;
    double se_det = 0.0;
    std::vector<CopulaRow> rows;
};

/// Spearman correlation of a Gaussian pair: (6/pi) asin(a/2).
double gaussian_spearman(double a);

/// Spearman incomplete U-statistic of GaussianPair(a) data under Bernoulli
/// sampling, with both normalizations computed on each realization.
CopulaSummary copula_experiment(double a, std::size_t n, const BudgetRule& budget, std::size_t reps,
                                std::uint64_t seed);

struct TimingPoint {
    std::size_t n;
    std::size_t p;
    double seconds;
};

struct TimingReport {
    std::vector<TimingPoint> points;
    std::map<std::size_t, double> slope;  // per p
    bool parallel = false;
};

struct TimingSpec {
    ExperimentSpec base;
    std::vector<std::size_t> n_grid = {300, 600, 1200};
    std::vector<std::size_t> p_grid = {30};
    std::size_t runs = 3;
    bool parallel = false;
};

/// Seconds for one run at (n, p), run index k.
using Timer = std::function<double(const ExperimentSpec& spec, std::size_t run)>;

/// Wall time of estimation plus bootstrap, excluding data generation.
double time_full_bootstrap(const ExperimentSpec& spec, std::size_t run);

/// Median of spec.runs timings per grid point, after one untimed warm-up
/// run, and the OLS slope of log(seconds) on log(n) per p.
TimingReport timing_bench(const TimingSpec& spec, const Timer& timer = time_full_bootstrap);

/// Least-squares slope of y on x with intercept.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);

void write_size_report_csv(const std::string& path, const SizeReport& report);
void write_pp_csv(const std::string& path, const std::vector<PpPoint>& points);
void write_timing_csv(const std::string& path, const TimingReport& report);
void write_copula_csv(const std::string& path, const CopulaSummary& summary);

}  // namespace ustat
