#include "ustat/sim.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include "parallel.hpp"
#include "ustat/errors.hpp"
#include "ustat/infer.hpp"
#include "ustat/simd.hpp"
#include "ustat/threads.hpp"

namespace ustat {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::optional<Count> checked_pow(Count base, std::uint64_t exp) {
    Count out = 1;
    for (std::uint64_t i = 0; i < exp; ++i) {
        if (base != 0 && out > kCountMax / base) return std::nullopt;
        out *= base;
    }
    return out;
}

// m <= c * n^(a/b)  <=>  m^b <= c^b n^a, for integer c.
std::optional<bool> fits_budget(Count m, std::uint64_t c, std::uint64_t n, std::uint64_t a,
                                std::uint64_t b) {
    const auto lhs = checked_pow(m, b);
    const auto cb = checked_pow(c, b);
    const auto na = checked_pow(n, a);
    if (!lhs || !cb || !na) return std::nullopt;
    if (*na != 0 && *cb > kCountMax / *na) return std::nullopt;
    return *lhs <= *cb * *na;
}

std::uint64_t parse_uint(std::string_view text, std::string_view whole) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw DomainError("malformed budget expression '" + std::string(whole) + "'");
    }
    return value;
}

std::ofstream open_csv(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << std::setprecision(17);
    return out;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double variance_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

SamplingScheme scheme_for(const ExperimentSpec& spec) {
    return SamplingScheme{spec.sampling, spec.budget.evaluate(spec.n)};
}

BootstrapConfig rep_config(const ExperimentSpec& spec, const RngStream& rep) {
    BootstrapConfig config = spec.bootstrap;
    config.alphas = spec.alpha_grid;
    config.seed = rep.substream("boot").next_u64();
    return config;
}

}  // namespace

std::string to_string(const Generator& generator) {
    std::ostringstream out;
    switch (generator.kind) {
        case Generator::Kind::NoncentralT:
            out << "noncentral-t(df=" << generator.df << ",ncp=" << generator.ncp << ")";
            break;
        case Generator::Kind::GaussianPair:
            out << "gaussian-pair(a=" << generator.correlation << ")";
            break;
        case Generator::Kind::IidUniform: out << "iid-uniform"; break;
    }
    return out.str();
}

Dataset generate(const Generator& generator, std::size_t n, std::size_t p, RngStream& rng) {
    if (n == 0 || p == 0) throw DomainError("generate needs n >= 1 and p >= 1");
    Dataset data(n, p);
    switch (generator.kind) {
        case Generator::Kind::NoncentralT: {
            if (!(generator.df > 0.0)) throw DomainError("noncentral t needs df > 0");
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < p; ++j) {
                    const double z = generator.ncp + rng.normal();
                    data(i, j) = z / std::sqrt(rng.chi_square(generator.df) / generator.df);
                }
            }
            break;
        }
        case Generator::Kind::GaussianPair: {
            const double a = generator.correlation;
            if (p != 2) throw DomainError("the Gaussian pair generator needs p = 2");
            if (!(std::fabs(a) < 1.0)) throw DomainError("correlation must lie in (-1, 1)");
            const double b = std::sqrt(1.0 - a * a);
            for (std::size_t i = 0; i < n; ++i) {
                const double z1 = rng.normal();
                const double z2 = rng.normal();
                data(i, 0) = z1;
                data(i, 1) = a * z1 + b * z2;
            }
            break;
        }
        case Generator::Kind::IidUniform:
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < p; ++j) data(i, j) = rng.uniform();
            }
            break;
    }
    return data;
}

BudgetRule BudgetRule::parse(std::string_view text) {
    const std::string whole(text);
    if (text.empty()) throw DomainError("empty budget expression");
    const auto npos = text.find('n');
    if (npos == std::string_view::npos) return fixed(parse_count(text));

    BudgetRule rule = power(1.0, 1, 1);
    std::string_view coef = text.substr(0, npos);
    if (!coef.empty() && coef.back() == '*') coef.remove_suffix(1);
    if (!coef.empty()) {
        double c = 0.0;
        const auto [ptr, ec] = std::from_chars(coef.data(), coef.data() + coef.size(), c);
        if (ec != std::errc() || ptr != coef.data() + coef.size() || !(c > 0.0) || !std::isfinite(c)) {
            throw DomainError("malformed budget coefficient in '" + whole + "'");
        }
        rule.coefficient = c;
    }
    std::string_view rest = text.substr(npos + 1);
    if (!rest.empty()) {
        if (rest.front() != '^') throw DomainError("malformed budget expression '" + whole + "'");
        rest.remove_prefix(1);
        const auto slash = rest.find('/');
        rule.exp_num = parse_uint(rest.substr(0, slash), text);
        if (slash != std::string_view::npos) rule.exp_den = parse_uint(rest.substr(slash + 1), text);
        if (rule.exp_num == 0 || rule.exp_den == 0) {
            throw DomainError("budget exponent must be positive in '" + whole + "'");
        }
    }
    return rule;
}

Count BudgetRule::evaluate(std::uint64_t n) const {
    if (literal) return literal_value;
    const double x = coefficient * std::pow(static_cast<double>(n),
                                            static_cast<double>(exp_num) / static_cast<double>(exp_den));
    if (!(x < 1e38)) throw OverflowError("budget " + describe() + " overflows at n = " + std::to_string(n));
    auto m = static_cast<Count>(std::floor(x));
    const double c = coefficient;
    if (c == std::floor(c) && c <= 1e6) {
        // Correct the floating-point floor against the exact integer inequality.
        const auto ci = static_cast<std::uint64_t>(c);
        auto fits = [&](Count v) { return fits_budget(v, ci, n, exp_num, exp_den); };
        auto up = fits(m + 1);
        while (up && *up) {
            ++m;
            up = fits(m + 1);
        }
        auto ok = fits(m);
        while (m > 0 && ok && !*ok) {
            --m;
            ok = fits(m);
        }
    }
    return m;
}

std::string BudgetRule::describe() const {
    if (literal) return to_string(literal_value);
    std::ostringstream out;
    if (coefficient != 1.0) out << coefficient;
    out << 'n';
    if (exp_num != 1 || exp_den != 1) {
        out << '^' << exp_num;
        if (exp_den != 1) out << '/' << exp_den;
    }
    return out.str();
}

std::vector<double> default_alpha_grid() {
    std::vector<double> grid;
    for (int k = 10; k <= 100; k += 5) grid.push_back(k / 1000.0);
    for (int k = 15; k <= 95; k += 5) grid.push_back(k / 100.0);
    return grid;
}

double uniform_error_in_size(const std::map<double, double>& rejection) {
    double worst = 0.0;
    for (const auto& [alpha, rate] : rejection) {
        if (alpha >= 0.01 - 1e-12 && alpha <= 0.10 + 1e-12) worst = std::max(worst, std::fabs(rate - alpha));
    }
    return worst;
}

SizeReport run_size_experiment(const ExperimentSpec& spec) {
    if (spec.reps == 0) throw ConfigError("experiment needs reps >= 1");
    for (double alpha : spec.alpha_grid) {
        if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha grid must lie in (0, 1)");
    }
    const auto start = std::chrono::steady_clock::now();
    const RngStream root(spec.seed);
    const Kernel kernel = make_kernel(spec.kernel, spec.p);
    const SamplingScheme scheme = scheme_for(spec);
    const std::size_t levels = spec.alpha_grid.size();
    std::vector<char> rejects(spec.reps * levels, 0);

    detail::parallel_for(spec.reps, [&](std::size_t i) {
        const RngStream rep = root.substream("rep", i);
        RngStream data_rng = rep.substream("data");
        const Dataset data = generate(spec.generator, spec.n, spec.p, data_rng);
        const auto result = pairwise_independence_test(data, kernel, scheme, rep_config(spec, rep));
        for (std::size_t k = 0; k < levels; ++k) {
            rejects[i * levels + k] = result.reject.at(spec.alpha_grid[k]) ? 1 : 0;
        }
    });

    SizeReport report;
    report.reps = spec.reps;
    for (std::size_t k = 0; k < levels; ++k) {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < spec.reps; ++i) hits += rejects[i * levels + k];
        report.rejections[spec.alpha_grid[k]] = hits;
        report.rejection[spec.alpha_grid[k]] = static_cast<double>(hits) / static_cast<double>(spec.reps);
    }
    report.uniform_error = uniform_error_in_size(report.rejection);
    report.seconds = seconds_since(start);
    return report;
}

std::vector<PpPoint> pp_pairs(std::vector<double> empirical, std::vector<double> reference,
                              std::size_t grid_size) {
    if (empirical.empty() || reference.empty()) throw DomainError("P-P data needs samples");
    std::sort(empirical.begin(), empirical.end());
    std::sort(reference.begin(), reference.end());
    std::vector<PpPoint> out;
    out.reserve(grid_size);
    const auto R = static_cast<double>(reference.size());
    for (std::size_t k = 1; k <= grid_size; ++k) {
        const double u = static_cast<double>(k) / static_cast<double>(grid_size + 1);
        const double rank = std::clamp(std::ceil(u * R - 1e-9), 1.0, R);
        const double q = reference[static_cast<std::size_t>(rank) - 1];
        const auto below = std::upper_bound(empirical.begin(), empirical.end(), q) - empirical.begin();
        out.push_back({static_cast<double>(below) / static_cast<double>(empirical.size()), u});
    }
    return out;
}

std::vector<PpPoint> pp_plot_data(const ExperimentSpec& spec, const PpOptions& options) {
    if (spec.reps == 0 || options.reference_reps == 0) throw ConfigError("P-P data needs reps >= 1");
    const RngStream root(spec.seed);
    const Kernel kernel = make_kernel(spec.kernel, spec.p);
    const SamplingScheme scheme = scheme_for(spec);
    const std::uint32_t r = kernel.order();
    const std::size_t d = kernel.output_dim();
    const bool degenerate = spec.bootstrap.procedure == Procedure::MbDg;
    const double n = static_cast<double>(spec.n);
    const double budget = to_double(scheme.budget);
    const double alpha_n = spec.bootstrap.alpha_n.value_or(n / budget);
    const double scale = degenerate ? std::sqrt(budget) : std::sqrt(n);
    const MaxStatistic stat = spec.bootstrap.statistic;

    const std::size_t aux_n = options.auxiliary_n;
    if (aux_n <= r) throw ConfigError("auxiliary sample must exceed the kernel order");
    const double cells = static_cast<double>(options.gamma_h_tuples + options.gamma_g_points) * static_cast<double>(d);
    if (cells > 2e8) throw BudgetError("reference covariance terms exceed the memory guard");

    std::vector<double> empirical(spec.reps);
    const IndexSpace space(static_cast<std::uint32_t>(spec.n), r);
    detail::parallel_for(spec.reps, [&](std::size_t i) {
        const RngStream rep = root.substream("rep", i);
        RngStream data_rng = rep.substream("data");
        RngStream design_rng = rep.substream("design");
        const Dataset data = generate(spec.generator, spec.n, spec.p, data_rng);
        const auto est = incomplete_ustat(data, kernel, sample_design(space, scheme, design_rng));
        std::vector<double> v = est.theta_hat;
        simd::scale(scale, v);
        empirical[i] = max_statistic(v, stat);
    });

    // Plug-in terms whose multiplier sums are Gaussian with covariance Gamma_h and Gamma_g.
    RngStream aux_rng = root.substream("aux");
    const Dataset aux = generate(spec.generator, aux_n, spec.p, aux_rng);
    const IndexSpace aux_space(static_cast<std::uint32_t>(aux_n), r);
    auto center = [d](std::vector<double>& rows, std::size_t count) {
        std::vector<double> mean(d, 0.0);
        for (std::size_t j = 0; j < count; ++j) simd::add({rows.data() + j * d, d}, mean);
        for (double& m : mean) m = m / static_cast<double>(count);
        for (std::size_t j = 0; j < count; ++j) {
            simd::sub({rows.data() + j * d, d}, mean, {rows.data() + j * d, d});
        }
    };
    const std::size_t kh = options.gamma_h_tuples;
    std::vector<double> h_terms(kh * d);
    {
        RngStream rng = root.substream("gamma-h");
        std::vector<std::uint32_t> tuple(r);
        for (std::size_t j = 0; j < kh; ++j) {
            unrank_into(aux_space, rng.uniform_below(aux_space.cardinality()), tuple);
            eval_at(aux, kernel, tuple, {h_terms.data() + j * d, d});
        }
        center(h_terms, kh);
    }
    const std::size_t kg = degenerate ? 0 : std::min(options.gamma_g_points, aux_n);
    std::vector<double> g_terms(kg * d, 0.0);
    if (kg > 0) {
        const IndexSpace rest(static_cast<std::uint32_t>(aux_n - 1), r - 1);
        detail::parallel_for(kg, [&](std::size_t i) {
            RngStream rng = root.substream("gamma-g", i);
            std::vector<std::uint32_t> pos(r - 1);
            std::vector<std::uint32_t> tuple(r);
            std::vector<double> scratch(d);
            std::span<double> row(g_terms.data() + i * d, d);
            const auto i1 = static_cast<std::uint32_t>(i);
            tuple[0] = i1;
            for (std::size_t t = 0; t < options.gamma_g_tuples; ++t) {
                unrank_into(rest, rng.uniform_below(rest.cardinality()), pos);
                for (std::uint32_t a = 0; a + 1 < r; ++a) tuple[a + 1] = pos[a] < i1 ? pos[a] : pos[a] + 1;
                eval_at(aux, kernel, tuple, scratch);
                simd::add(scratch, row);
            }
            for (double& v : row) v = v / static_cast<double>(options.gamma_g_tuples);
        });
        center(g_terms, kg);
    }

    const double h_weight = (degenerate ? 1.0 : std::sqrt(alpha_n)) / std::sqrt(static_cast<double>(kh));
    const double g_weight = kg > 0 ? static_cast<double>(r) / std::sqrt(static_cast<double>(kg)) : 0.0;
    std::vector<double> reference(options.reference_reps);
    detail::parallel_for(options.reference_reps, [&](std::size_t k) {
        RngStream rng = root.substream("reference", k);
        std::vector<double> v(d, 0.0);
        const auto& ops = simd::active();
        for (std::size_t i = 0; i < kg; ++i) ops.axpy(g_weight * rng.normal(), g_terms.data() + i * d, v.data(), d);
        for (std::size_t j = 0; j < kh; ++j) ops.axpy(h_weight * rng.normal(), h_terms.data() + j * d, v.data(), d);
        reference[k] = max_statistic(v, stat);
    });
    return pp_pairs(std::move(empirical), std::move(reference), options.grid_size);
}

double gaussian_spearman(double a) { return 6.0 / std::numbers::pi * std::asin(a / 2.0); }

CopulaSummary copula_experiment(double a, std::size_t n, const BudgetRule& budget, std::size_t reps,
                                std::uint64_t seed) {
    if (!(std::fabs(a) < 1.0)) throw DomainError("correlation must lie in (-1, 1)");
    if (reps == 0) throw ConfigError("copula experiment needs reps >= 1");
    CopulaSummary summary;
    summary.a = a;
    summary.n = n;
    summary.theta0 = gaussian_spearman(a);
    summary.budget = budget.evaluate(n);
    const Kernel kernel = make_spearman(2);
    const IndexSpace space(static_cast<std::uint32_t>(n), kernel.order());
    const SamplingScheme scheme{Sampling::BernoulliRandomNorm, summary.budget};
    const RngStream root(seed);
    const double root_n = std::sqrt(static_cast<double>(n));
    summary.rows.resize(reps);
    detail::parallel_for(reps, [&](std::size_t i) {
        const RngStream rep = root.substream("rep", i);
        RngStream data_rng = rep.substream("data");
        RngStream design_rng = rep.substream("design");
        const Dataset data = generate(Generator::gaussian_pair(a), n, 2, data_rng);
        const auto est = incomplete_ustat(data, kernel, sample_design(space, scheme, design_rng));
        const double rand = est.theta_hat[0];
        const double det = est.eval_sum[0] / to_double(summary.budget);
        summary.rows[i] = {i, rand, det, root_n * (rand - summary.theta0), root_n * (det - summary.theta0)};
    });
    std::vector<double> rand(reps);
    std::vector<double> det(reps);
    for (std::size_t i = 0; i < reps; ++i) {
        rand[i] = summary.rows[i].theta_rand;
        det[i] = summary.rows[i].theta_det;
    }
    summary.mean_rand = mean_of(rand);
    summary.mean_det = mean_of(det);
    summary.var_rand = variance_of(rand);
    summary.var_det = variance_of(det);
    summary.se_rand = std::sqrt(summary.var_rand / static_cast<double>(reps));
    summary.se_det = std::sqrt(summary.var_det / static_cast<double>(reps));
    return summary;
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("OLS needs two or more paired points");
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (!(sxx > 0.0)) throw DomainError("OLS needs distinct x values");
    return sxy / sxx;
}

double time_full_bootstrap(const ExperimentSpec& spec, std::size_t run) {
    const RngStream root(spec.seed);
    RngStream data_rng = root.substream("timing-data", run);
    const Dataset data = generate(spec.generator, spec.n, spec.p, data_rng);
    BootstrapConfig config = spec.bootstrap;
    config.seed = root.substream("timing-boot", run).next_u64();
    const auto start = std::chrono::steady_clock::now();
    const Kernel kernel = make_kernel(spec.kernel, spec.p);
    const auto result = pairwise_independence_test(data, kernel, scheme_for(spec), config);
    const double elapsed = seconds_since(start);
    if (!std::isfinite(result.statistic)) throw StateError("timing run produced a non-finite statistic");
    return elapsed;
}

TimingReport timing_bench(const TimingSpec& spec, const Timer& timer) {
    if (spec.n_grid.size() < 3) throw ConfigError("timing needs at least three sample sizes");
    if (spec.runs == 0) throw ConfigError("timing needs runs >= 1");
    TimingReport report;
    report.parallel = spec.parallel;
    const int saved_threads = max_threads();
    if (!spec.parallel) set_threads(1);
    try {
        for (std::size_t p : spec.p_grid) {
            std::vector<double> log_n;
            std::vector<double> log_t;
            for (std::size_t n : spec.n_grid) {
                ExperimentSpec point = spec.base;
                point.n = n;
                point.p = p;
                timer(point, spec.runs);  // warm-up, not recorded
                std::vector<double> times;
                for (std::size_t k = 0; k < spec.runs; ++k) times.push_back(timer(point, k));
                std::sort(times.begin(), times.end());
                const std::size_t m = times.size();
                const double median = m % 2 == 1 ? times[m / 2] : 0.5 * (times[m / 2 - 1] + times[m / 2]);
                report.points.push_back({n, p, median});
                log_n.push_back(std::log(static_cast<double>(n)));
                log_t.push_back(std::log(median));
            }
            report.slope[p] = ols_slope(log_n, log_t);
        }
    } catch (...) {
        set_threads(saved_threads);
        throw;
    }
    set_threads(saved_threads);
    return report;
}

void write_size_report_csv(const std::string& path, const SizeReport& report) {
    auto out = open_csv(path);
    out << "alpha,rejection_rate\n";
    for (const auto& [alpha, rate] : report.rejection) out << alpha << ',' << rate << '\n';
}

void write_pp_csv(const std::string& path, const std::vector<PpPoint>& points) {
    auto out = open_csv(path);
    out << "emp,ref\n";
    for (const auto& pt : points) out << pt.empirical << ',' << pt.reference << '\n';
}

void write_timing_csv(const std::string& path, const TimingReport& report) {
    auto out = open_csv(path);
    out << "n,p,seconds\n";
    for (const auto& pt : report.points) out << pt.n << ',' << pt.p << ',' << pt.seconds << '\n';
}

void write_copula_csv(const std::string& path, const CopulaSummary& summary) {
    auto out = open_csv(path);
    out << "rep,theta_rand,theta_det,z_rand,z_det\n";
    for (const auto& row : summary.rows) {
        out << row.rep << ',' << row.theta_rand << ',' << row.theta_det << ',' << row.z_rand << ','
            << row.z_det << '\n';
    }
}

}  // namespace ustat
