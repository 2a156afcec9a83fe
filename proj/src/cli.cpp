#include "ustat/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ustat/bootstrap.hpp"
#include "ustat/errors.hpp"
#include "ustat/hajek.hpp"
#include "ustat/infer.hpp"
#include "ustat/sim.hpp"
#include "ustat/simd.hpp"
#include "ustat/threads.hpp"
#include "ustat/ustat.hpp"

namespace ustat::cli {

using nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

// Parses a finite decimal; false for anything else, including nan and inf.
bool parse_number(std::string_view cell, double& value) {
    if (cell.empty()) return false;
    if (cell.front() == '+') cell.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(value);
}

json count_json(Count c) {
    if (c <= (Count{1} << 53)) return static_cast<std::uint64_t>(c);
    return to_string(c);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ustat::ParseError("cannot open " + path, 0, 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct Options {
    std::uint64_t seed = 0;
    std::string kernel = "spearman";
    std::string sampling = "bernoulli";
    std::string budget = "2n";
    std::size_t B = 200;
    std::string hajek;
    std::size_t dc_K = 0;
    std::size_t dc_L = 0;
    std::string rs_M;
    std::string rs_norm = "m";
    std::size_t s1_size = 0;
    std::string bootstrap;
    bool store_replicates = false;
    std::string statistic = "max-abs";
    bool studentize = false;
    std::string out;
    int threads = 0;
    std::vector<double> alphas = {0.01, 0.05, 0.10};
    std::string data_path;

    std::string experiment = "size";
    std::string generator = "noncentral-t";
    double df = 3.0;
    double ncp = 2.0;
    double correlation = 0.9;
    std::size_t n = 300;
    std::size_t p = 30;
    std::size_t reps = 100;
    std::string out_dir = ".";
    std::size_t pp_grid = 99;
    std::size_t pp_reference_reps = 2000;

    std::vector<std::size_t> n_grid = {300, 600, 1200};
    std::vector<std::size_t> p_grid = {30};
    std::size_t runs = 3;
    bool bench_parallel = false;

    std::string what = "complete";
    std::string manifest_path;

    // Set when the flag was given explicitly.
    bool budget_given = false;
    bool dc_K_given = false;
    bool dc_L_given = false;
    bool rs_M_given = false;
    bool s1_given = false;
};

Sampling parse_sampling(const std::string& s) {
    if (s == "bernoulli") return Sampling::BernoulliRandomNorm;
    if (s == "bernoulli-det") return Sampling::BernoulliDeterministicNorm;
    return Sampling::WithReplacement;
}

Procedure parse_procedure(const std::string& s) {
    if (s == "mb-dg") return Procedure::MbDg;
    if (s == "mb-ndg-rs") return Procedure::MbNdgRs;
    if (s == "mb-ndg-partial-a") return Procedure::MbNdgPartialA;
    return Procedure::MbNdgDc;
}

HajekMethod parse_hajek(const std::string& s) {
    if (s == "rs") return HajekMethod::RS;
    if (s == "jackknife") return HajekMethod::JackknifeOracle;
    return HajekMethod::DC;
}

BudgetRule budget_rule(const std::string& text) {
    try {
        return BudgetRule::parse(text);
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
}

HajekConfig hajek_config(const Options& o, std::size_t n) {
    HajekConfig hc;
    if (!o.hajek.empty()) hc.method = parse_hajek(o.hajek);
    if (o.dc_L_given) hc.dc_block_size = o.dc_L;
    if (o.dc_K_given) hc.dc_block_count = o.dc_K;
    if (o.rs_M_given) {
        try {
            hc.rs_budget = parse_count(o.rs_M);
        } catch (const DomainError& e) {
            throw UsageError(std::string("--rs-M: ") + e.what());
        }
    }
    hc.rs_norm = o.rs_norm == "mhat" ? RsNorm::ByMHat : RsNorm::ByM;
    if (o.s1_given) {
        if (o.s1_size == 0 || o.s1_size > n) throw UsageError("--s1-size must lie in [1, n]");
        for (std::uint32_t i = 0; i < o.s1_size; ++i) hc.s1.push_back(i);
    }
    return hc;
}

BootstrapConfig bootstrap_config(const Options& o, const Kernel& kernel, std::size_t n) {
    BootstrapConfig config;
    config.procedure = o.bootstrap.empty() ? default_procedure(kernel) : parse_procedure(o.bootstrap);
    if (!o.hajek.empty()) {
        const auto method = parse_hajek(o.hajek);
        if ((config.procedure == Procedure::MbNdgDc && method != HajekMethod::DC) ||
            (config.procedure == Procedure::MbNdgRs && method != HajekMethod::RS)) {
            throw UsageError("--hajek " + o.hajek + " conflicts with --bootstrap " + to_string(config.procedure));
        }
    }
    config.B = o.B;
    config.hajek = hajek_config(o, n);
    if (config.procedure == Procedure::MbNdgDc) config.hajek.method = HajekMethod::DC;
    if (config.procedure == Procedure::MbNdgRs) config.hajek.method = HajekMethod::RS;
    config.statistic = o.statistic == "max" ? MaxStatistic::Max : MaxStatistic::MaxAbs;
    config.studentize = o.studentize;
    config.store_replicates = o.store_replicates;
    config.alphas = o.alphas;
    config.seed = o.seed;
    return config;
}

Generator generator_of(const Options& o) {
    if (o.generator == "gaussian-pair") return Generator::gaussian_pair(o.correlation);
    if (o.generator == "uniform") return Generator::iid_uniform();
    return Generator::noncentral_t(o.df, o.ncp);
}

json pairs_json(std::size_t p) {
    const PairIndexMap map(p);
    json pairs = json::array();
    for (std::size_t idx = 0; idx < map.size(); ++idx) {
        const auto [j, k] = map.pair(idx);
        pairs.push_back({j + 1, k + 1});
    }
    return pairs;
}

json hajek_json(const HajekConfig& hc) {
    json j = {{"method", to_string(hc.method)}, {"rs_norm", hc.rs_norm == RsNorm::ByM ? "m" : "mhat"}};
    if (hc.dc_block_size) j["dc_L"] = *hc.dc_block_size;
    if (hc.dc_block_count) j["dc_K"] = *hc.dc_block_count;
    if (hc.rs_budget) j["rs_M"] = count_json(*hc.rs_budget);
    if (!hc.s1.empty()) j["s1_size"] = hc.s1.size();
    return j;
}

struct Invocation {
    std::string command;
    std::vector<std::string> args;  // replayable arguments
    Options options;
};

json manifest(const Invocation& inv, const json& config, const json& timings) {
    json m = {{"version", USTAT_VERSION},
              {"schema_version", kSchemaVersion},
              {"command", inv.command},
              {"seed", inv.options.seed},
              {"args", inv.args},
              {"config", config},
              {"simd", std::string(simd::name(simd::active().level))},
              {"threads", max_threads()},
              {"timings", timings}};
    if (!inv.options.data_path.empty()) {
        m["input"] = {{"path", inv.options.data_path}, {"digest", file_digest(inv.options.data_path)}};
    }
    return m;
}

void warn_all(const std::vector<std::string>& warnings, std::ostream& err) {
    for (const auto& w : warnings) err << "warning: " << w << '\n';
}

json cmd_estimate(const Invocation& inv, std::ostream& err) {
    const Options& o = inv.options;
    const auto start = std::chrono::steady_clock::now();
    const Dataset data = load_csv(o.data_path);
    const Kernel kernel = make_kernel(o.kernel, data.p());
    const SamplingScheme scheme{parse_sampling(o.sampling), budget_rule(o.budget).evaluate(data.n())};
    const IndexSpace space(static_cast<std::uint32_t>(data.n()), kernel.order());
    RngStream rng = RngStream(o.seed).substream("design");
    const auto realization = sample_design(space, scheme, rng);
    warn_all(realization.warnings(), err);
    const auto est = incomplete_ustat(data, kernel, realization);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const json config = {{"kernel", kernel.name()}, {"sampling", to_string(scheme.variant)},
                         {"budget_rule", o.budget}, {"budget", count_json(scheme.budget)}};
    return {{"schema_version", kSchemaVersion},
            {"command", "estimate"},
            {"kernel", kernel.name()},
            {"n", data.n()},
            {"p", data.p()},
            {"d", kernel.output_dim()},
            {"pairs", pairs_json(data.p())},
            {"theta_hat", est.theta_hat},
            {"sampling", to_string(scheme.variant)},
            {"budget", count_json(scheme.budget)},
            {"n_hat", count_json(realization.n_hat())},
            {"divisor", realization.divisor()},
            {"cardinality", count_json(space.cardinality())},
            {"warnings", realization.warnings()},
            {"manifest", manifest(inv, config, {{"total_seconds", seconds}})}};
}

json cmd_test(const Invocation& inv, std::ostream& err) {
    const Options& o = inv.options;
    const Dataset data = load_csv(o.data_path);
    const Kernel kernel = make_kernel(o.kernel, data.p());
    const SamplingScheme scheme{parse_sampling(o.sampling), budget_rule(o.budget).evaluate(data.n())};
    const BootstrapConfig config = bootstrap_config(o, kernel, data.n());
    const TestResult result = pairwise_independence_test(data, kernel, scheme, config);
    const auto& boot = result.bootstrap;
    const auto& est = result.ustat();
    warn_all(est.realization.warnings(), err);

    json levels = json::array();
    for (const auto& [alpha, critical] : result.critical_values) {
        levels.push_back({{"alpha", alpha},
                          {"critical_value", critical},
                          {"bootstrap_quantile", boot.quantile_table.at(alpha)},
                          {"reject", result.reject.at(alpha)}});
    }
    json resolved = {{"kernel", kernel.name()},
                     {"sampling", to_string(scheme.variant)},
                     {"budget_rule", o.budget},
                     {"budget", count_json(scheme.budget)},
                     {"bootstrap", to_string(config.procedure)},
                     {"B", config.B},
                     {"statistic", to_string(config.statistic)},
                     {"studentize", config.studentize},
                     {"alphas", config.alphas}};
    if (needs_hajek(config.procedure)) resolved["hajek"] = hajek_json(boot.inputs.hajek->config);
    json j = {{"schema_version", kSchemaVersion},
              {"command", "test"},
              {"kernel", kernel.name()},
              {"procedure", to_string(config.procedure)},
              {"statistic_type", to_string(config.statistic)},
              {"studentized", config.studentize},
              {"n", data.n()},
              {"p", data.p()},
              {"d", kernel.output_dim()},
              {"statistic", result.statistic},
              {"scale", boot.scale},
              {"alpha_n", boot.alpha_n},
              {"levels", levels},
              {"p_value", result.p_value},
              {"B", config.B},
              {"budget", count_json(scheme.budget)},
              {"n_hat", count_json(est.realization.n_hat())},
              {"theta_hat", est.theta_hat},
              {"sigma_b_sq", boot.sigma_b_sq},
              {"warnings", est.realization.warnings()}};
    if (!boot.sigma_a_sq.empty()) j["sigma_a_sq"] = boot.sigma_a_sq;
    if (boot.inputs.hajek && boot.inputs.hajek->m_hat > 0) j["m_hat"] = count_json(boot.inputs.hajek->m_hat);
    if (config.store_replicates) {
        j["replicates"] = boot.replicates;
        j["replicate_vectors"] = boot.replicate_vectors;
    }
    j["manifest"] = manifest(inv, resolved,
                             {{"estimate_seconds", result.timings.estimate_seconds},
                              {"bootstrap_seconds", result.timings.bootstrap_seconds}});
    return j;
}

ExperimentSpec experiment_spec(const Options& o) {
    ExperimentSpec spec;
    spec.generator = generator_of(o);
    spec.n = o.n;
    spec.p = o.p;
    spec.kernel = o.kernel;
    spec.sampling = parse_sampling(o.sampling);
    spec.budget = budget_rule(o.budget);
    spec.reps = o.reps;
    spec.seed = o.seed;
    const Kernel kernel = make_kernel(o.kernel, o.p);
    spec.bootstrap = bootstrap_config(o, kernel, o.n);
    return spec;
}

json spec_json(const ExperimentSpec& spec) {
    return {{"generator", to_string(spec.generator)},
            {"n", spec.n},
            {"p", spec.p},
            {"kernel", spec.kernel},
            {"sampling", to_string(spec.sampling)},
            {"budget_rule", spec.budget.describe()},
            {"budget", count_json(spec.budget.evaluate(spec.n))},
            {"bootstrap", to_string(spec.bootstrap.procedure)},
            {"B", spec.bootstrap.B},
            {"statistic", to_string(spec.bootstrap.statistic)},
            {"reps", spec.reps}};
}

std::string in_dir(const Options& o, const std::string& name) {
    std::filesystem::create_directories(o.out_dir);
    return (std::filesystem::path(o.out_dir) / name).string();
}

json cmd_simulate(const Invocation& inv) {
    const Options& o = inv.options;
    const auto start = std::chrono::steady_clock::now();
    json j = {{"schema_version", kSchemaVersion}, {"command", "simulate"}, {"experiment", o.experiment}};
    json config;
    if (o.experiment == "copula") {
        const BudgetRule rule = budget_rule(o.budget_given ? o.budget : "n");
        const auto summary = copula_experiment(o.correlation, o.n, rule, o.reps, o.seed);
        const std::string path = in_dir(o, "copula.csv");
        write_copula_csv(path, summary);
        config = {{"a", o.correlation}, {"n", o.n}, {"budget_rule", rule.describe()}, {"reps", o.reps}};
        j.update({{"theta0", summary.theta0},
                  {"budget", count_json(summary.budget)},
                  {"mean_rand", summary.mean_rand},
                  {"mean_det", summary.mean_det},
                  {"var_rand", summary.var_rand},
                  {"var_det", summary.var_det},
                  {"se_rand", summary.se_rand},
                  {"se_det", summary.se_det},
                  {"csv", path}});
    } else if (o.experiment == "pp") {
        const ExperimentSpec spec = experiment_spec(o);
        PpOptions options;
        options.grid_size = o.pp_grid;
        options.reference_reps = o.pp_reference_reps;
        const auto points = pp_plot_data(spec, options);
        const std::string path = in_dir(o, "pp_data.csv");
        write_pp_csv(path, points);
        double worst = 0.0;
        for (const auto& pt : points) worst = std::max(worst, std::fabs(pt.empirical - pt.reference));
        config = spec_json(spec);
        j.update({{"max_deviation", worst}, {"points", points.size()}, {"csv", path}});
    } else {
        ExperimentSpec spec = experiment_spec(o);
        const auto report = run_size_experiment(spec);
        const std::string path = in_dir(o, "size_report.csv");
        write_size_report_csv(path, report);
        json rates = json::array();
        for (const auto& [alpha, rate] : report.rejection) rates.push_back({{"alpha", alpha}, {"rejection_rate", rate}});
        config = spec_json(spec);
        j.update({{"uniform_error", report.uniform_error}, {"rejection", rates}, {"reps", report.reps},
                  {"csv", path}});
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    j["manifest"] = manifest(inv, config, {{"total_seconds", seconds}});
    return j;
}

json cmd_bench(const Invocation& inv) {
    const Options& o = inv.options;
    TimingSpec spec;
    spec.base = experiment_spec(o);
    spec.n_grid = o.n_grid;
    spec.p_grid = o.p_grid;
    spec.runs = o.runs;
    spec.parallel = o.bench_parallel;
    const auto report = timing_bench(spec);
    const std::string path = in_dir(o, "timing.csv");
    write_timing_csv(path, report);
    json slopes = json::array();
    for (const auto& [p, slope] : report.slope) slopes.push_back({{"p", p}, {"slope", slope}});
    json points = json::array();
    double total = 0.0;
    for (const auto& pt : report.points) {
        points.push_back({{"n", pt.n}, {"p", pt.p}, {"seconds", pt.seconds}});
        total += pt.seconds;
    }
    json config = spec_json(spec.base);
    config["n_grid"] = o.n_grid;
    config["p_grid"] = o.p_grid;
    config["runs"] = o.runs;
    return {{"schema_version", kSchemaVersion},
            {"command", "bench"},
            {"parallel", report.parallel},
            {"slopes", slopes},
            {"points", points},
            {"csv", path},
            {"manifest", manifest(inv, config, {{"median_seconds_sum", total}})}};
}

json cmd_oracle(const Invocation& inv) {
    const Options& o = inv.options;
    const Dataset data = load_csv(o.data_path);
    const Kernel kernel = make_kernel(o.kernel, data.p());
    json j = {{"schema_version", kSchemaVersion}, {"command", "oracle"}, {"what", o.what},
              {"kernel", kernel.name()}, {"n", data.n()}, {"p", data.p()}, {"pairs", pairs_json(data.p())}};
    const auto start = std::chrono::steady_clock::now();
    if (o.what == "jackknife") {
        std::vector<std::uint32_t> s1;
        if (o.s1_given) {
            if (o.s1_size == 0 || o.s1_size > data.n()) throw UsageError("--s1-size must lie in [1, n]");
            for (std::uint32_t i = 0; i < o.s1_size; ++i) s1.push_back(i);
        }
        const auto est = jackknife_oracle(data, kernel, s1);
        json rows = json::array();
        for (std::size_t i = 0; i < est.n1; ++i) {
            const auto row = est.row(i);
            rows.push_back(std::vector<double>(row.begin(), row.end()));
        }
        j["g_hat"] = rows;
        j["g_bar"] = est.g_bar;
    } else {
        j["theta"] = complete_ustat(data, kernel);
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    j["manifest"] = manifest(inv, {{"kernel", kernel.name()}, {"what", o.what}}, {{"total_seconds", seconds}});
    return j;
}

void emit(const json& j, const Options& o, std::ostream& out) {
    const std::string text = j.dump(2);
    if (o.out.empty()) {
        out << text << '\n';
        return;
    }
    std::ofstream file(o.out);
    if (!file) throw Error("cannot write " + o.out);
    file << text << '\n';
}

template <class T>
std::string join(const std::vector<T>& values) {
    std::ostringstream s;
    s.precision(17);
    for (std::size_t i = 0; i < values.size(); ++i) s << (i ? "," : "") << values[i];
    return s.str();
}

// Arguments reproducing this run: the given ones minus output and thread
// settings, with the resolved seed made explicit.
std::vector<std::string> replay_args(const std::string& command, const std::vector<std::string>& args,
                                     std::uint64_t seed) {
    std::vector<std::string> kept{command};
    bool skip_next = false;
    for (std::size_t i = 1; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (skip_next) {
            skip_next = false;
            continue;
        }
        if (a == "--out" || a == "--threads" || a == "--seed" || a == "--out-dir") {
            skip_next = true;
            continue;
        }
        if (a.rfind("--out=", 0) == 0 || a.rfind("--threads=", 0) == 0 || a.rfind("--seed=", 0) == 0 ||
            a.rfind("--out-dir=", 0) == 0) {
            continue;
        }
        kept.push_back(a);
    }
    kept.push_back("--seed");
    kept.push_back(std::to_string(seed));
    return kept;
}

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--seed", o.seed, "Master seed")->envname("USTAT_SEED");
    sub->add_option("--kernel", o.kernel, "Kernel")
        ->check(CLI::IsMember({"kendall", "spearman", "bergsma-dassios", "hoeffding-d"}))
        ->capture_default_str();
    sub->add_option("--sampling", o.sampling, "Sampling scheme")
        ->check(CLI::IsMember({"bernoulli", "bernoulli-det", "replacement"}))
        ->capture_default_str();
    sub->add_option("--budget", o.budget, "Budget N: integer or expression such as 2n, n^4/3, 4n^3/2")
        ->capture_default_str();
    sub->add_option("--out", o.out, "Write the JSON result to this file");
    sub->add_option("--threads", o.threads, "Worker threads (default: available parallelism)")
        ->check(CLI::PositiveNumber);
}

void add_bootstrap(CLI::App* sub, Options& o) {
    sub->add_option("--B", o.B, "Bootstrap replicates")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--bootstrap", o.bootstrap, "Procedure (default: by kernel degeneracy)")
        ->check(CLI::IsMember({"mb-dg", "mb-ndg-dc", "mb-ndg-rs", "mb-ndg-partial-a"}));
    sub->add_option("--hajek", o.hajek, "Hajek projection estimator")
        ->check(CLI::IsMember({"dc", "rs", "jackknife"}));
    sub->add_option("--dc-K", o.dc_K, "Divide-and-conquer block count")->check(CLI::PositiveNumber);
    sub->add_option("--dc-L", o.dc_L, "Divide-and-conquer block size")->check(CLI::PositiveNumber);
    sub->add_option("--rs-M", o.rs_M, "Random-sampling budget M");
    sub->add_option("--rs-norm", o.rs_norm, "Random-sampling divisor")
        ->check(CLI::IsMember({"m", "mhat"}))
        ->capture_default_str();
    sub->add_option("--s1-size", o.s1_size, "Estimate g at the first n1 observations only");
    sub->add_option("--statistic", o.statistic, "Max-type statistic")
        ->check(CLI::IsMember({"max-abs", "max"}))
        ->capture_default_str();
    sub->add_flag("--studentize", o.studentize, "Divide coordinates by estimated standard deviations");
    sub->add_flag("--store-replicates", o.store_replicates, "Include every replicate vector in the output");
    sub->add_option("--alpha", o.alphas, "Significance levels")
        ->delimiter(',')
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
}

void add_experiment(CLI::App* sub, Options& o) {
    sub->add_option("--generator", o.generator, "Data generator")
        ->check(CLI::IsMember({"noncentral-t", "gaussian-pair", "uniform"}))
        ->capture_default_str();
    sub->add_option("--df", o.df, "Noncentral t degrees of freedom")->capture_default_str();
    sub->add_option("--ncp", o.ncp, "Noncentral t noncentrality")->capture_default_str();
    sub->add_option("--correlation", o.correlation, "Gaussian pair correlation")->capture_default_str();
    sub->add_option("--n", o.n, "Sample size")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--p", o.p, "Dimension")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--out-dir", o.out_dir, "Directory for CSV reports")->capture_default_str();
}

int execute(Invocation& inv, std::ostream& out, std::ostream& err);

int replay(const Options& o, std::ostream& out, std::ostream& err) {
    json stored;
    try {
        stored = json::parse(read_file(o.manifest_path));
    } catch (const json::exception& e) {
        throw ustat::ParseError(std::string("manifest is not valid JSON: ") + e.what(), 0, 0);
    }
    const json& m = stored.contains("manifest") ? stored.at("manifest") : stored;
    if (!m.contains("args") || !m.at("args").is_array()) {
        throw ustat::ParseError("manifest has no replayable arguments", 0, 0);
    }
    if (m.contains("input")) {
        const auto& input = m.at("input");
        const std::string path = input.at("path").get<std::string>();
        if (file_digest(path) != input.at("digest").get<std::string>()) {
            throw ustat::ParseError("input " + path + " no longer matches the manifest digest", 0, 0);
        }
    }
    auto args = m.at("args").get<std::vector<std::string>>();
    if (!o.out.empty()) {
        args.push_back("--out");
        args.push_back(o.out);
    }
    if (o.threads > 0) {
        args.push_back("--threads");
        args.push_back(std::to_string(o.threads));
    }
    return run(args, out, err);
}

int execute(Invocation& inv, std::ostream& out, std::ostream& err) {
    const Options& o = inv.options;
    if (o.threads > 0) set_threads(o.threads);
    json result;
    if (inv.command == "estimate") {
        result = cmd_estimate(inv, err);
    } else if (inv.command == "test") {
        result = cmd_test(inv, err);
    } else if (inv.command == "simulate") {
        result = cmd_simulate(inv);
    } else if (inv.command == "bench") {
        result = cmd_bench(inv);
    } else if (inv.command == "oracle") {
        result = cmd_oracle(inv);
    } else {
        return replay(o, out, err);
    }
    emit(result, o, out);
    return kOk;
}

}  // namespace

Dataset parse_csv(std::string_view text) {
    std::vector<double> values;
    std::size_t p = 0;
    std::size_t n = 0;
    std::size_t line_no = 0;
    bool first = true;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty()) {
            if (pos > text.size()) break;
            continue;
        }
        const auto cells = split_cells(line);
        std::vector<double> row(cells.size());
        std::vector<bool> numeric(cells.size());
        bool any_numeric = false;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            numeric[c] = parse_number(cells[c], row[c]);
            any_numeric = any_numeric || numeric[c];
        }
        if (first) {
            first = false;
            p = cells.size();
            if (!any_numeric) continue;  // header
        }
        if (cells.size() != p) {
            throw ustat::ParseError("row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                                        " cells, expected " + std::to_string(p),
                                    line_no, std::min(cells.size(), p) + 1);
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (!numeric[c]) {
                const std::string what = cells[c].empty() ? "missing value" : "invalid number '" + std::string(cells[c]) + "'";
                throw ustat::ParseError(what + " at row " + std::to_string(line_no) + ", column " + std::to_string(c + 1),
                                        line_no, c + 1);
            }
        }
        values.insert(values.end(), row.begin(), row.end());
        ++n;
    }
    if (n == 0) throw EmptyFileError("no data rows");
    return Dataset(n, p, std::move(values));
}

Dataset load_csv(const std::string& path) { return parse_csv(read_file(path)); }

std::string digest(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string("fnv1a64:") + buf;
}

std::string file_digest(const std::string& path) { return digest(read_file(path)); }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Incomplete U-statistics with multiplier bootstrap inference", "ustat"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(USTAT_VERSION));

    auto* estimate = app.add_subcommand("estimate", "Incomplete U-statistic of a data file");
    add_common(estimate, o);
    estimate->add_option("data", o.data_path, "CSV data file")->required();

    auto* test = app.add_subcommand("test", "Max-type pairwise independence test");
    add_common(test, o);
    add_bootstrap(test, o);
    test->add_option("data", o.data_path, "CSV data file")->required();

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo experiments");
    simulate->set_config("--config", "", "TOML or INI file with option values");
    add_common(simulate, o);
    add_bootstrap(simulate, o);
    add_experiment(simulate, o);
    simulate->add_option("--experiment", o.experiment, "Experiment")
        ->check(CLI::IsMember({"size", "pp", "copula"}))
        ->capture_default_str();
    simulate->add_option("--reps", o.reps, "Monte Carlo replications")->check(CLI::PositiveNumber)->capture_default_str();
    simulate->add_option("--pp-grid", o.pp_grid, "P-P grid size")->check(CLI::PositiveNumber);
    simulate->add_option("--pp-reference-reps", o.pp_reference_reps, "Reference draws for P-P data")
        ->check(CLI::PositiveNumber);

    auto* bench = app.add_subcommand("bench", "Timing study with log-log slope fits");
    bench->set_config("--config", "", "TOML or INI file with option values");
    add_common(bench, o);
    add_bootstrap(bench, o);
    add_experiment(bench, o);
    bench->add_option("--n-grid", o.n_grid, "Sample sizes")->delimiter(',')->capture_default_str();
    bench->add_option("--p-grid", o.p_grid, "Dimensions")->delimiter(',')->capture_default_str();
    bench->add_option("--runs", o.runs, "Runs per grid point (median reported)")->check(CLI::PositiveNumber);
    bench->add_flag("--bench-parallel", o.bench_parallel, "Time with all threads instead of one");

    auto* oracle = app.add_subcommand("oracle", "Complete U-statistic or jackknife Hajek values");
    add_common(oracle, o);
    oracle->add_option("--what", o.what, "Quantity")->check(CLI::IsMember({"complete", "jackknife"}))->capture_default_str();
    oracle->add_option("--s1-size", o.s1_size, "Jackknife at the first n1 observations only");
    oracle->add_option("data", o.data_path, "CSV data file")->required();

    auto* replay_cmd = app.add_subcommand("replay", "Re-run the command recorded in a result manifest");
    replay_cmd->add_option("manifest", o.manifest_path, "JSON result containing a manifest")->required();
    replay_cmd->add_option("--out", o.out, "Write the JSON result to this file");
    replay_cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << (dynamic_cast<const CLI::CallForVersion*>(&e) ? e.what() : app.help()) << '\n';
            return kOk;
        }
        err << "error: " << e.what() << "\n" << "run 'ustat --help' for usage\n";
        return kUsage;
    }

    Invocation inv;
    for (auto* sub : app.get_subcommands()) inv.command = sub->get_name();
    auto* sub = app.get_subcommand(inv.command);
    o.budget_given = sub->get_option_no_throw("--budget") != nullptr && sub->count("--budget") > 0;
    if (inv.command == "test" || inv.command == "simulate" || inv.command == "bench") {
        o.dc_K_given = sub->count("--dc-K") > 0;
        o.dc_L_given = sub->count("--dc-L") > 0;
        o.rs_M_given = sub->count("--rs-M") > 0;
    }
    if (inv.command != "replay" && inv.command != "estimate") o.s1_given = sub->count("--s1-size") > 0;
    inv.options = o;
    if (inv.command != "replay") {
        std::vector<std::string> rest(args.begin(), args.end());
        rest.erase(std::find(rest.begin(), rest.end(), inv.command));
        rest.insert(rest.begin(), inv.command);
        inv.args = replay_args(inv.command, rest, o.seed);
    }

    try {
        return execute(inv, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ustat::ParseError& e) {
        err << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const EmptyFileError& e) {
        err << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
}

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace ustat::cli
