#include "ustat/infer.hpp"

#include <chrono>

namespace ustat {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

double observed_statistic(const BootstrapResult& bootstrap) {
    std::vector<double> v = bootstrap.inputs.ustat.theta_hat;
    if (bootstrap.studentize) {
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = v[j] / bootstrap.sigma[j];
    }
    return max_statistic(v, bootstrap.statistic);
}

TestResult pairwise_independence_test(const Dataset& data, const Kernel& kernel,
                                      const SamplingScheme& scheme, const BootstrapConfig& config) {
    TestResult result;
    result.kernel = kernel.name();
    result.scheme = scheme;

    auto start = std::chrono::steady_clock::now();
    auto inputs = prepare_bootstrap(data, kernel, scheme, config);
    result.timings.estimate_seconds = seconds_since(start);

    start = std::chrono::steady_clock::now();
    result.bootstrap = run_bootstrap(std::move(inputs), kernel.order(), config);
    result.timings.bootstrap_seconds = seconds_since(start);

    const auto& boot = result.bootstrap;
    result.statistic = observed_statistic(boot);
    for (const auto& [alpha, quantile] : boot.quantile_table) {
        const double critical = quantile / boot.scale;
        result.critical_values[alpha] = critical;
        result.reject[alpha] = result.statistic > critical;
    }
    result.p_value = bootstrap_p_value(boot.replicates, result.statistic * boot.scale);
    return result;
}

TestResult pairwise_independence_test(const Dataset& data, const std::string& kernel_name,
                                      const SamplingScheme& scheme, const BootstrapConfig& config) {
    return pairwise_independence_test(data, make_kernel(kernel_name, data.p()), scheme, config);
}

}  // namespace ustat
