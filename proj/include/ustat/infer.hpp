#pragma once

#include <map>
#include <string>
#include <vector>

#include "ustat/bootstrap.hpp"
#include "ustat/dataset.hpp"
#include "ustat/kernels.hpp"
#include "ustat/ustat.hpp"

namespace ustat {

struct TestTimings {
    double estimate_seconds = 0.0;  // design, kernel evaluations and Hajek estimate
    double bootstrap_seconds = 0.0;
};

struct TestResult {
    /// max_j |U'_j| (or max_j U'_j), studentized when requested, unscaled.
    double statistic = 0.0;
    /// Bootstrap quantile divided by the procedure's scale, comparable to statistic.
    std::map<double, double> critical_values;
    std::map<double, bool> reject;
    double p_value = 1.0;

    std::string kernel;
    SamplingScheme scheme;
    BootstrapResult bootstrap;
    TestTimings timings;

    const IncompleteUStat& ustat() const noexcept { return bootstrap.inputs.ustat; }
};

/// Max-type test of pairwise independence: statistic from the incomplete
/// U-statistic, critical values from the matching multiplier bootstrap.
/// Both sides are compared unscaled.
TestResult pairwise_independence_test(const Dataset& data, const Kernel& kernel,
                                      const SamplingScheme& scheme, const BootstrapConfig& config);

TestResult pairwise_independence_test(const Dataset& data, const std::string& kernel_name,
                                      const SamplingScheme& scheme, const BootstrapConfig& config);

/// Observed statistic on the unscaled level for a fitted bootstrap.
double observed_statistic(const BootstrapResult& bootstrap);

}  // namespace ustat
