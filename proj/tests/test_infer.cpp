#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "ustat/errors.hpp"
#include "ustat/infer.hpp"
#include "ustat/threads.hpp"

using namespace ustat;

namespace {

BootstrapConfig small_config(std::uint64_t seed) {
    BootstrapConfig config;
    config.B = 200;
    config.seed = seed;
    return config;
}

}  // namespace

TEST_CASE("strongly dependent data is rejected") {
    auto data = testing::random_data(80, 5, 41);
    for (std::size_t i = 0; i < data.n(); ++i) data(i, 3) = data(i, 0) + 0.1 * data(i, 3);
    for (const char* name : {"kendall", "spearman", "bergsma-dassios"}) {
        auto config = small_config(1);
        config.procedure = default_procedure(make_kernel(name, 5));
        const auto result = pairwise_independence_test(data, name, {Sampling::BernoulliRandomNorm, 800}, config);
        CHECK(result.reject.at(0.01));
        CHECK(result.p_value == doctest::Approx(1.0 / 201.0));
        CHECK(result.kernel == name);
    }
}

TEST_CASE("rank kernels ignore monotone transformations") {
    const auto data = testing::random_data(50, 4, 42);
    Dataset moved = data;
    for (std::size_t i = 0; i < data.n(); ++i) {
        moved(i, 0) = std::exp(data(i, 0));
        moved(i, 1) = 3.0 * data(i, 1) - 7.0;
        moved(i, 2) = std::pow(data(i, 2), 3);
    }
    for (const char* name : {"kendall", "spearman", "hoeffding-d"}) {
        auto config = small_config(2);
        config.procedure = default_procedure(make_kernel(name, 4));
        const SamplingScheme scheme{Sampling::WithReplacement, 300};
        const auto a = pairwise_independence_test(data, name, scheme, config);
        const auto b = pairwise_independence_test(moved, name, scheme, config);
        CHECK(a.statistic == b.statistic);
        CHECK(testing::bit_equal(a.bootstrap.replicates, b.bootstrap.replicates));
        CHECK(a.p_value == b.p_value);
    }
}

TEST_CASE("rejections are monotone in alpha and critical values match quantiles") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto data = testing::random_data(40, 4, 100 + seed);
        auto config = small_config(seed);
        config.alphas = {0.01, 0.05, 0.1, 0.3, 0.6};
        const auto result = pairwise_independence_test(data, "spearman", {Sampling::BernoulliRandomNorm, 200}, config);
        bool rejected = false;
        for (const auto& [alpha, reject] : result.reject) {
            if (rejected) CHECK(reject);
            rejected = rejected || reject;
            CHECK(result.critical_values.at(alpha) * result.bootstrap.scale ==
                  doctest::Approx(result.bootstrap.quantile_table.at(alpha)).epsilon(1e-14));
        }
        CHECK(result.statistic == doctest::Approx(observed_statistic(result.bootstrap)));
        CHECK(result.p_value > 0.0);
        CHECK(result.p_value <= 1.0);
    }
}

TEST_CASE("studentized test uses the combined variance") {
    const auto data = testing::random_data(40, 4, 43);
    auto config = small_config(3);
    config.studentize = true;
    const auto result = pairwise_independence_test(data, "kendall", {Sampling::BernoulliRandomNorm, 200}, config);
    const auto& boot = result.bootstrap;
    for (std::size_t j = 0; j < boot.sigma.size(); ++j) {
        CHECK(boot.sigma[j] * boot.sigma[j] ==
              doctest::Approx(boot.sigma_a_sq[j] + boot.alpha_n * boot.sigma_b_sq[j]));
    }
}

TEST_CASE("results do not depend on the thread count") {
    const auto data = testing::random_data(60, 6, 44);
    for (auto procedure : {Procedure::MbNdgDc, Procedure::MbNdgRs, Procedure::MbDg}) {
        auto config = small_config(4);
        config.procedure = procedure;
        const std::string name = procedure == Procedure::MbDg ? "bergsma-dassios" : "spearman";
        const int saved = max_threads();
        set_threads(1);
        const auto a = pairwise_independence_test(data, name, {Sampling::BernoulliDeterministicNorm, 500}, config);
        set_threads(4);
        const auto b = pairwise_independence_test(data, name, {Sampling::BernoulliDeterministicNorm, 500}, config);
        set_threads(saved);
        CHECK(testing::bit_equal(a.ustat().theta_hat, b.ustat().theta_hat));
        CHECK(testing::bit_equal(a.bootstrap.replicates, b.bootstrap.replicates));
        CHECK(a.statistic == b.statistic);
    }
}

TEST_CASE("unknown kernel names are rejected") {
    const auto data = testing::random_data(10, 3, 45);
    CHECK_THROWS_AS(pairwise_independence_test(data, "pearson", {Sampling::BernoulliRandomNorm, 20}, small_config(0)),
                    DomainError);
}
