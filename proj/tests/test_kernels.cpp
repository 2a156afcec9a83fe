#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "helpers.hpp"
#include "ustat/errors.hpp"
#include "ustat/kernels.hpp"
#include "ustat/simd.hpp"

using namespace ustat;

namespace {

using RefFn = void (*)(KernelArgs, std::size_t, std::span<double>);

struct Case {
    const char* name;
    std::uint32_t r;
    RefFn reference;
    double bound;
};

const Case kCases[] = {
    {"kendall", 2, reference::kendall, 1.0},
    {"spearman", 3, reference::spearman, 3.0},
    {"bergsma-dassios", 4, reference::bergsma_dassios, 4.0},
    {"hoeffding-d", 5, reference::hoeffding_d, 0.25},
};

std::vector<double> eval(const Kernel& k, const std::vector<const double*>& args) {
    std::vector<double> out(k.output_dim(), 123.0);
    k.eval(KernelArgs(args.data(), args.size()), out);
    return out;
}

std::vector<double> eval_ref(RefFn fn, std::size_t p, const std::vector<const double*>& args) {
    std::vector<double> out(p * (p - 1) / 2, -7.0);
    fn(KernelArgs(args.data(), args.size()), p, out);
    return out;
}

std::vector<const double*> rows(const Dataset& data, std::size_t first, std::uint32_t r) {
    std::vector<const double*> out;
    for (std::uint32_t a = 0; a < r; ++a) out.push_back(data.row(first + a).data());
    return out;
}

}  // namespace

TEST_CASE("pair index map") {
    const PairIndexMap map(4);
    CHECK(map.size() == 6);
    CHECK(map.index(0, 1) == 0);
    CHECK(map.index(0, 3) == 2);
    CHECK(map.index(1, 2) == 3);
    CHECK(map.index(2, 3) == 5);
    for (std::size_t idx = 0; idx < map.size(); ++idx) {
        const auto [j, k] = map.pair(idx);
        CHECK(map.index(j, k) == idx);
    }
    CHECK_THROWS_AS(map.index(2, 2), DomainError);
    CHECK_THROWS_AS(PairIndexMap(1), DomainError);
}

TEST_CASE("hand-evaluated kernel values") {
    const std::array<double, 2> a = {1, 2}, b = {2, 1}, c = {3, 4};
    const auto kendall = make_kendall(2);
    CHECK(eval(kendall, {a.data(), b.data()})[0] == -1.0);
    CHECK(eval(kendall, {a.data(), c.data()})[0] == 1.0);
    const std::array<double, 2> t1 = {1, 1}, t2 = {1, 5};
    CHECK(eval(kendall, {t1.data(), t2.data()})[0] == 0.0);

    const std::array<double, 2> s1 = {1, 1}, s2 = {2, 2}, s3 = {3, 3};
    CHECK(eval(make_spearman(2), {s1.data(), s2.data(), s3.data()})[0] == 1.0);

    CHECK(bergsma_dassios_phi(1, 2, 3, 4) == -1.0);
    CHECK(hoeffding_phi(3, 1, 5, 2, 4) == 0.25);
}

TEST_CASE("three-coordinate values match the brute-force oracle") {
    const double obs[5][3] = {{0.3, 1.2, -0.5}, {1.1, -0.7, 0.2}, {-0.4, 0.9, 1.5}, {0.8, 0.1, -1.3}, {2.0, -0.2, 0.6}};
    std::vector<const double*> args;
    for (const auto& o : obs) args.push_back(o);
    const auto sp = eval(make_spearman(3), {args[0], args[1], args[2]});
    CHECK(sp == std::vector<double>{-1.0, -1.0, -1.0});
    const auto bd = eval(make_bergsma_dassios(3), {args[0], args[1], args[2], args[3]});
    CHECK(bd[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(bd[1] == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
    CHECK(bd[2] == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
    const auto hd = eval(make_hoeffding_d(3), args);
    CHECK(hd[0] == doctest::Approx(1.0 / 120.0).epsilon(1e-15));
    CHECK(hd[1] == 0.0);
    CHECK(hd[2] == 0.0);
}

TEST_CASE("production kernels are bit-identical to the reference evaluators") {
    const auto saved = simd::active().level;
    for (auto level : {simd::Level::Scalar, simd::Level::Avx2, simd::Level::Neon}) {
        if (!simd::supported(level)) continue;
        simd::set_level(level);
        for (const auto& c : kCases) {
            for (std::size_t p : {2u, 3u, 5u, 8u, 13u, 30u}) {
                const auto kernel = make_kernel(c.name, p);
                for (std::uint64_t seed = 0; seed < 6; ++seed) {
                    const auto data = seed % 2 == 0 ? testing::random_data(c.r, p, seed) : testing::tied_data(c.r, p, seed);
                    const auto args = rows(data, 0, c.r);
                    CAPTURE(c.name);
                    CAPTURE(p);
                    CHECK(testing::bit_equal(eval(kernel, args), eval_ref(c.reference, p, args)));
                }
            }
        }
    }
    simd::set_level(saved);
}

TEST_CASE("symmetry under every argument permutation") {
    for (const auto& c : kCases) {
        const std::size_t p = 4;
        const auto kernel = make_kernel(c.name, p);
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            const auto data = seed == 2 ? testing::tied_data(c.r, p, seed) : testing::random_data(c.r, p, seed);
            const auto base = eval(kernel, rows(data, 0, c.r));
            for (const auto& perm : permutations(c.r)) {
                std::vector<const double*> args;
                for (auto a : perm) args.push_back(data.row(a).data());
                const auto v = eval(kernel, args);
                for (std::size_t j = 0; j < v.size(); ++j) CHECK(v[j] == doctest::Approx(base[j]).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("boundedness and rank invariance") {
    for (const auto& c : kCases) {
        const std::size_t p = 5;
        const auto kernel = make_kernel(c.name, p);
        for (std::uint64_t seed = 0; seed < 40; ++seed) {
            auto data = seed % 3 == 0 ? testing::tied_data(c.r, p, seed) : testing::random_data(c.r, p, seed);
            const auto v = eval(kernel, rows(data, 0, c.r));
            for (double x : v) CHECK(std::abs(x) <= c.bound);
            // strictly increasing transforms of single coordinates
            for (std::size_t i = 0; i < c.r; ++i) {
                data(i, 1) = std::exp(data(i, 1));
                data(i, 3) = 5.0 * data(i, 3) - 2.0;
                data(i, 4) = std::atan(data(i, 4));
            }
            CHECK(eval(kernel, rows(data, 0, c.r)) == v);
        }
    }
}

TEST_CASE("tied coordinates give zero for the indicator kernels") {
    const std::size_t p = 3;
    for (const char* name : {"bergsma-dassios", "hoeffding-d"}) {
        const auto kernel = make_kernel(name, p);
        auto data = testing::random_data(kernel.order(), p, 4);
        for (std::size_t i = 0; i < kernel.order(); ++i) data(i, 0) = 2.5;
        const auto v = eval(kernel, rows(data, 0, kernel.order()));
        CHECK(v[0] == 0.0);  // (0,1)
        CHECK(v[1] == 0.0);  // (0,2)
    }
}

TEST_CASE("factory metadata and errors") {
    CHECK(make_kernel("spearman", 30).output_dim() == 435);
    CHECK(make_kernel("kendall", 3).order() == 2);
    CHECK(make_kernel("bergsma-dassios", 3).spec().degeneracy_order == 1);
    CHECK(make_kernel("hoeffding-d", 3).spec().degeneracy_order == 1);
    CHECK(make_kernel("spearman", 3).spec().degeneracy_order == 0);
    CHECK_THROWS_AS(make_kernel("pearson", 3), DomainError);
    CHECK_THROWS_AS(make_kernel("kendall", 1), DomainError);
    const auto k = make_kendall(3);
    std::array<double, 3> x{};
    std::vector<const double*> one = {x.data()};
    std::vector<double> out(3);
    CHECK_THROWS_AS(k.eval(KernelArgs(one.data(), 1), out), DomainError);
}

TEST_CASE("Bergsma-Dassios is degenerate under independence, Spearman is not") {
    // Conditional means E[h | X_1 = x] estimated by Monte Carlo at several x.
    auto conditional_spread = [](const Kernel& kernel, double& total_var) {
        const std::size_t points = 40, inner = 3000, p = 2;
        RngStream rng(77);
        std::vector<double> cond;
        double s = 0, s2 = 0;
        std::size_t count = 0;
        std::vector<double> x(kernel.order() * p);
        std::vector<const double*> args(kernel.order());
        for (std::uint32_t a = 0; a < kernel.order(); ++a) args[a] = x.data() + a * p;
        std::vector<double> out(1);
        for (std::size_t i = 0; i < points; ++i) {
            x[0] = rng.normal();
            x[1] = rng.normal();
            double m = 0;
            for (std::size_t t = 0; t < inner; ++t) {
                for (std::size_t k = p; k < x.size(); ++k) x[k] = rng.normal();
                kernel.eval(KernelArgs(args.data(), args.size()), out);
                m += out[0];
                s += out[0];
                s2 += out[0] * out[0];
                ++count;
            }
            cond.push_back(m / inner);
        }
        total_var = s2 / count - (s / count) * (s / count);
        double cm = 0, cv = 0;
        for (double c : cond) cm += c;
        cm /= cond.size();
        for (double c : cond) cv += (c - cm) * (c - cm);
        return cv / (cond.size() - 1);
    };
    double var_h = 0;
    const double bd = conditional_spread(make_bergsma_dassios(2), var_h);
    CHECK(var_h > 0.01);
    // Pure Monte Carlo noise is var_h / inner; allow a generous multiple.
    CHECK(bd < 3.0 * var_h / 3000);
    const double sp = conditional_spread(make_spearman(2), var_h);
    CHECK(sp > 10.0 * var_h / 3000);
}
