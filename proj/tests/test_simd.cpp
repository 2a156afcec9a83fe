#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include "helpers.hpp"
#include "ustat/errors.hpp"
#include "ustat/simd.hpp"

using namespace ustat;

namespace {

std::vector<simd::Level> levels() {
    std::vector<simd::Level> out;
    for (auto level : {simd::Level::Scalar, simd::Level::Avx2, simd::Level::Neon}) {
        if (simd::supported(level)) out.push_back(level);
    }
    return out;
}

std::vector<double> values(std::size_t n, std::uint64_t seed) {
    RngStream rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) {
        const auto kind = rng.uniform_below(std::uint64_t{10});
        if (kind == 0) x = 0.0;
        else if (kind == 1) x = -0.0;
        else if (kind == 2) x = static_cast<double>(rng.uniform_below(std::uint64_t{3})) - 1.0;
        else x = rng.normal() * 1e3;
    }
    return v;
}

}  // namespace

TEST_CASE("scalar is always available and unknown levels throw") {
    CHECK(simd::supported(simd::Level::Scalar));
    CHECK(simd::name(simd::Level::Scalar) == "scalar");
#if !defined(__aarch64__)
    CHECK_THROWS_AS(simd::ops(simd::Level::Neon), DomainError);
#endif
}

TEST_CASE("every level is bit-identical to scalar") {
    const auto& ref = simd::ops(simd::Level::Scalar);
    for (auto level : levels()) {
        const auto& ops = simd::ops(level);
        CAPTURE(simd::name(level));
        for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 64u, 435u}) {
            const auto x = values(n, 10 + n);
            const auto y = values(n, 20 + n);

            auto a = y, b = y;
            ref.add(x.data(), a.data(), n);
            ops.add(x.data(), b.data(), n);
            CHECK(testing::bit_equal(a, b));

            a = y, b = y;
            ref.axpy(-0.37, x.data(), a.data(), n);
            ops.axpy(-0.37, x.data(), b.data(), n);
            CHECK(testing::bit_equal(a, b));

            std::vector<double> oa(n), ob(n);
            ref.sub(x.data(), y.data(), oa.data(), n);
            ops.sub(x.data(), y.data(), ob.data(), n);
            CHECK(testing::bit_equal(oa, ob));

            a = y, b = y;
            ref.scale(1.0 / 24.0, a.data(), n);
            ops.scale(1.0 / 24.0, b.data(), n);
            CHECK(testing::bit_equal(a, b));

            ref.sign_diff(x.data(), y.data(), oa.data(), n);
            ops.sign_diff(x.data(), y.data(), ob.data(), n);
            CHECK(testing::bit_equal(oa, ob));

            if (n > 0) {
                const double ma = ref.max_abs(x.data(), n);
                const double mb = ops.max_abs(x.data(), n);
                CHECK(std::memcmp(&ma, &mb, sizeof ma) == 0);
                const double va = ref.max_value(x.data(), n);
                const double vb = ops.max_value(x.data(), n);
                CHECK(std::memcmp(&va, &vb, sizeof va) == 0);
            }

            if (n >= 2) {
                std::vector<double> ua(n * (n - 1) / 2, 0.25), ub = ua;
                ref.outer_upper(x.data(), y.data(), ua.data(), n);
                ops.outer_upper(x.data(), y.data(), ub.data(), n);
                CHECK(testing::bit_equal(ua, ub));
            }
        }
    }
}

TEST_CASE("max folds negative zero") {
    const std::vector<double> v = {-0.0, -0.0};
    for (auto level : levels()) {
        const double m = simd::ops(level).max_value(v.data(), v.size());
        CHECK_FALSE(std::signbit(m));
    }
}

TEST_CASE("outer_upper uses the row-major upper triangle") {
    const std::vector<double> a = {1, 2, 3};
    const std::vector<double> b = {10, 20, 30};
    std::vector<double> out(3, 0.0);
    simd::outer_upper(a, b, out);
    CHECK(out == std::vector<double>{20, 30, 60});
}

TEST_CASE("set_level switches the active table") {
    const auto before = simd::active().level;
    simd::set_level(simd::Level::Scalar);
    CHECK(simd::active().level == simd::Level::Scalar);
    simd::set_level(before);
    CHECK(simd::active().level == before);
}
