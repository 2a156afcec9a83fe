#include <doctest.h>

#include <cmath>
#include <random>

#include "ustat/errors.hpp"
#include "ustat/rng.hpp"

using ustat::RngStream;

TEST_CASE("engine output is the standard mt19937_64 sequence") {
    std::mt19937_64 engine;
    for (int i = 0; i < 9999; ++i) engine();
    CHECK(engine() == 9981545732273789042ULL);
}

TEST_CASE("stream seeds follow the documented derivation") {
    RngStream root(42);
    CHECK(root.next_u64() == 2576493707698874361ULL);
    CHECK(root.next_u64() == 17880808640956396325ULL);

    RngStream boot = RngStream(42).substream("boot", 3);
    CHECK(boot.next_u64() == 3345023497422901281ULL);
    CHECK(boot.next_u64() == 4716944652008417810ULL);

    RngStream nested = RngStream(7).substream("rep", 0).substream("data", 0);
    CHECK(nested.next_u64() == 5094473918806080918ULL);

    RngStream u(7, {{"rep", 0}, {"data", 0}});
    CHECK(u.uniform() == 0.2761719845220147);
}

TEST_CASE("substreams depend on identity, not on parent consumption") {
    RngStream a(9);
    RngStream b(9);
    for (int i = 0; i < 100; ++i) a.next_u64();
    CHECK(a.substream("x", 1).next_u64() == b.substream("x", 1).next_u64());
    CHECK(a.substream("x", 1).next_u64() != a.substream("x", 2).next_u64());
    CHECK(a.substream("x", 1).next_u64() != a.substream("y", 1).next_u64());
    CHECK(RngStream(9).substream("s").describe() == "9/s:0");
    CHECK(RngStream(1).substream("a", 2).substream("b", 3).describe() == "1/a:2/b:3");
}

TEST_CASE("uniform stays in the open unit interval with the right mean") {
    RngStream rng(1);
    double s = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        s += u;
    }
    CHECK(std::abs(s / n - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
}

TEST_CASE("bounded integers") {
    RngStream rng(2);
    std::vector<int> hist(7, 0);
    for (int i = 0; i < 70000; ++i) ++hist[rng.uniform_below(std::uint64_t{7})];
    for (int h : hist) CHECK(std::abs(h - 10000) < 500);
    CHECK_THROWS_AS(rng.uniform_below(std::uint64_t{0}), ustat::DomainError);
    const ustat::Count big = (ustat::Count{1} << 100) + 12345;
    for (int i = 0; i < 1000; ++i) CHECK(rng.uniform_below(big) < big);
}

TEST_CASE("normal, gamma and chi-square moments") {
    RngStream rng(3);
    const int n = 200000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        s += z;
        s2 += z * z;
    }
    CHECK(std::abs(s / n) < 0.01);
    CHECK(std::abs(s2 / n - 1.0) < 0.015);

    for (double shape : {0.4, 1.5, 7.0}) {
        double g = 0, g2 = 0;
        for (int i = 0; i < n; ++i) {
            const double x = rng.gamma(shape);
            REQUIRE(x > 0.0);
            g += x;
            g2 += x * x;
        }
        const double mean = g / n;
        CHECK(std::abs(mean - shape) < 4 * std::sqrt(shape / n));
        CHECK(std::abs(g2 / n - mean * mean - shape) < 0.05 * shape);
    }
    double c = 0;
    for (int i = 0; i < n; ++i) c += rng.chi_square(3.0);
    CHECK(std::abs(c / n - 3.0) < 4 * std::sqrt(6.0 / n));
    CHECK_THROWS_AS(rng.gamma(0.0), ustat::DomainError);
}
