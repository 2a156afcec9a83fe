#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "ustat/combinat.hpp"
#include "ustat/errors.hpp"

using namespace ustat;

TEST_CASE("count matches known binomials") {
    CHECK(count(4, 2) == 6);
    CHECK(count(5, 5) == 1);
    CHECK(count(1000, 3) == 166167000);
    CHECK(to_string(count(100, 50)) == "100891344545564193334812497256");
    CHECK(to_string(count(1000000, 7)) == "198408531780753822420957142507143000000");
    CHECK(count(7, 0) == 1);
}

TEST_CASE("count rejects r > n and overflow") {
    CHECK_THROWS_AS(count(3, 4), DomainError);
    CHECK_THROWS_AS(count(1000000, 200), OverflowError);
    CHECK_FALSE(try_count(1000000, 200).has_value());
    CHECK(try_count(3, 4) == Count{0});
}

TEST_CASE("count agrees with Pascal's rule") {
    for (std::uint64_t n = 1; n < 130; ++n) {
        for (std::uint64_t r = 1; r < n; ++r) {
            const auto lhs = try_count(n, r);
            const auto a = try_count(n - 1, r - 1);
            const auto b = try_count(n - 1, r);
            if (lhs && a && b) CHECK(*lhs == *a + *b);
        }
    }
}

TEST_CASE("unrank reads lexicographic positions") {
    const IndexSpace space(5, 3);
    CHECK(unrank(space, 0) == IndexTuple{0, 1, 2});
    CHECK(unrank(space, 4) == IndexTuple{0, 2, 4});
    CHECK(unrank(space, 9) == IndexTuple{2, 3, 4});
    CHECK_THROWS_AS(unrank(space, 10), DomainError);
    const IndexSpace ten(10, 4);
    CHECK(unrank(ten, 100) == IndexTuple{1, 2, 6, 8});
    CHECK(unrank(ten, 177) == IndexTuple{3, 4, 5, 8});
}

TEST_CASE("unrank is a lexicographic bijection") {
    for (std::uint32_t n = 1; n <= 12; ++n) {
        for (std::uint32_t r = 1; r <= n; ++r) {
            const IndexSpace space(n, r);
            IndexTuple walk(r);
            for (std::uint32_t a = 0; a < r; ++a) walk[a] = a;
            IndexTuple prev;
            for (Count rank = 0; rank < space.cardinality(); ++rank) {
                const auto t = unrank(space, rank);
                REQUIRE(t == walk);
                CHECK(rank_of(space, t) == rank);
                if (!prev.empty()) CHECK(std::lexicographical_compare(prev.begin(), prev.end(), t.begin(), t.end()));
                prev = t;
                const bool more = next_tuple(walk, n);
                CHECK(more == (rank + 1 < space.cardinality()));
            }
        }
    }
}

TEST_CASE("unrank handles 128-bit ranks") {
    const IndexSpace space(1000000, 7);
    const Count last = space.cardinality() - 1;
    CHECK(unrank(space, last) == IndexTuple{999993, 999994, 999995, 999996, 999997, 999998, 999999});
    RngStream rng(3);
    for (int i = 0; i < 200; ++i) {
        const Count rank = rng.uniform_below(space.cardinality());
        const auto t = unrank(space, rank);
        CHECK(std::is_sorted(t.begin(), t.end()));
        CHECK(rank_of(space, t) == rank);
    }
}

TEST_CASE("sample_without_replacement edge cases") {
    const IndexSpace space(4, 2);
    RngStream rng(1);
    auto all = sample_without_replacement(space, 6, rng);
    CHECK(all == std::vector<std::uint32_t>{0, 1, 0, 2, 0, 3, 1, 2, 1, 3, 2, 3});
    CHECK(sample_without_replacement(space, 0, rng).empty());
    CHECK_THROWS_AS(sample_without_replacement(space, 7, rng), DomainError);
}

TEST_CASE("sampled tuples are distinct and sorted, for both strategies") {
    RngStream rng(11);
    for (auto [n, r, m] : {std::tuple{30u, 3u, 4000u}, std::tuple{2000u, 3u, 500u}, std::tuple{50u, 2u, 1225u}}) {
        const IndexSpace space(n, r);
        const auto flat = sample_without_replacement(space, m, rng);
        REQUIRE(flat.size() == static_cast<std::size_t>(m) * r);
        std::vector<Count> ranks;
        for (std::size_t j = 0; j < m; ++j) ranks.push_back(rank_of(space, {flat.data() + j * r, r}));
        CHECK(std::is_sorted(ranks.begin(), ranks.end()));
        CHECK(std::adjacent_find(ranks.begin(), ranks.end()) == ranks.end());
    }
}

TEST_CASE("single-tuple draws are uniform") {
    const IndexSpace space(5, 2);
    RngStream rng(2024);
    std::map<Count, int> freq;
    const int draws = 60000;
    for (int i = 0; i < draws; ++i) {
        const auto flat = sample_without_replacement(space, 1, rng);
        ++freq[rank_of(space, flat)];
    }
    CHECK(freq.size() == 10);
    for (const auto& [rank, k] : freq) CHECK(std::abs(k / double(draws) - 0.1) <= 0.01);
}

TEST_CASE("draw_binomial boundary values and domain") {
    RngStream rng(5);
    CHECK(draw_binomial(1000, 0.0, rng) == 0);
    CHECK(draw_binomial(1000, 1.0, rng) == 1000);
    CHECK(draw_binomial(0, 0.3, rng) == 0);
    CHECK_THROWS_AS(draw_binomial(10, -0.1, rng), DomainError);
    CHECK_THROWS_AS(draw_binomial(10, 1.5, rng), DomainError);
}

namespace {

std::pair<double, double> moments(Count trials, double p, int reps, std::uint64_t seed) {
    RngStream rng(seed);
    double s = 0.0;
    double s2 = 0.0;
    for (int i = 0; i < reps; ++i) {
        const Count k = draw_binomial(trials, p, rng);
        REQUIRE(k <= trials);
        const double x = to_double(k);
        s += x;
        s2 += x * x;
    }
    const double mean = s / reps;
    return {mean, s2 / reps - mean * mean};
}

}  // namespace

TEST_CASE("draw_binomial moments") {
    {
        const auto [mean, var] = moments(1000000, 1e-3, 100000, 17);
        CHECK(std::abs(mean - 1000.0) <= 10.0);
        CHECK(std::abs(var - 999.0) <= 0.03 * 999.0);
    }
    {  // inversion branch
        const auto [mean, var] = moments(200, 0.05, 100000, 18);
        CHECK(std::abs(mean - 10.0) <= 0.05);
        CHECK(std::abs(var - 9.5) <= 0.03 * 9.5);
    }
    {  // mirrored
        const auto [mean, var] = moments(100, 0.9, 100000, 19);
        CHECK(std::abs(mean - 90.0) <= 0.05);
        CHECK(std::abs(var - 9.0) <= 0.03 * 9.0);
    }
    {  // 128-bit trial count
        const Count trials = Count{1} << 100;
        const double p = 600.0 / to_double(trials);
        const auto [mean, var] = moments(trials, p, 20000, 20);
        CHECK(std::abs(mean - 600.0) <= 4 * std::sqrt(600.0 / 20000) + 0.01);
        CHECK(std::abs(var - 600.0) <= 0.06 * 600.0);
    }
}
