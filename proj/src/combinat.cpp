#include "ustat/combinat.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <unordered_set>

#include "ustat/errors.hpp"

namespace ustat {

std::string to_string(Count value) {
    if (value == 0) return "0";
    std::string digits;
    while (value > 0) {
        digits.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
        value /= 10;
    }
    std::reverse(digits.begin(), digits.end());
    return digits;
}

Count parse_count(std::string_view text) {
    if (text.empty()) throw DomainError("empty integer");
    Count value = 0;
    for (char c : text) {
        if (c < '0' || c > '9') throw DomainError("not a non-negative integer: " + std::string(text));
        const Count digit = static_cast<Count>(c - '0');
        if (value > (kCountMax - digit) / 10) throw OverflowError("integer exceeds 128 bits");
        value = value * 10 + digit;
    }
    return value;
}

std::optional<Count> try_count(std::uint64_t n, std::uint64_t r) noexcept {
    if (r > n) return Count{0};
    r = std::min(r, n - r);
    Count result = 1;
    // result * (n-r+k) / k is an integer at every step; dividing out the gcd
    // first keeps the intermediate within the final magnitude.
    for (std::uint64_t k = 1; k <= r; ++k) {
        const std::uint64_t factor = n - r + k;
        const std::uint64_t g = std::gcd(static_cast<std::uint64_t>(result % k), k);
        const Count reduced = result / g;
        const Count multiplier = factor / (k / g);
        Count next;
        if (__builtin_mul_overflow(reduced, multiplier, &next)) return std::nullopt;
        result = next;
    }
    return result;
}

Count count(std::uint64_t n, std::uint64_t r) {
    if (r > n) throw DomainError("count: r exceeds n");
    auto value = try_count(n, r);
    if (!value) throw OverflowError("count: C(n, r) exceeds 128 bits");
    return *value;
}

IndexSpace::IndexSpace(std::uint32_t n, std::uint32_t r) : n_(n), r_(r) {
    if (r < 1 || r > n) throw DomainError("IndexSpace requires 1 <= r <= n");
    cardinality_ = count(n, r);
}

namespace {

// C(a, k) saturated at kCountMax.
Count saturating_count(std::uint64_t a, std::uint64_t k) noexcept {
    auto value = try_count(a, k);
    return value ? *value : kCountMax;
}

}  // namespace

void unrank_into(const IndexSpace& space, Count rank, std::span<std::uint32_t> out) {
    if (rank >= space.cardinality()) throw DomainError("unrank: rank out of range");
    if (out.size() != space.r()) throw DomainError("unrank: output span has wrong length");
    const std::uint32_t n = space.n();
    const std::uint32_t r = space.r();
    // Lex rank rho maps to colex rank C(n,r)-1-rho of the reflected tuple
    // (n-1-i_r, ..., n-1-i_1); decode that with the greedy combinadic.
    Count remaining = space.cardinality() - 1 - rank;
    std::uint32_t upper = n;  // exclusive bound on the next combinadic digit
    for (std::uint32_t pos = 0; pos < r; ++pos) {
        const std::uint32_t k = r - pos;
        // Largest a in [k-1, upper) with C(a, k) <= remaining.
        std::uint32_t lo = k - 1;
        std::uint32_t hi = upper - 1;
        while (lo < hi) {
            const std::uint32_t mid = lo + (hi - lo + 1) / 2;
            if (saturating_count(mid, k) <= remaining) {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        remaining -= saturating_count(lo, k);
        out[pos] = n - 1 - lo;
        upper = lo;
    }
}

IndexTuple unrank(const IndexSpace& space, Count rank) {
    IndexTuple tuple(space.r());
    unrank_into(space, rank, tuple);
    return tuple;
}

Count rank_of(const IndexSpace& space, std::span<const std::uint32_t> tuple) {
    if (tuple.size() != space.r()) throw DomainError("rank_of: tuple has wrong length");
    const std::uint32_t n = space.n();
    const std::uint32_t r = space.r();
    Count colex = 0;
    for (std::uint32_t pos = 0; pos < r; ++pos) {
        if (tuple[pos] >= n || (pos > 0 && tuple[pos] <= tuple[pos - 1])) {
            throw DomainError("rank_of: tuple is not strictly increasing within [0, n)");
        }
        colex += try_count(n - 1 - tuple[pos], r - pos).value();  // C(m, k) = 0 for k > m
    }
    return space.cardinality() - 1 - colex;
}

bool next_tuple(std::span<std::uint32_t> tuple, std::uint32_t n) noexcept {
    const auto r = static_cast<std::uint32_t>(tuple.size());
    for (std::uint32_t pos = r; pos-- > 0;) {
        if (tuple[pos] < n - r + pos) {
            ++tuple[pos];
            for (std::uint32_t q = pos + 1; q < r; ++q) tuple[q] = tuple[q - 1] + 1;
            return true;
        }
    }
    return false;
}

namespace {

struct CountHash {
    std::size_t operator()(Count v) const noexcept {
        return static_cast<std::size_t>(splitmix64(static_cast<std::uint64_t>(v) ^
                                                   splitmix64(static_cast<std::uint64_t>(v >> 64))));
    }
};

}  // namespace

std::vector<Count> sample_distinct_ranks(Count universe, Count m, RngStream& rng) {
    if (m > universe) throw DomainError("sample: m exceeds the number of available tuples");
    std::vector<Count> ranks;
    if (m == 0) return ranks;
    ranks.reserve(static_cast<std::size_t>(m));
    // The shuffle touches the whole universe, so it only pays off when m is a
    // sizeable fraction of it.
    if (universe <= kShuffleUniverseLimit && m * 64 >= universe) {
        const auto size = static_cast<std::uint64_t>(universe);
        std::vector<std::uint32_t> pool(size);
        std::iota(pool.begin(), pool.end(), 0u);
        const auto take = static_cast<std::uint64_t>(m);
        for (std::uint64_t i = 0; i < take; ++i) {
            const std::uint64_t j = i + rng.uniform_below(size - i);
            std::swap(pool[i], pool[j]);
            ranks.push_back(pool[i]);
        }
    } else {
        std::unordered_set<Count, CountHash> chosen;
        chosen.reserve(static_cast<std::size_t>(m) * 2);
        for (Count j = universe - m; j < universe; ++j) {
            const Count t = rng.uniform_below(j + 1);
            if (chosen.insert(t).second) {
                ranks.push_back(t);
            } else {
                chosen.insert(j);
                ranks.push_back(j);
            }
        }
    }
    std::sort(ranks.begin(), ranks.end());
    return ranks;
}

std::vector<std::uint32_t> sample_without_replacement(const IndexSpace& space, Count m,
                                                      RngStream& rng) {
    const auto ranks = sample_distinct_ranks(space.cardinality(), m, rng);
    std::vector<std::uint32_t> flat(ranks.size() * space.r());
    for (std::size_t j = 0; j < ranks.size(); ++j) {
        unrank_into(space, ranks[j], std::span(flat).subspan(j * space.r(), space.r()));
    }
    return flat;
}

namespace {

// ln(a!) - ln(b!) for non-negative integers given as doubles, with the exact
// integer difference a - b supplied separately. Differencing two huge
// lgamma values loses everything above ~1e15, so large arguments go through
// Stirling's series written around log1p.
double log_factorial_ratio(double a, double b, double diff) {
    const double smaller = std::min(a, b);
    if (smaller < 1e7) return std::lgamma(a + 1.0) - std::lgamma(b + 1.0);
    // ln x! = (x+1/2) ln(x+1) - (x+1) + ln(2pi)/2 + 1/(12(x+1)) - 1/(360(x+1)^3) + ...
    const double A = a + 1.0;
    const double B = b + 1.0;
    const double lead = (a + 0.5) * std::log1p(diff / B) + diff * std::log(B) - diff;
    const double corr = 1.0 / (12.0 * A) - 1.0 / (12.0 * B) -
                        (1.0 / (360.0 * A * A * A) - 1.0 / (360.0 * B * B * B));
    return lead + corr;
}

Count binomial_inversion(Count trials, double p, RngStream& rng) {
    const double n = to_double(trials);
    const double q = p / (1.0 - p);
    const double f0 = std::exp(n * std::log1p(-p));
    const double rc = (n + 1.0) * p;
    const double bound = std::min(n, std::floor(rc + 11.0 * (std::sqrt(rc) + 1.0)));
    for (;;) {
        double u = rng.uniform();
        double f = f0;
        double x = 0.0;
        do {
            u -= f;
            if (u <= 0.0) return static_cast<Count>(x);
            x += 1.0;
            f *= q * (n - x + 1.0);
            u *= x;
        } while (x <= bound);
    }
}

constexpr double kHatScale1 = 2.943035529371538573;   // 8/e
constexpr double kHatScale2 = 0.8989161620588987408;  // 3 - sqrt(12/e)

Count binomial_ratio_of_uniforms(Count trials, double p, RngStream& rng) {
    const double n = to_double(trials);
    const double q = 1.0 - p;
    const double np = n * p;
    const auto mode = static_cast<std::uint64_t>(std::floor(np + p));
    const double centre = np + 0.5;
    const double log_odds = std::log(p / q);
    const double width = std::sqrt(kHatScale1 * (np * q + 0.5)) + kHatScale2;
    const double bound = std::min(n, std::floor(centre + 6.0 * width));
    const double mode_d = static_cast<double>(mode);
    const double n_minus_mode = to_double(trials - mode);
    for (;;) {
        const double u = rng.uniform();
        const double x = centre + width * (rng.uniform() - 0.5) / u;
        if (x < 0.0 || x > bound) continue;
        const auto k = static_cast<std::uint64_t>(x);
        const double k_d = static_cast<double>(k);
        const double diff = k_d - mode_d;
        // ln f(k) - ln f(mode)
        const double lf = diff * log_odds - log_factorial_ratio(k_d, mode_d, diff) +
                          log_factorial_ratio(n_minus_mode, to_double(trials - k), diff);
        if (u * (4.0 - u) - 3.0 <= lf) return k;
        if (u * (u - lf) > 1.0) continue;
        if (2.0 * std::log(u) <= lf) return k;
    }
}

}  // namespace

Count draw_binomial(Count trials, double p, RngStream& rng) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("draw_binomial: p must lie in [0, 1]");
    if (p == 0.0 || trials == 0) return 0;
    if (p == 1.0) return trials;
    if (p > 0.5) return trials - draw_binomial(trials, 1.0 - p, rng);
    if (to_double(trials) * p < 30.0) return binomial_inversion(trials, p, rng);
    return binomial_ratio_of_uniforms(trials, p, rng);
}

}  // namespace ustat
