#include "ustat/rng.hpp"

#include <cmath>

#include "ustat/errors.hpp"

namespace ustat {

namespace {

std::uint64_t fnv1a(std::string_view text) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t master, const RngStream::Path& path) noexcept {
    std::uint64_t h = splitmix64(master);
    for (const auto& [label, index] : path) {
        h = splitmix64(h ^ fnv1a(label));
        h = splitmix64(h ^ index);
    }
    return h;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t master_seed, Path path)
    : master_seed_(master_seed), path_(std::move(path)), engine_(derive_seed(master_seed_, path_)) {}

RngStream RngStream::substream(std::string_view label, std::uint64_t index) const {
    Path child = path_;
    child.emplace_back(std::string(label), index);
    return RngStream(master_seed_, std::move(child));
}

std::string RngStream::describe() const {
    std::string out = std::to_string(master_seed_);
    for (const auto& [label, index] : path_) {
        out += '/';
        out += label;
        out += ':';
        out += std::to_string(index);
    }
    return out;
}

double RngStream::uniform() {
    // 53 random bits centred in their cell: never 0, never 1.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_below(std::uint64_t bound) {
    if (bound == 0) throw DomainError("uniform_below: bound must be positive");
    // Lemire's multiply-shift with rejection of the biased low region.
    unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            m = static_cast<unsigned __int128>(engine_()) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

Count RngStream::uniform_below(Count bound) {
    if (bound == 0) throw DomainError("uniform_below: bound must be positive");
    if ((bound >> 64) == 0) return uniform_below(static_cast<std::uint64_t>(bound));
    // Mask to the bit width of bound-1 and reject; acceptance rate > 1/2.
    const Count top = bound - 1;
    int bits = 128;
    while (bits > 0 && ((top >> (bits - 1)) & 1) == 0) --bits;
    const Count mask = bits == 128 ? kCountMax : ((Count{1} << bits) - 1);
    for (;;) {
        Count x = (static_cast<Count>(engine_()) << 64) | engine_();
        x &= mask;
        if (x < bound) return x;
    }
}

double RngStream::normal() {
    if (has_spare_normal_) {
        has_spare_normal_ = false;
        return spare_normal_;
    }
    // Marsaglia polar method.
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_ = v * factor;
    has_spare_normal_ = true;
    return u * factor;
}

double RngStream::gamma(double shape) {
    if (!(shape > 0.0)) throw DomainError("gamma: shape must be positive");
    if (shape < 1.0) {
        // Boost to shape+1, then scale by U^(1/shape).
        const double g = gamma(shape + 1.0);
        return g * std::pow(uniform(), 1.0 / shape);
    }
    // Marsaglia & Tsang (2000).
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

}  // namespace ustat
