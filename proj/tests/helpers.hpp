#pragma once

#include <cstring>
#include <vector>

#include "ustat/dataset.hpp"
#include "ustat/kernels.hpp"
#include "ustat/rng.hpp"

namespace testing {

inline ustat::Dataset random_data(std::size_t n, std::size_t p, std::uint64_t seed) {
    ustat::RngStream rng(seed, {{"test-data", 0}});
    ustat::Dataset data(n, p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) data(i, j) = rng.normal();
    }
    return data;
}

// Data with many ties: small integers.
inline ustat::Dataset tied_data(std::size_t n, std::size_t p, std::uint64_t seed) {
    ustat::RngStream rng(seed, {{"tied-data", 0}});
    ustat::Dataset data(n, p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) data(i, j) = static_cast<double>(rng.uniform_below(std::uint64_t{3}));
    }
    return data;
}

// h(x_1..x_r) = prod x_a[0], one output coordinate.
inline ustat::Kernel product_kernel(std::uint32_t r, std::size_t p = 1) {
    return ustat::Kernel({"product", r, p, 1, 0}, [](ustat::KernelArgs args, std::span<double> out) {
        double v = 1.0;
        for (const double* x : args) v *= x[0];
        out[0] = v;
    });
}

inline ustat::Kernel constant_kernel(std::uint32_t r, double c, std::size_t d = 3) {
    return ustat::Kernel({"constant", r, 0, d, 0}, [c](ustat::KernelArgs, std::span<double> out) {
        for (double& v : out) v = c;
    });
}

// (x - 1 + y - 1) / 2 + 1 on the first coordinate, and its square: mean 1 for N(1, 1) data.
inline ustat::Kernel shifted_kernel() {
    return ustat::Kernel({"shifted", 2, 1, 2, 0}, [](ustat::KernelArgs args, std::span<double> out) {
        out[0] = 0.5 * (args[0][0] + args[1][0]) + 1.0;
        out[1] = args[0][0] * args[1][0];
    });
}

inline bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace testing
