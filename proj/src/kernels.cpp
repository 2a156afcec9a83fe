#include "ustat/kernels.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <string>

#include "ustat/errors.hpp"
#include "ustat/simd.hpp"

namespace ustat {

PairIndexMap::PairIndexMap(std::size_t p) : p_(p) {
    if (p < 2) throw DomainError("pairwise kernels need p >= 2");
}

std::size_t PairIndexMap::index(std::size_t j, std::size_t k) const {
    if (!(j < k && k < p_)) throw DomainError("PairIndexMap: need 0 <= j < k < p");
    return j * (2 * p_ - j - 1) / 2 + (k - j - 1);
}

std::pair<std::size_t, std::size_t> PairIndexMap::pair(std::size_t idx) const {
    if (idx >= size()) throw DomainError("PairIndexMap: index out of range");
    std::size_t j = 0;
    std::size_t row_len = p_ - 1;
    while (idx >= row_len) {
        idx -= row_len;
        ++j;
        --row_len;
    }
    return {j, j + 1 + idx};
}

Kernel::Kernel(KernelSpec spec, KernelFn fn) : spec_(std::move(spec)), fn_(std::move(fn)) {
    if (spec_.order < 1) throw DomainError("kernel order must be at least 1");
    if (spec_.output_dim == 0) throw DomainError("kernel output dimension must be positive");
    if (!fn_) throw DomainError("kernel evaluator is empty");
}

std::vector<std::vector<std::uint32_t>> permutations(std::uint32_t r) {
    std::vector<std::uint32_t> perm(r);
    std::iota(perm.begin(), perm.end(), 0u);
    std::vector<std::vector<std::uint32_t>> all;
    do {
        all.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return all;
}

double bergsma_dassios_phi(double y1, double y2, double y3, double y4) noexcept {
    const bool a = std::max(y1, y3) < std::min(y2, y4);
    const bool b = std::min(y1, y3) > std::max(y2, y4);
    const bool c = std::max(y1, y2) < std::min(y3, y4);
    const bool d = std::min(y1, y2) > std::max(y3, y4);
    return static_cast<double>(a) + static_cast<double>(b) - static_cast<double>(c) -
           static_cast<double>(d);
}

double hoeffding_phi(double y1, double y2, double y3, double y4, double y5) noexcept {
    const double left = static_cast<double>(y1 >= y2) - static_cast<double>(y1 >= y3);
    const double right = static_cast<double>(y1 >= y4) - static_cast<double>(y1 >= y5);
    return left * right / 4.0;
}

namespace {

double sign_of(double a) noexcept { return static_cast<double>(a > 0.0) - static_cast<double>(a < 0.0); }

void check_args(KernelArgs args, std::size_t r, std::size_t p, std::span<double> out) {
    if (args.size() != r) throw DomainError("kernel called with the wrong number of observations");
    if (out.size() != p * (p - 1) / 2) throw DomainError("kernel output has the wrong length");
}

const std::vector<std::vector<std::uint32_t>>& perms_of(std::uint32_t r) {
    static const std::array<std::vector<std::vector<std::uint32_t>>, 6> table = {
        permutations(0), permutations(1), permutations(2),
        permutations(3), permutations(4), permutations(5)};
    return table.at(r);
}

// Per-thread scratch for the production evaluators.
std::vector<double>& scratch(std::size_t size) {
    thread_local std::vector<double> buffer;
    if (buffer.size() < size) buffer.resize(size);
    return buffer;
}

}  // namespace

namespace reference {

void kendall(KernelArgs args, std::size_t p, std::span<double> out) {
    check_args(args, 2, p, out);
    const double* x1 = args[0];
    const double* x2 = args[1];
    std::fill(out.begin(), out.end(), 0.0);
    std::size_t idx = 0;
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = j + 1; k < p; ++k) {
            out[idx++] += sign_of(x1[j] - x2[j]) * sign_of(x1[k] - x2[k]);
        }
    }
}

void spearman(KernelArgs args, std::size_t p, std::span<double> out) {
    check_args(args, 3, p, out);
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& perm : perms_of(3)) {
        const double* a = args[perm[0]];
        const double* b = args[perm[1]];
        const double* c = args[perm[2]];
        std::size_t idx = 0;
        for (std::size_t j = 0; j < p; ++j) {
            for (std::size_t k = j + 1; k < p; ++k) {
                out[idx++] += sign_of(a[j] - b[j]) * sign_of(a[k] - c[k]);
            }
        }
    }
    for (double& v : out) v *= 0.5;
}

void bergsma_dassios(KernelArgs args, std::size_t p, std::span<double> out) {
    check_args(args, 4, p, out);
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& perm : perms_of(4)) {
        const double* y1 = args[perm[0]];
        const double* y2 = args[perm[1]];
        const double* y3 = args[perm[2]];
        const double* y4 = args[perm[3]];
        std::size_t idx = 0;
        for (std::size_t j = 0; j < p; ++j) {
            const double phi_j = bergsma_dassios_phi(y1[j], y2[j], y3[j], y4[j]);
            for (std::size_t k = j + 1; k < p; ++k) {
                out[idx++] += phi_j * bergsma_dassios_phi(y1[k], y2[k], y3[k], y4[k]);
            }
        }
    }
    for (double& v : out) v *= 1.0 / 24.0;
}

void hoeffding_d(KernelArgs args, std::size_t p, std::span<double> out) {
    check_args(args, 5, p, out);
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& perm : perms_of(5)) {
        const double* y1 = args[perm[0]];
        const double* y2 = args[perm[1]];
        const double* y3 = args[perm[2]];
        const double* y4 = args[perm[3]];
        const double* y5 = args[perm[4]];
        std::size_t idx = 0;
        for (std::size_t j = 0; j < p; ++j) {
            const double phi_j = hoeffding_phi(y1[j], y2[j], y3[j], y4[j], y5[j]);
            for (std::size_t k = j + 1; k < p; ++k) {
                out[idx++] += phi_j * hoeffding_phi(y1[k], y2[k], y3[k], y4[k], y5[k]);
            }
        }
    }
    for (double& v : out) v *= 1.0 / 120.0;
}

}  // namespace reference

namespace {

// sign(a_j - b_j) sign(a_k - b_k): one outer product of a sign vector with itself.
void kendall_fast(KernelArgs args, std::size_t p, std::span<double> out) {
    check_args(args, 2, p, out);
    auto& s = scratch(p);
    simd::sign_diff({args[0], p}, {args[1], p}, {s.data(), p});
    std::fill(out.begin(), out.end(), 0.0);
    simd::outer_upper({s.data(), p}, {s.data(), p}, out);
}

// The six permutation terms only need the sign vectors of the six ordered
// pairs (a, b); term pi contributes outer(s[pi0][pi1], s[pi0][pi2]).
void spearman_fast(KernelArgs args, std::size_t p, std::span<double> out) {
    check_args(args, 3, p, out);
    auto& buf = scratch(9 * p);
    auto signs = [&](std::uint32_t a, std::uint32_t b) { return buf.data() + (3 * a + b) * p; };
    for (std::uint32_t a = 0; a < 3; ++a) {
        for (std::uint32_t b = 0; b < 3; ++b) {
            if (a != b) simd::sign_diff({args[a], p}, {args[b], p}, {signs(a, b), p});
        }
    }
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& perm : perms_of(3)) {
        simd::outer_upper({signs(perm[0], perm[1]), p}, {signs(perm[0], perm[2]), p}, out);
    }
    simd::scale(0.5, out);
}

void bergsma_dassios_fast(KernelArgs args, std::size_t p, std::span<double> out) {
    check_args(args, 4, p, out);
    auto& phi = scratch(p);
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& perm : perms_of(4)) {
        const double* y1 = args[perm[0]];
        const double* y2 = args[perm[1]];
        const double* y3 = args[perm[2]];
        const double* y4 = args[perm[3]];
        for (std::size_t j = 0; j < p; ++j) phi[j] = bergsma_dassios_phi(y1[j], y2[j], y3[j], y4[j]);
        simd::outer_upper({phi.data(), p}, {phi.data(), p}, out);
    }
    simd::scale(1.0 / 24.0, out);
}

void hoeffding_d_fast(KernelArgs args, std::size_t p, std::span<double> out) {
    check_args(args, 5, p, out);
    auto& phi = scratch(p);
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& perm : perms_of(5)) {
        const double* y1 = args[perm[0]];
        const double* y2 = args[perm[1]];
        const double* y3 = args[perm[2]];
        const double* y4 = args[perm[3]];
        const double* y5 = args[perm[4]];
        for (std::size_t j = 0; j < p; ++j) phi[j] = hoeffding_phi(y1[j], y2[j], y3[j], y4[j], y5[j]);
        simd::outer_upper({phi.data(), p}, {phi.data(), p}, out);
    }
    simd::scale(1.0 / 120.0, out);
}

Kernel pairwise(std::string name, std::uint32_t order, std::uint32_t degeneracy, std::size_t p,
                void (*fn)(KernelArgs, std::size_t, std::span<double>)) {
    const PairIndexMap pairs(p);
    KernelSpec spec{std::move(name), order, p, pairs.size(), degeneracy};
    return Kernel(std::move(spec), [p, fn](KernelArgs args, std::span<double> out) { fn(args, p, out); });
}

}  // namespace

Kernel make_kendall(std::size_t p) { return pairwise("kendall", 2, 0, p, kendall_fast); }

Kernel make_spearman(std::size_t p) { return pairwise("spearman", 3, 0, p, spearman_fast); }

// Degenerate of order 1 under pairwise independence.
Kernel make_bergsma_dassios(std::size_t p) {
    return pairwise("bergsma-dassios", 4, 1, p, bergsma_dassios_fast);
}

Kernel make_hoeffding_d(std::size_t p) { return pairwise("hoeffding-d", 5, 1, p, hoeffding_d_fast); }

Kernel make_kernel(std::string_view name, std::size_t p) {
    if (name == "kendall") return make_kendall(p);
    if (name == "spearman") return make_spearman(p);
    if (name == "bergsma-dassios") return make_bergsma_dassios(p);
    if (name == "hoeffding-d") return make_hoeffding_d(p);
    throw DomainError("unknown kernel '" + std::string(name) +
                      "' (expected kendall, spearman, bergsma-dassios or hoeffding-d)");
}

}  // namespace ustat
