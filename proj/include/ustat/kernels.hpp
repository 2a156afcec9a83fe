#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ustat {

/// Row-major upper triangle of a p x p grid: (0,1), (0,2), ..., (0,p-1), (1,2), ...
class PairIndexMap {
public:
    explicit PairIndexMap(std::size_t p);

    std::size_t p() const noexcept { return p_; }
    std::size_t size() const noexcept { return p_ * (p_ - 1) / 2; }

    /// 0-based j < k.
    std::size_t index(std::size_t j, std::size_t k) const;
    std::pair<std::size_t, std::size_t> pair(std::size_t index) const;

private:
    std::size_t p_;
};

struct KernelSpec {
    std::string name;
    std::uint32_t order = 2;
    std::size_t input_dim = 0;
    std::size_t output_dim = 0;
    // 0 = non-degenerate; k-1 for a kernel degenerate of order k-1.
    std::uint32_t degeneracy_order = 0;
};

/// The r observations handed to a kernel, each a pointer to input_dim values.
using KernelArgs = std::span<const double* const>;

/// Writes h(args) into out (length output_dim), overwriting it.
using KernelFn = std::function<void(KernelArgs, std::span<double>)>;

/// A symmetric kernel of fixed order together with its evaluator. Built-in
/// kernels and user kernels share this type and all downstream machinery.
class Kernel {
public:
    Kernel(KernelSpec spec, KernelFn fn);

    const KernelSpec& spec() const noexcept { return spec_; }
    std::uint32_t order() const noexcept { return spec_.order; }
    std::size_t output_dim() const noexcept { return spec_.output_dim; }
    std::size_t input_dim() const noexcept { return spec_.input_dim; }
    const std::string& name() const noexcept { return spec_.name; }

    void eval(KernelArgs args, std::span<double> out) const { fn_(args, out); }

private:
    KernelSpec spec_;
    KernelFn fn_;
};

/// Names accepted by make_kernel.
inline constexpr std::string_view kKernelNames[] = {"kendall", "spearman", "bergsma-dassios",
                                                    "hoeffding-d"};

/// Built-in pairwise kernel on p-dimensional observations (d = p(p-1)/2).
/// Throws DomainError for unknown names or p < 2.
Kernel make_kernel(std::string_view name, std::size_t p);

Kernel make_kendall(std::size_t p);
Kernel make_spearman(std::size_t p);
Kernel make_bergsma_dassios(std::size_t p);
Kernel make_hoeffding_d(std::size_t p);

/// Straightforward evaluators: every permutation term is computed coordinate
/// pair by coordinate pair. The production kernels above must agree with
/// these bit for bit.
namespace reference {
void kendall(KernelArgs args, std::size_t p, std::span<double> out);
void spearman(KernelArgs args, std::size_t p, std::span<double> out);
void bergsma_dassios(KernelArgs args, std::size_t p, std::span<double> out);
void hoeffding_d(KernelArgs args, std::size_t p, std::span<double> out);
}  // namespace reference

/// The four-indicator function of the Bergsma-Dassios kernel on scalars.
double bergsma_dassios_phi(double y1, double y2, double y3, double y4) noexcept;

/// Hoeffding's D building block on scalars.
double hoeffding_phi(double y1, double y2, double y3, double y4, double y5) noexcept;

/// All permutations of {0, ..., r-1} in lexicographic order.
std::vector<std::vector<std::uint32_t>> permutations(std::uint32_t r);

}  // namespace ustat
