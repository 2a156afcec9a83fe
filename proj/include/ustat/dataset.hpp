#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ustat {

/// n observations of dimension p, stored row-major.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::size_t n, std::size_t p);
    Dataset(std::size_t n, std::size_t p, std::vector<double> values);

    std::size_t n() const noexcept { return n_; }
    std::size_t p() const noexcept { return p_; }

    std::span<const double> row(std::size_t i) const noexcept { return {values_.data() + i * p_, p_}; }
    std::span<double> row(std::size_t i) noexcept { return {values_.data() + i * p_, p_}; }

    double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * p_ + j]; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return values_[i * p_ + j]; }

    std::span<const double> values() const noexcept { return values_; }

private:
    std::size_t n_ = 0;
    std::size_t p_ = 0;
    std::vector<double> values_;
};

}  // namespace ustat
