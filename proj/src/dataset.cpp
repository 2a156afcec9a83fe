#include "ustat/dataset.hpp"

#include <cmath>

#include "ustat/errors.hpp"

namespace ustat {

Dataset::Dataset(std::size_t n, std::size_t p) : n_(n), p_(p), values_(n * p, 0.0) {}

Dataset::Dataset(std::size_t n, std::size_t p, std::vector<double> values)
    : n_(n), p_(p), values_(std::move(values)) {
    if (values_.size() != n * p) throw DomainError("Dataset: value count does not match n * p");
    for (double v : values_) {
        if (!std::isfinite(v)) throw DomainError("Dataset: non-finite value");
    }
}

}  // namespace ustat
