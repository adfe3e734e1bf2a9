#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "torusmax/trig_poly.hpp"

namespace torusmax {

// Samples of a function on the uniform grid theta_k = 2*pi*k/res per coordinate.
// Values are stored row-major with the LAST coordinate index varying fastest.
class GridFunction {
public:
    GridFunction(int dim, int res, std::vector<Complex> values)
        : dim_(dim), res_(res), values_(std::move(values)) {
        if (dim < 1) throw std::invalid_argument("GridFunction: dimension must be positive");
        if (res < 1) throw std::invalid_argument("GridFunction: resolution must be positive");
        if (values_.size() != point_count(dim, res)) {
            throw std::invalid_argument("GridFunction: expected " +
                                        std::to_string(point_count(dim, res)) + " values, got " +
                                        std::to_string(values_.size()));
        }
    }

    static std::size_t point_count(int dim, int res) {
        std::size_t n = 1;
        for (int j = 0; j < dim; ++j) {
            const std::size_t next = n * static_cast<std::size_t>(res);
            if (next / static_cast<std::size_t>(res) != n) {
                throw std::invalid_argument("GridFunction: grid size overflows");
            }
            n = next;
        }
        return n;
    }

    int dim() const { return dim_; }
    int res() const { return res_; }
    const std::vector<Complex>& values() const { return values_; }

    std::vector<double> magnitudes() const {
        std::vector<double> out(values_.size());
        for (std::size_t i = 0; i < values_.size(); ++i) out[i] = std::abs(values_[i]);
        return out;
    }

private:
    int dim_;
    int res_;
    std::vector<Complex> values_;
};

} // namespace torusmax
