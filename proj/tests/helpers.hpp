#pragma once

#include <cmath>
#include <complex>
#include <initializer_list>
#include <utility>
#include <vector>

#include "torusmax/trig_poly.hpp"

namespace testutil {

using torusmax::Complex;
using torusmax::FreqVector;
using torusmax::TrigPoly;

inline FreqVector fv(std::initializer_list<int> m) { return FreqVector(m); }

inline TrigPoly poly_of(int dim, std::initializer_list<std::pair<FreqVector, Complex>> terms) {
    return TrigPoly::from_terms(dim, std::vector<std::pair<FreqVector, Complex>>(terms));
}

// cos of the axis-th angle (1-based) as a polynomial in dim variables.
inline TrigPoly cos_poly(int dim, int axis) {
    FreqVector plus(static_cast<std::size_t>(dim), 0);
    plus[static_cast<std::size_t>(axis - 1)] = 1;
    FreqVector minus(static_cast<std::size_t>(dim), 0);
    minus[static_cast<std::size_t>(axis - 1)] = -1;
    return poly_of(dim, {{plus, Complex(0.5, 0.0)}, {minus, Complex(0.5, 0.0)}});
}

inline TrigPoly sin_poly(int dim, int axis) {
    FreqVector plus(static_cast<std::size_t>(dim), 0);
    plus[static_cast<std::size_t>(axis - 1)] = 1;
    FreqVector minus(static_cast<std::size_t>(dim), 0);
    minus[static_cast<std::size_t>(axis - 1)] = -1;
    return poly_of(dim, {{plus, Complex(0.0, -0.5)}, {minus, Complex(0.0, 0.5)}});
}

// Max coefficient distance over the union of supports.
inline double coeff_distance(const TrigPoly& a, const TrigPoly& b) {
    double worst = 0.0;
    for (const auto& [freq, coeff] : a.terms()) {
        worst = std::max(worst, std::abs(coeff - b.coefficient(freq)));
    }
    for (const auto& [freq, coeff] : b.terms()) {
        worst = std::max(worst, std::abs(coeff - a.coefficient(freq)));
    }
    return worst;
}

} // namespace testutil
