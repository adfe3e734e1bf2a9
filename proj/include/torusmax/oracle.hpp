#pragma once

#include "torusmax/grid_function.hpp"
#include "torusmax/trig_poly.hpp"

namespace torusmax {
// Dense-transform reference implementations used only to cross-validate the
// sparse coefficient path.  They deliberately share no index arithmetic or
// kernel code with the rest of the library: a check that shares its bugs with
// the thing it checks is worthless.
namespace oracle {

// Recovers the coefficients of a trig poly of degree <= max_degree from its
// grid samples by a naive forward transform.  Requires res >= 2*max_degree+2.
TrigPoly dft_coeffs(const GridFunction& g, int max_degree);

// One-dimensional conjugate operator along axis j (1-based): circular
// convolution of each axis-j line with the dense multiplier kernel.
GridFunction conjugate_via_dft(const GridFunction& g, int j);

// Conditional expectation onto the first n coordinates: plain averaging over
// coordinates n+1..dim, replicated back onto the full grid.
GridFunction cond_expect_via_avg(const GridFunction& g, int n);

// Full conjugate function assembled from the two dense primitives above:
// sum over j of the axis-j conjugate of the j-th difference of averages.
GridFunction conjugate_H_via_dft(const GridFunction& g);

} // namespace oracle
} // namespace torusmax
