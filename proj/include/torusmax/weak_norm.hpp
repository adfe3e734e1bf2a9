#pragma once

#include <cstdint>
#include <vector>

#include "torusmax/grid_function.hpp"
#include "torusmax/trig_poly.hpp"

namespace torusmax {

// Fraction of grid points with |value| strictly greater than y (y > 0).
double distribution(const GridFunction& g, double y);

// Uniform-grid quadrature norm: (mean of |value|^p)^(1/p), p in {1, 2}.
double norm(const GridFunction& g, int p);

// Weak-L1 norm of the sampled function: sup over levels y of y * (fraction of
// points with |value| >= y).  For a sampled (step) function the sup is
// attained at one of the observed magnitudes, so the computation is exact.
double weak_l1(const GridFunction& g);

// Weak norm of a plain magnitude sample (used for path statistics as well as
// grids), together with the achieved level, its tail fraction, and the
// binomial standard error of level*fraction at that level.
struct WeakNormDetail {
    double value = 0.0;
    double level = 0.0;
    double fraction = 0.0;
    double std_error = 0.0;
};
WeakNormDetail weak_l1_detail(std::vector<double> magnitudes);
double weak_l1_of_samples(std::vector<double> magnitudes);

// One row of the weak-type ratio experiment: the empirical constant of
// ||Mf||*_1 <= A ||f||_1 for a single polynomial.
struct WeakRatioRecord {
    int dim = 0;
    int res = 0;
    std::uint64_t seed = 0;  // metadata, set by the caller
    double l1 = 0.0;
    double weak_l1_of_M = 0.0;
    double ratio = 0.0;
};

// Computes weak_l1(maximal conjugate of p) / (grid L1 norm of p).
// p must be real-valued and nonzero.
WeakRatioRecord weak_type_ratio(const TrigPoly& p, int res);

} // namespace torusmax
