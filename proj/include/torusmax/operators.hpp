#pragma once

#include <vector>

#include "torusmax/grid_function.hpp"
#include "torusmax/trig_poly.hpp"

namespace torusmax {

// 0 for the mean term, otherwise the 1-based position of the last nonzero
// component; this is the index of the martingale difference a term belongs to.
int diff_index(const FreqVector& freq);

// Frequencies kept by the conditional expectation onto the first n coordinates:
// every component past position n must vanish.  n = 0 keeps only the mean.
TrigPoly cond_expect(const TrigPoly& p, int n);

// Martingale difference at index j (1-based).  mart_diff(p, 0) is the mean term.
// For j >= 1 this keeps terms whose j-th component is nonzero while all later
// components vanish; the differences telescope back to p.
TrigPoly mart_diff(const TrigPoly& p, int j);

// All differences d_0, d_1, ..., d_dim in one pass over the terms.
std::vector<TrigPoly> mart_diff_all(const TrigPoly& p);

// Conjugate in coordinate j alone: multiplier -i*sgn(m_j) on each term.
TrigPoly conjugate_j(const TrigPoly& p, int j);

// Full conjugate function: sum over j of conjugate_j applied to the j-th
// martingale difference.  Kills the mean.
TrigPoly conjugate_H(const TrigPoly& p);

// Half-space test: frequency is zero or its last nonzero component is positive.
bool in_half_space(const FreqVector& freq);

// A polynomial is analytic when every frequency in its support passes
// in_half_space.
bool is_analytic(const TrigPoly& p);

// Samples p on the uniform grid theta_k = 2*pi*k/res in each coordinate.
GridFunction sample_grid(const TrigPoly& p, int res);

// Doob-style maximal function of the martingale: at each grid point the max
// over n = 1..dim of |sum_{j<=n} d_j| (the mean term rides inside every
// partial sum).  Returns real nonnegative samples.
GridFunction doob_max_grid(const TrigPoly& p, int res);

// Maximal conjugate function: max over n = 1..dim of |sum_{j=1..n} H_j d_j|.
GridFunction maximal_conj_grid(const TrigPoly& p, int res);

// Square function of the conjugate differences: sqrt(sum_j |H_j d_j|^2).
GridFunction square_fn_grid(const TrigPoly& p, int res);

// Smallest resolution the grid operators accept for p: 4*(max_degree + 1).
int min_grid_res(const TrigPoly& p);

} // namespace torusmax
