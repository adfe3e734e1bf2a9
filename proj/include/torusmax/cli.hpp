#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "torusmax/trig_poly.hpp"

namespace torusmax::cli {

// Deterministic experiment corpus: count random real polynomials whose
// dimensions cycle through dims, drawn at the given degree from a per-index
// seed derived from the master seed.
std::vector<TrigPoly> corpus(const std::vector<int>& dims, int degree, int count,
                             std::uint64_t seed, bool zero_mean);

// Runs the command-line tool on args (program name excluded).  Returns 0 on
// success, 1 when a named verification assertion fails, 2 on usage errors.
int run(std::vector<std::string> args);

} // namespace torusmax::cli
