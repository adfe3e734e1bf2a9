#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "helpers.hpp"
#include "torusmax/operators.hpp"
#include "torusmax/oracle.hpp"

using namespace torusmax;
using testutil::coeff_distance;
using testutil::cos_poly;
using testutil::fv;
using testutil::poly_of;
using testutil::sin_poly;

namespace {

double grid_sup_diff(const GridFunction& a, const GridFunction& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) {
        worst = std::max(worst, std::abs(a.values()[i] - b.values()[i]));
    }
    return worst;
}

} // namespace

TEST_CASE("dense transform recovers cosine coefficients") {
    const GridFunction g = sample_grid(cos_poly(1, 1), 16);
    const TrigPoly p = oracle::dft_coeffs(g, 1);
    CHECK(std::abs(p.coefficient(fv({1})) - Complex(0.5, 0.0)) <= 1e-10);
    CHECK(std::abs(p.coefficient(fv({-1})) - Complex(0.5, 0.0)) <= 1e-10);
    CHECK(std::abs(p.coefficient(fv({0}))) <= 1e-10);
}

TEST_CASE("dense transform round-trips random polynomials") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const int dim = 1 + static_cast<int>(seed % 3);
        const TrigPoly p = random_real_poly(dim, 3, seed, false);
        const GridFunction g = sample_grid(p, 16);
        CHECK(coeff_distance(oracle::dft_coeffs(g, p.max_degree()), p) <= 1e-10);
    }
}

TEST_CASE("dense transform enforces its resolution floor") {
    const GridFunction g = sample_grid(cos_poly(1, 1), 3);
    CHECK_THROWS_AS(oracle::dft_coeffs(g, 2), std::invalid_argument);
}

TEST_CASE("dense conjugate reproduces the classical pair") {
    const int res = 16;
    const GridFunction got = oracle::conjugate_via_dft(sample_grid(cos_poly(1, 1), res), 1);
    const GridFunction want = sample_grid(sin_poly(1, 1), res);
    CHECK(grid_sup_diff(got, want) <= 1e-10);
}

TEST_CASE("dense conjugate annihilates constants") {
    const TrigPoly c = poly_of(2, {{fv({0, 0}), Complex(3.0, 0.0)}});
    const GridFunction got = oracle::conjugate_via_dft(sample_grid(c, 8), 1);
    for (const Complex& v : got.values()) CHECK(std::abs(v) <= 1e-12);
}

TEST_CASE("dense averaging matches conditional expectation basics") {
    SUBCASE("pure second-coordinate motion averages away") {
        const GridFunction got = oracle::cond_expect_via_avg(sample_grid(cos_poly(2, 2), 8), 1);
        for (const Complex& v : got.values()) CHECK(std::abs(v) <= 1e-12);
    }
    SUBCASE("n = dim is the identity") {
        const TrigPoly p = random_real_poly(2, 2, 5, false);
        const GridFunction g = sample_grid(p, 8);
        CHECK(grid_sup_diff(oracle::cond_expect_via_avg(g, 2), g) == 0.0);
    }
}

TEST_CASE("sparse operators agree with the dense oracles") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const int dim = 1 + static_cast<int>(seed % 3);
        const TrigPoly p = random_real_poly(dim, 3, seed, false);
        const int res = 32;
        const GridFunction g = sample_grid(p, res);

        for (int j = 1; j <= dim; ++j) {
            const GridFunction sparse = sample_grid(conjugate_j(mart_diff(p, j), j), res);
            // The dense axis conjugate of the full sample differs from the
            // sparse per-difference conjugate, so compare like with like: the
            // axis conjugate applied to the j-th difference of averages.
            const GridFunction dj = sample_grid(mart_diff(p, j), res);
            CHECK(grid_sup_diff(oracle::conjugate_via_dft(dj, j), sparse) <= 1e-9);
        }
        for (int n = 0; n <= dim; ++n) {
            const GridFunction sparse = sample_grid(cond_expect(p, n), res);
            CHECK(grid_sup_diff(oracle::cond_expect_via_avg(g, n), sparse) <= 1e-9);
        }
        const GridFunction sparse_h = sample_grid(conjugate_H(p), res);
        CHECK(grid_sup_diff(oracle::conjugate_H_via_dft(g), sparse_h) <= 1e-9);
    }
}
