#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "helpers.hpp"
#include "torusmax/operators.hpp"
#include "torusmax/rng.hpp"

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

// cos(theta_1 + theta_2) in two variables.
TrigPoly cos_sum_poly() {
    return poly_of(2, {{fv({1, 1}), Complex(0.5, 0.0)}, {fv({-1, -1}), Complex(0.5, 0.0)}});
}

TrigPoly sin_sum_poly() {
    return poly_of(2, {{fv({1, 1}), Complex(0.0, -0.5)}, {fv({-1, -1}), Complex(0.0, 0.5)}});
}

} // namespace

TEST_CASE("difference index finds the last moving coordinate") {
    CHECK(diff_index(fv({0, 0})) == 0);
    CHECK(diff_index(fv({3, 0})) == 1);
    CHECK(diff_index(fv({-1, 2})) == 2);
    CHECK(diff_index(fv({0, 0, -5})) == 3);
}

TEST_CASE("conditional expectation keeps the leading coordinates") {
    const TrigPoly p = poly_of(2, {{fv({0, 0}), Complex(3.0, 0.0)},
                                   {fv({0, 1}), Complex(0.5, 0.0)},
                                   {fv({0, -1}), Complex(0.5, 0.0)}});
    SUBCASE("n = 0 keeps the mean") {
        const TrigPoly m = cond_expect(p, 0);
        CHECK(m.terms().size() == 1);
        CHECK(m.coefficient(fv({0, 0})) == Complex(3.0, 0.0));
    }
    SUBCASE("n = 1 drops terms moving in coordinate 2") {
        const TrigPoly q = cos_poly(2, 1) + cos_sum_poly();
        CHECK(coeff_distance(cond_expect(q, 1), cos_poly(2, 1)) == 0.0);
    }
    SUBCASE("n = N is the identity") {
        CHECK(coeff_distance(cond_expect(p, 2), p) == 0.0);
    }
    SUBCASE("out of range is rejected") {
        CHECK_THROWS_AS(cond_expect(p, 3), std::invalid_argument);
        CHECK_THROWS_AS(cond_expect(p, -1), std::invalid_argument);
    }
}

TEST_CASE("martingale differences select by last moving coordinate") {
    SUBCASE("cross term lives in d_2") {
        const TrigPoly q = cos_poly(2, 1) + cos_sum_poly();
        CHECK(coeff_distance(mart_diff(q, 2), cos_sum_poly()) == 0.0);
        CHECK(coeff_distance(mart_diff(q, 1), cos_poly(2, 1)) == 0.0);
    }
    SUBCASE("monomial lands exactly at its difference index") {
        const TrigPoly mono = poly_of(3, {{fv({2, 0, 1}), Complex(1.0, 0.0)}});
        CHECK(coeff_distance(mart_diff(mono, 3), mono) == 0.0);
        CHECK(mart_diff(mono, 1).terms().empty());
        CHECK(mart_diff(mono, 2).terms().empty());
    }
    SUBCASE("constants are d_0") {
        const TrigPoly c = poly_of(1, {{fv({0}), Complex(5.0, 0.0)}});
        CHECK(coeff_distance(mart_diff(c, 0), c) == 0.0);
        CHECK(mart_diff(c, 1).terms().empty());
    }
}

TEST_CASE("differences telescope and are orthogonal") {
    Rng seeds(7);
    for (int trial = 0; trial < 25; ++trial) {
        const int dim = 1 + static_cast<int>(seeds.next_u64() % 4);
        const TrigPoly p = random_real_poly(dim, 5, seeds.next_u64(), false);
        const auto parts = mart_diff_all(p);
        REQUIRE(parts.size() == static_cast<std::size_t>(dim) + 1);

        TrigPoly sum = parts[0];
        for (std::size_t j = 1; j < parts.size(); ++j) sum = sum + parts[j];
        CHECK(coeff_distance(sum, p) <= 1e-12);

        for (int j = 1; j <= dim; ++j) {
            // Telescoping: d_j = E(.|F_j) - E(.|F_{j-1}).
            const TrigPoly tele = cond_expect(p, j) - cond_expect(p, j - 1);
            CHECK(coeff_distance(parts[static_cast<std::size_t>(j)], tele) == 0.0);
            // Zero mean for j >= 1.
            CHECK(parts[static_cast<std::size_t>(j)].coefficient(FreqVector(
                      static_cast<std::size_t>(dim), 0)) == Complex(0.0, 0.0));
        }
    }
}

TEST_CASE("grid inner products of distinct differences vanish") {
    const TrigPoly p = random_real_poly(3, 3, 99, false);
    const int res = min_grid_res(p);
    const auto parts = mart_diff_all(p);
    std::vector<GridFunction> grids;
    for (const auto& part : parts) grids.push_back(sample_grid(part, res));
    const double total = static_cast<double>(grids[0].values().size());
    for (std::size_t a = 0; a < grids.size(); ++a) {
        for (std::size_t b = a + 1; b < grids.size(); ++b) {
            Complex dot(0.0, 0.0);
            for (std::size_t i = 0; i < grids[a].values().size(); ++i) {
                dot += grids[a].values()[i] * std::conj(grids[b].values()[i]);
            }
            CHECK(std::abs(dot) / total <= 1e-9);
        }
    }
}

TEST_CASE("differences vanish when their coordinate is zeroed") {
    const TrigPoly p = random_real_poly(3, 3, 123, true);
    Rng rng(5);
    for (int n = 1; n <= 3; ++n) {
        const TrigPoly d = mart_diff(p, n);
        std::vector<Complex> coords(3);
        for (int j = 0; j < 3; ++j) coords[static_cast<std::size_t>(j)] = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
        coords[static_cast<std::size_t>(n - 1)] = Complex(0.0, 0.0);
        CHECK(std::abs(d.evaluate(PolydiskPoint(coords))) <= 1e-12);
    }
}

TEST_CASE("axis conjugates reproduce the classical pairs") {
    SUBCASE("cosine to sine") {
        CHECK(coeff_distance(conjugate_j(cos_poly(1, 1), 1), sin_poly(1, 1)) == 0.0);
    }
    SUBCASE("independent axis is annihilated") {
        CHECK(conjugate_j(cos_poly(2, 1), 2).terms().empty());
    }
    SUBCASE("sine to minus cosine") {
        const Complex minus_one[] = {Complex(-1.0, 0.0)};
        const TrigPoly c[] = {cos_poly(1, 1)};
        CHECK(coeff_distance(conjugate_j(sin_poly(1, 1), 1), linear_combine(minus_one, c)) == 0.0);
    }
    SUBCASE("applying twice negates the moving part") {
        const TrigPoly p = random_real_poly(2, 4, 17, false);
        const TrigPoly twice = conjugate_j(conjugate_j(p, 1), 1);
        // -(p - part of p constant in coordinate 1)
        TrigPoly::TermMap moving;
        for (const auto& [freq, coeff] : p.terms()) {
            if (freq[0] != 0) moving.emplace(freq, -coeff);
        }
        CHECK(coeff_distance(twice, TrigPoly::from_map(2, std::move(moving))) == 0.0);
    }
    SUBCASE("axis range is checked") {
        CHECK_THROWS_AS(conjugate_j(cos_poly(2, 1), 0), std::invalid_argument);
        CHECK_THROWS_AS(conjugate_j(cos_poly(2, 1), 3), std::invalid_argument);
    }
}

TEST_CASE("full conjugate operator") {
    SUBCASE("disjoint single-variable pieces") {
        const TrigPoly f = cos_poly(2, 1) + cos_poly(2, 2);
        const TrigPoly expected = sin_poly(2, 1) + sin_poly(2, 2);
        CHECK(coeff_distance(conjugate_H(f), expected) == 0.0);
    }
    SUBCASE("cross term uses the sign of its last moving coordinate") {
        CHECK(coeff_distance(conjugate_H(cos_sum_poly()), sin_sum_poly()) == 0.0);
    }
    SUBCASE("product of cosines") {
        const TrigPoly f = multiply(cos_poly(2, 1), cos_poly(2, 2));
        const TrigPoly expected = multiply(cos_poly(2, 1), sin_poly(2, 2));
        CHECK(coeff_distance(conjugate_H(f), expected) <= 1e-15);
    }
    SUBCASE("assembled from per-axis conjugates of the differences") {
        const TrigPoly p = random_real_poly(3, 4, 271828, false);
        TrigPoly assembled(3);
        for (int j = 1; j <= 3; ++j) assembled = assembled + conjugate_j(mart_diff(p, j), j);
        CHECK(coeff_distance(conjugate_H(p), assembled) == 0.0);
    }
    SUBCASE("differences commute with the conjugate") {
        const TrigPoly p = random_real_poly(3, 4, 31415, false);
        const TrigPoly hp = conjugate_H(p);
        for (int j = 1; j <= 3; ++j) {
            CHECK(coeff_distance(mart_diff(hp, j), conjugate_j(mart_diff(p, j), j)) == 0.0);
        }
    }
    SUBCASE("kills the mean and preserves realness") {
        const TrigPoly p = random_real_poly(2, 3, 55, false);
        const TrigPoly hp = conjugate_H(p);
        CHECK(hp.coefficient(fv({0, 0})) == Complex(0.0, 0.0));
        CHECK(hp.is_real());
    }
}

TEST_CASE("conjugation is an l2 coefficient isometry on zero-mean input") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const TrigPoly p = random_real_poly(2 + static_cast<int>(seed % 2), 4, seed, true);
        const double a = p.coeff_l2();
        const double b = conjugate_H(p).coeff_l2();
        REQUIRE(a > 0.0);
        CHECK(std::abs(a - b) <= 1e-10 * a);
    }
}

TEST_CASE("half-space membership and analyticity") {
    CHECK(in_half_space(fv({0, 0})));
    CHECK(in_half_space(fv({1, 0})));
    CHECK(!in_half_space(fv({-1, 0})));
    CHECK(in_half_space(fv({-3, 2})));

    CHECK(is_analytic(poly_of(2, {{fv({1, 0}), Complex(1.0, 0.0)}})));
    CHECK(!is_analytic(poly_of(2, {{fv({-1, 0}), Complex(1.0, 0.0)}})));
    CHECK(is_analytic(poly_of(2, {{fv({0, 0}), Complex(1.0, 0.0)}})));
}

TEST_CASE("analytic completion and its square stay analytic") {
    const Complex combo[] = {Complex(1.0, 0.0), Complex(0.0, 1.0)};
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const TrigPoly f = random_real_poly(1 + static_cast<int>(seed % 3), 4, seed, true);
        const TrigPoly pair[] = {f, conjugate_H(f)};
        const TrigPoly g = linear_combine(combo, pair);
        CHECK(is_analytic(g));
        CHECK(is_analytic(multiply(g, g)));
    }
}

TEST_CASE("half-space is closed under addition on supports") {
    Rng rng(404);
    for (int trial = 0; trial < 200; ++trial) {
        FreqVector a(3), b(3);
        for (int j = 0; j < 3; ++j) {
            a[static_cast<std::size_t>(j)] = static_cast<int>(rng.next_u64() % 9) - 4;
            b[static_cast<std::size_t>(j)] = static_cast<int>(rng.next_u64() % 9) - 4;
        }
        if (!in_half_space(a) || !in_half_space(b)) continue;
        FreqVector s(3);
        for (int j = 0; j < 3; ++j) s[static_cast<std::size_t>(j)] = a[static_cast<std::size_t>(j)] + b[static_cast<std::size_t>(j)];
        CHECK(in_half_space(s));
    }
}

TEST_CASE("grid sampling matches pointwise evaluation") {
    const TrigPoly p = random_real_poly(2, 2, 8080, false);
    const int res = 8;
    const GridFunction g = sample_grid(p, res);
    for (int k1 = 0; k1 < res; ++k1) {
        for (int k2 = 0; k2 < res; ++k2) {
            const PolydiskPoint z = PolydiskPoint::boundary(
                {2.0 * std::numbers::pi * k1 / res, 2.0 * std::numbers::pi * k2 / res});
            const Complex sampled =
                g.values()[static_cast<std::size_t>(k1 * res + k2)];  // last index fastest
            CHECK(std::abs(sampled - p.evaluate(z)) <= 1e-12);
        }
    }
}

TEST_CASE("maximal function of the partial sums") {
    SUBCASE("one variable reduces to the absolute value") {
        const TrigPoly f = poly_of(1, {{fv({0}), Complex(1.0, 0.0)},
                                       {fv({1}), Complex(0.5, 0.0)},
                                       {fv({-1}), Complex(0.5, 0.0)}});  // 1 + cos
        const int res = 32;
        const GridFunction d = doob_max_grid(f, res);
        const GridFunction s = sample_grid(f, res);
        for (std::size_t i = 0; i < d.values().size(); ++i) {
            CHECK(std::abs(d.values()[i].real() - std::abs(s.values()[i])) <= 1e-12);
            CHECK(d.values()[i].imag() == 0.0);
        }
    }
    SUBCASE("constants give their magnitude") {
        const TrigPoly f = poly_of(1, {{fv({0}), Complex(-2.0, 0.0)}});
        const GridFunction d = doob_max_grid(f, 8);
        for (const Complex& v : d.values()) CHECK(std::abs(v - Complex(2.0, 0.0)) <= 1e-15);
    }
    SUBCASE("two cosines unroll to a pointwise max of partial sums") {
        const TrigPoly f = cos_poly(2, 1) + cos_poly(2, 2);
        const int res = 16;
        const GridFunction d = doob_max_grid(f, res);
        const GridFunction s1 = sample_grid(cond_expect(f, 1), res);
        const GridFunction s2 = sample_grid(f, res);
        for (std::size_t i = 0; i < d.values().size(); ++i) {
            const double expected = std::max(std::abs(s1.values()[i]), std::abs(s2.values()[i]));
            CHECK(std::abs(d.values()[i].real() - expected) <= 1e-12);
        }
    }
    SUBCASE("resolution floor is enforced") {
        CHECK_THROWS_AS(doob_max_grid(cos_poly(1, 1), 7), std::invalid_argument);
        CHECK_NOTHROW(doob_max_grid(cos_poly(1, 1), 8));
    }
}

TEST_CASE("maximal conjugate function") {
    SUBCASE("cosine gives the absolute sine") {
        const int res = 64;
        const GridFunction m = maximal_conj_grid(cos_poly(1, 1), res);
        const GridFunction s = sample_grid(sin_poly(1, 1), res);
        for (std::size_t i = 0; i < m.values().size(); ++i) {
            CHECK(std::abs(m.values()[i].real() - std::abs(s.values()[i])) <= 1e-12);
        }
    }
    SUBCASE("constants vanish") {
        const TrigPoly f = poly_of(2, {{fv({0, 0}), Complex(4.0, 0.0)}});
        const GridFunction m = maximal_conj_grid(f, 8);
        for (const Complex& v : m.values()) CHECK(std::abs(v) == 0.0);
    }
    SUBCASE("two cosines unroll to conjugate partial sums") {
        const TrigPoly f = cos_poly(2, 1) + cos_poly(2, 2);
        const int res = 16;
        const GridFunction m = maximal_conj_grid(f, res);
        const GridFunction t1 = sample_grid(sin_poly(2, 1), res);
        const GridFunction t2 = sample_grid(sin_poly(2, 1) + sin_poly(2, 2), res);
        for (std::size_t i = 0; i < m.values().size(); ++i) {
            const double expected = std::max(std::abs(t1.values()[i]), std::abs(t2.values()[i]));
            CHECK(std::abs(m.values()[i].real() - expected) <= 1e-12);
        }
    }
    SUBCASE("agrees with the maximal function of the conjugate") {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const TrigPoly f = random_real_poly(2, 3, seed, true);
            const int res = min_grid_res(f);
            CHECK(grid_sup_diff(maximal_conj_grid(f, res),
                                doob_max_grid(conjugate_H(f), res)) <= 1e-10);
        }
    }
}

TEST_CASE("square function of the conjugated differences") {
    SUBCASE("single cosine") {
        const int res = 32;
        const GridFunction s = square_fn_grid(cos_poly(1, 1), res);
        const GridFunction t = sample_grid(sin_poly(1, 1), res);
        for (std::size_t i = 0; i < s.values().size(); ++i) {
            CHECK(std::abs(s.values()[i].real() - std::abs(t.values()[i])) <= 1e-12);
        }
    }
    SUBCASE("constant vanishes") {
        const TrigPoly f = poly_of(1, {{fv({0}), Complex(3.0, 0.0)}});
        const GridFunction s = square_fn_grid(f, 8);
        for (const Complex& v : s.values()) CHECK(std::abs(v) == 0.0);
    }
    SUBCASE("two cosines give a root sum of squares") {
        const TrigPoly f = cos_poly(2, 1) + cos_poly(2, 2);
        const int res = 16;
        const GridFunction s = square_fn_grid(f, res);
        const GridFunction t1 = sample_grid(sin_poly(2, 1), res);
        const GridFunction t2 = sample_grid(sin_poly(2, 2), res);
        for (std::size_t i = 0; i < s.values().size(); ++i) {
            const double expected = std::hypot(std::abs(t1.values()[i]), std::abs(t2.values()[i]));
            CHECK(std::abs(s.values()[i].real() - expected) <= 1e-12);
        }
    }
}
