#include "torusmax/weak_norm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <stdexcept>

#include "torusmax/operators.hpp"
#include "torusmax/rng.hpp"

namespace torusmax {

namespace {

// LSD radix sort (ascending) for nonnegative doubles: the IEEE bit pattern of
// a nonnegative double orders like an unsigned integer.  Four 16-bit passes.
void sort_nonneg(std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < (1u << 16)) {
        std::sort(values.begin(), values.end());
        return;
    }
    std::vector<std::uint64_t> keys(n);
    std::vector<std::uint64_t> scratch(n);
    for (std::size_t i = 0; i < n; ++i) keys[i] = std::bit_cast<std::uint64_t>(values[i]);
    std::vector<std::size_t> count(1u << 16);
    for (int pass = 0; pass < 4; ++pass) {
        const int shift = 16 * pass;
        std::fill(count.begin(), count.end(), 0);
        for (std::size_t i = 0; i < n; ++i) ++count[(keys[i] >> shift) & 0xFFFF];
        std::size_t running = 0;
        for (std::size_t b = 0; b < count.size(); ++b) {
            const std::size_t c = count[b];
            count[b] = running;
            running += c;
        }
        for (std::size_t i = 0; i < n; ++i) {
            scratch[count[(keys[i] >> shift) & 0xFFFF]++] = keys[i];
        }
        keys.swap(scratch);
    }
    for (std::size_t i = 0; i < n; ++i) values[i] = std::bit_cast<double>(keys[i]);
}

} // namespace

double distribution(const GridFunction& g, double y) {
    if (!(y > 0.0)) throw std::invalid_argument("distribution: level must be positive");
    const double ysq = y * y;
    std::size_t count = 0;
    for (const Complex& v : g.values()) {
        if (std::norm(v) > ysq) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(g.values().size());
}

double norm(const GridFunction& g, int p) {
    if (p != 1 && p != 2) throw std::invalid_argument("norm: exponent must be 1 or 2");
    KahanSum sum;
    if (p == 1) {
        for (const Complex& v : g.values()) sum.add(std::sqrt(std::norm(v)));
    } else {
        for (const Complex& v : g.values()) sum.add(std::norm(v));
    }
    const double mean = sum.value() / static_cast<double>(g.values().size());
    return p == 1 ? mean : std::sqrt(mean);
}

WeakNormDetail weak_l1_detail(std::vector<double> magnitudes) {
    WeakNormDetail best;
    if (magnitudes.empty()) return best;
    sort_nonneg(magnitudes);
    const std::size_t n = magnitudes.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double v = magnitudes[i];
        if (v <= 0.0) continue;
        if (i > 0 && magnitudes[i - 1] == v) continue;
        const double frac = static_cast<double>(n - i) / static_cast<double>(n);
        const double cand = v * frac;
        if (cand > best.value) {
            best.value = cand;
            best.level = v;
            best.fraction = frac;
        }
    }
    best.std_error =
        best.level * std::sqrt(best.fraction * (1.0 - best.fraction) / static_cast<double>(n));
    return best;
}

double weak_l1_of_samples(std::vector<double> magnitudes) {
    return weak_l1_detail(std::move(magnitudes)).value;
}

double weak_l1(const GridFunction& g) { return weak_l1_of_samples(g.magnitudes()); }

WeakRatioRecord weak_type_ratio(const TrigPoly& p, int res) {
    if (p.is_zero()) throw std::invalid_argument("weak_type_ratio: zero polynomial");
    if (!p.is_real()) throw std::invalid_argument("weak_type_ratio: polynomial is not real-valued");

    WeakRatioRecord rec;
    rec.dim = p.dim();
    rec.res = res;
    rec.weak_l1_of_M = weak_l1(maximal_conj_grid(p, res));
    rec.l1 = norm(sample_grid(p, res), 1);
    rec.ratio = rec.l1 > 0.0 ? rec.weak_l1_of_M / rec.l1 : 0.0;
    return rec;
}

} // namespace torusmax
