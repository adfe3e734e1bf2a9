#include "torusmax/oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace torusmax {
namespace oracle {

namespace {

using LongComplex = std::complex<long double>;

std::size_t axis_stride(int dim, int res, int axis) {
    std::size_t s = 1;
    for (int a = dim - 1; a > axis; --a) s *= static_cast<std::size_t>(res);
    return s;
}

// Applies fn(base, stride) to every line running along `axis`.
template <class Fn>
void for_each_line(int dim, int res, int axis, Fn&& fn) {
    const std::size_t stride = axis_stride(dim, res, axis);
    std::size_t lines = 1;
    for (int a = 0; a < dim; ++a) {
        if (a != axis) lines *= static_cast<std::size_t>(res);
    }
    for (std::size_t line = 0; line < lines; ++line) {
        const std::size_t outer = line / stride;
        const std::size_t inner = line % stride;
        fn(outer * stride * static_cast<std::size_t>(res) + inner, stride);
    }
}

void check_axis(const GridFunction& g, int j, const char* what) {
    if (j < 1 || j > g.dim()) {
        throw std::invalid_argument(std::string(what) + ": axis " + std::to_string(j) +
                                    " outside [1, " + std::to_string(g.dim()) + "]");
    }
}

} // namespace

TrigPoly dft_coeffs(const GridFunction& g, int max_degree) {
    if (max_degree < 1) throw std::invalid_argument("dft_coeffs: max_degree must be positive");
    const int res = g.res();
    if (res < 2 * max_degree + 2) {
        throw std::invalid_argument("dft_coeffs: resolution " + std::to_string(res) +
                                    " below aliasing floor " + std::to_string(2 * max_degree + 2));
    }
    const int dim = g.dim();
    const int side = 2 * max_degree + 1;
    const std::size_t total = g.values().size();

    // Twiddle table e^{-2*pi*i*m*k/res}, shared by all axes.
    std::vector<LongComplex> twiddle(static_cast<std::size_t>(side) * res);
    const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    for (int mi = 0; mi < side; ++mi) {
        const int m = mi - max_degree;
        for (int k = 0; k < res; ++k) {
            const long double a = -two_pi * m * k / res;
            twiddle[static_cast<std::size_t>(mi) * res + k] = {std::cos(a), std::sin(a)};
        }
    }

    // Per-point digits along every axis, decoded by division.
    std::vector<int> digits(total * static_cast<std::size_t>(dim));
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t rest = i;
        for (int a = dim - 1; a >= 0; --a) {
            digits[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(a)] =
                static_cast<int>(rest % static_cast<std::size_t>(res));
            rest /= static_cast<std::size_t>(res);
        }
    }

    std::vector<std::pair<FreqVector, Complex>> found;
    FreqVector m(static_cast<std::size_t>(dim), -max_degree);
    for (;;) {
        LongComplex acc(0.0L, 0.0L);
        for (std::size_t i = 0; i < total; ++i) {
            LongComplex w(1.0L, 0.0L);
            for (int a = 0; a < dim; ++a) {
                const int mi = m[static_cast<std::size_t>(a)] + max_degree;
                const int k = digits[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(a)];
                w *= twiddle[static_cast<std::size_t>(mi) * res + k];
            }
            const Complex v = g.values()[i];
            acc += LongComplex(v.real(), v.imag()) * w;
        }
        acc /= static_cast<long double>(total);
        found.emplace_back(m, Complex(static_cast<double>(acc.real()),
                                      static_cast<double>(acc.imag())));
        int a = dim - 1;
        while (a >= 0 && m[static_cast<std::size_t>(a)] == max_degree) {
            m[static_cast<std::size_t>(a)] = -max_degree;
            --a;
        }
        if (a < 0) break;
        ++m[static_cast<std::size_t>(a)];
    }
    return TrigPoly::from_terms(dim, found);
}

GridFunction conjugate_via_dft(const GridFunction& g, int j) {
    check_axis(g, j, "conjugate_via_dft");
    const int res = g.res();

    // Dense multiplier kernel: K[d] = (1/res) sum_bin mult(bin) e^{2*pi*i*bin*d/res},
    // with mult = -i*sgn of the signed frequency the bin represents.
    std::vector<LongComplex> kernel(static_cast<std::size_t>(res));
    const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    for (int d = 0; d < res; ++d) {
        LongComplex sum(0.0L, 0.0L);
        for (int bin = 0; bin < res; ++bin) {
            const int m = bin <= res / 2 ? bin : bin - res;
            if (m == 0) continue;
            const LongComplex mult = m > 0 ? LongComplex(0.0L, -1.0L) : LongComplex(0.0L, 1.0L);
            const long double a = two_pi * bin * d / res;
            sum += mult * LongComplex(std::cos(a), std::sin(a));
        }
        kernel[static_cast<std::size_t>(d)] = sum / static_cast<long double>(res);
    }

    const std::vector<Complex>& in = g.values();
    std::vector<Complex> out(in.size());
    for_each_line(g.dim(), res, j - 1, [&](std::size_t base, std::size_t stl) {
        for (int x = 0; x < res; ++x) {
            LongComplex acc(0.0L, 0.0L);
            for (int y = 0; y < res; ++y) {
                const Complex v = in[base + static_cast<std::size_t>(y) * stl];
                acc += LongComplex(v.real(), v.imag()) *
                       kernel[static_cast<std::size_t>((x - y + res) % res)];
            }
            out[base + static_cast<std::size_t>(x) * stl] =
                Complex(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
        }
    });
    return GridFunction(g.dim(), res, std::move(out));
}

GridFunction cond_expect_via_avg(const GridFunction& g, int n) {
    if (n < 0 || n > g.dim()) {
        throw std::invalid_argument("cond_expect_via_avg: index " + std::to_string(n) +
                                    " outside [0, " + std::to_string(g.dim()) + "]");
    }
    const int res = g.res();
    std::vector<Complex> out = g.values();
    for (int axis = n; axis < g.dim(); ++axis) {
        for_each_line(g.dim(), res, axis, [&](std::size_t base, std::size_t stl) {
            LongComplex acc(0.0L, 0.0L);
            for (int y = 0; y < res; ++y) {
                const Complex v = out[base + static_cast<std::size_t>(y) * stl];
                acc += LongComplex(v.real(), v.imag());
            }
            acc /= static_cast<long double>(res);
            const Complex mean(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
            for (int y = 0; y < res; ++y) {
                out[base + static_cast<std::size_t>(y) * stl] = mean;
            }
        });
    }
    return GridFunction(g.dim(), res, std::move(out));
}

GridFunction conjugate_H_via_dft(const GridFunction& g) {
    const std::size_t total = g.values().size();
    std::vector<Complex> acc(total, Complex(0.0, 0.0));
    GridFunction prev = cond_expect_via_avg(g, 0);
    for (int j = 1; j <= g.dim(); ++j) {
        GridFunction cur = cond_expect_via_avg(g, j);
        std::vector<Complex> diff(total);
        for (std::size_t i = 0; i < total; ++i) diff[i] = cur.values()[i] - prev.values()[i];
        const GridFunction conj =
            conjugate_via_dft(GridFunction(g.dim(), g.res(), std::move(diff)), j);
        for (std::size_t i = 0; i < total; ++i) acc[i] += conj.values()[i];
        prev = std::move(cur);
    }
    return GridFunction(g.dim(), g.res(), std::move(acc));
}

} // namespace oracle
} // namespace torusmax
