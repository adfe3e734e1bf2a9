#include "torusmax/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace torusmax {

namespace {

constexpr Complex kMinusI(0.0, -1.0);

int sgn(int m) { return (m > 0) - (m < 0); }

void check_index(const TrigPoly& p, int j, int lo, const char* what) {
    if (j < lo || j > p.dim()) {
        throw std::invalid_argument(std::string(what) + ": index " + std::to_string(j) +
                                    " outside [" + std::to_string(lo) + ", " +
                                    std::to_string(p.dim()) + "]");
    }
}

// The character e^{i m theta_k} on the res-point grid, as a row over k.  The
// phase is reduced mod res before the trig call, so the row is periodic in m
// and exact up to one sin/cos rounding per entry.
std::vector<Complex> character_row(int m, int res) {
    const int r = ((m % res) + res) % res;
    const double unit = 2.0 * std::numbers::pi / res;
    std::vector<Complex> row(static_cast<std::size_t>(res));
    for (int k = 0; k < res; ++k) {
        row[static_cast<std::size_t>(k)] =
            std::polar(1.0, unit * static_cast<double>((static_cast<long>(r) * k) % res));
    }
    return row;
}

// Adds coeff * exp(i<m, theta>) to inout for every term, at every point of the
// uniform grid (last coordinate index fastest).  Contracts one axis at a time,
// trailing axis first: after handling axis j the state maps each leading
// frequency prefix (m_1..m_{j-1}) to the dense sample block over axes j..N.
// The grid-sized work is therefore (number of distinct m_1 values) * res^N
// instead of the naive (number of terms) * res^N.
void accumulate_terms(int dim, int res, const TrigPoly::TermMap& terms,
                      std::vector<Complex>& inout) {
    if (terms.empty()) return;

    // Axis N: prefix (m_1..m_{N-1}) -> row over the last axis.
    std::map<FreqVector, std::vector<Complex>> state;
    {
        std::map<int, std::vector<Complex>> rows;
        for (const auto& [freq, coeff] : terms) {
            const int m = freq[static_cast<std::size_t>(dim - 1)];
            auto row = rows.find(m);
            if (row == rows.end()) row = rows.emplace(m, character_row(m, res)).first;
            const FreqVector prefix(freq.begin(), freq.end() - 1);
            auto slot = state.find(prefix);
            if (slot == state.end()) {
                slot = state
                           .emplace(prefix,
                                    std::vector<Complex>(static_cast<std::size_t>(res),
                                                         Complex(0.0, 0.0)))
                           .first;
            }
            for (int k = 0; k < res; ++k) {
                slot->second[static_cast<std::size_t>(k)] +=
                    coeff * row->second[static_cast<std::size_t>(k)];
            }
        }
    }

    // Axes N-1 .. 2: peel the trailing prefix entry, expanding each block by
    // one sampled axis.
    for (int axis = dim - 1; axis >= 2; --axis) {
        std::map<FreqVector, std::vector<Complex>> next;
        std::map<int, std::vector<Complex>> rows;
        for (auto& [prefix, block] : state) {
            const int m = prefix.back();
            auto row = rows.find(m);
            if (row == rows.end()) row = rows.emplace(m, character_row(m, res)).first;
            const FreqVector head(prefix.begin(), prefix.end() - 1);
            const std::size_t b = block.size();
            auto slot = next.find(head);
            if (slot == next.end()) {
                slot = next.emplace(head, std::vector<Complex>(b * static_cast<std::size_t>(res),
                                                               Complex(0.0, 0.0)))
                           .first;
            }
            for (int k = 0; k < res; ++k) {
                const Complex w = row->second[static_cast<std::size_t>(k)];
                Complex* out = slot->second.data() + static_cast<std::size_t>(k) * b;
                for (std::size_t i = 0; i < b; ++i) out[i] += w * block[i];
            }
        }
        state = std::move(next);
    }

    if (dim == 1) {
        // The axis-N pass above already produced the full grid.
        const std::vector<Complex>& block = state.begin()->second;
        for (std::size_t i = 0; i < block.size(); ++i) inout[i] += block[i];
        return;
    }

    // Axis 1 writes straight into the caller's grid, so no full-size
    // intermediate is ever allocated.
    std::map<int, std::vector<Complex>> rows;
    for (const auto& [prefix, block] : state) {
        const int m = prefix.front();
        auto row = rows.find(m);
        if (row == rows.end()) row = rows.emplace(m, character_row(m, res)).first;
        const std::size_t b = block.size();
        for (int k = 0; k < res; ++k) {
            const Complex w = row->second[static_cast<std::size_t>(k)];
            Complex* out = inout.data() + static_cast<std::size_t>(k) * b;
            for (std::size_t i = 0; i < b; ++i) out[i] += w * block[i];
        }
    }
}

// Splits the term map into the per-difference maps d_0..d_N.
std::vector<TrigPoly::TermMap> split_differences(const TrigPoly& p) {
    std::vector<TrigPoly::TermMap> parts(static_cast<std::size_t>(p.dim()) + 1);
    for (const auto& [freq, coeff] : p.terms()) {
        parts[static_cast<std::size_t>(diff_index(freq))].emplace(freq, coeff);
    }
    return parts;
}

TrigPoly::TermMap conjugate_terms(const TrigPoly::TermMap& terms, int j) {
    TrigPoly::TermMap out;
    for (const auto& [freq, coeff] : terms) {
        const int s = sgn(freq[static_cast<std::size_t>(j - 1)]);
        if (s != 0) out.emplace(freq, kMinusI * static_cast<double>(s) * coeff);
    }
    return out;
}

void check_grid_res(const TrigPoly& p, int res, const char* what) {
    const int floor = 4 * (p.max_degree() + 1);
    if (res < floor) {
        throw std::invalid_argument(std::string(what) + ": resolution " + std::to_string(res) +
                                    " below floor " + std::to_string(floor) +
                                    " = 4*(max_degree+1)");
    }
}

void max_abs_sq_into(const std::vector<Complex>& cur, std::vector<double>& best) {
    for (std::size_t i = 0; i < cur.size(); ++i) {
        best[i] = std::max(best[i], std::norm(cur[i]));
    }
}

std::vector<double> finish_sqrt(std::vector<double> sq) {
    for (double& v : sq) v = std::sqrt(v);
    return sq;
}

} // namespace

int diff_index(const FreqVector& freq) {
    for (int j = static_cast<int>(freq.size()); j > 0; --j) {
        if (freq[static_cast<std::size_t>(j - 1)] != 0) return j;
    }
    return 0;
}

TrigPoly cond_expect(const TrigPoly& p, int n) {
    check_index(p, n, 0, "cond_expect");
    TrigPoly::TermMap kept;
    for (const auto& [freq, coeff] : p.terms()) {
        if (diff_index(freq) <= n) kept.emplace(freq, coeff);
    }
    return TrigPoly::from_map(p.dim(), std::move(kept));
}

TrigPoly mart_diff(const TrigPoly& p, int j) {
    check_index(p, j, 0, "mart_diff");
    TrigPoly::TermMap kept;
    for (const auto& [freq, coeff] : p.terms()) {
        if (diff_index(freq) == j) kept.emplace(freq, coeff);
    }
    return TrigPoly::from_map(p.dim(), std::move(kept));
}

std::vector<TrigPoly> mart_diff_all(const TrigPoly& p) {
    auto parts = split_differences(p);
    std::vector<TrigPoly> out;
    out.reserve(parts.size());
    for (auto& part : parts) out.push_back(TrigPoly::from_map(p.dim(), std::move(part)));
    return out;
}

TrigPoly conjugate_j(const TrigPoly& p, int j) {
    check_index(p, j, 1, "conjugate_j");
    return TrigPoly::from_map(p.dim(), conjugate_terms(p.terms(), j));
}

TrigPoly conjugate_H(const TrigPoly& p) {
    // Sum over j of H_j applied to d_j: each term is multiplied by
    // -i*sgn(its last nonzero component) and the mean term drops.
    TrigPoly::TermMap out;
    for (const auto& [freq, coeff] : p.terms()) {
        const int j = diff_index(freq);
        if (j == 0) continue;
        const int s = sgn(freq[static_cast<std::size_t>(j - 1)]);
        out.emplace(freq, kMinusI * static_cast<double>(s) * coeff);
    }
    return TrigPoly::from_map(p.dim(), std::move(out));
}

bool in_half_space(const FreqVector& freq) {
    const int j = diff_index(freq);
    return j == 0 || freq[static_cast<std::size_t>(j - 1)] > 0;
}

bool is_analytic(const TrigPoly& p) {
    for (const auto& [freq, coeff] : p.terms()) {
        (void)coeff;
        if (!in_half_space(freq)) return false;
    }
    return true;
}

GridFunction sample_grid(const TrigPoly& p, int res) {
    if (res < 1) throw std::invalid_argument("sample_grid: resolution must be positive");
    std::vector<Complex> values(GridFunction::point_count(p.dim(), res));
    accumulate_terms(p.dim(), res, p.terms(), values);
    return GridFunction(p.dim(), res, std::move(values));
}

GridFunction doob_max_grid(const TrigPoly& p, int res) {
    check_grid_res(p, res, "doob_max_grid");
    const auto parts = split_differences(p);
    const std::size_t total = GridFunction::point_count(p.dim(), res);

    // Running partial sum through d_n; the mean term is the n = 0 state and
    // rides inside every later partial sum, but is not itself a competitor.
    Complex mean(0.0, 0.0);
    if (!parts[0].empty()) mean = parts[0].begin()->second;
    std::vector<Complex> cur(total, mean);
    std::vector<double> best(total, 0.0);
    for (int n = 1; n <= p.dim(); ++n) {
        accumulate_terms(p.dim(), res, parts[static_cast<std::size_t>(n)], cur);
        max_abs_sq_into(cur, best);
    }
    cur.clear();
    cur.shrink_to_fit();
    auto mags = finish_sqrt(std::move(best));
    return GridFunction(p.dim(), res, std::vector<Complex>(mags.begin(), mags.end()));
}

GridFunction maximal_conj_grid(const TrigPoly& p, int res) {
    check_grid_res(p, res, "maximal_conj_grid");
    const auto parts = split_differences(p);
    const std::size_t total = GridFunction::point_count(p.dim(), res);

    std::vector<Complex> cur(total, Complex(0.0, 0.0));
    std::vector<double> best(total, 0.0);
    for (int n = 1; n <= p.dim(); ++n) {
        accumulate_terms(p.dim(), res, conjugate_terms(parts[static_cast<std::size_t>(n)], n), cur);
        max_abs_sq_into(cur, best);
    }
    cur.clear();
    cur.shrink_to_fit();
    auto mags = finish_sqrt(std::move(best));
    return GridFunction(p.dim(), res, std::vector<Complex>(mags.begin(), mags.end()));
}

GridFunction square_fn_grid(const TrigPoly& p, int res) {
    check_grid_res(p, res, "square_fn_grid");
    const auto parts = split_differences(p);
    const std::size_t total = GridFunction::point_count(p.dim(), res);

    std::vector<Complex> cur(total);
    std::vector<double> acc(total, 0.0);
    for (int n = 1; n <= p.dim(); ++n) {
        const auto conj_part = conjugate_terms(parts[static_cast<std::size_t>(n)], n);
        if (conj_part.empty()) continue;
        std::fill(cur.begin(), cur.end(), Complex(0.0, 0.0));
        accumulate_terms(p.dim(), res, conj_part, cur);
        for (std::size_t i = 0; i < total; ++i) acc[i] += std::norm(cur[i]);
    }
    cur.clear();
    cur.shrink_to_fit();
    auto mags = finish_sqrt(std::move(acc));
    return GridFunction(p.dim(), res, std::vector<Complex>(mags.begin(), mags.end()));
}

int min_grid_res(const TrigPoly& p) { return 4 * (p.max_degree() + 1); }

} // namespace torusmax
