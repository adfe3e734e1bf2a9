#include "torusmax/trig_poly.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "torusmax/rng.hpp"

namespace torusmax {

namespace {

constexpr double kDropThreshold = 1e-12;

Complex int_pow(Complex z, int e) {
    Complex acc(1.0, 0.0);
    for (int i = 0; i < e; ++i) acc *= z;
    return acc;
}

FreqVector negated(const FreqVector& m) {
    FreqVector r(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) r[i] = -m[i];
    return r;
}

} // namespace

Complex harmonic_factor(Complex z, int m) {
    if (m == 0) return {1.0, 0.0};
    if (m > 0) return int_pow(z, m);
    return int_pow(std::conj(z), -m);
}

PolydiskPoint::PolydiskPoint(std::vector<Complex> coords) : coords_(std::move(coords)) {
    for (std::size_t i = 0; i < coords_.size(); ++i) {
        if (std::abs(coords_[i]) > 1.0 + 1e-12) {
            throw std::invalid_argument("PolydiskPoint: coordinate " + std::to_string(i) +
                                        " has modulus > 1");
        }
    }
}

PolydiskPoint PolydiskPoint::boundary(const std::vector<double>& angles) {
    std::vector<Complex> c;
    c.reserve(angles.size());
    for (double a : angles) c.push_back(std::polar(1.0, a));
    return PolydiskPoint(std::move(c));
}

TrigPoly::TrigPoly(int dim) : dim_(dim) {
    if (dim < 1) throw std::invalid_argument("TrigPoly: dimension must be positive");
}

TrigPoly TrigPoly::from_terms(int dim, const std::vector<std::pair<FreqVector, Complex>>& terms) {
    TrigPoly p(dim);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const auto& [freq, coeff] = terms[i];
        if (static_cast<int>(freq.size()) != dim) {
            throw std::invalid_argument("TrigPoly::from_terms: term " + std::to_string(i) +
                                        " has frequency length " + std::to_string(freq.size()) +
                                        " != dim " + std::to_string(dim));
        }
        p.terms_[freq] += coeff;
    }
    for (auto it = p.terms_.begin(); it != p.terms_.end();) {
        if (std::abs(it->second) <= kDropThreshold) {
            it = p.terms_.erase(it);
        } else {
            ++it;
        }
    }
    return p;
}

TrigPoly TrigPoly::from_map(int dim, TermMap terms) {
    TrigPoly p(dim);
    for (const auto& [freq, coeff] : terms) {
        if (static_cast<int>(freq.size()) != dim) {
            throw std::invalid_argument("TrigPoly::from_map: frequency length mismatch");
        }
    }
    p.terms_ = std::move(terms);
    for (auto it = p.terms_.begin(); it != p.terms_.end();) {
        if (it->second == Complex(0.0, 0.0)) {
            it = p.terms_.erase(it);
        } else {
            ++it;
        }
    }
    return p;
}

int TrigPoly::max_degree() const {
    int deg = 0;
    for (const auto& [freq, coeff] : terms_) {
        (void)coeff;
        for (int m : freq) deg = std::max(deg, std::abs(m));
    }
    return deg;
}

Complex TrigPoly::coefficient(const FreqVector& freq) const {
    auto it = terms_.find(freq);
    return it == terms_.end() ? Complex(0.0, 0.0) : it->second;
}

bool TrigPoly::is_real() const {
    for (const auto& [freq, coeff] : terms_) {
        const Complex mirror = coefficient(negated(freq));
        if (std::abs(mirror - std::conj(coeff)) > kDropThreshold * (1.0 + std::abs(coeff))) {
            return false;
        }
    }
    return true;
}

Complex TrigPoly::evaluate(const PolydiskPoint& z) const {
    if (z.dim() != dim_) {
        throw std::invalid_argument("TrigPoly::evaluate: point dimension " +
                                    std::to_string(z.dim()) + " != dim " + std::to_string(dim_));
    }
    Complex total(0.0, 0.0);
    for (const auto& [freq, coeff] : terms_) {
        Complex factor(1.0, 0.0);
        for (int j = 0; j < dim_; ++j) factor *= harmonic_factor(z[j], freq[j]);
        total += coeff * factor;
    }
    return total;
}

double TrigPoly::coeff_l1() const {
    double mass = 0.0;
    for (const auto& [freq, coeff] : terms_) {
        (void)freq;
        mass += std::abs(coeff);
    }
    return mass;
}

double TrigPoly::coeff_l2() const {
    double sq = 0.0;
    for (const auto& [freq, coeff] : terms_) {
        (void)freq;
        sq += std::norm(coeff);
    }
    return std::sqrt(sq);
}

TrigPoly TrigPoly::operator+(const TrigPoly& other) const {
    const Complex ones[] = {Complex(1.0, 0.0), Complex(1.0, 0.0)};
    const TrigPoly polys[] = {*this, other};
    return linear_combine(ones, polys);
}

TrigPoly TrigPoly::operator-(const TrigPoly& other) const {
    const Complex cs[] = {Complex(1.0, 0.0), Complex(-1.0, 0.0)};
    const TrigPoly polys[] = {*this, other};
    return linear_combine(cs, polys);
}

TrigPoly multiply(const TrigPoly& p, const TrigPoly& q) {
    if (p.dim() != q.dim()) {
        throw std::invalid_argument("multiply: dimension mismatch " + std::to_string(p.dim()) +
                                    " vs " + std::to_string(q.dim()));
    }
    TrigPoly::TermMap out;
    FreqVector key(static_cast<std::size_t>(p.dim()));
    for (const auto& [ma, ca] : p.terms()) {
        for (const auto& [mb, cb] : q.terms()) {
            for (int j = 0; j < p.dim(); ++j) key[static_cast<std::size_t>(j)] = ma[j] + mb[j];
            out[key] += ca * cb;
        }
    }
    return TrigPoly::from_map(p.dim(), std::move(out));
}

TrigPoly linear_combine(std::span<const Complex> coeffs, std::span<const TrigPoly> polys) {
    if (coeffs.size() != polys.size()) {
        throw std::invalid_argument("linear_combine: " + std::to_string(coeffs.size()) +
                                    " coefficients vs " + std::to_string(polys.size()) +
                                    " polynomials");
    }
    if (polys.empty()) throw std::invalid_argument("linear_combine: empty input");
    const int dim = polys[0].dim();
    TrigPoly::TermMap out;
    for (std::size_t i = 0; i < polys.size(); ++i) {
        if (polys[i].dim() != dim) {
            throw std::invalid_argument("linear_combine: dimension mismatch at index " +
                                        std::to_string(i));
        }
        for (const auto& [freq, c] : polys[i].terms()) out[freq] += coeffs[i] * c;
    }
    return TrigPoly::from_map(dim, std::move(out));
}

TrigPoly random_real_poly(int dim, int max_degree, std::uint64_t seed, bool zero_mean) {
    if (dim < 1) throw std::invalid_argument("random_real_poly: dim must be positive");
    if (max_degree < 1) throw std::invalid_argument("random_real_poly: max_degree must be positive");

    for (std::uint64_t attempt = 0;; ++attempt) {
        Rng rng(mix_seed(seed, 0x706F6C79ULL, attempt));
        const int lo = 2 * dim;
        const int span = 2 * dim + 1;
        const int n_support = lo + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(span));

        TrigPoly::TermMap sym;
        FreqVector freq(static_cast<std::size_t>(dim));
        const int side = 2 * max_degree + 1;
        for (int i = 0; i < n_support; ++i) {
            for (int j = 0; j < dim; ++j) {
                freq[static_cast<std::size_t>(j)] =
                    static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(side)) - max_degree;
            }
            const Complex a(rng.uniform_signed(), rng.uniform_signed());
            sym[freq] += 0.5 * a;
            sym[negated(freq)] += 0.5 * std::conj(a);
        }
        if (zero_mean) sym.erase(FreqVector(static_cast<std::size_t>(dim), 0));

        std::vector<std::pair<FreqVector, Complex>> terms(sym.begin(), sym.end());
        TrigPoly p = TrigPoly::from_terms(dim, terms);
        if (!p.is_zero()) return p;
    }
}

void write_coeff_text(const TrigPoly& p, std::ostream& out) {
    out << "dim " << p.dim() << "\n";
    char buf[64];
    for (const auto& [freq, coeff] : p.terms()) {
        for (int m : freq) out << m << ' ';
        std::snprintf(buf, sizeof buf, "%.17g %.17g", coeff.real(), coeff.imag());
        out << buf << "\n";
    }
}

TrigPoly read_coeff_text(std::istream& in) {
    std::string tag;
    int dim = 0;
    if (!(in >> tag >> dim) || tag != "dim" || dim < 1) {
        throw std::invalid_argument("read_coeff_text: expected header line 'dim N'");
    }
    std::vector<std::pair<FreqVector, Complex>> terms;
    for (;;) {
        FreqVector freq(static_cast<std::size_t>(dim));
        if (!(in >> freq[0])) break;
        for (int j = 1; j < dim; ++j) {
            if (!(in >> freq[static_cast<std::size_t>(j)])) {
                throw std::invalid_argument("read_coeff_text: truncated frequency vector");
            }
        }
        double re = 0.0, im = 0.0;
        if (!(in >> re >> im)) throw std::invalid_argument("read_coeff_text: truncated coefficient");
        terms.emplace_back(std::move(freq), Complex(re, im));
    }
    return TrigPoly::from_terms(dim, terms);
}

} // namespace torusmax
