#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace torusmax {

using Complex = std::complex<double>;

// Frequency vector in Z^N; component i is the frequency of the (i+1)-th
// torus coordinate. Lexicographic vector order gives deterministic term
// iteration everywhere.
using FreqVector = std::vector<int>;

// chi(z, m): z^m for m >= 0, conj(z)^{|m|} for m < 0, with chi(z, 0) == 1
// (also at z == 0). On |z| = 1 this is ordinary character evaluation; for
// |z| < 1 it supplies the factor |z|^{|m|} e^{i m arg z} of the
// coordinatewise-harmonic extension.
Complex harmonic_factor(Complex z, int m);

// Point of the closed unit polydisk in C^N.
class PolydiskPoint {
public:
    explicit PolydiskPoint(std::vector<Complex> coords);

    // Boundary point (e^{i a_1}, ..., e^{i a_N}).
    static PolydiskPoint boundary(const std::vector<double>& angles);

    int dim() const { return static_cast<int>(coords_.size()); }
    const std::vector<Complex>& coords() const { return coords_; }
    Complex operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }

private:
    std::vector<Complex> coords_;
};

// Sparse trigonometric polynomial on T^N: a finite map from frequency
// vectors to complex coefficients. Canonical form stores no exact-zero
// coefficient and every key has length dim().
class TrigPoly {
public:
    using TermMap = std::map<FreqVector, Complex>;

    // Zero polynomial in the given dimension.
    explicit TrigPoly(int dim);

    // Public constructor from a term list: duplicate frequencies are summed
    // and coefficients of magnitude <= 1e-12 are dropped. Rejects frequency
    // vectors whose length differs from dim, naming the offending index.
    static TrigPoly from_terms(int dim, const std::vector<std::pair<FreqVector, Complex>>& terms);

    // Internal canonical constructor: drops exact zeros only, applies no
    // magnitude threshold. Coefficient transforms use this so they stay
    // bit-exact on stored doubles.
    static TrigPoly from_map(int dim, TermMap terms);

    int dim() const { return dim_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    // Largest |m_j| over all stored frequencies (0 for the zero polynomial).
    int max_degree() const;

    Complex coefficient(const FreqVector& freq) const;

    // a_{-m} == conj(a_m) for every stored frequency, up to 1e-12 slack on
    // the stored doubles.
    bool is_real() const;

    // Value at a polydisk point: sum of a_m * prod_j chi(z_j, m_j). On the
    // boundary this is pointwise evaluation; inside it is the
    // coordinatewise-harmonic extension.
    Complex evaluate(const PolydiskPoint& z) const;

    // Coefficient mass sum |a_m| and coefficient l2 norm.
    double coeff_l1() const;
    double coeff_l2() const;

    TrigPoly operator+(const TrigPoly& other) const;
    TrigPoly operator-(const TrigPoly& other) const;

private:
    int dim_;
    TermMap terms_;
};

// Exact sparse coefficient convolution. Boundary evaluation of the product
// equals the product of boundary evaluations.
TrigPoly multiply(const TrigPoly& p, const TrigPoly& q);

// Exact coefficientwise linear combination sum_i coeffs[i] * polys[i].
TrigPoly linear_combine(std::span<const Complex> coeffs, std::span<const TrigPoly> polys);

// Deterministic random real-valued polynomial: a sparse support of at most
// 4*dim frequencies with |m_j| <= max_degree, coefficients drawn with real
// and imaginary parts uniform in [-1, 1), then symmetrized so that
// a_{-m} = conj(a_m). With zero_mean the coefficient at 0 is removed. The
// result is never the zero polynomial and depends only on the arguments.
TrigPoly random_real_poly(int dim, int max_degree, std::uint64_t seed, bool zero_mean);

// Coefficient text format: header line "dim N", then one term per line
// "m_1 ... m_N re im" in lexicographic frequency order.
void write_coeff_text(const TrigPoly& p, std::ostream& out);
TrigPoly read_coeff_text(std::istream& in);

} // namespace torusmax
