#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "torusmax/trig_poly.hpp"

namespace torusmax {

// Thrown when a walk fails to leave the unit disk before the time cap.
struct CapHitError : std::runtime_error {
    explicit CapHitError(const std::string& what) : std::runtime_error(what) {}
};

// Index into the semi-continuous time structure: block n in 1..N runs its own
// continuous clock; indices order lexicographically and infinity is maximal.
class TimeIndex {
public:
    static TimeIndex at(int block, double time);
    static TimeIndex infinity();

    bool is_infinite() const { return inf_; }
    int block() const;
    double time() const;
    std::string str() const;  // "n<block>t<time>" or "inf"; safe inside CSV names

    friend bool operator==(const TimeIndex& a, const TimeIndex& b);
    friend bool operator!=(const TimeIndex& a, const TimeIndex& b) { return !(a == b); }
    friend bool operator<(const TimeIndex& a, const TimeIndex& b);
    friend bool operator<=(const TimeIndex& a, const TimeIndex& b) { return a < b || a == b; }
    friend bool operator>(const TimeIndex& a, const TimeIndex& b) { return b < a; }
    friend bool operator>=(const TimeIndex& a, const TimeIndex& b) { return b <= a; }

private:
    TimeIndex() = default;
    int block_ = 1;
    double time_ = 0.0;
    bool inf_ = false;
};

// Order-preserving map of the time structure into [0, dim]: block n lands in
// [n-1, n) via t -> n-1 + t/(t+1); infinity maps to dim.
double phi(const TimeIndex& idx, int dim);

// One coordinate's complex walk, run until it leaves the unit disk.
// positions[i] sits at time i*dt except the last entry, which is the
// interpolated crossing point (projected to the circle) at time tau.
struct CoordinatePath {
    std::uint64_t seed = 0;
    double dt = 0.0;
    double tau = 0.0;
    Complex exit_point{0.0, 0.0};
    std::vector<Complex> positions;

    std::size_t size() const { return positions.size(); }
    double time_at(std::size_t i) const;
    // Largest sample index whose time is <= s (s past tau gives the exit sample).
    std::size_t index_at_or_before(double s) const;
    // The walk's value at time s: the last sample at or before min(s, tau).
    Complex position_at(double s) const { return positions[index_at_or_before(s)]; }
};

// Runs one walk from 0 with independent Gaussian increments of variance dt per
// component, stopping at the first step with |c| >= 1; the crossing segment is
// linearly interpolated and radially projected onto the circle.  Deterministic
// in (seed, dt).  Throws CapHitError if the cap is reached first.
CoordinatePath simulate_exit(std::uint64_t seed, double dt, double t_cap = 50.0);

// Values of a driven process along one tuple of coordinate walks: block n
// holds the samples of f(exit_1,...,exit_{n-1}, c_{n, t and tau}, 0,...,0).
struct ProcessTrace {
    TrigPoly poly;                           // the driving polynomial
    int dim = 0;
    std::vector<std::size_t> block_offsets;  // dim+1 offsets into the flat arrays
    std::vector<double> times;
    std::vector<Complex> values;
    Complex terminal{0.0, 0.0};
    double running_max = 0.0;

    std::size_t size() const { return values.size(); }
    TimeIndex index_at(std::size_t flat) const;
};

ProcessTrace build_trace(const TrigPoly& p, const std::vector<CoordinatePath>& paths);

// Smallest sampled index with |value| > level, or infinity.
TimeIndex first_passage(const ProcessTrace& trace, double level);

// One named scalar statistic of a path ensemble.
struct EnsembleStats {
    std::string name;
    long n_paths = 0;
    double mean = 0.0;
    double std_error = 0.0;                // sample std / sqrt(n_paths)
    std::map<std::string, double> extra;   // deterministic order for CSV
};

// Exit-law summary for a single-coordinate ensemble: mean exit time (with
// standard error) plus the Kolmogorov-Smirnov distance of the exit angles
// from the uniform law, in extra["ks_distance"].
EnsembleStats exit_law_stats(int n_paths, double dt, std::uint64_t seed);

// --- Step harness -----------------------------------------------------------

// Ensemble verification of the three inequalities chaining the grid maximal
// function to the Brownian one:
//   step1: mean |F_inf| vs the grid L1 norm of f,
//   step2: weak norm of the running max F* vs mean |F_inf|,
//   step4: grid weak norm of the maximal conjugate vs weak norm of the
//          conjugate process's running max.
struct StepReport {
    EnsembleStats step1;  // mean |F_inf|; extra: l1_grid
    EnsembleStats step2;  // weak norm of F*; extra: level, fraction, mean_abs_terminal(+_se)
    EnsembleStats step4;  // weak norm of conj F*; extra: level, fraction, grid_weak_maximal, l1_grid
    double l1_grid = 0.0;
    double grid_weak_maximal = 0.0;
};
StepReport verify_steps(const TrigPoly& f, int n_paths, double dt, int res, std::uint64_t seed);

// Same report for several polynomials of equal dimension, evaluated against a
// single shared path ensemble (the one verify_steps would draw for the seed);
// verify_steps(f, ...) equals verify_steps_batch({f}, ...) bitwise.
std::vector<StepReport> verify_steps_batch(std::span<const TrigPoly> fs, int n_paths, double dt,
                                           int res, std::uint64_t seed);

// --- Martingale increment orthogonality -------------------------------------

// A bounded test function of the walks, measurable with respect to the
// history up to a checkpoint: a product of factors drawn from
// {1, Re c_{k,s}, Im c_{k,s}, sgn Re c_{k,s}, sgn Im c_{k,s}}.
class PathFunctional {
public:
    static PathFunctional constant();
    static PathFunctional re(int coord, double time);
    static PathFunctional im(int coord, double time);
    static PathFunctional sign_re(int coord, double time);
    static PathFunctional sign_im(int coord, double time);
    PathFunctional operator*(const PathFunctional& other) const;

    // Throws unless every referenced (coord, time) is <= checkpoint and the
    // coordinate exists.
    void validate(const TimeIndex& checkpoint, int dim) const;
    double evaluate(const std::vector<CoordinatePath>& paths) const;
    std::string name() const;

private:
    enum class Kind { Re, Im, SignRe, SignIm };
    struct Factor {
        Kind kind;
        int coord;
        double time;
    };
    std::vector<Factor> factors_;  // empty product = the constant 1
};

// The standard battery of test functionals for one checkpoint.
std::vector<PathFunctional> functional_catalogue(const TimeIndex& checkpoint);

// Mean and standard error of (F_inf - F_checkpoint) * w across the ensemble;
// the real part is the headline statistic, the imaginary part rides in
// extra["imag_mean"] / extra["imag_std_error"].
EnsembleStats increment_orthogonality(const TrigPoly& f, const TimeIndex& checkpoint,
                                      const PathFunctional& functional, int n_paths, double dt,
                                      std::uint64_t seed);

// All catalogue functionals at several checkpoints over one shared ensemble;
// rows come back checkpoint-major in catalogue order, identical values to the
// one-at-a-time runs with the same seed.
std::vector<EnsembleStats> orthogonality_batch(const TrigPoly& f,
                                               const std::vector<TimeIndex>& checkpoints,
                                               int n_paths, double dt, std::uint64_t seed);

// --- Analyticity along paths -------------------------------------------------

// Streams the processes of g = f + iHf and h = g^2 along an ensemble and
// measures |h-trace - (g-trace)^2| at every sample; the identity is algebraic,
// so the deviation is pure rounding.
struct SquareCheckResult {
    double max_deviation = 0.0;
    long n_samples = 0;
    long n_exceeding = 0;  // samples beyond the given tolerance
};
SquareCheckResult analytic_square_check(const TrigPoly& f, int n_paths, double dt,
                                        std::uint64_t seed, double tolerance);

// --- Stopped increments ------------------------------------------------------

// Empirical L2 norms of the stopped increments F_nu - F_mu (base process) and
// of the conjugate process's matching increment, where mu and nu are the
// first passages of |G| = |F + i conj-process| over level_lo < level_hi; a
// passage that never happens stops at the terminal value.  The two norms
// agree in distribution; the pair of stats carries both with standard errors.
struct StoppedIncrementStats {
    EnsembleStats base;       // ||F_nu - F_mu||_2
    EnsembleStats conjugate;  // same for the conjugate process
};
StoppedIncrementStats stopped_increment_stats(const TrigPoly& f, double level_lo, double level_hi,
                                              int n_paths, double dt, std::uint64_t seed);

// --- Distributional comparison of maxima -------------------------------------

struct MaximaPair {
    double g_star = 0.0;  // running max of |G| = |F + i conj|
    double f_star = 0.0;  // running max of |F|
};
std::vector<MaximaPair> simulate_maxima(const TrigPoly& f, int n_paths, double dt,
                                        std::uint64_t seed);

// Tests the level-comparison inequality at one level: mean is the empirical
// P(G* > lambda); extra carries P(G* > beta*lambda), whether the hypothesis
// P(G* > lambda) <= alpha * P(G* > beta*lambda) held, the tail of F* at
// lambda/c for probe constants c in {1,2,4,8,16}, and the smallest probe with
// P(G* > lambda) <= c * P(F* > lambda/c) (0 when none).
EnsembleStats good_lambda_from_maxima(const std::vector<MaximaPair>& maxima, double lambda,
                                      double alpha, double beta);
EnsembleStats good_lambda_stats(const TrigPoly& f, double lambda, double alpha, double beta,
                                int n_paths, double dt, std::uint64_t seed);

} // namespace torusmax
