#include "torusmax/brownian.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <span>
#include <utility>

#include "torusmax/operators.hpp"
#include "torusmax/rng.hpp"
#include "torusmax/weak_norm.hpp"

namespace torusmax {

namespace {

double sample_se(long n, double sum, double sumsq) {
    if (n <= 1) return 0.0;
    const double mean = sum / static_cast<double>(n);
    double var = (sumsq - mean * mean * static_cast<double>(n)) / static_cast<double>(n - 1);
    if (var < 0.0) var = 0.0;
    return std::sqrt(var / static_cast<double>(n));
}

std::string format_time(double t) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", t);
    return buf;
}

void require_real_zero_mean(const TrigPoly& f, const char* what) {
    if (!f.is_real()) {
        throw std::invalid_argument(std::string(what) + ": polynomial is not real-valued");
    }
    if (f.coefficient(FreqVector(static_cast<std::size_t>(f.dim()), 0)) != Complex(0.0, 0.0)) {
        throw std::invalid_argument(std::string(what) + ": polynomial has nonzero mean");
    }
}

std::vector<CoordinatePath> simulate_tuple(int dim, std::uint64_t master, std::uint64_t k,
                                           double dt, double t_cap = 50.0) {
    std::vector<CoordinatePath> paths;
    paths.reserve(static_cast<std::size_t>(dim));
    for (int n = 1; n <= dim; ++n) {
        paths.push_back(simulate_exit(mix_seed(master, static_cast<std::uint64_t>(n), k), dt, t_cap));
    }
    return paths;
}

// --- streaming evaluation of several polynomials along one tuple ------------
//
// The value of the process at a block-n sample is
//   sum over terms with trailing zeros past n of
//     coeff * prod_{j<n} chi(exit_j, m_j) * chi(c, m_n),
// so per block the terms collapse into a few exponent groups in the running
// coordinate, and the fully exited terms collapse into a single running
// constant that telescopes across blocks.

struct StreamTables {
    int dim = 0;
    int n_polys = 0;
    std::vector<Complex> means;
    struct Term {
        FreqVector freq;
        Complex coeff;
    };
    std::vector<std::vector<std::vector<Term>>> blocks;  // [block-1][poly]
    std::vector<int> block_emax;
};

StreamTables make_tables(std::span<const TrigPoly> polys) {
    StreamTables tab;
    tab.dim = polys[0].dim();
    tab.n_polys = static_cast<int>(polys.size());
    tab.means.assign(polys.size(), Complex(0.0, 0.0));
    tab.blocks.assign(static_cast<std::size_t>(tab.dim), {});
    for (auto& per_poly : tab.blocks) per_poly.resize(polys.size());
    tab.block_emax.assign(static_cast<std::size_t>(tab.dim), 0);
    for (std::size_t q = 0; q < polys.size(); ++q) {
        for (const auto& [freq, coeff] : polys[q].terms()) {
            const int j = diff_index(freq);
            if (j == 0) {
                tab.means[q] = coeff;
                continue;
            }
            tab.blocks[static_cast<std::size_t>(j - 1)][q].push_back({freq, coeff});
            tab.block_emax[static_cast<std::size_t>(j - 1)] =
                std::max(tab.block_emax[static_cast<std::size_t>(j - 1)],
                         std::abs(freq[static_cast<std::size_t>(j - 1)]));
        }
    }
    return tab;
}

struct StreamWorkspace {
    std::vector<Complex> prefix, vals, zp, zn, exits;
    std::vector<std::vector<std::pair<int, Complex>>> pos, neg;
};

// Calls fn(block, sample index within block, pointer to n_polys values) for
// every sample of every block, in time order.
template <class Fn>
void stream_tuple(const StreamTables& tab, const std::vector<CoordinatePath>& paths,
                  StreamWorkspace& ws, Fn&& fn) {
    const int K = tab.n_polys;
    ws.prefix.assign(tab.means.begin(), tab.means.end());
    ws.vals.assign(static_cast<std::size_t>(K), Complex(0.0, 0.0));
    ws.pos.resize(static_cast<std::size_t>(K));
    ws.neg.resize(static_cast<std::size_t>(K));
    ws.exits.resize(static_cast<std::size_t>(tab.dim));
    for (int j = 0; j < tab.dim; ++j) {
        ws.exits[static_cast<std::size_t>(j)] = paths[static_cast<std::size_t>(j)].exit_point;
    }
    int emax = 0;
    for (int e : tab.block_emax) emax = std::max(emax, e);
    ws.zp.resize(static_cast<std::size_t>(emax) + 1);
    ws.zn.resize(static_cast<std::size_t>(emax) + 1);
    ws.zp[0] = ws.zn[0] = Complex(1.0, 0.0);

    const auto by_exponent = [](const std::pair<int, Complex>& a,
                                const std::pair<int, Complex>& b) { return a.first < b.first; };

    for (int n = 1; n <= tab.dim; ++n) {
        for (int q = 0; q < K; ++q) {
            auto& pos = ws.pos[static_cast<std::size_t>(q)];
            auto& neg = ws.neg[static_cast<std::size_t>(q)];
            pos.clear();
            neg.clear();
            for (const auto& term : tab.blocks[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(q)]) {
                Complex w = term.coeff;
                for (int j = 0; j + 1 < n; ++j) {
                    const int m = term.freq[static_cast<std::size_t>(j)];
                    if (m != 0) w *= harmonic_factor(ws.exits[static_cast<std::size_t>(j)], m);
                }
                const int e = term.freq[static_cast<std::size_t>(n - 1)];
                auto& side = e > 0 ? pos : neg;
                const int key = std::abs(e);
                bool merged = false;
                for (auto& [ke, kb] : side) {
                    if (ke == key) {
                        kb += w;
                        merged = true;
                        break;
                    }
                }
                if (!merged) side.emplace_back(key, w);
            }
            std::sort(pos.begin(), pos.end(), by_exponent);
            std::sort(neg.begin(), neg.end(), by_exponent);
        }

        const int bemax = tab.block_emax[static_cast<std::size_t>(n - 1)];
        const auto& positions = paths[static_cast<std::size_t>(n - 1)].positions;
        for (std::size_t i = 0; i < positions.size(); ++i) {
            const Complex c = positions[i];
            for (int e = 1; e <= bemax; ++e) {
                ws.zp[static_cast<std::size_t>(e)] = ws.zp[static_cast<std::size_t>(e - 1)] * c;
            }
            const Complex cc = std::conj(c);
            for (int e = 1; e <= bemax; ++e) {
                ws.zn[static_cast<std::size_t>(e)] = ws.zn[static_cast<std::size_t>(e - 1)] * cc;
            }
            for (int q = 0; q < K; ++q) {
                Complex acc = ws.prefix[static_cast<std::size_t>(q)];
                for (const auto& [e, b] : ws.pos[static_cast<std::size_t>(q)]) {
                    acc += b * ws.zp[static_cast<std::size_t>(e)];
                }
                for (const auto& [e, b] : ws.neg[static_cast<std::size_t>(q)]) {
                    acc += b * ws.zn[static_cast<std::size_t>(e)];
                }
                ws.vals[static_cast<std::size_t>(q)] = acc;
            }
            fn(n, i, ws.vals.data());
        }
        ws.prefix = ws.vals;
    }
}

Complex eval_at_exits(const TrigPoly& f, const std::vector<Complex>& exits) {
    Complex total(0.0, 0.0);
    for (const auto& [freq, coeff] : f.terms()) {
        Complex w = coeff;
        for (int j = 0; j < f.dim(); ++j) {
            const int m = freq[static_cast<std::size_t>(j)];
            if (m != 0) w *= harmonic_factor(exits[static_cast<std::size_t>(j)], m);
        }
        total += w;
    }
    return total;
}

Complex eval_checkpoint(const TrigPoly& f, const std::vector<CoordinatePath>& paths,
                        const TimeIndex& cp) {
    const int n = cp.block();
    const Complex c = paths[static_cast<std::size_t>(n - 1)].position_at(cp.time());
    Complex total(0.0, 0.0);
    for (const auto& [freq, coeff] : f.terms()) {
        const int idx = diff_index(freq);
        if (idx > n) continue;
        Complex w = coeff;
        for (int j = 0; j + 1 < idx; ++j) {
            const int m = freq[static_cast<std::size_t>(j)];
            if (m != 0) w *= harmonic_factor(paths[static_cast<std::size_t>(j)].exit_point, m);
        }
        if (idx >= 1) {
            const Complex z = idx == n ? c : paths[static_cast<std::size_t>(idx - 1)].exit_point;
            w *= harmonic_factor(z, freq[static_cast<std::size_t>(idx - 1)]);
        }
        total += w;
    }
    return total;
}

} // namespace

// --- TimeIndex ----------------------------------------------------------------

TimeIndex TimeIndex::at(int block, double time) {
    if (block < 1) throw std::invalid_argument("TimeIndex: block must be >= 1");
    if (!(time >= 0.0) || !std::isfinite(time)) {
        throw std::invalid_argument("TimeIndex: time must be finite and >= 0");
    }
    TimeIndex idx;
    idx.block_ = block;
    idx.time_ = time;
    return idx;
}

TimeIndex TimeIndex::infinity() {
    TimeIndex idx;
    idx.inf_ = true;
    return idx;
}

int TimeIndex::block() const {
    if (inf_) throw std::logic_error("TimeIndex: infinity has no block");
    return block_;
}

double TimeIndex::time() const {
    if (inf_) throw std::logic_error("TimeIndex: infinity has no time");
    return time_;
}

std::string TimeIndex::str() const {
    if (inf_) return "inf";
    return "n" + std::to_string(block_) + "t" + format_time(time_);
}

bool operator==(const TimeIndex& a, const TimeIndex& b) {
    if (a.inf_ || b.inf_) return a.inf_ == b.inf_;
    return a.block_ == b.block_ && a.time_ == b.time_;
}

bool operator<(const TimeIndex& a, const TimeIndex& b) {
    if (a.inf_) return false;
    if (b.inf_) return true;
    if (a.block_ != b.block_) return a.block_ < b.block_;
    return a.time_ < b.time_;
}

double phi(const TimeIndex& idx, int dim) {
    if (dim < 1) throw std::invalid_argument("phi: dimension must be positive");
    if (idx.is_infinite()) return static_cast<double>(dim);
    if (idx.block() > dim) throw std::invalid_argument("phi: block exceeds dimension");
    const double t = idx.time();
    return static_cast<double>(idx.block() - 1) + t / (t + 1.0);
}

// --- CoordinatePath -------------------------------------------------------------

double CoordinatePath::time_at(std::size_t i) const {
    if (i >= positions.size()) throw std::out_of_range("CoordinatePath: sample index");
    return i + 1 < positions.size() ? static_cast<double>(i) * dt : tau;
}

std::size_t CoordinatePath::index_at_or_before(double s) const {
    if (!(s >= 0.0)) throw std::invalid_argument("CoordinatePath: time must be >= 0");
    if (s >= tau) return positions.size() - 1;
    std::size_t k = static_cast<std::size_t>(s / dt);
    if (k > positions.size() - 2) k = positions.size() - 2;
    return k;
}

CoordinatePath simulate_exit(std::uint64_t seed, double dt, double t_cap) {
    if (!(dt > 0.0) || dt > 1e-2) {
        throw std::invalid_argument("simulate_exit: dt must lie in (0, 1e-2]");
    }
    if (!(t_cap > 0.0)) throw std::invalid_argument("simulate_exit: t_cap must be positive");

    CoordinatePath path;
    path.seed = seed;
    path.dt = dt;
    path.positions.reserve(1024);
    path.positions.emplace_back(0.0, 0.0);

    Rng rng(seed);
    const double sdt = std::sqrt(dt);
    Complex z(0.0, 0.0);
    for (long k = 1;; ++k) {
        const auto [g1, g2] = rng.gaussian_pair();
        const Complex step(sdt * g1, sdt * g2);
        const Complex z1 = z + step;
        if (std::norm(z1) >= 1.0) {
            // Crossing between (k-1)dt and k dt: solve |z + s*step| = 1 with
            // the cancellation-free quadratic root, then project radially.
            const double a = std::norm(step);
            const double b = z.real() * step.real() + z.imag() * step.imag();
            const double c = std::norm(z) - 1.0;
            const double root = std::sqrt(b * b - a * c);
            double s = b <= 0.0 ? (root - b) / a : -c / (b + root);
            s = std::clamp(s, 0.0, 1.0);
            const Complex zc = z + s * step;
            path.exit_point = zc / std::abs(zc);
            path.tau = (static_cast<double>(k - 1) + s) * dt;
            path.positions.push_back(path.exit_point);
            return path;
        }
        if (static_cast<double>(k) * dt >= t_cap) {
            throw CapHitError("simulate_exit: no exit by t_cap=" + format_time(t_cap) +
                              " (seed " + std::to_string(seed) + ", dt " + format_time(dt) + ")");
        }
        path.positions.push_back(z1);
        z = z1;
    }
}

// --- ProcessTrace ----------------------------------------------------------------

TimeIndex ProcessTrace::index_at(std::size_t flat) const {
    if (flat >= values.size()) throw std::out_of_range("ProcessTrace: sample index");
    const auto it = std::upper_bound(block_offsets.begin(), block_offsets.end(), flat);
    const int n = static_cast<int>(std::distance(block_offsets.begin(), it));
    return TimeIndex::at(n, times[flat]);
}

ProcessTrace build_trace(const TrigPoly& p, const std::vector<CoordinatePath>& paths) {
    if (static_cast<int>(paths.size()) != p.dim()) {
        throw std::invalid_argument("build_trace: expected " + std::to_string(p.dim()) +
                                    " coordinate paths, got " + std::to_string(paths.size()));
    }
    ProcessTrace tr{p, p.dim(), {}, {}, {}, Complex(0.0, 0.0), 0.0};
    tr.block_offsets.resize(static_cast<std::size_t>(p.dim()) + 1);
    tr.block_offsets[0] = 0;
    std::size_t total = 0;
    for (int n = 1; n <= p.dim(); ++n) {
        total += paths[static_cast<std::size_t>(n - 1)].size();
        tr.block_offsets[static_cast<std::size_t>(n)] = total;
    }
    tr.values.reserve(total);
    tr.times.reserve(total);

    const StreamTables tab = make_tables(std::span<const TrigPoly>(&p, 1));
    StreamWorkspace ws;
    stream_tuple(tab, paths, ws, [&](int n, std::size_t i, const Complex* v) {
        tr.values.push_back(v[0]);
        tr.times.push_back(paths[static_cast<std::size_t>(n - 1)].time_at(i));
    });

    double best = 0.0;
    for (const Complex& v : tr.values) best = std::max(best, std::norm(v));
    tr.running_max = std::sqrt(best);
    tr.terminal = tr.values.back();
    return tr;
}

TimeIndex first_passage(const ProcessTrace& trace, double level) {
    const double lsq = level * level;
    for (std::size_t i = 0; i < trace.values.size(); ++i) {
        if (std::norm(trace.values[i]) > lsq) return trace.index_at(i);
    }
    return TimeIndex::infinity();
}

// --- exit law ---------------------------------------------------------------------

EnsembleStats exit_law_stats(int n_paths, double dt, std::uint64_t seed) {
    if (n_paths < 1) throw std::invalid_argument("exit_law_stats: need at least one path");
    KahanSum tau_sum, tau_sq;
    std::vector<double> angles;
    angles.reserve(static_cast<std::size_t>(n_paths));
    for (int k = 0; k < n_paths; ++k) {
        const CoordinatePath path =
            simulate_exit(mix_seed(seed, 1, static_cast<std::uint64_t>(k)), dt);
        tau_sum.add(path.tau);
        tau_sq.add(path.tau * path.tau);
        double u = std::atan2(path.exit_point.imag(), path.exit_point.real()) /
                   (2.0 * std::numbers::pi);
        if (u < 0.0) u += 1.0;
        angles.push_back(u);
    }
    std::sort(angles.begin(), angles.end());
    double ks = 0.0;
    const double n = static_cast<double>(angles.size());
    for (std::size_t i = 0; i < angles.size(); ++i) {
        const double hi = (static_cast<double>(i) + 1.0) / n - angles[i];
        const double lo = angles[i] - static_cast<double>(i) / n;
        ks = std::max({ks, hi, lo});
    }

    EnsembleStats stats;
    stats.name = "exit_law_mean_tau";
    stats.n_paths = n_paths;
    stats.mean = tau_sum.value() / n;
    stats.std_error = sample_se(n_paths, tau_sum.value(), tau_sq.value());
    stats.extra["ks_distance"] = ks;
    return stats;
}

// --- step harness -------------------------------------------------------------------

std::vector<StepReport> verify_steps_batch(std::span<const TrigPoly> fs, int n_paths, double dt,
                                           int res, std::uint64_t seed) {
    if (fs.empty()) throw std::invalid_argument("verify_steps: need at least one polynomial");
    if (n_paths < 1) throw std::invalid_argument("verify_steps: need at least one path");
    const int dim = fs[0].dim();
    for (const TrigPoly& f : fs) {
        require_real_zero_mean(f, "verify_steps");
        if (f.dim() != dim) {
            throw std::invalid_argument("verify_steps: polynomials must share one dimension");
        }
    }

    // Streams f_0..f_{K-1} then their conjugates, all against one ensemble.
    const std::size_t count = fs.size();
    std::vector<TrigPoly> streams(fs.begin(), fs.end());
    streams.reserve(2 * count);
    for (const TrigPoly& f : fs) streams.push_back(conjugate_H(f));
    const StreamTables tab = make_tables(streams);
    StreamWorkspace ws;

    std::vector<KahanSum> term_sum(count), term_sq(count);
    std::vector<std::vector<double>> fstar(count), hstar(count);
    for (std::size_t q = 0; q < count; ++q) {
        fstar[q].resize(static_cast<std::size_t>(n_paths));
        hstar[q].resize(static_cast<std::size_t>(n_paths));
    }
    std::vector<double> fmax(count), hmax(count);
    std::vector<Complex> terminal(count);
    for (int k = 0; k < n_paths; ++k) {
        const auto paths = simulate_tuple(dim, seed, static_cast<std::uint64_t>(k), dt);
        std::fill(fmax.begin(), fmax.end(), 0.0);
        std::fill(hmax.begin(), hmax.end(), 0.0);
        stream_tuple(tab, paths, ws, [&](int, std::size_t, const Complex* v) {
            for (std::size_t q = 0; q < count; ++q) {
                fmax[q] = std::max(fmax[q], std::norm(v[q]));
                hmax[q] = std::max(hmax[q], std::norm(v[count + q]));
                terminal[q] = v[q];
            }
        });
        for (std::size_t q = 0; q < count; ++q) {
            fstar[q][static_cast<std::size_t>(k)] = std::sqrt(fmax[q]);
            hstar[q][static_cast<std::size_t>(k)] = std::sqrt(hmax[q]);
            const double at = std::abs(terminal[q]);
            term_sum[q].add(at);
            term_sq[q].add(at * at);
        }
    }

    std::vector<StepReport> reports;
    reports.reserve(count);
    for (std::size_t q = 0; q < count; ++q) {
        StepReport report;
        report.l1_grid = norm(sample_grid(fs[q], res), 1);
        report.grid_weak_maximal = weak_l1(maximal_conj_grid(fs[q], res));

        report.step1.name = "step1_mean_abs_terminal";
        report.step1.n_paths = n_paths;
        report.step1.mean = term_sum[q].value() / static_cast<double>(n_paths);
        report.step1.std_error = sample_se(n_paths, term_sum[q].value(), term_sq[q].value());
        report.step1.extra["l1_grid"] = report.l1_grid;

        const WeakNormDetail wf = weak_l1_detail(std::move(fstar[q]));
        report.step2.name = "step2_weak_fstar";
        report.step2.n_paths = n_paths;
        report.step2.mean = wf.value;
        report.step2.std_error = wf.std_error;
        report.step2.extra["level"] = wf.level;
        report.step2.extra["fraction"] = wf.fraction;
        report.step2.extra["mean_abs_terminal"] = report.step1.mean;
        report.step2.extra["mean_abs_terminal_se"] = report.step1.std_error;

        const WeakNormDetail wh = weak_l1_detail(std::move(hstar[q]));
        report.step4.name = "step4_weak_conj_star";
        report.step4.n_paths = n_paths;
        report.step4.mean = wh.value;
        report.step4.std_error = wh.std_error;
        report.step4.extra["level"] = wh.level;
        report.step4.extra["fraction"] = wh.fraction;
        report.step4.extra["grid_weak_maximal"] = report.grid_weak_maximal;
        report.step4.extra["l1_grid"] = report.l1_grid;
        reports.push_back(std::move(report));
    }
    return reports;
}

StepReport verify_steps(const TrigPoly& f, int n_paths, double dt, int res, std::uint64_t seed) {
    return verify_steps_batch(std::span<const TrigPoly>(&f, 1), n_paths, dt, res, seed)[0];
}

// --- path functionals ------------------------------------------------------------------

PathFunctional PathFunctional::constant() { return PathFunctional{}; }

PathFunctional PathFunctional::re(int coord, double time) {
    PathFunctional w;
    w.factors_.push_back({Kind::Re, coord, time});
    return w;
}

PathFunctional PathFunctional::im(int coord, double time) {
    PathFunctional w;
    w.factors_.push_back({Kind::Im, coord, time});
    return w;
}

PathFunctional PathFunctional::sign_re(int coord, double time) {
    PathFunctional w;
    w.factors_.push_back({Kind::SignRe, coord, time});
    return w;
}

PathFunctional PathFunctional::sign_im(int coord, double time) {
    PathFunctional w;
    w.factors_.push_back({Kind::SignIm, coord, time});
    return w;
}

PathFunctional PathFunctional::operator*(const PathFunctional& other) const {
    PathFunctional w = *this;
    w.factors_.insert(w.factors_.end(), other.factors_.begin(), other.factors_.end());
    return w;
}

void PathFunctional::validate(const TimeIndex& checkpoint, int dim) const {
    for (const Factor& f : factors_) {
        if (f.coord < 1 || f.coord > dim) {
            throw std::invalid_argument("PathFunctional: coordinate " + std::to_string(f.coord) +
                                        " outside [1, " + std::to_string(dim) + "]");
        }
        if (!(TimeIndex::at(f.coord, f.time) <= checkpoint)) {
            throw std::invalid_argument("PathFunctional: factor at " +
                                        TimeIndex::at(f.coord, f.time).str() +
                                        " is not measurable at checkpoint " + checkpoint.str());
        }
    }
}

double PathFunctional::evaluate(const std::vector<CoordinatePath>& paths) const {
    double w = 1.0;
    for (const Factor& f : factors_) {
        const Complex c = paths[static_cast<std::size_t>(f.coord - 1)].position_at(f.time);
        switch (f.kind) {
            case Kind::Re: w *= c.real(); break;
            case Kind::Im: w *= c.imag(); break;
            case Kind::SignRe: w *= static_cast<double>((c.real() > 0.0) - (c.real() < 0.0)); break;
            case Kind::SignIm: w *= static_cast<double>((c.imag() > 0.0) - (c.imag() < 0.0)); break;
        }
    }
    return w;
}

std::string PathFunctional::name() const {
    if (factors_.empty()) return "1";
    std::string out;
    for (const Factor& f : factors_) {
        if (!out.empty()) out += "*";
        switch (f.kind) {
            case Kind::Re: out += "re"; break;
            case Kind::Im: out += "im"; break;
            case Kind::SignRe: out += "sgn_re"; break;
            case Kind::SignIm: out += "sgn_im"; break;
        }
        out += "(c" + std::to_string(f.coord) + "@" + format_time(f.time) + ")";
    }
    return out;
}

std::vector<PathFunctional> functional_catalogue(const TimeIndex& checkpoint) {
    if (checkpoint.is_infinite()) {
        throw std::invalid_argument("functional_catalogue: checkpoint must be finite");
    }
    const int n = checkpoint.block();
    const double half = checkpoint.time() / 2.0;
    std::vector<PathFunctional> out;
    out.push_back(PathFunctional::constant());
    out.push_back(PathFunctional::re(n, half));
    out.push_back(PathFunctional::im(n, half));
    out.push_back(PathFunctional::sign_re(n, half));
    out.push_back(PathFunctional::re(n, half) * PathFunctional::im(n, half));
    if (n >= 2) {
        out.push_back(PathFunctional::re(n - 1, 0.25));
        out.push_back(PathFunctional::sign_im(n - 1, 0.25));
        out.push_back(PathFunctional::re(n - 1, 0.25) * PathFunctional::im(n, half));
    }
    return out;
}

// --- increment orthogonality ----------------------------------------------------------

namespace {

std::string orth_name(const TimeIndex& cp, const PathFunctional& w) {
    return "orth_" + cp.str() + "_" + w.name();
}

} // namespace

std::vector<EnsembleStats> orthogonality_batch(const TrigPoly& f,
                                               const std::vector<TimeIndex>& checkpoints,
                                               int n_paths, double dt, std::uint64_t seed) {
    if (n_paths < 1) throw std::invalid_argument("orthogonality_batch: need at least one path");
    struct Cell {
        TimeIndex cp = TimeIndex::infinity();
        PathFunctional w;
        KahanSum re, re_sq, im, im_sq;
    };
    std::vector<Cell> cells;
    for (const TimeIndex& cp : checkpoints) {
        if (cp.is_infinite() || cp.block() > f.dim()) {
            throw std::invalid_argument("orthogonality_batch: checkpoint " + cp.str() +
                                        " outside the time structure of dim " +
                                        std::to_string(f.dim()));
        }
        for (const PathFunctional& w : functional_catalogue(cp)) {
            w.validate(cp, f.dim());
            Cell cell;
            cell.cp = cp;
            cell.w = w;
            cells.push_back(std::move(cell));
        }
    }

    std::vector<Complex> exits(static_cast<std::size_t>(f.dim()));
    for (int k = 0; k < n_paths; ++k) {
        const auto paths = simulate_tuple(f.dim(), seed, static_cast<std::uint64_t>(k), dt);
        for (int j = 0; j < f.dim(); ++j) {
            exits[static_cast<std::size_t>(j)] = paths[static_cast<std::size_t>(j)].exit_point;
        }
        const Complex terminal = eval_at_exits(f, exits);
        for (Cell& cell : cells) {
            const Complex at_cp = eval_checkpoint(f, paths, cell.cp);
            const double wv = cell.w.evaluate(paths);
            const Complex z = (terminal - at_cp) * wv;
            cell.re.add(z.real());
            cell.re_sq.add(z.real() * z.real());
            cell.im.add(z.imag());
            cell.im_sq.add(z.imag() * z.imag());
        }
    }

    std::vector<EnsembleStats> rows;
    rows.reserve(cells.size());
    for (const Cell& cell : cells) {
        EnsembleStats stats;
        stats.name = orth_name(cell.cp, cell.w);
        stats.n_paths = n_paths;
        stats.mean = cell.re.value() / static_cast<double>(n_paths);
        stats.std_error = sample_se(n_paths, cell.re.value(), cell.re_sq.value());
        stats.extra["imag_mean"] = cell.im.value() / static_cast<double>(n_paths);
        stats.extra["imag_std_error"] = sample_se(n_paths, cell.im.value(), cell.im_sq.value());
        rows.push_back(std::move(stats));
    }
    return rows;
}

EnsembleStats increment_orthogonality(const TrigPoly& f, const TimeIndex& checkpoint,
                                      const PathFunctional& functional, int n_paths, double dt,
                                      std::uint64_t seed) {
    if (checkpoint.is_infinite() || checkpoint.block() > f.dim()) {
        throw std::invalid_argument("increment_orthogonality: checkpoint outside the time structure");
    }
    functional.validate(checkpoint, f.dim());
    if (n_paths < 1) throw std::invalid_argument("increment_orthogonality: need at least one path");

    KahanSum re, re_sq, im, im_sq;
    std::vector<Complex> exits(static_cast<std::size_t>(f.dim()));
    for (int k = 0; k < n_paths; ++k) {
        const auto paths = simulate_tuple(f.dim(), seed, static_cast<std::uint64_t>(k), dt);
        for (int j = 0; j < f.dim(); ++j) {
            exits[static_cast<std::size_t>(j)] = paths[static_cast<std::size_t>(j)].exit_point;
        }
        const Complex z =
            (eval_at_exits(f, exits) - eval_checkpoint(f, paths, checkpoint)) *
            functional.evaluate(paths);
        re.add(z.real());
        re_sq.add(z.real() * z.real());
        im.add(z.imag());
        im_sq.add(z.imag() * z.imag());
    }

    EnsembleStats stats;
    stats.name = orth_name(checkpoint, functional);
    stats.n_paths = n_paths;
    stats.mean = re.value() / static_cast<double>(n_paths);
    stats.std_error = sample_se(n_paths, re.value(), re_sq.value());
    stats.extra["imag_mean"] = im.value() / static_cast<double>(n_paths);
    stats.extra["imag_std_error"] = sample_se(n_paths, im.value(), im_sq.value());
    return stats;
}

// --- analytic squaring -------------------------------------------------------------------

SquareCheckResult analytic_square_check(const TrigPoly& f, int n_paths, double dt,
                                        std::uint64_t seed, double tolerance) {
    require_real_zero_mean(f, "analytic_square_check");
    if (n_paths < 1) throw std::invalid_argument("analytic_square_check: need at least one path");

    const Complex cs[] = {Complex(1.0, 0.0), Complex(0.0, 1.0)};
    const TrigPoly parts[] = {f, conjugate_H(f)};
    const TrigPoly g = linear_combine(cs, parts);
    const TrigPoly h = multiply(g, g);
    const TrigPoly pair[] = {g, h};
    const StreamTables tab = make_tables(pair);
    StreamWorkspace ws;

    SquareCheckResult result;
    for (int k = 0; k < n_paths; ++k) {
        const auto paths = simulate_tuple(f.dim(), seed, static_cast<std::uint64_t>(k), dt);
        stream_tuple(tab, paths, ws, [&](int, std::size_t, const Complex* v) {
            const double dev = std::abs(v[1] - v[0] * v[0]);
            result.max_deviation = std::max(result.max_deviation, dev);
            if (dev > tolerance) ++result.n_exceeding;
            ++result.n_samples;
        });
    }
    return result;
}

// --- stopped increments ---------------------------------------------------------------------

StoppedIncrementStats stopped_increment_stats(const TrigPoly& f, double level_lo, double level_hi,
                                              int n_paths, double dt, std::uint64_t seed) {
    require_real_zero_mean(f, "stopped_increment_stats");
    if (!(level_lo > 0.0) || !(level_hi > level_lo)) {
        throw std::invalid_argument("stopped_increment_stats: need 0 < level_lo < level_hi");
    }
    if (n_paths < 1) throw std::invalid_argument("stopped_increment_stats: need at least one path");

    const TrigPoly pair[] = {f, conjugate_H(f)};
    const StreamTables tab = make_tables(pair);
    StreamWorkspace ws;
    const double lo_sq = level_lo * level_lo;
    const double hi_sq = level_hi * level_hi;

    KahanSum base_sum, base_sq, conj_sum, conj_sq;
    for (int k = 0; k < n_paths; ++k) {
        const auto paths = simulate_tuple(f.dim(), seed, static_cast<std::uint64_t>(k), dt);
        bool hit_mu = false, hit_nu = false;
        Complex f_mu, h_mu, f_nu, h_nu, f_term, h_term;
        stream_tuple(tab, paths, ws, [&](int, std::size_t, const Complex* v) {
            f_term = v[0];
            h_term = v[1];
            if (hit_nu) return;
            const Complex g(v[0].real() - v[1].imag(), v[0].imag() + v[1].real());
            const double gsq = std::norm(g);
            if (!hit_mu && gsq > lo_sq) {
                hit_mu = true;
                f_mu = v[0];
                h_mu = v[1];
            }
            if (!hit_nu && gsq > hi_sq) {
                hit_nu = true;
                f_nu = v[0];
                h_nu = v[1];
            }
        });
        if (!hit_mu) {
            f_mu = f_term;
            h_mu = h_term;
        }
        if (!hit_nu) {
            f_nu = f_term;
            h_nu = h_term;
        }
        const double x = std::norm(f_nu - f_mu);
        const double y = std::norm(h_nu - h_mu);
        base_sum.add(x);
        base_sq.add(x * x);
        conj_sum.add(y);
        conj_sq.add(y * y);
    }

    const auto finish = [&](const char* name, const KahanSum& sum, const KahanSum& sq) {
        EnsembleStats stats;
        stats.name = name;
        stats.n_paths = n_paths;
        const double mean_square = sum.value() / static_cast<double>(n_paths);
        stats.mean = std::sqrt(std::max(mean_square, 0.0));
        const double se_sq = sample_se(n_paths, sum.value(), sq.value());
        stats.std_error = stats.mean > 0.0 ? se_sq / (2.0 * stats.mean) : 0.0;
        stats.extra["mean_square"] = mean_square;
        stats.extra["level_lo"] = level_lo;
        stats.extra["level_hi"] = level_hi;
        return stats;
    };

    StoppedIncrementStats out;
    out.base = finish("stopped_increment_l2_base", base_sum, base_sq);
    out.conjugate = finish("stopped_increment_l2_conjugate", conj_sum, conj_sq);
    return out;
}

// --- maxima comparison ------------------------------------------------------------------------

std::vector<MaximaPair> simulate_maxima(const TrigPoly& f, int n_paths, double dt,
                                        std::uint64_t seed) {
    require_real_zero_mean(f, "simulate_maxima");
    if (n_paths < 1) throw std::invalid_argument("simulate_maxima: need at least one path");

    const TrigPoly pair[] = {f, conjugate_H(f)};
    const StreamTables tab = make_tables(pair);
    StreamWorkspace ws;

    std::vector<MaximaPair> out(static_cast<std::size_t>(n_paths));
    for (int k = 0; k < n_paths; ++k) {
        const auto paths = simulate_tuple(f.dim(), seed, static_cast<std::uint64_t>(k), dt);
        double gmax = 0.0, fmax = 0.0;
        stream_tuple(tab, paths, ws, [&](int, std::size_t, const Complex* v) {
            const Complex g(v[0].real() - v[1].imag(), v[0].imag() + v[1].real());
            gmax = std::max(gmax, std::norm(g));
            fmax = std::max(fmax, std::norm(v[0]));
        });
        out[static_cast<std::size_t>(k)] = {std::sqrt(gmax), std::sqrt(fmax)};
    }
    return out;
}

EnsembleStats good_lambda_from_maxima(const std::vector<MaximaPair>& maxima, double lambda,
                                      double alpha, double beta) {
    if (!(lambda > 0.0)) throw std::invalid_argument("good_lambda: lambda must be positive");
    if (!(alpha >= 1.0)) throw std::invalid_argument("good_lambda: alpha must be >= 1");
    if (!(beta > 1.0)) throw std::invalid_argument("good_lambda: beta must be > 1");
    if (maxima.empty()) throw std::invalid_argument("good_lambda: empty ensemble");

    const double n = static_cast<double>(maxima.size());
    std::size_t c_g = 0, c_gb = 0;
    for (const MaximaPair& m : maxima) {
        if (m.g_star > lambda) ++c_g;
        if (m.g_star > beta * lambda) ++c_gb;
    }
    const double p_g = static_cast<double>(c_g) / n;
    const double p_gb = static_cast<double>(c_gb) / n;

    EnsembleStats stats;
    stats.name = "good_lambda_p_gstar";
    stats.n_paths = static_cast<long>(maxima.size());
    stats.mean = p_g;
    stats.std_error = std::sqrt(p_g * (1.0 - p_g) / n);
    stats.extra["lambda"] = lambda;
    stats.extra["alpha"] = alpha;
    stats.extra["beta"] = beta;
    stats.extra["p_gstar_beta_lambda"] = p_gb;
    stats.extra["hypothesis_held"] = p_g <= alpha * p_gb ? 1.0 : 0.0;

    double smallest = 0.0;
    for (const double probe : {1.0, 2.0, 4.0, 8.0, 16.0}) {
        std::size_t c_f = 0;
        for (const MaximaPair& m : maxima) {
            if (m.f_star > lambda / probe) ++c_f;
        }
        const double p_f = static_cast<double>(c_f) / n;
        char key[32];
        std::snprintf(key, sizeof key, "p_fstar_probe_%g", probe);
        stats.extra[key] = p_f;
        if (smallest == 0.0 && p_g <= probe * p_f) smallest = probe;
    }
    stats.extra["smallest_probe"] = smallest;
    return stats;
}

EnsembleStats good_lambda_stats(const TrigPoly& f, double lambda, double alpha, double beta,
                                int n_paths, double dt, std::uint64_t seed) {
    return good_lambda_from_maxima(simulate_maxima(f, n_paths, dt, seed), lambda, alpha, beta);
}

} // namespace torusmax
