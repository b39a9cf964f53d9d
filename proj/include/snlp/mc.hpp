#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "snlp/hyperexp_model.hpp"

namespace snlp {

struct SimConfig {
    long long n_paths = 100000;
    double dt = 1e-3;       // diffusion discretization between jump epochs
    double horizon = 1.0;   // reference horizon (dt defaults to 1e-3 * horizon)
    std::uint64_t seed = 20240915;
    bool antithetic = false;
    int threads = 0; // 0 = hardware concurrency

    static SimConfig with_horizon(double h) {
        SimConfig c;
        c.horizon = h;
        c.dt = 1e-3 * h;
        return c;
    }

    void validate() const {
        if (n_paths < 1) throw std::invalid_argument("SimConfig: n_paths >= 1 required");
        if (!(dt > 0.0)) throw std::invalid_argument("SimConfig: dt > 0 required");
    }
};

struct PathFunctionalEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long long n_effective = 0;
};

namespace mc_detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Moro's inverse normal CDF (Beasley-Springer center, Moro tails).
inline double inverse_normal_cdf(double u) {
    static const double a0 = 2.50662823884, a1 = -18.61500062529, a2 = 41.39119773534,
                        a3 = -25.44106049637;
    static const double b0 = -8.47351093090, b1 = 23.08336743743, b2 = -21.06224101826,
                        b3 = 3.13082909833;
    static const double c0 = 0.3374754822726147, c1 = 0.9761690190917186,
                        c2 = 0.1607979714918209, c3 = 0.0276438810333863,
                        c4 = 0.0038405729373609, c5 = 0.0003951896511919,
                        c6 = 0.0000321767881768, c7 = 0.0000002888167364,
                        c8 = 0.0000003960315187;
    const double x = u - 0.5;
    if (std::abs(x) < 0.42) {
        const double r = x * x;
        return x * (a0 + r * (a1 + r * (a2 + r * a3))) /
               (1.0 + r * (b0 + r * (b1 + r * (b2 + r * b3))));
    }
    double r = (x < 0.0) ? u : 1.0 - u;
    r = std::log(-std::log(r));
    const double z =
        c0 + r * (c1 + r * (c2 + r * (c3 + r * (c4 + r * (c5 + r * (c6 + r * (c7 + r * c8)))))));
    return x < 0.0 ? -z : z;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Abramowitz-Stegun 26.2.17 rational tail, |error| < 7.5e-8; an order of
/// magnitude cheaper than erfc in the per-step bridge corrections.
inline double normal_cdf_fast(double z) {
    const double az = std::abs(z);
    if (az > 12.0) return z > 0.0 ? 1.0 : 0.0;
    const double t = 1.0 / (1.0 + 0.2316419 * az);
    const double poly =
        t * (0.319381530 +
             t * (-0.356563782 + t * (1.781477937 + t * (-1.821255978 + t * 1.330274429))));
    const double tail = 0.3989422804014327 * std::exp(-0.5 * z * z) * poly;
    return z >= 0.0 ? 1.0 - tail : tail;
}

/// Per-path substream: all draws go through uniforms so the antithetic twin
/// (u -> 1-u) flips every source of randomness consistently.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream, bool antithetic_flip)
        : eng_(splitmix64(seed ^ splitmix64(stream * 0x9E3779B97F4A7C15ull + 1))),
          flip_(antithetic_flip) {}

    double uniform() {
        const double u = ((eng_() >> 11) + 0.5) * 0x1.0p-53;
        const double v = flip_ ? 1.0 - u : u;
        return std::min(std::max(v, 1e-16), 1.0 - 1e-16);
    }
    double normal() { return inverse_normal_cdf(uniform()); }
    double exponential(double mean_rate) { return -std::log(1.0 - uniform()) / mean_rate; }

  private:
    std::mt19937_64 eng_;
    bool flip_;
};

inline double sample_jump(const HyperExpModel& m, RngStream& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t k = m.weights.size() - 1;
    for (std::size_t i = 0; i < m.weights.size(); ++i) {
        acc += m.weights[i];
        if (u <= acc) { k = i; break; }
    }
    return rng.exponential(m.rates[k]);
}

/// Mean over the step of P(bridge < level); Gauss-Legendre in the time
/// fraction, with shortcuts when every node is conclusively on one side.
inline double bridge_below_fraction(double x0, double x1, double sigma_h, double level) {
    static const double gl_x[8] = {0.01985507175123188, 0.10166676129318664,
                                   0.2372337950418355,  0.40828267875217505,
                                   0.591717321247825,   0.7627662049581645,
                                   0.8983332387068134,  0.9801449282487681};
    static const double gl_w[8] = {0.05061426814518813, 0.11119051722668723,
                                   0.15685332293894363, 0.18134189168918097,
                                   0.18134189168918097, 0.15685332293894363,
                                   0.11119051722668723, 0.05061426814518813};
    const double spread = 6.0 * sigma_h;
    if (std::max(x0, x1) + spread < level) return 1.0;
    if (std::min(x0, x1) - spread > level) return 0.0;
    double acc = 0.0;
    for (int g = 0; g < 8; ++g) {
        const double s = gl_x[g];
        const double mu = x0 + (x1 - x0) * s;
        const double sd = sigma_h * std::sqrt(s * (1.0 - s));
        acc += gl_w[g] * (sd == 0.0 ? (mu < level ? 1.0 : 0.0)
                                    : normal_cdf_fast((level - mu) / sd));
    }
    return acc;
}

/// Expected fraction of a diffusion step spent in (lo, hi), conditional on
/// the endpoints (Brownian bridge).  Removes the O(sqrt(dt)) bias of
/// indicator sampling near a boundary.
inline double bridge_occupation_fraction(double x0, double x1, double sigma_sq_h, double lo,
                                         double hi) {
    const double sigma_h = std::sqrt(sigma_sq_h);
    const double below_hi = hi == std::numeric_limits<double>::infinity()
                                ? 1.0
                                : bridge_below_fraction(x0, x1, sigma_h, hi);
    const double below_lo = lo == -std::numeric_limits<double>::infinity()
                                ? 0.0
                                : bridge_below_fraction(x0, x1, sigma_h, lo);
    return std::max(0.0, below_hi - below_lo);
}

/// Time a linear segment x0 -> x1 over h spends in (lo, hi); exact.
inline double linear_occupation(double x0, double x1, double h, double lo, double hi) {
    if (x0 == x1) return (x0 > lo && x0 < hi) ? h : 0.0;
    const double slope = (x1 - x0) / h;
    double t_in = (lo - x0) / slope, t_out = (hi - x0) / slope;
    if (t_in > t_out) std::swap(t_in, t_out);
    const double lo_t = std::max(0.0, t_in), hi_t = std::min(h, t_out);
    return std::max(0.0, hi_t - lo_t);
}

/// Occupation of (lo, hi) contributed by one diffusion step.
inline double step_occupation(double x0, double x1, double h, double sigma, double lo,
                              double hi) {
    if (sigma == 0.0) return linear_occupation(x0, x1, h, lo, hi);
    const double spread = 6.0 * sigma * std::sqrt(h);
    const double xmin = std::min(x0, x1), xmax = std::max(x0, x1);
    if (xmax + spread < lo || xmin - spread > hi) return 0.0;
    if (xmin - spread > lo && xmax + spread < hi) return h;
    return h * bridge_occupation_fraction(x0, x1, sigma * sigma * h, lo, hi);
}

/// P(bridge from x0 to x1 over variance sigma^2 h dips below `level`),
/// endpoints above the level.
inline double bridge_down_crossing_prob(double x0, double x1, double sigma_sq_h, double level) {
    return std::exp(-2.0 * (x0 - level) * (x1 - level) / sigma_sq_h);
}

/// Deterministic block-parallel runner: per-block accumulators merged in
/// block order, so results do not depend on the thread count.
template <class Block, class Fn>
std::vector<Block> run_blocks(long long n_units, int threads, const Fn& fn,
                              long long block_size = 4096) {
    const long long n_blocks = (n_units + block_size - 1) / block_size;
    std::vector<Block> blocks(static_cast<std::size_t>(n_blocks));
    int n_threads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    std::atomic<long long> next{0};
    auto worker = [&]() {
        for (;;) {
            const long long b = next.fetch_add(1);
            if (b >= n_blocks) return;
            const long long lo = b * block_size;
            const long long hi = std::min(n_units, lo + block_size);
            fn(blocks[static_cast<std::size_t>(b)], lo, hi);
        }
    };
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return blocks;
}

struct MeanAccum {
    double sum = 0.0, sum_sq = 0.0;
    long long n = 0;
    void add(double v) {
        sum += v;
        sum_sq += v * v;
        ++n;
    }
    void merge(const MeanAccum& o) {
        sum += o.sum;
        sum_sq += o.sum_sq;
        n += o.n;
    }
    PathFunctionalEstimate estimate() const {
        PathFunctionalEstimate e;
        e.n_effective = n;
        if (n == 0) return e;
        e.mean = sum / static_cast<double>(n);
        if (n > 1) {
            const double var = std::max(0.0, (sum_sq - sum * sum / static_cast<double>(n)) /
                                                 static_cast<double>(n - 1));
            e.std_error = std::sqrt(var / static_cast<double>(n));
        }
        return e;
    }
};

/// Run one unit (a path, or an antithetic pair averaged into one draw) of a
/// scalar functional; `f(rng, flip)` returns the path functional value.
template <class Fn>
PathFunctionalEstimate monte_carlo_mean(const SimConfig& cfg, const Fn& f) {
    cfg.validate();
    const long long n_units = cfg.antithetic ? (cfg.n_paths + 1) / 2 : cfg.n_paths;
    auto blocks = run_blocks<MeanAccum>(n_units, cfg.threads, [&](MeanAccum& acc, long long lo,
                                                                  long long hi) {
        for (long long u = lo; u < hi; ++u) {
            if (cfg.antithetic) {
                RngStream r1(cfg.seed, static_cast<std::uint64_t>(u), false);
                RngStream r2(cfg.seed, static_cast<std::uint64_t>(u), true);
                acc.add(0.5 * (f(r1) + f(r2)));
            } else {
                RngStream r(cfg.seed, static_cast<std::uint64_t>(u), false);
                acc.add(f(r));
            }
        }
    });
    MeanAccum total;
    for (const auto& b : blocks) total.merge(b);
    return total.estimate();
}

/// Event-driven walk to t_end: jumps exactly at Poisson epochs, diffusion
/// discretized with step <= dt between epochs (sigma = 0 walks one exact
/// linear segment per epoch).  Visitor receives every diffusion sub-step and
/// jump; returns false to abort early.
template <class Visitor>
void walk_path(const HyperExpModel& m, RngStream& rng, double t_end, double dt, Visitor&& vis) {
    double t = 0.0, x = 0.0;
    const bool has_jumps = m.eta > 0.0;
    double t_jump = has_jumps ? rng.exponential(m.eta) : std::numeric_limits<double>::infinity();
    while (t < t_end) {
        const double t_next = std::min(t_jump, t_end);
        const double span = t_next - t;
        if (span > 0.0) {
            long long n_sub = m.sigma > 0.0
                                  ? static_cast<long long>(std::ceil(span / dt))
                                  : 1;
            if (n_sub < 1) n_sub = 1;
            const double h = span / static_cast<double>(n_sub);
            const double sq = m.sigma * std::sqrt(h);
            for (long long i = 0; i < n_sub; ++i) {
                const double x1 = x + m.drift_c * h + (m.sigma > 0.0 ? sq * rng.normal() : 0.0);
                if (!vis.diffusion(t, x, t + h, x1, h)) return;
                x = x1;
                t += h;
            }
        }
        if (t_jump <= t_end) {
            const double size = sample_jump(m, rng);
            if (!vis.jump(t_jump, x, x - size)) return;
            x -= size;
            t = t_jump;
            t_jump += rng.exponential(m.eta);
        } else {
            t = t_end;
        }
    }
    vis.finish(t, x);
}

} // namespace mc_detail

/// One raw model increment over dt: c dt + sigma sqrt(dt) Z - Poisson(eta dt) jumps.
inline double simulate_increment(const HyperExpModel& m, double dt, mc_detail::RngStream& rng) {
    if (!(dt > 0.0)) throw std::invalid_argument("simulate_increment: dt > 0 required");
    double inc = m.drift_c * dt;
    if (m.sigma > 0.0) inc += m.sigma * std::sqrt(dt) * rng.normal();
    if (m.eta > 0.0) {
        // Knuth counting for Poisson(eta dt)
        const double limit = std::exp(-m.eta * dt);
        double prod = rng.uniform();
        while (prod > limit) {
            inc -= mc_detail::sample_jump(m, rng);
            prod *= rng.uniform();
        }
    }
    return inc;
}

struct OccupationWindow {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = 0.0;
};

struct JointHistogram {
    std::vector<double> bin_edges;
    std::vector<PathFunctionalEstimate> bins; // density estimates, comparable to v(x, y)
    bool bias_warning = false;
};

/// Histogram estimate of v(x, dy)/dy: per path draw t ~ Exp(p), simulate to
/// t, accumulate e^{-q occ} into the terminal bin, scale by 1/(p bin width).
inline JointHistogram estimate_joint(const HyperExpModel& m, double x0, double p, double q,
                                     const OccupationWindow& window,
                                     const std::vector<double>& bin_edges, const SimConfig& cfg) {
    cfg.validate();
    if (!(p > 0.0)) throw std::invalid_argument("estimate_joint: p > 0 required");
    if (bin_edges.size() < 2) throw std::invalid_argument("estimate_joint: need >= 2 bin edges");
    const std::size_t n_bins = bin_edges.size() - 1;

    struct Visitor {
        const HyperExpModel* m;
        double lo, hi;
        double occ = 0.0;
        double x_final = 0.0;
        bool diffusion(double, double x0, double, double x1, double h) {
            occ += mc_detail::step_occupation(x0, x1, h, m->sigma, lo, hi);
            return true;
        }
        bool jump(double, double, double) { return true; }
        void finish(double, double x) { x_final = x; }
    };

    struct BinAccum {
        std::vector<mc_detail::MeanAccum> cells;
        void init(std::size_t n) { if (cells.empty()) cells.resize(n); }
    };

    const long long n_units = cfg.antithetic ? (cfg.n_paths + 1) / 2 : cfg.n_paths;
    auto run_one = [&](mc_detail::RngStream& rng, std::vector<double>& weights) {
        const double t_ep = rng.exponential(p);
        Visitor vis{&m, window.lo - x0, window.hi - x0};
        mc_detail::walk_path(m, rng, t_ep, cfg.dt, vis);
        const double w = std::exp(-q * vis.occ);
        const double xt = x0 + vis.x_final;
        std::fill(weights.begin(), weights.end(), 0.0);
        if (xt >= bin_edges.front() && xt < bin_edges.back()) {
            const std::size_t b = static_cast<std::size_t>(
                std::upper_bound(bin_edges.begin(), bin_edges.end(), xt) - bin_edges.begin() - 1);
            weights[std::min(b, n_bins - 1)] = w;
        }
    };

    auto blocks = mc_detail::run_blocks<BinAccum>(
        n_units, cfg.threads, [&](BinAccum& acc, long long lo, long long hi) {
            acc.init(n_bins);
            std::vector<double> w1(n_bins), w2(n_bins);
            for (long long u = lo; u < hi; ++u) {
                if (cfg.antithetic) {
                    mc_detail::RngStream r1(cfg.seed, static_cast<std::uint64_t>(u), false);
                    mc_detail::RngStream r2(cfg.seed, static_cast<std::uint64_t>(u), true);
                    run_one(r1, w1);
                    run_one(r2, w2);
                    for (std::size_t b = 0; b < n_bins; ++b)
                        acc.cells[b].add(0.5 * (w1[b] + w2[b]));
                } else {
                    mc_detail::RngStream r(cfg.seed, static_cast<std::uint64_t>(u), false);
                    run_one(r, w1);
                    for (std::size_t b = 0; b < n_bins; ++b) acc.cells[b].add(w1[b]);
                }
            }
        });

    JointHistogram hist;
    hist.bin_edges = bin_edges;
    hist.bins.resize(n_bins);
    std::vector<mc_detail::MeanAccum> total(n_bins);
    for (const auto& blk : blocks)
        for (std::size_t b = 0; b < n_bins; ++b)
            if (!blk.cells.empty()) total[b].merge(blk.cells[b]);
    double min_width = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < n_bins; ++b) {
        const double width = bin_edges[b + 1] - bin_edges[b];
        min_width = std::min(min_width, width);
        PathFunctionalEstimate e = total[b].estimate();
        e.mean /= p * width;
        e.std_error /= p * width;
        hist.bins[b] = e;
    }
    if (m.sigma > 0.0 && cfg.dt > min_width * min_width / (m.sigma * m.sigma))
        hist.bias_warning = true;
    return hist;
}

struct ExitEstimate {
    PathFunctionalEstimate up;   // E_x[e^{-q tau_c^+}; tau_c^+ < tau_a^-]
    PathFunctionalEstimate down; // E_x[e^{-q tau_a^-}; tau_a^- < tau_c^+]
};

/// Two-sided exit functionals by simulation with Brownian-bridge crossing
/// correction; exits assigned to the middle of the detecting step.
inline ExitEstimate estimate_exit(const HyperExpModel& m, double x0, double a, double c, double q,
                                  const SimConfig& cfg, double t_cap = 1e4) {
    if (!(a <= x0 && x0 <= c && a < c))
        throw std::invalid_argument("estimate_exit: need a <= x <= c");

    struct Visitor {
        const HyperExpModel* m;
        mc_detail::RngStream* rng;
        double a, c;
        int side = 0; // +1 up, -1 down
        double tau = 0.0;
        bool diffusion(double t0, double x0, double, double x1, double h) {
            if (x1 >= c) { // continuous up-crossing inside the step
                side = 1;
                tau = t0 + h * std::min(1.0, (c - x0) / std::max(x1 - x0, 1e-300));
                return false;
            }
            if (x1 < a) {
                side = -1;
                tau = t0 + h * std::min(1.0, (x0 - a) / std::max(x0 - x1, 1e-300));
                return false;
            }
            if (m->sigma > 0.0) {
                const double ssh = m->sigma * m->sigma * h;
                const double p_up = mc_detail::bridge_down_crossing_prob(c - x0, c - x1, ssh, 0.0);
                if (rng->uniform() < p_up) {
                    side = 1;
                    tau = t0 + 0.5 * h;
                    return false;
                }
                const double p_dn = mc_detail::bridge_down_crossing_prob(x0 - a, x1 - a, ssh, 0.0);
                if (rng->uniform() < p_dn) {
                    side = -1;
                    tau = t0 + 0.5 * h;
                    return false;
                }
            }
            return true;
        }
        bool jump(double t, double, double x_after) {
            if (x_after < a) {
                side = -1;
                tau = t;
                return false;
            }
            return true;
        }
        void finish(double, double) {}
    };

    struct PairAccum {
        mc_detail::MeanAccum up, down;
    };
    const long long n_units = cfg.antithetic ? (cfg.n_paths + 1) / 2 : cfg.n_paths;
    auto run_one = [&](mc_detail::RngStream& rng, double& vup, double& vdn) {
        Visitor vis{&m, &rng, a - x0, c - x0};
        mc_detail::walk_path(m, rng, t_cap, cfg.dt, vis);
        vup = vis.side == 1 ? std::exp(-q * vis.tau) : 0.0;
        vdn = vis.side == -1 ? std::exp(-q * vis.tau) : 0.0;
    };
    auto blocks = mc_detail::run_blocks<PairAccum>(
        n_units, cfg.threads, [&](PairAccum& acc, long long lo, long long hi) {
            for (long long u = lo; u < hi; ++u) {
                double u1, d1;
                if (cfg.antithetic) {
                    mc_detail::RngStream r1(cfg.seed, static_cast<std::uint64_t>(u), false);
                    mc_detail::RngStream r2(cfg.seed, static_cast<std::uint64_t>(u), true);
                    double u2, d2;
                    run_one(r1, u1, d1);
                    run_one(r2, u2, d2);
                    acc.up.add(0.5 * (u1 + u2));
                    acc.down.add(0.5 * (d1 + d2));
                } else {
                    mc_detail::RngStream r(cfg.seed, static_cast<std::uint64_t>(u), false);
                    run_one(r, u1, d1);
                    acc.up.add(u1);
                    acc.down.add(d1);
                }
            }
        });
    PairAccum total;
    for (const auto& b : blocks) {
        total.up.merge(b.up);
        total.down.merge(b.down);
    }
    return {total.up.estimate(), total.down.estimate()};
}

struct FirstPassageSample {
    bool passed = false;   // tau_a^- happened before the cap / upper barrier
    double tau = 0.0;
    double x_at = 0.0;     // position at passage (== a for continuous crossing)
    bool via_jump = false;
};

/// Generic first-passage-below-a functional, optionally killed at an upper
/// barrier b; payoff maps the sample to the path value (0 if never passed).
inline PathFunctionalEstimate estimate_passage_functional(
    const HyperExpModel& m, double x0, double a, std::optional<double> upper, double t_cap,
    const SimConfig& cfg, const std::function<double(const FirstPassageSample&)>& payoff) {
    struct Visitor {
        const HyperExpModel* m;
        mc_detail::RngStream* rng;
        double a;
        bool has_upper;
        double b;
        FirstPassageSample s;
        bool killed_upper = false;
        bool diffusion(double t0, double x0, double, double x1, double h) {
            const double ssh = m->sigma * m->sigma * h;
            if (has_upper) {
                if (x1 >= b) { killed_upper = true; return false; }
                if (m->sigma > 0.0 &&
                    rng->uniform() <
                        mc_detail::bridge_down_crossing_prob(b - x0, b - x1, ssh, 0.0)) {
                    killed_upper = true;
                    return false;
                }
            }
            if (x1 < a) {
                s.passed = true;
                s.tau = t0 + h * std::min(1.0, (x0 - a) / std::max(x0 - x1, 1e-300));
                s.x_at = a;
                return false;
            }
            if (m->sigma > 0.0 &&
                rng->uniform() < mc_detail::bridge_down_crossing_prob(x0 - a, x1 - a, ssh, 0.0)) {
                s.passed = true;
                s.tau = t0 + 0.5 * h;
                s.x_at = a;
                return false;
            }
            return true;
        }
        bool jump(double t, double, double x_after) {
            if (x_after < a) {
                s.passed = true;
                s.tau = t;
                s.x_at = x_after;
                s.via_jump = true;
                return false;
            }
            return true;
        }
        void finish(double, double) {}
    };
    return mc_detail::monte_carlo_mean(cfg, [&](mc_detail::RngStream& rng) {
        Visitor vis{&m, &rng, a - x0, upper.has_value(), upper.value_or(0.0) - x0, {}, false};
        mc_detail::walk_path(m, rng, t_cap, cfg.dt, vis);
        if (!vis.s.passed) return 0.0;
        FirstPassageSample s = vis.s;
        s.x_at += x0;
        return payoff(s);
    });
}

/// Monte Carlo step-option price: e^{-rT} E[e^{-rho occ(S<=L)} (S_T-K)_+].
/// knock_out_rate = +infinity prices the hard down-and-out barrier call
/// (knocked out on touching the barrier, bridge-detected).
template <class Contract>
PathFunctionalEstimate estimate_option(const HyperExpModel& m, const Contract& contract,
                                       const SimConfig& cfg) {
    contract.validate();
    const double T = contract.maturity;
    const double level = std::log(contract.barrier / contract.spot);
    const bool hard_barrier = std::isinf(contract.knock_out_rate);

    struct Visitor {
        const HyperExpModel* m;
        mc_detail::RngStream* rng;
        double level;
        bool hard;
        double occ = 0.0;
        bool touched = false;
        double x_final = 0.0;
        bool diffusion(double, double x0, double, double x1, double h) {
            if (hard) {
                if (touched) return true;
                if (std::min(x0, x1) <= level) {
                    touched = true;
                } else if (m->sigma > 0.0 &&
                           rng->uniform() < mc_detail::bridge_down_crossing_prob(
                                                x0 - level, x1 - level, m->sigma * m->sigma * h,
                                                0.0)) {
                    touched = true;
                }
            } else {
                occ += mc_detail::step_occupation(
                    x0, x1, h, m->sigma, -std::numeric_limits<double>::infinity(), level);
            }
            return true;
        }
        bool jump(double, double, double x_after) {
            if (hard && x_after <= level) touched = true;
            return true;
        }
        void finish(double, double x) { x_final = x; }
    };

    const double disc = std::exp(-contract.rate * T);
    return mc_detail::monte_carlo_mean(cfg, [&](mc_detail::RngStream& rng) {
        Visitor vis{&m, &rng, level, hard_barrier};
        mc_detail::walk_path(m, rng, T, cfg.dt, vis);
        const double payoff = std::max(contract.spot * std::exp(vis.x_final) - contract.strike, 0.0);
        if (payoff == 0.0) return 0.0;
        const double kill = hard_barrier ? (vis.touched ? 0.0 : 1.0) : std::exp(-contract.knock_out_rate * vis.occ);
        return disc * kill * payoff;
    });
}

} // namespace snlp
