#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "snlp/errors.hpp"
#include "snlp/exp_sum.hpp"
#include "snlp/hyperexp_model.hpp"
#include "snlp/root_finding.hpp"
#include "snlp/scale_functions.hpp"

namespace snlp {

/// Closed-form machinery for the Laplace-domain joint law of (X_t, occupation
/// time).  Holds the root sets at levels p and p+q and exposes
///   H^(p,q),  the dual kernel H^(p+q,-q),  curly-W_a^(p,q),
/// the numerator/denominator brackets of the main density formula, and the
/// densities themselves.
///
/// q may be negative as long as p+q >= 0 (the pricing transform needs
/// H^(p+rho,-rho)).  |q| below 1e-8 is collapsed onto the exact q = 0
/// reductions; the same confluent fallback covers a root of level p+q
/// landing numerically on Phi(p).
class OccupationKernel {
  public:
    OccupationKernel(const HyperExpModel& model, double p, double q)
        : model_(model), p_(p), q_(q) {
        if (!(p >= 0.0)) throw std::domain_error("OccupationKernel: p must be >= 0");
        if (!(p + q >= 0.0)) throw std::domain_error("OccupationKernel: p + q must be >= 0");
        rs_p_ = roots(model_, p_);
        phi_p_ = rs_p_.phi;
        dpsi_phi_ = rs_p_.psi_prime.front();
        w_p_ = make_sum(rs_p_);
        degenerate_q_ = std::abs(q_) < 1e-8;
        if (!degenerate_q_) {
            rs_s_ = roots(model_, p_ + q_);
            w_s_ = make_sum(rs_s_);
            // H^(p,q)(x) = q sum_i e^{theta_i^(p+q) x} / ((theta_i^(p+q)-Phi(p)) psi'(theta_i^(p+q)))
            h_.rate = rs_s_.roots;
            h_.coef.resize(rs_s_.roots.size());
            for (std::size_t i = 0; i < rs_s_.roots.size(); ++i) {
                const double delta = rs_s_.roots[i] - phi_p_;
                if (std::abs(delta) < 1e-10 * std::max(1.0, std::abs(rs_s_.roots[i]))) {
                    // confluent branch: q/(theta-Phi) -> psi'(Phi) + (theta-Phi) psi''(Phi)/2
                    const double ratio =
                        dpsi_phi_ + 0.5 * delta * laplace_exponent_second_deriv(model_, phi_p_);
                    h_.coef[i] = ratio / rs_s_.psi_prime[i];
                } else {
                    h_.coef[i] = q_ / (delta * rs_s_.psi_prime[i]);
                }
            }
        } else {
            rs_s_ = rs_p_;
            w_s_ = w_p_;
        }
    }

    const HyperExpModel& model() const { return model_; }
    double p() const { return p_; }
    double q() const { return q_; }
    double phi_p() const { return phi_p_; }
    double phi_pq() const { return rs_s_.phi; }
    double psi_prime_at_phi() const { return dpsi_phi_; }
    const RootSet& roots_p() const { return rs_p_; }
    const RootSet& roots_pq() const { return rs_s_; }

    /// H^(p,q)(x); equals e^{Phi(p) x} for x < 0 and for q = 0.
    double h(double x) const {
        if (x < 0.0) return std::exp(phi_p_ * x);
        if (degenerate_q_) {
            // first-order expansion in q, exact at q = 0
            const double corr = q_ == 0.0 ? 0.0 : q_ * h_small_q_integral(x);
            return std::exp(phi_p_ * x) * (1.0 + corr);
        }
        return h_.eval(x);
    }

    /// H^(p+q,-q)(x), the kernel entering the semi-infinite density.
    double h_dual(double x) const {
        if (x < 0.0) return std::exp(rs_s_.phi * x);
        if (degenerate_q_) {
            const double corr = q_ == 0.0 ? 0.0 : -q_ * h_small_q_integral(x);
            return std::exp(rs_s_.phi * x) * (1.0 + corr);
        }
        const double phi_s = rs_s_.phi;
        double acc = 0.0;
        for (std::size_t j = 0; j < rs_p_.roots.size(); ++j) {
            const double delta = phi_s - rs_p_.roots[j];
            double ratio;
            if (std::abs(delta) < 1e-10 * std::max(1.0, std::abs(phi_s)))
                ratio = dpsi_phi_ + 0.5 * (phi_s - phi_p_) * laplace_exponent_second_deriv(model_, phi_p_);
            else
                ratio = q_ / delta;
            acc += ratio * std::exp(rs_p_.roots[j] * x) / rs_p_.psi_prime[j];
        }
        return acc;
    }

    /// First bracket of the main theorem:
    ///   N_a(x) = H(x) - q int_a^x W^(p)(x-z) H(z) dz   (a > 0).
    double numerator(double a, double x) const {
        require_positive_a(a);
        if (x <= a || degenerate_q_) return h(x);
        return h(x) - q_ * w_p_.conv_integral(h_, x, a, x);
    }

    /// Same bracket through the exact rearrangement
    ///   N_a(x) = e^{Phi(p) x} + q int_0^a W^(p)(x-z) H(z) dz.
    double numerator_alt(double a, double x) const {
        require_positive_a(a);
        const double lead = std::exp(phi_p_ * x);
        if (x <= 0.0 || degenerate_q_) return lead;
        return lead + q_ * w_p_.conv_integral(h_, x, 0.0, std::min(a, x));
    }

    /// Denominator bracket: psi'(Phi(p)) + q int_0^a e^{-Phi(p) z} H(z) dz.
    double denominator(double a) const {
        require_positive_a(a);
        if (degenerate_q_) return dpsi_phi_;
        ExpSum<double> e_phi;
        e_phi.coef = {1.0};
        e_phi.rate = {phi_p_};
        return dpsi_phi_ + q_ * e_phi.conv_integral(h_, 0.0, 0.0, a);
    }

    /// curly-W_a^(p,q)(x) for any real subscript a:
    ///   W^(p)(x) for x <= a;  W^(p+q)(x) for a <= 0;
    ///   W^(p+q)(x) - q int_0^a W^(p+q)(x-z) W^(p)(z) dz otherwise.
    double w_curly(double a, double x) const {
        if (x <= a) return eval_scale(w_p_, x);
        if (a <= 0.0 || degenerate_q_) return eval_scale(w_s_, x);
        return eval_scale(w_s_, x) - q_ * w_s_.conv_integral(w_p_, x, 0.0, a);
    }

    /// Second bracket of the main theorem:
    ///   T(x,y) = curly-W_{x-a}(x-y) - q int_0^{-y} curly-W_{x-a}(x-y-z) W^(p)(z) dz.
    double t_bracket(double a, double x, double y) const {
        require_positive_a(a);
        const double c = x - a;
        if (y >= 0.0 || degenerate_q_) return w_curly(c, x - y);
        const double m = -y, arg = x - y;
        if (c > 0.0) {
            // on [x, x-y] the curly function is the exponential sum with
            // coefficients kappa_i at the p+q roots
            ExpSum<double> curly;
            curly.rate = rs_s_.roots;
            curly.coef.resize(rs_s_.roots.size());
            for (std::size_t i = 0; i < rs_s_.roots.size(); ++i) {
                double conv = 0.0;
                for (std::size_t j = 0; j < rs_p_.roots.size(); ++j)
                    conv += exp_integral(rs_p_.roots[j] - rs_s_.roots[i], 0.0, c) /
                            rs_p_.psi_prime[j];
                curly.coef[i] = (1.0 - q_ * conv) / rs_s_.psi_prime[i];
            }
            return curly.eval(arg) - q_ * curly.conv_integral(w_p_, arg, 0.0, m);
        }
        // c <= 0: curly-W_c = W^(p+q); the W argument must stay nonnegative
        if (arg <= 0.0) return 0.0;
        return eval_scale(w_s_, arg) -
               q_ * w_s_.conv_integral(w_p_, arg, 0.0, std::min(m, arg));
    }

    /// The two brackets whose difference is the density; their common
    /// magnitude bounds the attainable absolute accuracy of the difference
    /// (far left tails subtract exponentially large, nearly equal values).
    struct DensityParts {
        double product = 0.0;
        double curly = 0.0;
        double value() const { return product - curly; }
        double noise_scale() const { return std::abs(product) + std::abs(curly); }
    };

    /// Theorem 3.2 density at (x, y) for occupation of (0, a), a > 0:
    ///   v(x,y) = e^{-Phi(p) a} N_a(x) N_a(a-y) / D_a - T(x,y).
    DensityParts density_unit_parts(double a, double x, double y) const {
        require_positive_a(a);
        if (!(p_ > 0.0)) throw std::domain_error("density: p must be > 0");
        if (q_ < 0.0) throw std::domain_error("density: q must be >= 0");
        if (degenerate_q_) return {potential_density(x, y), 0.0};
        const double product = std::exp(-phi_p_ * a) * numerator(a, x) * numerator(a, a - y) /
                               denominator(a);
        return {product, t_bracket(a, x, y)};
    }

    double density_unit(double a, double x, double y) const {
        return density_unit_parts(a, x, y).value();
    }

    /// Semi-infinite density for occupation of (-inf, b):
    ///   ((Phi(p+q)-Phi(p))/q) H^(p+q,-q)(x-b) H^(p,q)(b-y) - curly-W_{x-b}(x-y),
    /// with (Phi(p+q)-Phi(p))/q -> 1/psi'(Phi(p)) as q -> 0.
    DensityParts density_halfline_parts(double b, double x, double y) const {
        if (!(p_ > 0.0)) throw std::domain_error("density: p must be > 0");
        if (q_ < 0.0) throw std::domain_error("density: q must be >= 0");
        if (degenerate_q_) return {potential_density(x, y), 0.0};
        const double pref = (rs_s_.phi - phi_p_) / q_;
        return {pref * h_dual(x - b) * h(b - y), w_curly(x - b, x - y)};
    }

    double density_halfline(double b, double x, double y) const {
        return density_halfline_parts(b, x, y).value();
    }

    /// q = 0 reduction of either density: the p-potential density
    ///   e^{Phi(p)(x-y)}/psi'(Phi(p)) - W^(p)(x-y),
    /// evaluated with the leading root cancelled analytically so the far
    /// left tail does not suffer catastrophic cancellation.
    double potential_density(double x, double y) const {
        const double u = x - y;
        if (u < 0.0) return std::exp(phi_p_ * u) / dpsi_phi_;
        double acc = 0.0;
        for (std::size_t j = 1; j < rs_p_.roots.size(); ++j)
            acc -= std::exp(rs_p_.roots[j] * u) / rs_p_.psi_prime[j];
        return acc;
    }

  private:
    static ExpSum<double> make_sum(const RootSet& rs) {
        ExpSum<double> s;
        s.rate = rs.roots;
        s.coef.resize(rs.roots.size());
        for (std::size_t i = 0; i < rs.roots.size(); ++i) s.coef[i] = 1.0 / rs.psi_prime[i];
        return s;
    }

    static double eval_scale(const ExpSum<double>& s, double x) {
        return x < 0.0 ? 0.0 : s.eval(x);
    }

    static void require_positive_a(double a) {
        if (!(a > 0.0)) throw std::domain_error("occupation kernel: interval length must be > 0");
    }

    /// int_0^x e^{-Phi(p) z} W^(p)(z) dz, the O(q) coefficient of H near q = 0.
    double h_small_q_integral(double x) const {
        double acc = 0.0;
        for (std::size_t j = 0; j < rs_p_.roots.size(); ++j)
            acc += exp_integral(rs_p_.roots[j] - phi_p_, 0.0, x) / rs_p_.psi_prime[j];
        return acc;
    }

    HyperExpModel model_;
    double p_, q_;
    RootSet rs_p_, rs_s_;
    double phi_p_ = 0.0, dpsi_phi_ = 0.0;
    ExpSum<double> w_p_, w_s_, h_;
    bool degenerate_q_ = false;
};

// ---------------------------------------------------------------------------
// Free operations (convenience wrappers building a kernel per call)
// ---------------------------------------------------------------------------

inline double h_kernel(const HyperExpModel& m, double p, double q, double x) {
    return OccupationKernel(m, p, q).h(x);
}

/// Test-only alternate route: H^(p,q)(x) = e^{Phi(p) x} Z^(q)_{Phi(p)}(x)
/// through the explicitly tilted model.
inline double h_kernel_tilted(const HyperExpModel& m, double p, double q, double x) {
    const double c = phi(m, p);
    const HyperExpModel tilted = tilt(m, c);
    const ScaleEvaluator ev(tilted, q);
    return std::exp(c * x) * ev.z(x);
}

/// Right-hand side of the Laplace transform identity
///   int_0^inf e^{-lambda x} H^(p,q)(x) dx = (1/(lambda-Phi(p))) (1 + q/(psi(lambda)-p-q)),
/// valid for lambda > Phi(p+q).
inline double h_kernel_laplace_check(const HyperExpModel& m, double p, double q, double lam) {
    const double phi_pq = phi(m, p + q);
    if (!(lam > phi_pq))
        throw std::domain_error("h_kernel_laplace_check: lambda must exceed Phi(p+q)");
    const double phi_p = phi(m, p);
    return (1.0 + q / (laplace_exponent(m, lam) - p - q)) / (lam - phi_p);
}

inline double w_curly(const HyperExpModel& m, double p, double q, double a, double x) {
    return OccupationKernel(m, p, q).w_curly(a, x);
}

inline double joint_density_unit(const HyperExpModel& m, double p, double q, double a, double x,
                                 double y) {
    return OccupationKernel(m, p, q).density_unit(a, x, y);
}

/// Occupation of a finite interval (a, b): spatial shift of the unit form.
inline double joint_density_interval(const HyperExpModel& m, double p, double q, double a,
                                     double b, double x, double y) {
    if (!(a < b)) throw std::domain_error("joint_density_interval: need a < b");
    return OccupationKernel(m, p, q).density_unit(b - a, x - a, y - a);
}

inline double joint_density_halfline(const HyperExpModel& m, double p, double q, double b,
                                     double x, double y) {
    return OccupationKernel(m, p, q).density_halfline(b, x, y);
}

// ---------------------------------------------------------------------------
// Appendix-style first-passage functionals (closed-form right-hand sides,
// used as cross-check oracles against Monte Carlo and against each other)
// ---------------------------------------------------------------------------

struct LemmaOracles {
    // E_x[e^{-(p+q) tau_a^- + Phi(p) X_{tau_a^-}}; tau_a^- < tau_b^+], and tau_b^+ -> inf
    double exp_at_passage_two_sided = 0.0;
    double exp_at_passage = 0.0;
    // E_x[e^{-p tau_a^-} W^(q)(X_{tau_a^-} - y); ...]
    double w_at_passage_two_sided = 0.0;
    double w_at_passage = 0.0;
    // E_x[e^{-p tau_a^-} Z^(q)(X_{tau_a^-} - y); ...]
    double z_at_passage_two_sided = 0.0;
    double z_at_passage = 0.0;
    // E_x[e^{-p tau_a^-} H^(p,q)(X_{tau_a^-}); tau_a^- < inf]
    double h_at_passage = 0.0;
    // both sides of the exact kernel rearrangement identity
    double h_rearrangement_lhs = 0.0;
    double h_rearrangement_rhs = 0.0;
};

/// Evaluates every closed form at (p, q, a, b, x, y).  Hypotheses: 0 <= a <= b
/// and y <= a (the two-sided displays are only valid when the scale-function
/// argument can be nonnegative at first passage).
inline LemmaOracles lemma_oracles(const HyperExpModel& m, double p, double q, double a, double b,
                                  double x, double y) {
    if (!(a <= b)) throw std::domain_error("lemma_oracles: need a <= b");
    if (!(y <= a)) throw std::domain_error("lemma_oracles: need y <= a");
    if (!(a >= 0.0)) throw std::domain_error("lemma_oracles: need a >= 0");
    LemmaOracles out;

    const OccupationKernel ker(m, p, q); // levels p and p+q, H^(p,q)
    const ScaleEvaluator ev_p(m, p);
    const ScaleEvaluator ev_s(m, p + q);
    const double phi_p = ev_p.phi();

    // Lemma: discounted exponential of the position at first passage below a.
    out.exp_at_passage_two_sided =
        std::exp(phi_p * a) *
        (ker.h(x - a) - ker.h(b - a) / ev_s.w(b - a) * ev_s.w(x - a));
    if (q > 0.0) {
        const double phi_pq = phi(m, p + q);
        out.exp_at_passage = std::exp(phi_p * a) *
                             (ker.h(x - a) - q / (phi_pq - phi_p) * ev_s.w(x - a));
    } else {
        out.exp_at_passage = std::exp(phi_p * x) -
                             laplace_exponent_deriv(m, phi_p) * std::exp(phi_p * a) *
                                 ev_p.w(x - a);
    }

    // W^(q) / Z^(q) at first passage; here q is a scale-function level.
    const ScaleEvaluator ev_q(m, q);
    const ExpSumD w_p_sum = ev_p.w_exp_sum();
    const ExpSumD w_q_sum = ev_q.w_exp_sum();
    ExpSumD z_q_sum;
    if (q > 0.0) {
        z_q_sum = ev_q.z_exp_sum();
    } else {
        z_q_sum.coef = {1.0};
        z_q_sum.rate = {0.0};
    }
    const double u_top = a - y;
    auto conv_w = [&](double v) {
        const double hi = std::min(u_top, v - y);
        return hi <= 0.0 ? 0.0 : w_p_sum.conv_integral(w_q_sum, v - y, 0.0, hi);
    };
    auto conv_z = [&](double v) {
        const double hi = std::min(u_top, v - y);
        return hi <= 0.0 ? 0.0 : w_p_sum.conv_integral(z_q_sum, v - y, 0.0, hi);
    };

    out.w_at_passage_two_sided =
        ev_p.w(x - y) + (q - p) * conv_w(x) -
        ev_p.w(x - a) / ev_p.w(b - a) * (ev_p.w(b - y) + (q - p) * conv_w(b));
    out.w_at_passage = ev_p.w(x - y) + (q - p) * conv_w(x) -
                       ev_p.w(x - a) * h_kernel(m, p, q - p, a - y);

    // Leading terms at level p, not q: the printed display breaks at b -> inf
    // otherwise (checked against the two-sided exit identity and MC).
    out.z_at_passage_two_sided =
        ev_p.z(x - y) + (q - p) * conv_z(x) -
        ev_p.w(x - a) / ev_p.w(b - a) * (ev_p.z(b - y) + (q - p) * conv_z(b));
    {
        // e^{Phi(p)(a-y)} [ p/Phi(p) + (q-p) int_0^{a-y} e^{-Phi(p) z} Z^(q)(z) dz ]
        const double p_over_phi =
            p > 0.0 ? p / phi_p : std::max(laplace_exponent_deriv(m, 0.0), 0.0);
        ExpSumD e_phi;
        e_phi.coef = {1.0};
        e_phi.rate = {phi_p};
        const double zint = u_top <= 0.0 ? 0.0 : e_phi.conv_integral(z_q_sum, 0.0, 0.0, u_top);
        out.z_at_passage = ev_p.z(x - y) + (q - p) * conv_z(x) -
                           ev_p.w(x - a) * std::exp(phi_p * u_top) *
                               (p_over_phi + (q - p) * zint);
    }

    // H^(p,q) at first passage and the rearrangement identity.
    if (a > 0.0) {
        out.h_at_passage = ker.numerator(a, x) -
                           ev_p.w(x - a) * std::exp(phi_p * a) * ker.denominator(a);
        out.h_rearrangement_lhs = ker.numerator(a, x);
        out.h_rearrangement_rhs = ker.numerator_alt(a, x);
    } else {
        out.h_at_passage = ker.h(x) - ev_p.w(x) * laplace_exponent_deriv(m, phi_p);
        out.h_rearrangement_lhs = ker.h(x);
        out.h_rearrangement_rhs = ker.h(x);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Density slices
// ---------------------------------------------------------------------------

struct OccupationInterval {
    bool is_finite = true;
    double a = 0.0; // ignored for half-line
    double b = 1.0;

    static OccupationInterval finite_interval(double a, double b) {
        if (!(a < b)) throw std::domain_error("OccupationInterval: need a < b");
        return {true, a, b};
    }
    static OccupationInterval half_line_below(double b) { return {false, 0.0, b}; }
};

struct TransformQuery {
    double p = 1.0;
    double q = 0.0;
    OccupationInterval interval;
    double x = 0.0;

    void validate() const {
        if (!(p > 0.0)) throw std::domain_error("TransformQuery: p must be > 0");
        if (!(q >= 0.0)) throw std::domain_error("TransformQuery: q must be >= 0");
        if (interval.is_finite && !(interval.a < interval.b))
            throw std::domain_error("TransformQuery: need a < b");
    }
};

/// Density of the occupation-time query at a single terminal point y.
inline double joint_density(const HyperExpModel& m, const TransformQuery& query, double y) {
    query.validate();
    if (query.interval.is_finite)
        return joint_density_interval(m, query.p, query.q, query.interval.a, query.interval.b,
                                      query.x, y);
    return joint_density_halfline(m, query.p, query.q, query.interval.b, query.x, y);
}

struct DensitySlice {
    TransformQuery query;
    std::vector<double> grid;   // ascending y
    std::vector<double> values; // clipped at 0 for round-off negatives
    double total_mass = 0.0;    // composite Simpson over the grid + exponential tails
    long negative_clipped = 0;  // grid points clipped in [-1e-9, 0)
    long negative_flagged = 0;  // grid points below -1e-9
    double min_raw_value = 0.0; // most negative value above the round-off floor
};

/// Evaluate a y-grid of the density.  Default grid: 513 uniform points on
/// [x - 8 s sqrt(1/p), x + 8 s sqrt(1/p)] with s^2 = Var[X_1].
inline DensitySlice evaluate_density_slice(const HyperExpModel& m, const TransformQuery& query,
                                           std::size_t grid_points = 513,
                                           std::optional<double> y_lo = std::nullopt,
                                           std::optional<double> y_hi = std::nullopt) {
    query.validate();
    if (grid_points < 3) throw std::domain_error("evaluate_density_slice: need >= 3 grid points");
    const double span = 8.0 * std::sqrt(variance_rate(m) / query.p);
    const double lo = y_lo.value_or(query.x - span);
    const double hi = y_hi.value_or(query.x + span);
    if (!(lo < hi)) throw std::domain_error("evaluate_density_slice: empty y-range");

    const OccupationKernel kernel(m, query.p, query.q);
    DensitySlice slice;
    slice.query = query;
    slice.grid.resize(grid_points);
    slice.values.resize(grid_points);
    const double h = (hi - lo) / static_cast<double>(grid_points - 1);
    double min_raw = 0.0;
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double y = lo + h * static_cast<double>(i);
        OccupationKernel::DensityParts parts;
        if (query.interval.is_finite)
            parts = kernel.density_unit_parts(query.interval.b - query.interval.a,
                                              query.x - query.interval.a, y - query.interval.a);
        else
            parts = kernel.density_halfline_parts(query.interval.b, query.x, y);
        double v = parts.value();
        // round-off floor: the difference cannot be resolved below the scale
        // of the two brackets times machine epsilon
        const double noise = 1e-12 * parts.noise_scale();
        if (std::abs(v) <= noise) v = 0.0;
        min_raw = std::min(min_raw, v);
        if (v < 0.0) {
            if (v < -std::max(1e-9, noise)) ++slice.negative_flagged; else ++slice.negative_clipped;
            v = 0.0;
        }
        slice.grid[i] = y;
        slice.values[i] = v;
    }
    slice.min_raw_value = min_raw;

    // composite Simpson (falls back to trapezoid on the last panel if even count)
    double mass = 0.0;
    std::size_t i = 0;
    while (i + 2 < grid_points) {
        mass += h / 3.0 * (slice.values[i] + 4.0 * slice.values[i + 1] + slice.values[i + 2]);
        i += 2;
    }
    if (i + 1 < grid_points) mass += 0.5 * h * (slice.values[i] + slice.values[i + 1]);

    // analytic exponential tails
    const double upper_edge = query.interval.b;
    if (slice.grid.back() > std::max(query.x, upper_edge) && kernel.phi_p() > 0.0)
        mass += slice.values.back() / kernel.phi_p();
    if (slice.values.front() > 0.0 && slice.values[1] > slice.values.front()) {
        const double rate = std::log(slice.values[1] / slice.values.front()) / h;
        if (rate > 1e-12) mass += slice.values.front() / rate;
    }
    slice.total_mass = mass;
    return slice;
}

/// CSV: `#`-prefixed metadata, a `y,density` header, rows in increasing y,
/// floats with 17 significant digits.
inline void write_density_csv(const DensitySlice& s, std::ostream& os,
                              const std::string& model_hash) {
    char buf[64];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    os << "# p=" << fmt(s.query.p) << "\n";
    os << "# q=" << fmt(s.query.q) << "\n";
    if (s.query.interval.is_finite)
        os << "# interval=(" << fmt(s.query.interval.a) << "," << fmt(s.query.interval.b) << ")\n";
    else
        os << "# interval=(-inf," << fmt(s.query.interval.b) << ")\n";
    os << "# x=" << fmt(s.query.x) << "\n";
    os << "# model=" << model_hash << "\n";
    os << "y,density\n";
    for (std::size_t i = 0; i < s.grid.size(); ++i)
        os << fmt(s.grid[i]) << "," << fmt(s.values[i]) << "\n";
}

} // namespace snlp
