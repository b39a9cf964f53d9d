#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "snlp/errors.hpp"
#include "snlp/exp_sum.hpp"
#include "snlp/hyperexp_model.hpp"
#include "snlp/laplace_inversion.hpp"
#include "snlp/root_finding.hpp"

namespace snlp {

/// Down-and-out call step option: payoff e^{-rho * time below L} (S_T - K)_+.
struct StepOptionContract {
    double spot = 0.0;          // S_0
    double strike = 0.0;        // K
    double barrier = 0.0;       // L
    double knock_out_rate = 0.0; // rho, per unit time
    double rate = 0.0;          // r, per unit time
    double maturity = 1.0;      // T, years

    void validate() const {
        if (!(spot > 0.0 && strike > 0.0 && barrier > 0.0))
            throw std::invalid_argument("contract: spot, strike, barrier must be > 0");
        if (!(spot > barrier))
            throw std::invalid_argument("contract: requires S0 > L (down-and-out case)");
        if (!(strike > barrier))
            throw std::invalid_argument("contract: requires K > L (down-and-out case)");
        if (!(knock_out_rate >= 0.0))
            throw std::invalid_argument("contract: knock-out rate must be >= 0");
        if (!(rate >= 0.0)) throw std::invalid_argument("contract: rate must be >= 0");
        if (!(maturity > 0.0)) throw std::invalid_argument("contract: maturity must be > 0");
    }
};

/// The library prices under the model as given; this flags models whose
/// measure is not risk-neutral for rate r (psi(1) != r).
inline bool is_martingale_measure(const HyperExpModel& m, double r, double tol = 1e-8) {
    return std::abs(laplace_exponent(m, 1.0) - r) <= tol;
}

namespace detail {

constexpr double kRhoLimitSwitch = 1e-10;

/// Root data needed by the r=0 transform at argument p: the full level-p set
/// and Phi(p + rho).
template <class S>
struct PricingRootData {
    std::vector<S> theta; // level p, descending continuation order
    std::vector<S> dpsi;
    S phi_p{};
    S phi_prho{};
    S dpsi_phi{}; // psi'(Phi(p)), for the rho -> 0 limit
};

/// Laplace transform in maturity of the r = 0 step-option price, general
/// form: prefactor * H^(p+rho,-rho)(ln(S0/L)) * K (L/K)^Phi(p) minus the
/// in-the-money correction integral; H expressed through its integral
/// representation so this route shares nothing with the closed-form sums
/// beyond the roots themselves.
template <class S>
S step_option_lt_general_impl(const StepOptionContract& c, const PricingRootData<S>& rd) {
    const double ell = std::log(c.spot / c.barrier);
    const S phi = rd.phi_p, phi_rho = rd.phi_prho;
    const double rho = c.knock_out_rate;

    // H^(p+rho,-rho)(ell) = (S0/L)^{Phi(p+rho)} (1 - rho int_0^ell e^{-Phi(p+rho) y} W^(p)(y) dy)
    S i1{};
    for (std::size_t j = 0; j < rd.theta.size(); ++j)
        i1 += exp_integral(rd.theta[j] - phi_rho, 0.0, ell) / rd.dpsi[j];
    const S h_dual = std::exp(phi_rho * S(ell)) * (S(1.0) - S(rho) * i1);

    S pref;
    if (rho < kRhoLimitSwitch)
        pref = S(1.0) / (rd.dpsi_phi * phi * (phi - S(1.0)));
    else
        pref = (phi_rho - phi) / (S(rho) * phi * (phi - S(1.0)));

    S corr{};
    if (c.spot > c.strike) {
        const double k = std::log(c.spot / c.strike);
        for (std::size_t j = 0; j < rd.theta.size(); ++j)
            corr += (c.spot * exp_integral(rd.theta[j] - S(1.0), 0.0, k) -
                     c.strike * exp_integral(rd.theta[j], 0.0, k)) /
                    rd.dpsi[j];
    }
    return pref * h_dual * S(c.strike) * std::exp(phi * S(std::log(c.barrier / c.strike))) - corr;
}

/// Closed-form HEJD route (partial-fraction sums; i = 1 cancels in the
/// in-the-money branch).
template <class S>
S step_option_lt_hejd_impl(const StepOptionContract& c, const PricingRootData<S>& rd) {
    const S phi = rd.phi_p, phi_rho = rd.phi_prho;
    const double rho = c.knock_out_rate;
    const double K = c.strike;
    const double log_LK = std::log(c.barrier / c.strike);
    const double log_SL = std::log(c.spot / c.barrier);
    const double log_SK = std::log(c.spot / c.strike);

    if (rho < kRhoLimitSwitch) {
        // vanilla-call transform: limit (Phi(p+rho)-Phi(p))/rho -> 1/psi'(Phi(p))
        S v = K * std::exp(phi * S(log_SK)) /
              (phi * (phi - S(1.0)) * rd.dpsi_phi);
        if (c.spot > c.strike) {
            for (std::size_t i = 0; i < rd.theta.size(); ++i)
                v -= K * std::exp(rd.theta[i] * S(log_SK)) /
                         (rd.theta[i] * (rd.theta[i] - S(1.0)) * rd.dpsi[i]) -
                     c.spot / ((rd.theta[i] - S(1.0)) * rd.dpsi[i]) +
                     K / (rd.theta[i] * rd.dpsi[i]);
        }
        return v;
    }

    const S dphi = phi_rho - phi;
    if (c.spot > c.strike) {
        // The partial-fraction expansion of the in-the-money correction
        // integral leaves the constant S0/(p - psi(1)) - K/p behind
        // (sum 1/((theta-1) psi') = 1/(p - psi(1)), sum 1/(theta psi') = 1/p);
        // without it the transform would jump at K = S0.
        S acc{};
        for (std::size_t i = 1; i < rd.theta.size(); ++i) { // sum starts at i = 2
            const S th = rd.theta[i];
            const S first = dphi / ((phi_rho - th) * phi * (phi - S(1.0))) *
                            std::exp(phi * S(log_LK) + th * S(log_SL));
            const S second = std::exp(th * S(log_SK)) / (th * (th - S(1.0)));
            acc += (first - second) / rd.dpsi[i];
        }
        S sum_inv_theta{}, sum_inv_theta_m1{};
        for (std::size_t i = 0; i < rd.theta.size(); ++i) {
            sum_inv_theta += S(1.0) / (rd.theta[i] * rd.dpsi[i]);
            sum_inv_theta_m1 += S(1.0) / ((rd.theta[i] - S(1.0)) * rd.dpsi[i]);
        }
        return S(K) * acc + c.spot * sum_inv_theta_m1 - S(K) * sum_inv_theta;
    }
    // K >= S0 > L
    S acc{};
    for (std::size_t i = 0; i < rd.theta.size(); ++i)
        acc += std::exp(phi * S(log_LK) + rd.theta[i] * S(log_SL)) /
               ((phi_rho - rd.theta[i]) * rd.dpsi[i]);
    return S(K) * dphi / (phi * (phi - S(1.0))) * acc;
}

} // namespace detail

enum class PricingRoute { hejd_closed_form, general };

/// Evaluates the r = 0 transform p -> int e^{-pT} C(T) dT on the real axis or
/// along a complex contour (roots tracked by analytic continuation, so
/// complex calls should walk a contour in order).  One instance per thread.
class StepOptionTransform {
  public:
    StepOptionTransform(HyperExpModel model, StepOptionContract contract,
                        PricingRoute route = PricingRoute::hejd_closed_form)
        : m_(std::move(model)), c_(contract), route_(route), track_p_(m_), track_prho_(m_) {
        c_.validate();
        psi_one_ = laplace_exponent(m_, 1.0);
    }

    double psi_one() const { return psi_one_; }

    double operator()(double p) {
        if (!(p > psi_one_ + 1e-9))
            throw AbscissaTooSmall("step option transform: need p > psi(1), got p = " +
                                   std::to_string(p));
        const RootSet rp = roots(m_, p);
        detail::PricingRootData<double> rd;
        rd.theta = rp.roots;
        rd.dpsi = rp.psi_prime;
        rd.phi_p = rp.phi;
        rd.phi_prho = c_.knock_out_rate > 0.0 ? phi(m_, p + c_.knock_out_rate) : rp.phi;
        rd.dpsi_phi = rp.psi_prime.front();
        return route_ == PricingRoute::hejd_closed_form
                   ? detail::step_option_lt_hejd_impl(c_, rd)
                   : detail::step_option_lt_general_impl(c_, rd);
    }

    std::complex<double> operator()(std::complex<double> p) {
        const auto& th = track_p_.move_to(p);
        detail::PricingRootData<std::complex<double>> rd;
        rd.theta = th;
        rd.dpsi = track_p_.psi_prime_values();
        rd.phi_p = th.front();
        if (c_.knock_out_rate > 0.0) {
            track_prho_.move_to(p + c_.knock_out_rate);
            rd.phi_prho = track_prho_.phi_value();
        } else {
            rd.phi_prho = rd.phi_p;
        }
        rd.dpsi_phi = laplace_exponent_deriv(m_, rd.phi_p);
        return route_ == PricingRoute::hejd_closed_form
                   ? detail::step_option_lt_hejd_impl(c_, rd)
                   : detail::step_option_lt_general_impl(c_, rd);
    }

  private:
    HyperExpModel m_;
    StepOptionContract c_;
    PricingRoute route_;
    ComplexRootTracker track_p_, track_prho_;
    double psi_one_ = 0.0;
};

/// Scalar transform values (spec operations).
inline double step_option_lt_general(const HyperExpModel& m, const StepOptionContract& c,
                                     double p) {
    StepOptionTransform t(m, c, PricingRoute::general);
    return t(p);
}

inline double step_option_lt_hejd(const HyperExpModel& m, const StepOptionContract& c, double p) {
    StepOptionTransform t(m, c, PricingRoute::hejd_closed_form);
    return t(p);
}

struct PriceCurve {
    std::vector<double> maturities;
    std::vector<double> prices;
    std::vector<double> error_estimates;
    std::string method;
};

struct PricingOptions {
    InversionMethod method = InversionMethod::talbot;
    int talbot_nodes = 32;
    // order 16 keeps the Talbot/GS cross-check inside 1e-5 out to T = 2;
    // order 14 misses that by ~1.4e-5 and 18+ hits long-double round-off
    int gs_order = 16;
    double shift_margin = 0.5;
    bool force = false; // accept points whose error estimate exceeds 1e-2 * price
    PricingRoute route = PricingRoute::hejd_closed_form;
};

/// C(T) on a maturity grid.  The rate folds in by evaluating the r = 0
/// transform at p + r; the contour is shifted right of psi(1) + r so every
/// node satisfies Phi(p) > 1.
inline PriceCurve price_step_option(const HyperExpModel& m, const StepOptionContract& contract,
                                    const std::vector<double>& maturities,
                                    const PricingOptions& opts = {}) {
    contract.validate();
    if (maturities.empty()) throw std::invalid_argument("price_step_option: no maturities");
    const double r = contract.rate;
    const double shift = laplace_exponent(m, 1.0) + r + opts.shift_margin;

    PriceCurve curve;
    curve.method = opts.method == InversionMethod::talbot ? "talbot" : "gs";
    curve.maturities = maturities;
    curve.prices.reserve(maturities.size());
    curve.error_estimates.reserve(maturities.size());

    std::string bad;
    for (double T : maturities) {
        if (!(T > 0.0)) throw std::invalid_argument("price_step_option: maturities must be > 0");
        InversionResult res;
        if (opts.method == InversionMethod::talbot) {
            StepOptionTransform transform(m, contract, opts.route);
            const ComplexTransform F = [&](std::complex<double> s) { return transform(s + r); };
            const double base = talbot_inverse(F, T, opts.talbot_nodes, shift);
            const double refined = talbot_inverse(F, T, opts.talbot_nodes * 3 / 2, shift);
            res = {base, std::abs(refined - base)};
        } else {
            StepOptionTransform transform(m, contract, opts.route);
            const RealTransform F = [&](double s) { return transform(s + r); };
            const double base = gaver_stehfest_inverse(F, T, opts.gs_order, shift);
            const double refined = gaver_stehfest_inverse(F, T, opts.gs_order + 2, shift);
            res = {base, std::abs(refined - base)};
        }
        double price = res.value;
        if (price < 0.0 && price > -(res.error_estimate + 1e-12)) price = 0.0;
        if (!opts.force && res.error_estimate > 1e-2 * std::max(std::abs(price), 1e-300))
            bad += (bad.empty() ? "" : ", ") + std::to_string(T);
        curve.prices.push_back(price);
        curve.error_estimates.push_back(res.error_estimate);
    }
    if (!bad.empty())
        throw InversionUnstable("price_step_option: error estimate exceeds 1e-2 * price at T in {" +
                                bad + "}; pass force to accept");
    return curve;
}

} // namespace snlp
