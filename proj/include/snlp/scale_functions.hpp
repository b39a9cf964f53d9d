#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "snlp/errors.hpp"
#include "snlp/exp_sum.hpp"
#include "snlp/hyperexp_model.hpp"
#include "snlp/root_finding.hpp"

namespace snlp {

/// value * exp(log_scale); overflow-safe representation for scale functions
/// evaluated far in the right tail.
struct LogScaledValue {
    double value = 0.0;
    double log_scale = 0.0;

    double to_double() const { return value * std::exp(log_scale); }
};

/// Closed-form scale functions of a hyper-exponential jump-diffusion at a
/// fixed level q:
///   W^(q)(x) = sum_i e^{theta_i x} / psi'(theta_i)  (x >= 0, 0 on x < 0)
///   Z^(q)(x) = 1 + q int_0^x W^(q)                  (= q sum_i e^{theta_i x}/(theta_i psi'(theta_i)) for q>0)
/// Immutable after construction; safe to share across threads.
class ScaleEvaluator {
  public:
    ScaleEvaluator(HyperExpModel model, double q)
        : model_(std::move(model)), q_(q), rs_(roots(model_, q)) {}

    ScaleEvaluator(HyperExpModel model, double q, RootSet precomputed)
        : model_(std::move(model)), q_(q), rs_(std::move(precomputed)) {}

    const HyperExpModel& model() const { return model_; }
    double q() const { return q_; }
    const RootSet& root_set() const { return rs_; }
    double phi() const { return rs_.phi; }

    double w(double x) const {
        if (x < 0.0) return 0.0;
        guard_overflow(x, "scale_w");
        double acc = 0.0;
        for (std::size_t i = 0; i < rs_.roots.size(); ++i)
            acc += std::exp(rs_.roots[i] * x) / rs_.psi_prime[i];
        return acc;
    }

    LogScaledValue w_log(double x) const {
        if (x < 0.0) return {0.0, 0.0};
        const double s = rs_.phi * x;
        double acc = 0.0;
        for (std::size_t i = 0; i < rs_.roots.size(); ++i)
            acc += std::exp(rs_.roots[i] * x - s) / rs_.psi_prime[i];
        return {acc, s};
    }

    double z(double x) const {
        if (x <= 0.0 || q_ == 0.0) return 1.0;
        guard_overflow(x, "scale_z");
        double acc = 0.0;
        for (std::size_t i = 0; i < rs_.roots.size(); ++i)
            acc += std::exp(rs_.roots[i] * x) / (rs_.roots[i] * rs_.psi_prime[i]);
        return q_ * acc;
    }

    LogScaledValue z_log(double x) const {
        if (x <= 0.0 || q_ == 0.0) return {1.0, 0.0};
        const double s = rs_.phi * x;
        double acc = 0.0;
        for (std::size_t i = 0; i < rs_.roots.size(); ++i)
            acc += std::exp(rs_.roots[i] * x - s) / (rs_.roots[i] * rs_.psi_prime[i]);
        return {q_ * acc, s};
    }

    /// W^(q) restricted to [0, inf) as an explicit exponential sum.
    ExpSumD w_exp_sum() const {
        ExpSumD s;
        s.coef.resize(rs_.roots.size());
        s.rate = rs_.roots;
        for (std::size_t i = 0; i < rs_.roots.size(); ++i) s.coef[i] = 1.0 / rs_.psi_prime[i];
        return s;
    }

    /// Z^(q) restricted to [0, inf) as an exponential sum (q > 0 only).
    ExpSumD z_exp_sum() const {
        if (!(q_ > 0.0)) throw std::domain_error("z_exp_sum: requires q > 0");
        ExpSumD s;
        s.coef.resize(rs_.roots.size());
        s.rate = rs_.roots;
        for (std::size_t i = 0; i < rs_.roots.size(); ++i)
            s.coef[i] = q_ / (rs_.roots[i] * rs_.psi_prime[i]);
        return s;
    }

    /// E_x[e^{-q tau_c^+}; tau_c^+ < tau_a^-] = W^(q)(x-a) / W^(q)(c-a)
    double exit_up(double x, double a, double c) const {
        check_two_sided(x, a, c);
        return w(x - a) / w(c - a);
    }

    /// E_x[e^{-q tau_a^-}; tau_a^- < tau_c^+] = Z^(q)(x-a) - Z^(q)(c-a) W^(q)(x-a)/W^(q)(c-a)
    double exit_down(double x, double a, double c) const {
        check_two_sided(x, a, c);
        return z(x - a) - z(c - a) / w(c - a) * w(x - a);
    }

    /// Density of the q-potential measure killed on exiting [0, a].
    double potential_two_sided(double x, double y, double a) const {
        if (!(a > 0.0) || x < 0.0 || x > a || y < 0.0 || y > a)
            throw std::domain_error("potential_two_sided: need 0 <= x,y <= a");
        return w(x) * w(a - y) / w(a) - w(x - y);
    }

    /// Density of the q-potential measure killed on exiting (-inf, a].
    double potential_upper_killed(double x, double y, double a) const {
        if (x > a || y > a)
            throw std::domain_error("potential_upper_killed: need x,y <= a");
        return std::exp(rs_.phi * (x - a)) * w(a - y) - w(x - y);
    }

    /// Density of the q-potential measure killed on exiting [a, inf);
    /// the indicator 1{x,y >= a} is built in.
    double potential_lower_killed(double x, double y, double a) const {
        if (x < a || y < a) return 0.0;
        return std::exp(-rs_.phi * (y - a)) * w(x - a) - w(x - y);
    }

  private:
    void guard_overflow(double x, const char* who) const {
        if (rs_.phi * x > 700.0)
            throw std::overflow_error(std::string(who) +
                                      ": theta_1 * x > 700, use the log-scaled variant");
    }

    static void check_two_sided(double x, double a, double c) {
        if (!(a < c) || x < a || x > c)
            throw std::domain_error("exit identity: need a <= x <= c, a < c");
    }

    HyperExpModel model_;
    double q_;
    RootSet rs_;
};

} // namespace snlp
