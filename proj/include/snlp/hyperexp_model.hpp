#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace snlp {

/// Hyper-exponential jump-diffusion:
///   X_t = c t + sigma B_t - sum_{i<=N_t} xi_i,
/// N a Poisson process with intensity eta, xi iid with density
/// sum_i a_i alpha_i e^{-alpha_i y} on y > 0.
///
/// Spectrally negative, non-monotone; the only model with closed-form
/// scale functions used here.  n = 0 (pure Brownian with drift) requires
/// sigma > 0 and eta = 0.
struct HyperExpModel {
    double drift_c = 0.0;
    double sigma = 0.0;
    double eta = 0.0;
    std::vector<double> weights; // a_1..a_n, sum to 1
    std::vector<double> rates;   // 0 < alpha_1 < ... < alpha_n

    std::size_t n_jump_terms() const { return rates.size(); }

    /// Number of roots of psi(lambda) = q:  (n+1) + 1{sigma>0}.
    std::size_t n_roots() const { return rates.size() + 1 + (sigma > 0.0 ? 1 : 0); }

    void validate() const {
        if (!(sigma >= 0.0)) throw std::invalid_argument("model: sigma must be >= 0");
        if (weights.size() != rates.size())
            throw std::invalid_argument("model: weights and rates must have equal length");
        const std::size_t n = rates.size();
        if (n == 0) {
            if (!(sigma > 0.0))
                throw std::invalid_argument("model: n = 0 (no jumps) requires sigma > 0");
            if (eta != 0.0)
                throw std::invalid_argument("model: n = 0 requires eta = 0");
        } else {
            if (!(eta > 0.0)) throw std::invalid_argument("model: eta must be > 0 when jumps are present");
            double wsum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (!(weights[i] > 0.0))
                    throw std::invalid_argument("model: every jump weight must be > 0");
                wsum += weights[i];
                if (!(rates[i] > 0.0))
                    throw std::invalid_argument("model: every jump rate must be > 0");
                if (i > 0 && !(rates[i] > rates[i - 1]))
                    throw std::invalid_argument("model: jump rates must be strictly increasing");
            }
            if (std::abs(wsum - 1.0) > 1e-12)
                throw std::invalid_argument("model: jump weights must sum to 1 (got " +
                                            std::to_string(wsum) + ")");
        }
        if (sigma == 0.0 && !(drift_c > 0.0))
            throw std::invalid_argument("model: sigma = 0 requires drift_c > 0 (non-monotone BV path)");
        if (!std::isfinite(drift_c) || !std::isfinite(sigma) || !std::isfinite(eta))
            throw std::invalid_argument("model: parameters must be finite");
    }

    bool bounded_variation() const { return sigma == 0.0; }
};

namespace detail {
inline void check_pole_distance(const HyperExpModel& m, double dist_sq) {
    (void)m;
    if (dist_sq < 1e-18)
        throw std::domain_error("laplace_exponent: lambda within 1e-9 of a pole -alpha_i");
}

/// psi extended to R minus the poles (the rational function the root set
/// interlaces); the public operation is restricted to lambda > -alpha_1.
inline double psi_extended(const HyperExpModel& m, double lam) {
    double jump = 0.0;
    for (std::size_t i = 0; i < m.rates.size(); ++i) {
        const double d = lam + m.rates[i];
        check_pole_distance(m, d * d);
        jump += m.weights[i] * m.rates[i] / d;
    }
    const double jump_part = m.rates.empty() ? 0.0 : m.eta * (jump - 1.0);
    return m.drift_c * lam + 0.5 * m.sigma * m.sigma * lam * lam + jump_part;
}

inline double psi_deriv_extended(const HyperExpModel& m, double lam) {
    double jump = 0.0;
    for (std::size_t i = 0; i < m.rates.size(); ++i) {
        const double d = lam + m.rates[i];
        check_pole_distance(m, d * d);
        jump += m.weights[i] * m.rates[i] / (d * d);
    }
    return m.drift_c + m.sigma * m.sigma * lam - m.eta * jump;
}

/// Long-double variants for the final polish: near-pole roots are sensitive
/// enough that the last Newton step must be taken above double precision to
/// land on the best representable double.
inline long double psi_extended_ld(const HyperExpModel& m, long double lam) {
    long double jump = 0.0L;
    for (std::size_t i = 0; i < m.rates.size(); ++i)
        jump += static_cast<long double>(m.weights[i]) * m.rates[i] / (lam + m.rates[i]);
    const long double jump_part = m.rates.empty() ? 0.0L : m.eta * (jump - 1.0L);
    return m.drift_c * lam + 0.5L * m.sigma * m.sigma * lam * lam + jump_part;
}

inline long double psi_deriv_extended_ld(const HyperExpModel& m, long double lam) {
    long double jump = 0.0L;
    for (std::size_t i = 0; i < m.rates.size(); ++i) {
        const long double d = lam + m.rates[i];
        jump += static_cast<long double>(m.weights[i]) * m.rates[i] / (d * d);
    }
    return m.drift_c + m.sigma * m.sigma * lam - m.eta * jump;
}
} // namespace detail

/// psi(lambda) = c lambda + sigma^2 lambda^2 / 2 + eta (sum_i a_i alpha_i/(lambda+alpha_i) - 1)
inline double laplace_exponent(const HyperExpModel& m, double lam) {
    if (!m.rates.empty() && !(lam > -m.rates.front()))
        throw std::domain_error("laplace_exponent: lambda must exceed -alpha_1");
    double jump = 0.0;
    for (std::size_t i = 0; i < m.rates.size(); ++i) {
        const double d = lam + m.rates[i];
        detail::check_pole_distance(m, d * d);
        jump += m.weights[i] * m.rates[i] / d;
    }
    const double jump_part = m.rates.empty() ? 0.0 : m.eta * (jump - 1.0);
    return m.drift_c * lam + 0.5 * m.sigma * m.sigma * lam * lam + jump_part;
}

/// Analytic continuation off the real axis (poles excluded).
inline std::complex<double> laplace_exponent(const HyperExpModel& m, std::complex<double> lam) {
    std::complex<double> jump{};
    for (std::size_t i = 0; i < m.rates.size(); ++i) {
        const std::complex<double> d = lam + m.rates[i];
        detail::check_pole_distance(m, std::norm(d));
        jump += m.weights[i] * m.rates[i] / d;
    }
    const std::complex<double> jump_part =
        m.rates.empty() ? std::complex<double>{} : m.eta * (jump - 1.0);
    return m.drift_c * lam + 0.5 * m.sigma * m.sigma * lam * lam + jump_part;
}

/// psi'(lambda) = c + sigma^2 lambda - eta sum_i a_i alpha_i/(lambda+alpha_i)^2
inline double laplace_exponent_deriv(const HyperExpModel& m, double lam) {
    if (!m.rates.empty() && !(lam > -m.rates.front()))
        throw std::domain_error("laplace_exponent_deriv: lambda must exceed -alpha_1");
    double jump = 0.0;
    for (std::size_t i = 0; i < m.rates.size(); ++i) {
        const double d = lam + m.rates[i];
        detail::check_pole_distance(m, d * d);
        jump += m.weights[i] * m.rates[i] / (d * d);
    }
    return m.drift_c + m.sigma * m.sigma * lam - m.eta * jump;
}

inline std::complex<double> laplace_exponent_deriv(const HyperExpModel& m,
                                                   std::complex<double> lam) {
    std::complex<double> jump{};
    for (std::size_t i = 0; i < m.rates.size(); ++i) {
        const std::complex<double> d = lam + m.rates[i];
        detail::check_pole_distance(m, std::norm(d));
        jump += m.weights[i] * m.rates[i] / (d * d);
    }
    return m.drift_c + m.sigma * m.sigma * lam - m.eta * jump;
}

/// psi''(lambda) = sigma^2 + 2 eta sum_i a_i alpha_i/(lambda+alpha_i)^3; strictly
/// positive on (-alpha_1, inf).
inline double laplace_exponent_second_deriv(const HyperExpModel& m, double lam) {
    if (!m.rates.empty() && !(lam > -m.rates.front()))
        throw std::domain_error("laplace_exponent_second_deriv: lambda must exceed -alpha_1");
    double jump = 0.0;
    for (std::size_t i = 0; i < m.rates.size(); ++i) {
        const double d = lam + m.rates[i];
        jump += m.weights[i] * m.rates[i] / (d * d * d);
    }
    return m.sigma * m.sigma + 2.0 * m.eta * jump;
}

/// E[X_1] = psi'(0+) = c - eta sum_i a_i/alpha_i
inline double mean_rate(const HyperExpModel& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.rates.size(); ++i) s += m.weights[i] / m.rates[i];
    return m.drift_c - m.eta * s;
}

/// Var[X_1] = sigma^2 + eta E[xi^2] = sigma^2 + 2 eta sum_i a_i/alpha_i^2
inline double variance_rate(const HyperExpModel& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.rates.size(); ++i)
        s += m.weights[i] / (m.rates[i] * m.rates[i]);
    return m.sigma * m.sigma + 2.0 * m.eta * s;
}

/// Exponential change of measure with coefficient c >= 0: the tilted process
/// is again a hyper-exponential jump-diffusion with
///   drift  c~      = c + sigma^2 c,
///   rates  alpha~_i = alpha_i + c,
///   weights a~_i   prop. a_i alpha_i / (alpha_i + c),
///   eta~           = eta sum_i a_i alpha_i / (alpha_i + c),
/// so that psi_tilted(theta) = psi(theta + c) - psi(c).
inline HyperExpModel tilt(const HyperExpModel& m, double c) {
    HyperExpModel t;
    t.drift_c = m.drift_c + m.sigma * m.sigma * c;
    t.sigma = m.sigma;
    const std::size_t n = m.rates.size();
    if (n == 0) {
        t.eta = 0.0;
        t.validate();
        return t;
    }
    std::vector<double> raw(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(m.rates[i] + c > 0.0))
            throw std::domain_error("tilt: coefficient pushes a rate below zero");
        raw[i] = m.weights[i] * m.rates[i] / (m.rates[i] + c);
        total += raw[i];
    }
    t.eta = m.eta * total;
    t.weights.resize(n);
    t.rates.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        t.weights[i] = raw[i] / total;
        t.rates[i] = m.rates[i] + c;
    }
    t.validate();
    return t;
}

} // namespace snlp
