#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace snlp {

/// phi1(w) = (e^w - 1)/w, extended continuously by phi1(0) = 1.
/// Stable through w = 0 (uses expm1), which is what makes every
/// exponential convolution below safe at coincident rates.
inline double phi1(double w) {
    if (w == 0.0) return 1.0;
    if (std::abs(w) < 1e-4) {
        // series: 1 + w/2 + w^2/6 + w^3/24
        return 1.0 + w * (0.5 + w * (1.0 / 6.0 + w / 24.0));
    }
    return std::expm1(w) / w;
}

inline std::complex<double> phi1(std::complex<double> w) {
    if (std::abs(w) < 1e-4) {
        return 1.0 + w * (0.5 + w * (1.0 / 6.0 + w / 24.0));
    }
    return (std::exp(w) - 1.0) / w;
}

/// eint(u, lo, hi) = ∫_lo^hi e^{u z} dz  =  (hi-lo) e^{u lo} phi1(u (hi-lo)).
template <class S>
S exp_integral(S u, double lo, double hi) {
    const double len = hi - lo;
    return len * std::exp(u * S(lo)) * phi1(u * S(len));
}

/// A finite sum of exponentials x -> sum_i coef[i] * e^{rate[i] * x}.
/// The closed-form representation of every scale-type function of a
/// hyper-exponential jump-diffusion on a half line.
template <class S>
struct ExpSum {
    std::vector<S> coef;
    std::vector<S> rate;

    std::size_t size() const { return coef.size(); }

    S eval(double x) const {
        S acc{};
        for (std::size_t i = 0; i < coef.size(); ++i)
            acc += coef[i] * std::exp(rate[i] * S(x));
        return acc;
    }

    /// ∫_lo^hi f(x - z) g(z) dz for f = *this evaluated at shifted argument,
    /// g another exponential sum; every term is an exp_integral.
    S conv_integral(const ExpSum& g, double x, double lo, double hi) const {
        if (hi <= lo) return S{};
        S acc{};
        for (std::size_t i = 0; i < coef.size(); ++i) {
            const S fx = coef[i] * std::exp(rate[i] * S(x));
            for (std::size_t j = 0; j < g.coef.size(); ++j)
                acc += fx * g.coef[j] * exp_integral(g.rate[j] - rate[i], lo, hi);
        }
        return acc;
    }
};

using ExpSumD = ExpSum<double>;

} // namespace snlp
