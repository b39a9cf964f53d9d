#pragma once

#include <cmath>
#include <numbers>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "snlp/errors.hpp"

namespace snlp {

using ComplexTransform = std::function<std::complex<double>(std::complex<double>)>;
using RealTransform = std::function<double(double)>;

/// Fixed-Talbot inversion (Abate & Valko) with an optional rightward contour
/// shift:  f(t) = e^{shift t} * InvLT[ F(shift + .) ](t).
/// The shift keeps every node right of the transform's abscissa when the
/// rightmost singularity is positive.
inline double talbot_inverse(const ComplexTransform& F, double t, int nodes, double shift = 0.0) {
    if (!(t > 0.0)) throw std::domain_error("talbot_inverse: t must be > 0");
    const int M = nodes;
    const double r = 2.0 * M / (5.0 * t);
    // theta = 0 node is real
    double acc = 0.5 * std::exp(r * t) * F(std::complex<double>(shift + r, 0.0)).real();
    for (int k = 1; k < M; ++k) {
        const double th = k * std::numbers::pi / M;
        const double cot = std::cos(th) / std::sin(th);
        const std::complex<double> s(r * th * cot, r * th);
        const double sigma = th + (th * cot - 1.0) * cot;
        const std::complex<double> weight(1.0, sigma);
        acc += (std::exp(s * t) * F(shift + s) * weight).real();
    }
    return std::exp(shift * t) * (r / M) * acc;
}

namespace detail {

/// Gaver-Stehfest weights zeta_k, k = 1..order (order even).  Accumulated in
/// long double; exact integer arithmetic fits for the orders used here.
inline std::vector<long double> gaver_stehfest_weights(int order) {
    if (order % 2 != 0 || order < 2)
        throw std::domain_error("gaver_stehfest: order must be a positive even integer");
    const int half = order / 2;
    auto binomial = [](int n, int k) -> long double {
        if (k < 0 || k > n) return 0.0L;
        long double v = 1.0L;
        for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
        return v;
    };
    long double half_fact = 1.0L;
    for (int i = 2; i <= half; ++i) half_fact *= i;
    std::vector<long double> zeta(order + 1, 0.0L);
    for (int k = 1; k <= order; ++k) {
        long double sum = 0.0L;
        const int j_lo = (k + 1) / 2;
        const int j_hi = std::min(k, half);
        for (int j = j_lo; j <= j_hi; ++j) {
            long double term = 1.0L;
            for (int i = 0; i < half + 1; ++i) term *= j; // j^(half+1)
            term /= half_fact;
            term *= binomial(half, j) * binomial(2 * j, j) * binomial(j, k - j);
            sum += term;
        }
        zeta[k] = ((k + half) % 2 == 0 ? 1.0L : -1.0L) * sum;
    }
    return zeta;
}

} // namespace detail

/// Gaver-Stehfest inversion on the real axis:
///   f(t) ~ (ln 2 / t) sum_k zeta_k F(k ln 2 / t),
/// shifted like talbot_inverse.  Extended-precision accumulation.
inline double gaver_stehfest_inverse(const RealTransform& F, double t, int order,
                                     double shift = 0.0) {
    if (!(t > 0.0)) throw std::domain_error("gaver_stehfest_inverse: t must be > 0");
    const std::vector<long double> zeta = detail::gaver_stehfest_weights(order);
    const long double ln2_t = std::log(2.0L) / t;
    long double acc = 0.0L;
    for (int k = 1; k <= order; ++k)
        acc += zeta[k] * static_cast<long double>(F(shift + static_cast<double>(k * ln2_t)));
    return static_cast<double>(std::exp(static_cast<long double>(shift) * t) * ln2_t * acc);
}

enum class InversionMethod { talbot, gaver_stehfest };

struct InversionOptions {
    int talbot_nodes = 32;
    int gs_order = 16;
    double shift = 0.0;
    double unstable_rel_tol = 1e-3;
};

struct InversionResult {
    double value = 0.0;
    double error_estimate = 0.0; // |refined - base|
};

/// Invert with the requested method and estimate the error by order
/// refinement (N vs 3N/2 Talbot nodes, M vs M+2 Gaver-Stehfest terms).
/// The base-order value is returned: fixed-Talbot round-off grows like
/// e^{2M/5}, so the refinement run serves as an error probe only.
/// Throws InversionUnstable when the refinements disagree beyond
/// opts.unstable_rel_tol relative.
inline InversionResult invert_laplace(const ComplexTransform& complex_fn,
                                      const RealTransform& real_fn, double t,
                                      InversionMethod method,
                                      const InversionOptions& opts = {}) {
    double base = 0.0, refined = 0.0;
    if (method == InversionMethod::talbot) {
        if (!complex_fn) throw std::invalid_argument("invert_laplace: talbot needs a complex transform");
        base = talbot_inverse(complex_fn, t, opts.talbot_nodes, opts.shift);
        refined = talbot_inverse(complex_fn, t, opts.talbot_nodes * 3 / 2, opts.shift);
    } else {
        if (!real_fn) throw std::invalid_argument("invert_laplace: gaver_stehfest needs a real transform");
        base = gaver_stehfest_inverse(real_fn, t, opts.gs_order, opts.shift);
        refined = gaver_stehfest_inverse(real_fn, t, opts.gs_order + 2, opts.shift);
    }
    const double err = std::abs(refined - base);
    const double scale = std::max({std::abs(refined), std::abs(base), 1e-300});
    if (err > opts.unstable_rel_tol * scale)
        throw InversionUnstable("invert_laplace: refinement disagreement " + std::to_string(err) +
                                " at t = " + std::to_string(t));
    return {base, err};
}

/// W^(q)(x) for a generic spectrally negative Levy process given only its
/// Laplace exponent: Talbot inversion of 1/(psi(lambda) - q) shifted right of
/// Phi(q).  Fallback path for non-HEJD models and the independent oracle for
/// the closed forms.
inline double scale_w_generic(const ComplexTransform& psi_fn, double q, double x,
                              int nodes = 32) {
    if (x < 0.0) return 0.0;
    const double x_eval = (x == 0.0) ? 1e-8 : x; // small-x limit at the origin
    // locate Phi(q) on the real axis from psi alone
    double hi = 1.0;
    auto psi_real = [&](double lam) { return psi_fn(std::complex<double>(lam, 0.0)).real(); };
    for (int it = 0; it < 400 && psi_real(hi) <= q; ++it) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (psi_real(mid) > q ? hi : lo) = mid;
        if (hi - lo < 1e-12 * std::max(1.0, hi)) break;
    }
    const double shift = hi; // just right of Phi(q)
    const ComplexTransform F = [&](std::complex<double> s) { return 1.0 / (psi_fn(s) - q); };
    const double base = talbot_inverse(F, x_eval, nodes, shift);
    const double refined = talbot_inverse(F, x_eval, nodes * 3 / 2, shift);
    const double err = std::abs(refined - base);
    if (err > 1e-6 * std::max({std::abs(base), std::abs(refined), 1e-300}))
        throw InversionUnstable("scale_w_generic: refinement disagreement at x = " +
                                std::to_string(x));
    return base;
}

} // namespace snlp
