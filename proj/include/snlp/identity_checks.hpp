#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "snlp/hyperexp_model.hpp"
#include "snlp/occupation.hpp"
#include "snlp/root_finding.hpp"
#include "snlp/scale_functions.hpp"

namespace snlp {

struct IdentityCheckResult {
    std::string name;
    double error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

namespace detail {
template <class F>
double gk_integrate(const F& f, double lo, double hi) {
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, lo, hi, 12, 1e-12);
}
} // namespace detail

/// Built-in identity suite over a given model: the scale-function convolution
/// identity, the exact kernel rearrangement, the root partial-fraction sum,
/// and the Laplace transform of H.  Quadrature lives here (and in the test
/// oracles) only; the evaluation paths themselves are closed form.
inline std::vector<IdentityCheckResult> run_identity_suite(const HyperExpModel& m,
                                                           unsigned seed = 7u) {
    std::vector<IdentityCheckResult> out;
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> unif(0.3, 2.5);

    { // (q-p) int_0^x W^(p)(x-y) W^(q)(y) dy = W^(q)(x) - W^(p)(x)
        double worst = 0.0;
        for (int rep = 0; rep < 3; ++rep) {
            const double p = unif(gen), q = p + unif(gen), x = unif(gen);
            const ScaleEvaluator wp(m, p), wq(m, q);
            const double lhs = (q - p) * detail::gk_integrate(
                                             [&](double y) { return wp.w(x - y) * wq.w(y); }, 0.0, x);
            const double rhs = wq.w(x) - wp.w(x);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        out.push_back({"convolution identity (q-p) int W^(p)W^(q) = W^(q)-W^(p)", worst, 1e-8,
                       worst < 1e-8});
    }

    { // exact rearrangement of the first density bracket
        double worst = 0.0;
        const OccupationKernel ker(m, 1.0, 0.7);
        std::uniform_real_distribution<double> ux(-1.0, 3.0);
        for (int rep = 0; rep < 8; ++rep) {
            const double a = 0.4 + 0.4 * rep / 7.0, x = ux(gen);
            const double lhs = ker.numerator(a, x), rhs = ker.numerator_alt(a, x);
            worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
        }
        out.push_back({"kernel rearrangement N_a(x), both closed forms", worst, 1e-10,
                       worst < 1e-10});
    }

    { // q sum_i 1/(theta_i psi'(theta_i)) = 1
        double worst = 0.0;
        for (double q : {0.1, 1.0, 10.0}) {
            const RootSet rs = roots(m, q);
            double acc = 0.0;
            for (std::size_t i = 0; i < rs.roots.size(); ++i)
                acc += 1.0 / (rs.roots[i] * rs.psi_prime[i]);
            worst = std::max(worst, std::abs(q * acc - 1.0));
        }
        out.push_back({"root sum q sum 1/(theta psi'(theta)) = 1", worst, 1e-10, worst < 1e-10});
    }

    { // int_0^inf e^{-lam x} H^(p,q)(x) dx = (1 + q/(psi(lam)-p-q)) / (lam - Phi(p))
        double worst = 0.0;
        const double p = 1.0, q = 0.8;
        const OccupationKernel ker(m, p, q);
        const double phi_pq = phi(m, p + q);
        for (double lam : {phi_pq + 0.5, phi_pq + 1.5, phi_pq + 4.0}) {
            // the integrand decays at rate lam - Phi(p+q), not lam
            const double quad = detail::gk_integrate(
                [&](double x) { return std::exp(-lam * x) * ker.h(x); }, 0.0,
                60.0 / (lam - phi_pq));
            const double closed = h_kernel_laplace_check(m, p, q, lam);
            worst = std::max(worst, std::abs(quad - closed) / std::abs(closed));
        }
        out.push_back({"Laplace transform of H (quadrature vs closed form)", worst, 1e-6,
                       worst < 1e-6});
    }

    return out;
}

} // namespace snlp
