#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "snlp/errors.hpp"
#include "snlp/hyperexp_model.hpp"

namespace snlp {

/// All N simple real roots of psi(lambda) = q, descending:
///   theta_1 = Phi(q) >= 0 >= theta_2 > -alpha_1 > theta_3 > ... ( > theta_{n+2} < -alpha_n if sigma>0 )
struct RootSet {
    double q = 0.0;
    std::vector<double> roots;
    std::vector<double> psi_prime;
    double phi = 0.0; // == roots.front()
};

namespace detail {

constexpr double kPoleClearance = 2e-9; // stay clear of the 1e-9 evaluation guard
constexpr int kMaxRootIter = 200;

/// Safeguarded Newton inside a sign-changing bracket [lo, hi].
/// flo > 0 > fhi or flo < 0 < fhi; tolerance 1e-15 relative on lambda.
inline double refine_root(const HyperExpModel& m, double q, double lo, double hi,
                          double flo, double fhi) {
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (!((flo > 0.0 && fhi < 0.0) || (flo < 0.0 && fhi > 0.0)))
        throw BracketFailure("refine_root: endpoints do not bracket, interval [" +
                             std::to_string(lo) + ", " + std::to_string(hi) + "]");
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < kMaxRootIter; ++it) {
        const double f = detail::psi_extended(m, x) - q;
        if (f == 0.0) return x;
        if ((f > 0.0) == (flo > 0.0)) { lo = x; flo = f; } else { hi = x; fhi = f; }
        const double fp = detail::psi_deriv_extended(m, x);
        double x_next = (fp != 0.0) ? x - f / fp : x;
        if (!(x_next > lo && x_next < hi)) x_next = 0.5 * (lo + hi); // bisection fallback
        const double step = std::abs(x_next - x);
        x = x_next;
        if (step <= 1e-15 * std::max(1.0, std::abs(x)) || hi - lo <= 1e-15 * std::max(1.0, std::abs(x)))
            break;
    }
    // extended-precision polish: pick the representable double with the
    // smallest residual (the pure-double loop stalls one ulp off near poles)
    long double xl = x;
    for (int it = 0; it < 4; ++it) {
        const long double f = psi_extended_ld(m, xl) - static_cast<long double>(q);
        const long double fp = psi_deriv_extended_ld(m, xl);
        if (f == 0.0L || fp == 0.0L) break;
        xl -= f / fp;
    }
    const double lo_cand = static_cast<double>(xl);
    const double hi_cand = std::nextafter(lo_cand, lo_cand < xl ? 1e308 : -1e308);
    const long double q_ld = q;
    return std::abs(psi_extended_ld(m, lo_cand) - q_ld) <=
                   std::abs(psi_extended_ld(m, hi_cand) - q_ld)
               ? lo_cand
               : hi_cand;
}

/// Shrink an offset from `from` toward `from` until the sign of psi - q at
/// from + dir*eps matches `want_positive`; halving search, absolute floor.
inline double find_signed_offset(const HyperExpModel& m, double q, double from, double dir,
                                 double start, bool want_positive, const char* where) {
    double eps = start;
    for (int it = 0; it < 80; ++it) {
        if (eps < kPoleClearance) break;
        const double x = from + dir * eps;
        const double f = psi_extended(m, x) - q;
        if ((f > 0.0) == want_positive && f != 0.0) return eps;
        eps *= 0.5;
    }
    throw BracketFailure(std::string("roots: no sign change located near ") + where +
                         " (offset search from " + std::to_string(from) + ")");
}

} // namespace detail

/// Right-inverse Phi(q) = sup{lambda >= 0 : psi(lambda) = q}.
inline double phi(const HyperExpModel& m, double q) {
    if (!(q >= 0.0)) throw std::domain_error("phi: q must be >= 0");
    const double d0 = laplace_exponent_deriv(m, 0.0);
    if (q == 0.0 && d0 >= 0.0) return 0.0;
    // lower end with psi - q < 0
    double lo = 0.0, flo = -q;
    if (q == 0.0) {
        // psi'(0+) < 0 here: find a strictly positive point with psi < 0
        double e = 1.0;
        for (int it = 0; it < 200 && laplace_exponent(m, e) >= 0.0; ++it) e *= 0.5;
        lo = e;
        flo = laplace_exponent(m, e);
        if (!(flo < 0.0)) throw BracketFailure("phi: could not bracket positive root at q=0");
    }
    // expand geometrically until psi(hi) > q; psi grows at least linearly
    double hi = 1.0, fhi = laplace_exponent(m, hi) - q;
    for (int it = 0; it < 400 && fhi <= 0.0; ++it) {
        lo = hi; flo = fhi;
        hi *= 2.0;
        fhi = laplace_exponent(m, hi) - q;
    }
    if (!(fhi > 0.0)) throw BracketFailure("phi: upper bracket expansion failed");
    return detail::refine_root(m, q, lo, hi, flo, fhi);
}

/// Full interlaced root set of psi(lambda) = q.
/// Requires q > 0, or q = 0 with |psi'(0+)| >= 1e-12.
inline RootSet roots(const HyperExpModel& m, double q) {
    if (!(q >= 0.0)) throw std::domain_error("roots: q must be >= 0");
    const double d0 = laplace_exponent_deriv(m, 0.0);
    if (q == 0.0 && std::abs(d0) < 1e-12)
        throw DegenerateRoots("roots: q = 0 with |psi'(0+)| < 1e-12");

    const std::size_t n = m.n_jump_terms();
    RootSet rs;
    rs.q = q;
    rs.roots.reserve(m.n_roots());

    // theta_1 = Phi(q)
    rs.roots.push_back(phi(m, q));

    // theta_2 in (L, 0] with L = -alpha_1 (or -inf when n = 0)
    if (q == 0.0 && d0 < 0.0) {
        rs.roots.push_back(0.0);
    } else {
        double hi = 0.0, fhi = -q;
        if (q == 0.0) {
            // psi'(0+) > 0: psi < 0 just left of the origin
            const double span = n > 0 ? m.rates.front() : 1.0;
            const double d = detail::find_signed_offset(m, q, 0.0, -1.0, 0.5 * span, false, "0-");
            hi = -d;
            fhi = laplace_exponent(m, hi) - q;
        }
        double lo, flo;
        if (n > 0) {
            const double pole = -m.rates.front();
            const double e = detail::find_signed_offset(m, q, pole, +1.0,
                                                        0.25 * (hi - pole), true, "-alpha_1+");
            lo = pole + e;
            flo = laplace_exponent(m, lo) - q;
        } else {
            lo = -1.0;
            flo = laplace_exponent(m, lo) - q;
            for (int it = 0; it < 400 && flo <= 0.0; ++it) {
                lo *= 2.0;
                flo = laplace_exponent(m, lo) - q;
            }
            if (!(flo > 0.0)) throw BracketFailure("roots: left expansion failed for theta_2");
        }
        rs.roots.push_back(detail::refine_root(m, q, lo, hi, flo, fhi));
    }

    // theta_j in (-alpha_{j-1}, -alpha_{j-2}) for j = 3..n+1
    for (std::size_t j = 3; j <= n + 1; ++j) {
        const double left_pole = -m.rates[j - 2];
        const double right_pole = -m.rates[j - 3];
        const double width = right_pole - left_pole;
        const double eL =
            detail::find_signed_offset(m, q, left_pole, +1.0, 0.25 * width, true, "interior left");
        const double eR =
            detail::find_signed_offset(m, q, right_pole, -1.0, 0.25 * width, false, "interior right");
        const double lo = left_pole + eL, hi = right_pole - eR;
        rs.roots.push_back(detail::refine_root(m, q, lo, hi, detail::psi_extended(m, lo) - q,
                                               detail::psi_extended(m, hi) - q));
    }

    // theta_{n+2} < -alpha_n when sigma > 0 (quadratic growth as lambda -> -inf)
    if (m.sigma > 0.0) {
        double hi, fhi;
        if (n > 0) {
            const double pole = -m.rates.back();
            const double e =
                detail::find_signed_offset(m, q, pole, -1.0, 0.5 * (1.0 + m.rates.back()), false,
                                           "-alpha_n-");
            hi = pole - e;
            fhi = detail::psi_extended(m, hi) - q;
            double lo = hi - std::max(1.0, std::abs(hi)), flo = detail::psi_extended(m, lo) - q;
            for (int it = 0; it < 400 && flo <= 0.0; ++it) {
                lo -= std::max(1.0, std::abs(lo));
                flo = detail::psi_extended(m, lo) - q;
            }
            if (!(flo > 0.0)) throw BracketFailure("roots: left expansion failed for theta_N");
            rs.roots.push_back(detail::refine_root(m, q, lo, hi, flo, fhi));
        }
        // n == 0: theta_2 found above already covers the second quadratic root
    }

    rs.psi_prime.resize(rs.roots.size());
    for (std::size_t i = 0; i < rs.roots.size(); ++i)
        rs.psi_prime[i] = detail::psi_deriv_extended(m, rs.roots[i]);
    rs.phi = rs.roots.front();

    if (rs.roots.size() != m.n_roots())
        throw BracketFailure("roots: expected " + std::to_string(m.n_roots()) + " roots, found " +
                             std::to_string(rs.roots.size()));
    for (std::size_t i = 1; i < rs.roots.size(); ++i)
        if (!(rs.roots[i] < rs.roots[i - 1]))
            throw BracketFailure("roots: ordering violated");
    return rs;
}

/// Analytic continuation of the full root set to complex q, tracked from a
/// real anchor along straight segments with adaptive step halving.  Used by
/// the Talbot pricing path, where psi(lambda) = p must be solved along a
/// complex contour.
class ComplexRootTracker {
  public:
    explicit ComplexRootTracker(HyperExpModel m) : m_(std::move(m)) {}

    const std::vector<std::complex<double>>& move_to(std::complex<double> q) {
        if (!anchored_) anchor(q);
        if (q == q_) return roots_;
        double s = 0.0, step = 1.0;
        const std::complex<double> start = q_;
        std::vector<std::complex<double>> work = roots_;
        while (s < 1.0) {
            const double s_try = std::min(1.0, s + step);
            const std::complex<double> target = start + s_try * (q - start);
            std::vector<std::complex<double>> trial = work;
            if (newton_all(target, trial)) {
                work = trial;
                s = s_try;
                step = std::min(2.0 * step, 1.0);
            } else {
                step *= 0.5;
                if (step < 1e-12)
                    throw InversionUnstable("complex root continuation stalled near q = (" +
                                            std::to_string(target.real()) + ", " +
                                            std::to_string(target.imag()) + ")");
            }
        }
        roots_ = work;
        q_ = q;
        return roots_;
    }

    std::complex<double> phi_value() const { return roots_.front(); }

    std::vector<std::complex<double>> psi_prime_values() const {
        std::vector<std::complex<double>> d(roots_.size());
        for (std::size_t i = 0; i < roots_.size(); ++i)
            d[i] = laplace_exponent_deriv(m_, roots_[i]);
        return d;
    }

    const HyperExpModel& model() const { return m_; }

  private:
    void anchor(std::complex<double> q) {
        const double q0 = std::max(std::abs(q), 1e-3);
        const RootSet rs = roots(m_, q0);
        roots_.assign(rs.roots.begin(), rs.roots.end());
        q_ = q0;
        anchored_ = true;
    }

    bool newton_all(std::complex<double> q, std::vector<std::complex<double>>& r) const {
        double max_mag = 1.0;
        for (auto& lam : r) {
            bool ok = false;
            for (int it = 0; it < 60; ++it) {
                std::complex<double> f, fp;
                try {
                    f = laplace_exponent(m_, lam) - q;
                    fp = laplace_exponent_deriv(m_, lam);
                } catch (const std::domain_error&) {
                    return false; // wandered onto a pole; caller halves the step
                }
                if (std::abs(fp) < 1e-14) return false;
                const std::complex<double> d = f / fp;
                lam -= d;
                if (std::abs(d) <= 1e-13 * std::max(1.0, std::abs(lam))) { ok = true; break; }
            }
            if (!ok) return false;
            try {
                if (std::abs(laplace_exponent(m_, lam) - q) > 1e-8 * (1.0 + std::abs(q)))
                    return false;
            } catch (const std::domain_error&) {
                return false;
            }
            max_mag = std::max(max_mag, std::abs(lam));
        }
        for (std::size_t i = 0; i < r.size(); ++i)
            for (std::size_t j = i + 1; j < r.size(); ++j)
                if (std::abs(r[i] - r[j]) < 1e-8 * max_mag) return false;
        return true;
    }

    HyperExpModel m_;
    std::complex<double> q_{0.0, 0.0};
    bool anchored_ = false;
    std::vector<std::complex<double>> roots_;
};

} // namespace snlp
