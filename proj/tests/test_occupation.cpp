#include <catch2/catch_amalgamated.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>
#include <sstream>

#include "snlp/model_io.hpp"
#include "snlp/occupation.hpp"
#include "snlp/root_finding.hpp"
#include "snlp/scale_functions.hpp"
#include "test_models.hpp"

using namespace snlp;
using namespace snlp::testing;

namespace {
template <class F>
double quad(const F& f, double lo, double hi) {
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, lo, hi, 12, 1e-12);
}
} // namespace

TEST_CASE("H kernel boundary values", "[occupation]") {
    // x = 0 -> 1 exactly through the partial-fraction sum
    for (const HyperExpModel& m : {bm_model(), kou_model(), bv_model()})
        CHECK(h_kernel(m, 1.0, 0.8, 0.0) == Catch::Approx(1.0).margin(1e-12));
    // q = 0 with Phi(p) = 1: psi(lambda) = lambda^2, p = 1
    CHECK(h_kernel(pure_square_model(), 1.0, 0.0, 2.0) ==
          Catch::Approx(std::exp(2.0)).margin(1e-12));
    // x < 0 -> e^{Phi(p) x}
    const double phi_p = phi(kou_model(), 1.0);
    CHECK(h_kernel(kou_model(), 1.0, 0.8, -1.3) ==
          Catch::Approx(std::exp(-1.3 * phi_p)).epsilon(1e-13));
}

TEST_CASE("H closed form vs quadrature of its defining integral", "[occupation]") {
    for (const HyperExpModel& m : {bm_model(), kou_model(), bv_model()}) {
        for (double p : {0.7, 1.6}) {
            for (double q : {0.5, 2.0, -0.4}) {
                if (p + q < 0.0) continue;
                const double phi_p = phi(m, p);
                const ScaleEvaluator ev_s(m, p + q);
                const OccupationKernel ker(m, p, q);
                for (double x : {0.4, 1.3, 2.6}) {
                    const double by_quad =
                        std::exp(phi_p * x) *
                        (1.0 + q * quad([&](double z) { return std::exp(-phi_p * z) * ev_s.w(z); },
                                        0.0, x));
                    CHECK(std::abs(ker.h(x) - by_quad) <
                          1e-9 * std::max(1.0, std::abs(by_quad)));
                }
            }
        }
    }
}

TEST_CASE("H via the tilted model (test-only alternate route)", "[occupation]") {
    for (const HyperExpModel& m : {bm_model(), kou_model(), bv_model()}) {
        for (double x : {0.3, 1.1, 2.4}) {
            const double direct = h_kernel(m, 1.2, 0.9, x);
            const double tilted = h_kernel_tilted(m, 1.2, 0.9, x);
            CHECK(std::abs(direct - tilted) < 1e-10 * std::max(1.0, std::abs(direct)));
        }
    }
}

TEST_CASE("Laplace transform of H", "[occupation]") {
    const HyperExpModel m = kou_model();
    const double p = 1.0, q = 0.8;
    const OccupationKernel ker(m, p, q);
    const double phi_pq = phi(m, p + q);
    for (double lam : {phi_pq + 0.4, phi_pq + 1.3, phi_pq + 3.0}) {
        const double by_quad = quad([&](double x) { return std::exp(-lam * x) * ker.h(x); }, 0.0,
                                    60.0 / (lam - phi_pq));
        const double closed = h_kernel_laplace_check(m, p, q, lam);
        CHECK(std::abs(by_quad - closed) < 1e-6 * std::abs(closed));
    }
    // q = 0: 1/(lambda - Phi(p))
    CHECK(h_kernel_laplace_check(m, p, 0.0, phi(m, p) + 2.0) ==
          Catch::Approx(0.5).margin(1e-12));
    CHECK_THROWS_AS(h_kernel_laplace_check(m, p, q, phi_pq - 0.1), std::domain_error);
}

TEST_CASE("curly-W branches and quadrature check", "[occupation]") {
    const HyperExpModel m = kou_model();
    const double p = 1.0, q = 0.7;
    const ScaleEvaluator ev_p(m, p), ev_s(m, p + q);
    // a = 0 -> W^(p+q)
    CHECK(w_curly(m, p, q, 0.0, 1.3) == Catch::Approx(ev_s.w(1.3)).epsilon(1e-13));
    // a < 0 -> W^(p+q) as well
    CHECK(w_curly(m, p, q, -2.0, 1.3) == Catch::Approx(ev_s.w(1.3)).epsilon(1e-13));
    // x <= a -> W^(p)
    CHECK(w_curly(m, p, q, 1.5, 0.9) == Catch::Approx(ev_p.w(0.9)).epsilon(1e-13));
    // interior: convolution form by quadrature
    for (double a : {0.6, 1.2}) {
        for (double x : {1.4, 2.8}) {
            const double by_quad =
                ev_s.w(x) - q * quad([&](double z) { return ev_s.w(x - z) * ev_p.w(z); }, 0.0, a);
            CHECK(std::abs(w_curly(m, p, q, a, x) - by_quad) <
                  1e-9 * std::max(1.0, std::abs(by_quad)));
        }
    }
}

TEST_CASE("kernel rearrangement identity is exact", "[occupation]") {
    std::mt19937 gen(5);
    std::uniform_real_distribution<double> ux(-1.5, 4.0), ua(0.2, 2.0);
    for (const HyperExpModel& m : {bm_model(), kou_model(), bv_model()}) {
        const OccupationKernel ker(m, 1.0, 0.8);
        for (int rep = 0; rep < 10; ++rep) {
            const double a = ua(gen), x = ux(gen);
            const double lhs = ker.numerator(a, x), rhs = ker.numerator_alt(a, x);
            CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(rhs)));
        }
    }
}

TEST_CASE("q = 0 reduction to the potential density", "[occupation]") {
    for (const HyperExpModel& m : {bm_model(), kou_model(), bv_model()}) {
        const ScaleEvaluator ev(m, 1.0);
        const double dpsi = laplace_exponent_deriv(m, ev.phi());
        for (double x : {-0.5, 0.4, 1.8}) {
            for (double y : {-1.2, 0.3, 2.5}) {
                const double ref = std::exp(ev.phi() * (x - y)) / dpsi - ev.w(x - y);
                const double vi = joint_density_unit(m, 1.0, 0.0, 1.0, x, y);
                const double vh = joint_density_halfline(m, 1.0, 0.0, 0.7, x, y);
                CHECK(std::abs(vi - ref) < 1e-10);
                CHECK(std::abs(vh - ref) < 1e-10);
            }
        }
    }
}

TEST_CASE("interval density is the shifted unit-interval density", "[occupation]") {
    const HyperExpModel m = kou_model();
    const double p = 1.0, q = 0.5, a = -0.4, b = 0.9;
    for (double x : {-0.8, 0.2, 1.4}) {
        for (double y : {-1.0, 0.1, 1.2}) {
            CHECK(joint_density_interval(m, p, q, a, b, x, y) ==
                  joint_density_unit(m, p, q, b - a, x - a, y - a));
        }
    }
    CHECK_THROWS_AS(joint_density_interval(m, p, q, 1.0, 1.0, 0.0, 0.0), std::domain_error);
}

TEST_CASE("half-line density: x = b reduction and finite-interval limit", "[occupation]") {
    const HyperExpModel m = kou_model();
    const double p = 1.0, q = 0.7, b = 0.4;
    const OccupationKernel ker(m, p, q);
    const ScaleEvaluator ev_s(m, p + q);
    const double pref = (phi(m, p + q) - phi(m, p)) / q;
    for (double y : {-0.9, 0.1, 0.8}) {
        const double lhs = ker.density_halfline(b, b, y);
        const double rhs = pref * ker.h(b - y) - ev_s.w(b - y);
        CHECK(std::abs(lhs - rhs) < 1e-11 * std::max(1.0, std::abs(rhs)));
    }
    // Corollary's own limiting argument: a -> -inf
    double worst = 0.0;
    for (double x : {-0.3, 0.15, 0.9}) {
        for (double y = -3.0; y <= 3.0; y += 0.2) {
            const double vh = ker.density_halfline(b, x, y);
            const double vi = joint_density_interval(m, p, q, -40.0, b, x, y);
            worst = std::max(worst, std::abs(vh - vi));
        }
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("density sanity: nonnegativity, continuity, monotone mass", "[occupation]") {
    const HyperExpModel m = bm_model();
    const double p = 1.0, a = 1.0;
    SECTION("nonnegative on the default grid, mass monotone in q") {
        double prev_mass = 1e300;
        for (double q : {0.0, 0.4, 1.5, 6.0}) {
            TransformQuery query;
            query.p = p;
            query.q = q;
            query.x = 0.5;
            query.interval = OccupationInterval::finite_interval(0.0, a);
            const DensitySlice slice = evaluate_density_slice(m, query);
            CHECK(slice.min_raw_value >= -1e-12);
            CHECK(slice.negative_flagged == 0);
            CHECK(slice.total_mass <= 1.0 / p + 1e-6);
            if (q == 0.0) CHECK(std::abs(slice.total_mass - 1.0 / p) < 1e-6);
            CHECK(slice.total_mass < prev_mass + 1e-12);
            prev_mass = slice.total_mass;
        }
    }
    SECTION("continuity across y = 0 and y = a for sigma > 0") {
        const OccupationKernel ker(m, p, 0.5);
        for (double edge : {0.0, a}) {
            const double lo = ker.density_unit(a, 0.5, edge - 1e-7);
            const double mid = ker.density_unit(a, 0.5, edge);
            const double hi = ker.density_unit(a, 0.5, edge + 1e-7);
            CHECK(std::abs(hi - lo) < 1e-5);
            CHECK(std::abs(mid - lo) < 1e-5);
        }
    }
    SECTION("sigma = 0, y above x: only the product term contributes") {
        const HyperExpModel bv = bv_model();
        const double v = joint_density_unit(bv, 1.0, 0.6, 1.0, -2.0, 0.5);
        CHECK(v >= 0.0); // W^(p)-type bracket vanishes since x - y < 0
    }
}

TEST_CASE("density slice CSV layout", "[occupation][io]") {
    const HyperExpModel m = bm_model();
    TransformQuery query;
    query.p = 1.0;
    query.q = 0.5;
    query.x = 0.2;
    query.interval = OccupationInterval::half_line_below(0.0);
    const DensitySlice slice = evaluate_density_slice(m, query, 21);
    std::ostringstream os;
    write_density_csv(slice, os, model_hash(m));
    const std::string text = os.str();
    CHECK(text.find("# p=1\n") != std::string::npos);
    CHECK(text.find("# interval=(-inf,0)\n") != std::string::npos);
    CHECK(text.find("y,density\n") != std::string::npos);
    CHECK(text.find(model_hash(m)) != std::string::npos);
    // rows in increasing y
    REQUIRE(slice.grid.size() == 21);
    CHECK(slice.grid.front() < slice.grid.back());
}

TEST_CASE("lemma oracles: trivial boundary values and domain checks", "[occupation][lemma]") {
    const HyperExpModel m = bm_model();
    const double p = 0.9, q = 0.6, a = 0.5, b = 2.0;
    // at x = a with sigma > 0 the W^(p+q)(0) term drops: value e^{Phi(p) a} H(0) = e^{Phi(p) a}
    const LemmaOracles lo = lemma_oracles(m, p, q, a, b, a, -0.2);
    CHECK(lo.exp_at_passage_two_sided ==
          Catch::Approx(std::exp(phi(m, p) * a)).epsilon(1e-12));
    CHECK(std::abs(lo.h_rearrangement_lhs - lo.h_rearrangement_rhs) < 1e-12);
    CHECK_THROWS_AS(lemma_oracles(m, p, q, 1.0, 0.5, 0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(lemma_oracles(m, p, q, 0.5, 2.0, 0.0, 1.0), std::domain_error);
}

TEST_CASE("query validation", "[occupation]") {
    TransformQuery query;
    query.p = -1.0;
    CHECK_THROWS_AS(query.validate(), std::domain_error);
    query.p = 1.0;
    query.q = -0.1;
    CHECK_THROWS_AS(query.validate(), std::domain_error);
    CHECK_THROWS_AS(OccupationInterval::finite_interval(2.0, 1.0), std::domain_error);
}
