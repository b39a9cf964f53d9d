#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "snlp/errors.hpp"
#include "snlp/root_finding.hpp"
#include "test_models.hpp"

using namespace snlp;
using namespace snlp::testing;

TEST_CASE("phi on closed-form models", "[roots]") {
    CHECK(phi(pure_square_model(), 4.0) == Catch::Approx(2.0).margin(1e-12));
    // BM with drift: theta_1 = (sqrt(c^2 + 2 sigma^2 q) - c)/sigma^2
    CHECK(phi(bm_model(), 1.0) == Catch::Approx(std::sqrt(3.0) - 1.0).margin(1e-12));
    // Phi(0) = 0 iff psi'(0+) >= 0
    CHECK(phi(bm_model(), 0.0) == 0.0);
    CHECK(phi(cpp_model(), 0.0) == 0.0);
}

TEST_CASE("root set on closed-form models", "[roots]") {
    SECTION("Brownian motion with drift") {
        const RootSet rs = roots(bm_model(), 1.0);
        REQUIRE(rs.roots.size() == 2);
        CHECK(rs.roots[0] == Catch::Approx(std::sqrt(3.0) - 1.0).margin(1e-12));
        CHECK(rs.roots[1] == Catch::Approx(-(std::sqrt(3.0) + 1.0)).margin(1e-12));
        CHECK(rs.phi == rs.roots[0]);
    }
    SECTION("compound Poisson with drift, exponential jumps") {
        // theta_{1,2} = (q + eta - c alpha +- sqrt(Delta))/(2c), Delta = (q+eta-c alpha)^2 + 4 c alpha q
        const RootSet rs = roots(cpp_model(), 1.0);
        REQUIRE(rs.roots.size() == 2);
        const double delta = std::sqrt(13.0);
        CHECK(rs.roots[0] == Catch::Approx((-1.0 + delta) / 6.0).margin(1e-12));
        CHECK(rs.roots[1] == Catch::Approx((-1.0 - delta) / 6.0).margin(1e-12));
    }
}

TEST_CASE("partial-fraction root sum equals one", "[roots]") {
    std::mt19937 gen(7);
    for (int rep = 0; rep < 20; ++rep) {
        const HyperExpModel m = random_model(gen);
        for (double q : {0.1, 1.0, 10.0}) {
            const RootSet rs = roots(m, q);
            double acc = 0.0;
            for (std::size_t i = 0; i < rs.roots.size(); ++i)
                acc += 1.0 / (rs.roots[i] * rs.psi_prime[i]);
            CHECK(std::abs(q * acc - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("interlacing with the poles is strict", "[roots]") {
    std::mt19937 gen(11);
    for (int rep = 0; rep < 25; ++rep) {
        const HyperExpModel m = random_model(gen);
        for (double q : {0.25, 2.0}) {
            const RootSet rs = roots(m, q);
            const std::size_t n = m.n_jump_terms();
            REQUIRE(rs.roots.size() == m.n_roots());
            CHECK(rs.roots[0] >= 0.0);
            CHECK(rs.roots[1] <= 0.0);
            // theta_{j+1} in (-alpha_j, -alpha_{j-1}) reading poles outward
            for (std::size_t j = 1; j <= n; ++j) {
                CHECK(rs.roots[j] > -m.rates[j - 1]);
                if (j < rs.roots.size() - 1) CHECK(rs.roots[j + 1] < -m.rates[j - 1]);
            }
            if (m.sigma > 0.0 && n > 0) CHECK(rs.roots.back() < -m.rates.back());
            for (std::size_t i = 1; i < rs.roots.size(); ++i)
                CHECK(rs.roots[i] < rs.roots[i - 1]);
        }
    }
}

TEST_CASE("residuals and phi consistency", "[roots]") {
    std::mt19937 gen(13);
    for (int rep = 0; rep < 10; ++rep) {
        const HyperExpModel m = random_model(gen);
        for (double q = 1e-6; q <= 1e3; q *= 31.6227766) {
            CHECK(std::abs(laplace_exponent(m, phi(m, q)) - q) < 1e-10 * std::max(1.0, q));
            const RootSet rs = roots(m, q);
            CHECK(std::abs(rs.phi - phi(m, q)) < 1e-10);
            // tol_root is 1e-12 relative on lambda: scale the psi-residual by psi'
            for (std::size_t i = 0; i < rs.roots.size(); ++i) {
                const double lam_err = std::abs(detail::psi_extended(m, rs.roots[i]) - q) /
                                       std::abs(rs.psi_prime[i]);
                CHECK(lam_err < 1e-12 * std::max(1.0, std::abs(rs.roots[i])));
            }
        }
    }
}

TEST_CASE("q = 0 degenerate and one-sided cases", "[roots]") {
    // psi'(0) = 0: c = eta sum a/alpha
    HyperExpModel m;
    m.drift_c = 1.0;
    m.sigma = 1.0;
    m.eta = 1.0;
    m.weights = {1.0};
    m.rates = {1.0};
    m.validate();
    REQUIRE(std::abs(laplace_exponent_deriv(m, 0.0)) < 1e-15);
    CHECK_THROWS_AS(roots(m, 0.0), DegenerateRoots);

    // psi'(0) > 0: theta_1 = 0, theta_2 < 0
    const RootSet up = roots(bm_model(), 0.0);
    CHECK(up.roots[0] == 0.0);
    CHECK(up.roots[1] == Catch::Approx(-2.0).margin(1e-12)); // lambda + lambda^2/2 = 0
    // psi'(0) < 0: theta_1 > 0 = theta_2
    HyperExpModel dn = bm_model(-1.0, 1.0);
    const RootSet rdn = roots(dn, 0.0);
    CHECK(rdn.roots[0] == Catch::Approx(2.0).margin(1e-12));
    CHECK(rdn.roots[1] == 0.0);
}

TEST_CASE("preconditions", "[roots]") {
    CHECK_THROWS_AS(phi(bm_model(), -0.5), std::domain_error);
    CHECK_THROWS_AS(roots(bm_model(), -1.0), std::domain_error);
}

TEST_CASE("complex continuation lands on the real set and solves psi = q", "[roots][complex]") {
    for (const HyperExpModel& m : {kou_model(), bv_model(), bm_model()}) {
        ComplexRootTracker tracker(m);
        // far out along an arc and back
        const std::complex<double> q1(0.6, 2.2), q2(-1.5, 4.0);
        for (const auto& q : {q1, q2}) {
            const auto& r = tracker.move_to(q);
            REQUIRE(r.size() == m.n_roots());
            for (const auto& th : r)
                CHECK(std::abs(laplace_exponent(m, th) - q) < 1e-9 * (1.0 + std::abs(q)));
        }
        const auto& back = tracker.move_to(std::complex<double>(1.3, 0.0));
        const RootSet real_rs = roots(m, 1.3);
        for (std::size_t i = 0; i < back.size(); ++i) {
            CHECK(std::abs(back[i].imag()) < 1e-9);
            CHECK(std::abs(back[i].real() - real_rs.roots[i]) < 1e-9);
        }
    }
}
