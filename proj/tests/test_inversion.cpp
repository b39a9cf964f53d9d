#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "snlp/errors.hpp"
#include "snlp/laplace_inversion.hpp"

using namespace snlp;

namespace {
const ComplexTransform one_over_p = [](std::complex<double> s) { return 1.0 / s; };
const ComplexTransform exp_pair = [](std::complex<double> s) { return 1.0 / (s + 1.0); };
const ComplexTransform sin_pair = [](std::complex<double> s) { return 1.0 / (s * s + 1.0); };
} // namespace

TEST_CASE("talbot on known transform pairs", "[inversion]") {
    for (double T : {0.5, 1.0, 5.0}) {
        CHECK(std::abs(talbot_inverse(one_over_p, T, 32) - 1.0) < 1e-8);
        CHECK(std::abs(talbot_inverse(exp_pair, T, 32) - std::exp(-T)) < 1e-8);
        CHECK(std::abs(talbot_inverse(sin_pair, T, 32) - std::sin(T)) < 1e-8);
    }
}

TEST_CASE("gaver-stehfest on smooth transform pairs", "[inversion]") {
    const RealTransform g1 = [](double s) { return 1.0 / s; };
    const RealTransform g2 = [](double s) { return 1.0 / (s + 1.0); };
    for (double T : {0.5, 1.0, 2.0}) {
        CHECK(std::abs(gaver_stehfest_inverse(g1, T, 14) - 1.0) < 1e-8);
        CHECK(std::abs(gaver_stehfest_inverse(g2, T, 14) - std::exp(-T)) < 5e-5);
    }
}

TEST_CASE("contour shift reproduces transforms with positive abscissa", "[inversion]") {
    // f(T) = e^{2T}: transform 1/(s-2), abscissa 2
    const ComplexTransform f = [](std::complex<double> s) { return 1.0 / (s - 2.0); };
    const RealTransform fr = [](double s) { return 1.0 / (s - 2.0); };
    for (double T : {0.3, 1.0}) {
        CHECK(std::abs(talbot_inverse(f, T, 32, 2.5) - std::exp(2.0 * T)) <
              1e-8 * std::exp(2.0 * T));
        CHECK(std::abs(gaver_stehfest_inverse(fr, T, 14, 2.5) - std::exp(2.0 * T)) <
              1e-5 * std::exp(2.0 * T));
    }
}

TEST_CASE("invert_laplace reports error estimates and instability", "[inversion]") {
    const InversionResult res =
        invert_laplace(exp_pair, nullptr, 1.0, InversionMethod::talbot, {});
    CHECK(std::abs(res.value - std::exp(-1.0)) < 1e-10);
    CHECK(res.error_estimate < 1e-7);

    const InversionResult gs =
        invert_laplace(nullptr, [](double s) { return 1.0 / (s + 1.0); }, 1.0,
                       InversionMethod::gaver_stehfest, {});
    CHECK(std::abs(gs.value - std::exp(-1.0)) < 1e-5);

    // Gaver-Stehfest cannot resolve an oscillatory inverse at large T;
    // the order refinement disagrees and the call must throw.
    CHECK_THROWS_AS(invert_laplace(nullptr, [](double s) { return 1.0 / (s * s + 1.0); }, 20.0,
                                   InversionMethod::gaver_stehfest, {}),
                    InversionUnstable);

    CHECK_THROWS_AS(invert_laplace(nullptr, nullptr, 1.0, InversionMethod::talbot, {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(talbot_inverse(one_over_p, -1.0, 32), std::domain_error);
}

TEST_CASE("gaver-stehfest weights require an even order", "[inversion]") {
    CHECK_THROWS_AS(gaver_stehfest_inverse([](double s) { return 1.0 / s; }, 1.0, 13),
                    std::domain_error);
}
