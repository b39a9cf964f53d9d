#pragma once

#include <random>

#include "snlp/hyperexp_model.hpp"

namespace snlp::testing {

/// Brownian motion with drift: psi(lambda) = lambda + lambda^2/2.
inline HyperExpModel bm_model(double c = 1.0, double sigma = 1.0) {
    HyperExpModel m;
    m.drift_c = c;
    m.sigma = sigma;
    m.validate();
    return m;
}

/// psi(lambda) = lambda^2 (sigma = sqrt(2), no drift, no jumps).
inline HyperExpModel pure_square_model() {
    HyperExpModel m;
    m.sigma = std::sqrt(2.0);
    m.validate();
    return m;
}

/// Compound Poisson with drift and a single exponential jump class.
inline HyperExpModel cpp_model(double c = 3.0, double eta = 1.0, double alpha = 1.0) {
    HyperExpModel m;
    m.drift_c = c;
    m.eta = eta;
    m.weights = {1.0};
    m.rates = {alpha};
    m.validate();
    return m;
}

/// Kou-type jump-diffusion with two exponential jump classes.
inline HyperExpModel kou_model() {
    HyperExpModel m;
    m.drift_c = 0.3;
    m.sigma = 0.4;
    m.eta = 1.2;
    m.weights = {0.6, 0.4};
    m.rates = {2.0, 5.0};
    m.validate();
    return m;
}

/// Three jump classes, bounded variation (sigma = 0).
inline HyperExpModel bv_model() {
    HyperExpModel m;
    m.drift_c = 2.0;
    m.eta = 1.5;
    m.weights = {0.5, 0.3, 0.2};
    m.rates = {1.0, 3.0, 7.5};
    m.validate();
    return m;
}

/// Random well-conditioned model: rates separated, weights bounded below,
/// both BV and UBV cases.
inline HyperExpModel random_model(std::mt19937& gen) {
    std::uniform_int_distribution<int> n_dist(0, 4);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    HyperExpModel m;
    const int n = n_dist(gen);
    const bool with_sigma = n == 0 ? true : unif(gen) < 0.7;
    m.sigma = with_sigma ? 0.2 + 1.3 * unif(gen) : 0.0;
    m.drift_c = with_sigma ? -1.0 + 4.0 * unif(gen) : 0.3 + 2.7 * unif(gen);
    if (n > 0) {
        m.eta = 0.3 + 2.2 * unif(gen);
        double rate = 0.0;
        for (int i = 0; i < n; ++i) {
            rate += 0.4 + 2.5 * unif(gen);
            m.rates.push_back(rate);
            m.weights.push_back(0.15 + unif(gen));
        }
        double wsum = 0.0;
        for (double w : m.weights) wsum += w;
        for (double& w : m.weights) w /= wsum;
    }
    m.validate();
    return m;
}

} // namespace snlp::testing
