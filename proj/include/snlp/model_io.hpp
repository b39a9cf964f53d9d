#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "snlp/hyperexp_model.hpp"

namespace snlp {

/// Schema: {"drift": c, "sigma": s, "eta": e, "jumps": [{"weight": a, "rate": alpha}, ...]}
inline HyperExpModel model_from_json(const nlohmann::json& j) {
    HyperExpModel m;
    try {
        m.drift_c = j.at("drift").get<double>();
        m.sigma = j.at("sigma").get<double>();
        m.eta = j.at("eta").get<double>();
        if (j.contains("jumps")) {
            for (const auto& jj : j.at("jumps")) {
                m.weights.push_back(jj.at("weight").get<double>());
                m.rates.push_back(jj.at("rate").get<double>());
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("model JSON: ") + e.what());
    }
    m.validate(); // throws std::invalid_argument with a descriptive message
    return m;
}

inline HyperExpModel model_from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("model JSON parse error: ") + e.what());
    }
    return model_from_json(j);
}

inline nlohmann::json model_to_json(const HyperExpModel& m) {
    nlohmann::json j;
    j["drift"] = m.drift_c;
    j["sigma"] = m.sigma;
    j["eta"] = m.eta;
    j["jumps"] = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rates.size(); ++i)
        j["jumps"].push_back({{"weight", m.weights[i]}, {"rate", m.rates[i]}});
    return j;
}

/// FNV-1a over a canonical 17-digit rendering; stable across runs.
inline std::string model_hash(const HyperExpModel& m) {
    char buf[64];
    std::string canon;
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g;", v);
        canon += buf;
    };
    put(m.drift_c);
    put(m.sigma);
    put(m.eta);
    for (std::size_t i = 0; i < m.rates.size(); ++i) {
        put(m.weights[i]);
        put(m.rates[i]);
    }
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace snlp
