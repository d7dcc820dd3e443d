#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

namespace duopoly {

/// Demand process dZ = alpha Z dt + sigma Z dB, discounted at rate r.
struct MarketParams {
    double alpha = 0.0;
    double sigma = 0.0;
    double r = 0.0;

    /// Throws ConfigError unless sigma > 0, 0 <= alpha < r.
    void validate() const;
};

struct EconParams {
    double pi_low = 0.0;
    double pi_high = 0.0;
    double xi = 0.0;        // monopoly benefit rate enjoyed by the leader
    double inv_cost = 0.0;  // full investment cost
    double theta = 0.0;     // cost reduction for a follower that copies
    double p_high = 0.5;

    void validate() const;
    double expected_profit() const { return p_high * pi_high + (1.0 - p_high) * pi_low; }
};

/// Roots of 1/2 sigma^2 x (x-1) + alpha x - r = 0.
struct CharRoots {
    double gamma = 0.0;  // > 1
    double beta = 0.0;   // < 0
};

/// Coefficients of the follower's low-profit reward max_i { a_i z - k_i }.
struct DerivedCoeffs {
    double a1 = 0.0;  // pi_low / (r - alpha)
    double a2 = 0.0;  // E[pi] / (r - alpha)
    double k1 = 0.0;  // (1 - theta) inv_cost
    double k2 = 0.0;  // inv_cost
};

enum class Monitoring { bridge, grid };

/// Monte Carlo settings. `monitoring` selects how barrier crossings between
/// grid points are detected; dt is the accuracy knob either way.
struct SimConfig {
    std::size_t n_paths = 100000;
    double dt = 1e-3;
    double horizon = 15.0;
    std::uint64_t seed = 20240607;
    Monitoring monitoring = Monitoring::bridge;

    void validate() const;
    std::size_t n_steps() const;
};

struct ModelConfig {
    MarketParams market;
    EconParams econ;
    SimConfig sim;
};

CharRoots char_roots(const MarketParams& market);

/// |q(x)| / (|1/2 sigma^2 x (x-1)| + |alpha x| + r) for the characteristic quadratic q.
double relative_root_residual(const MarketParams& market, double x);

DerivedCoeffs derive_coeffs(const MarketParams& market, const EconParams& econ);

/// Value of simultaneous (Cournot) investment at demand z: E[pi] z / (r - alpha) - I.
double cournot_value(double z, const MarketParams& market, const EconParams& econ);

/// Parses flat `key=value` text ('#' starts a comment). Unknown keys, bad
/// numbers, missing required keys and invariant violations raise ConfigError
/// naming the offending key.
ModelConfig parse_config(std::string_view text);
ModelConfig load_config(const std::filesystem::path& path);

/// Serialises a config back to the key=value format accepted by parse_config.
std::string format_config(const ModelConfig& config);

void to_json(nlohmann::json& j, const MarketParams& m);
void to_json(nlohmann::json& j, const EconParams& e);
void to_json(nlohmann::json& j, const CharRoots& c);
void to_json(nlohmann::json& j, const DerivedCoeffs& d);
void to_json(nlohmann::json& j, const SimConfig& s);

/// Summary of derived constants: roots, their residuals, a1/a2/k1/k2.
nlohmann::json derived_summary(const MarketParams& market, const EconParams& econ);

}  // namespace duopoly
