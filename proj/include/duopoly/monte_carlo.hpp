#pragma once

#include <functional>
#include <span>
#include <vector>

#include "json.hpp"

#include "duopoly/intervals.hpp"
#include "duopoly/params.hpp"

namespace duopoly {

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    double cap_fraction = 0.0;  // share of paths still running at the horizon

    /// |estimate - reference| <= k * std_error, with a rounding floor for exact (SE 0) cases.
    bool agrees_with(double reference, double k = 3.0) const;
    double z_score(double reference) const;
};

void to_json(nlohmann::json& j, const McEstimate& e);

/// Z on the time grid t_k = k dt for every path, row-major (n_paths x (n_steps + 1)).
struct PathEnsemble {
    double z0 = 0.0;
    double dt = 0.0;
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    std::vector<double> values;

    std::span<const double> path(std::size_t i) const {
        return {values.data() + i * (n_steps + 1), n_steps + 1};
    }
};

/// Exact-scheme GBM paths Z_{t+dt} = Z_t exp((alpha - sigma^2/2) dt + sigma sqrt(dt) N).
/// Uses the same per-path streams as the policy kernels.
PathEnsemble simulate_paths(double z0, const SimConfig& cfg, const MarketParams& market);

/// What a path looks like when the policy stops it (or the horizon caps it).
struct StopEvent {
    double tau = 0.0;
    double z = 0.0;              // Z_tau (the crossed boundary in bridge mode)
    double disc_integral = 0.0;  // int_0^tau Z_s e^{-r s} ds, when tracked
    bool capped = false;
};

/// Maps a stop event to the path's realised, already discounted payoff.
using PathPayoff = std::function<double(const StopEvent&)>;

enum class IntegralTracking { off, on };

/// e^{-r tau} reward(Z_tau); capped paths pay 0.
PathPayoff discounted_reward(std::function<double(double)> reward, double r);

/// Monte Carlo value of stopping at the first entry into `stop`, for every
/// start level in `z0s` and every payoff, all on one shared path ensemble
/// (start levels are log shifts of the same paths). Result is [z0][payoff].
/// Runs path chunks in parallel; results do not depend on the thread count.
std::vector<std::vector<McEstimate>> mc_policy_values(std::span<const double> z0s, const IntervalSet& stop,
                                                      std::span<const PathPayoff> payoffs, const SimConfig& cfg,
                                                      const MarketParams& market,
                                                      IntegralTracking tracking = IntegralTracking::off);

McEstimate mc_policy_value(double z0, const IntervalSet& stop, const PathPayoff& payoff, const SimConfig& cfg,
                           const MarketParams& market, IntegralTracking tracking = IntegralTracking::off);

namespace reference {

/// Serial, one-start-level-at-a-time version of mc_policy_values. Each path
/// is stepped until it leaves its own continuation gap; kept as the check
/// on the record-based parallel kernel.
std::vector<std::vector<McEstimate>> mc_policy_values(std::span<const double> z0s, const IntervalSet& stop,
                                                      std::span<const PathPayoff> payoffs, const SimConfig& cfg,
                                                      const MarketParams& market,
                                                      IntegralTracking tracking = IntegralTracking::off);

}  // namespace reference

}  // namespace duopoly
