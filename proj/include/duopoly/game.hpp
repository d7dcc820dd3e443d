#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "duopoly/equilibrium.hpp"
#include "duopoly/intervals.hpp"
#include "duopoly/leader.hpp"
#include "duopoly/monte_carlo.hpp"

namespace duopoly {

enum class AlphaRule {
    one,    // alpha = 1 on the region
    ratio,  // alpha = (L - F) / (L - C) on the region
};

struct StrategyRegion {
    Interval range;
    AlphaRule rule = AlphaRule::one;
    double entry_slope = 1.0;  // right derivative used where alpha = 0 on the region
};

/// Region-based simple strategy; alpha is zero outside every listed region.
struct StrategySpec {
    std::string name;
    std::vector<StrategyRegion> regions;

    /// Closure of the set where the firm is willing to invest.
    IntervalSet active_set() const;
    /// Throws DomainError on overlapping regions or bad slopes.
    void validate() const;

    static StrategySpec never(std::string name = "never");
    static StrategySpec invest_on(const IntervalSet& set, std::string name);
};

/// The equilibrium candidate: eager firm i and patient firm j.
StrategySpec eager_strategy(const EquilibriumProfile& profile);
StrategySpec patient_strategy(const EquilibriumProfile& profile);

struct AlphaState {
    bool active = false;  // z lies in the strategy's active set
    double alpha = 0.0;
    double slope = 0.0;
};

AlphaState alpha_state(const StrategySpec& s, double z, const PayoffModel& model);

struct WPair {
    double w_i = 0.0;
    double w_j = 0.0;
};

/// Payoffs when both firms move at the same instant. Both alphas zero uses the
/// slope-weighted rule; if both slopes are zero too, throws DomainError.
WPair w_payoff(double alpha_i, double alpha_j, double dalpha_i, double dalpha_j, double L, double F, double C);

enum class Roles { i_leads, j_leads, simultaneous, coin_flip_mix };

const char* to_string(Roles r);

struct GameOutcome {
    double tau = 0.0;
    Roles roles = Roles::i_leads;
    double w_i = 0.0;
    double w_j = 0.0;
};

/// Outcome when the game stops at demand z (z in at least one active set).
GameOutcome resolve_stop(double z, const StrategySpec& i, const StrategySpec& j, const PayoffModel& model);

struct SubgameValue {
    McEstimate v_i;
    McEstimate v_j;
    bool never_stops = false;
    std::vector<std::string> warnings;
};

/// V_i, V_j of the subgame started at demand z0 at time t0. Discounting runs
/// from t0, so t0 only labels the subgame.
SubgameValue simulate_subgame(double z0, double t0, const StrategySpec& i, const StrategySpec& j,
                              const SimConfig& cfg, const PayoffModel& model);

/// A strategy pair evaluated in one batch.
struct ProfilePair {
    StrategySpec i;
    StrategySpec j;
};

struct PairValues {
    McEstimate v_i;
    McEstimate v_j;
    McEstimate diff_i;  // paired v_i - v_i(base)
    McEstimate diff_j;
};

/// Values of every pair at every start level on one shared path ensemble;
/// differences are taken path by path against pairs[0]. Result is [z0][pair].
std::vector<std::vector<PairValues>> evaluate_pairs(std::span<const double> z0s, std::span<const ProfilePair> pairs,
                                                    const SimConfig& cfg, const PayoffModel& model);

namespace reference {

/// Serial path-by-path version of evaluate_pairs.
std::vector<std::vector<PairValues>> evaluate_pairs(std::span<const double> z0s, std::span<const ProfilePair> pairs,
                                                    const SimConfig& cfg, const PayoffModel& model);

}  // namespace reference

/// Threshold deviations: up-rays [c, inf), down-rays (0, c] and bands [c, 1.5c]
/// with c on a geometric grid over [c_lo, c_hi].
std::vector<StrategySpec> threshold_family(double c_lo, double c_hi, std::size_t n_up = 20, std::size_t n_down = 15,
                                           std::size_t n_band = 15);

struct DeviationEntry {
    std::string name;
    McEstimate value;
    McEstimate improvement;
};

struct DeviationReport {
    double z0 = 0.0;
    char firm = 'i';
    McEstimate base;
    std::vector<DeviationEntry> entries;
    std::size_t worst = 0;  // entry with the largest improvement z-score

    double max_improvement() const;
    /// No entry improves by more than k standard errors.
    bool holds(double k = 3.0) const;
};

/// For each z0 and each firm in `firms` ("i", "j" or "ij"), the improvement of
/// every family member over the profile with the other firm held fixed.
std::vector<DeviationReport> deviation_test(const StrategySpec& i, const StrategySpec& j, const std::string& firms,
                                            std::span<const StrategySpec> family, std::span<const double> z0s,
                                            const SimConfig& cfg, const PayoffModel& model);

struct CounterexampleCase {
    std::string candidate;
    std::string deviation;
    McEstimate candidate_value;
    McEstimate deviation_value;
    McEstimate gain;

    bool significant(double k = 3.0) const { return gain.estimate > k * gain.std_error; }
};

struct CounterexampleReport {
    bool found = false;
    double z0 = 0.0;
    double sup_l = 0.0;  // sup of L on (0, a2_hi]
    std::vector<CounterexampleCase> cases;
};

/// Scans upward from a2_hi for z0 with C(z0) > sup L on (0, a2_hi] and, for the
/// never-invest, joint-stop-with-F>L and joint-stop-with-F<=L symmetric
/// candidates, estimates the gain of the unilateral deviation that breaks them.
CounterexampleReport symmetric_counterexample(const EquilibriumProfile& profile, const SimConfig& cfg,
                                              double search_factor = 100.0);

void to_json(nlohmann::json& j, const StrategySpec& s);
void to_json(nlohmann::json& j, const SubgameValue& v);
void to_json(nlohmann::json& j, const DeviationReport& r);
void to_json(nlohmann::json& j, const CounterexampleReport& r);

}  // namespace duopoly
