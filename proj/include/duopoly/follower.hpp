#pragma once

#include <string>

#include "json.hpp"

#include "duopoly/intervals.hpp"
#include "duopoly/params.hpp"
#include "duopoly/piecewise.hpp"

namespace duopoly {

enum class FollowerRegime { inner_wait, always_innovate };

const char* to_string(FollowerRegime r);

/// (a2/a1)^{gamma/(gamma-1)}, the quantity compared against K2/K1.
double regime_ratio(const MarketParams& market, const EconParams& econ);

/// Equality goes to always_innovate.
FollowerRegime classify_regime(const MarketParams& market, const EconParams& econ);

/// Relative residuals of the four pasting equations at z2 and z3.
struct PastingResiduals {
    double value_z2 = 0.0;
    double slope_z2 = 0.0;
    double value_z3 = 0.0;
    double slope_z3 = 0.0;

    double max() const;
};

/// Copy threshold z1 and coefficient A0 of the region below it.
struct CopyThreshold {
    double z1 = 0.0;
    double a0 = 0.0;
};

CopyThreshold copy_threshold(const MarketParams& market, const EconParams& econ);

/// Follower value after a low-profit reveal. In the always-innovate regime
/// z1, z2, a0_coef and c0_coef are NaN.
struct FollowerLowSolution {
    FollowerRegime regime = FollowerRegime::inner_wait;
    CharRoots roots;
    DerivedCoeffs coeffs;
    double z1 = 0.0;
    double z2 = 0.0;
    double z3 = 0.0;
    double a0_coef = 0.0;
    double b0_coef = 0.0;
    double c0_coef = 0.0;  // continuation value is b0 z^gamma - c0 z^beta
    PiecewiseValue value;
    PastingResiduals residuals;
    int iterations = 0;
    std::string method;  // closed_form, newton or bracket
};

/// Throws ConfigError when p_high != 1/2, SolverError when the pasting
/// system does not converge or returns thresholds out of order.
FollowerLowSolution solve_low(const MarketParams& market, const EconParams& econ);

double eval_low(double z, const FollowerLowSolution& sol);

struct FollowerHighSolution {
    double z_h = 0.0;
    double pi_high = 0.0;
    double growth = 0.0;    // r - alpha
    double copy_cost = 0.0; // (1 - theta) I
    double gamma = 0.0;
    PiecewiseValue value;
};

FollowerHighSolution solve_high(const MarketParams& market, const EconParams& econ);

double eval_high(double z, const FollowerHighSolution& sol);

/// 1/2 F_H + 1/2 F_L.
double follower_value(double z, const FollowerLowSolution& low, const FollowerHighSolution& high,
                      const EconParams& econ);

enum class ProfitOutcome { high, low };
enum class FollowerAction { wait, copy, innovate };

const char* to_string(FollowerAction a);

FollowerAction follower_policy(double z, ProfitOutcome outcome, const FollowerLowSolution& low,
                               const FollowerHighSolution& high);

/// Demand levels at which the follower acts: [z1,z2] u [z3,inf), or [z3,inf).
IntervalSet low_stop_region(const FollowerLowSolution& sol);
IntervalSet high_stop_region(const FollowerHighSolution& sol);

void to_json(nlohmann::json& j, const FollowerLowSolution& s);
void to_json(nlohmann::json& j, const FollowerHighSolution& s);

}  // namespace duopoly
