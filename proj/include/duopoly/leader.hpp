#pragma once

#include "json.hpp"

#include "duopoly/follower.hpp"
#include "duopoly/params.hpp"
#include "duopoly/piecewise.hpp"

namespace duopoly {

/// Discounted monopoly benefit while demand stays in (z_lo, z_hi):
/// xi/(r-alpha) * (z - z_lo E[e^{-r tau}; exit low] - z_hi E[e^{-r tau}; exit high]).
double monopoly_term(double z, double z_lo, double z_hi, const MarketParams& market, const EconParams& econ,
                     const CharRoots& roots);

/// monopoly_term written in the {z^gamma, z^beta, z, 1} basis.
Segment monopoly_segment(double z_lo, double z_hi, const MarketParams& market, const EconParams& econ,
                         const CharRoots& roots);

double leader_low(double z, const FollowerLowSolution& follower, const MarketParams& market, const EconParams& econ);
double leader_high(double z, const FollowerHighSolution& follower, const MarketParams& market,
                   const EconParams& econ);

struct LeaderSolution {
    PiecewiseValue low_value;
    PiecewiseValue high_value;
    PiecewiseValue combined;
    FollowerLowSolution follower_low;
    FollowerHighSolution follower_high;
};

LeaderSolution solve_leader(const MarketParams& market, const EconParams& econ, const FollowerLowSolution& low,
                            const FollowerHighSolution& high);

/// 1/2 L_H + 1/2 L_L.
double leader_value(double z, const LeaderSolution& sol, const EconParams& econ);

/// Everything needed to evaluate L, F and C for one configuration.
struct PayoffModel {
    MarketParams market;
    EconParams econ;
    CharRoots roots;
    FollowerLowSolution follower_low;
    FollowerHighSolution follower_high;
    LeaderSolution leader;
    PiecewiseValue follower;  // F

    double L(double z) const;
    double F(double z) const;
    double C(double z) const;
};

PayoffModel build_model(const MarketParams& market, const EconParams& econ);

void to_json(nlohmann::json& j, const LeaderSolution& s);

}  // namespace duopoly
