#pragma once

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "duopoly/intervals.hpp"
#include "duopoly/leader.hpp"

namespace duopoly {

using ValueFn = std::function<double(double)>;

struct ScenarioReport {
    bool below_z1 = false;  // some z < z1 with L > F
    bool in_band = false;   // some z in (z2, z3) with L > F
    double witness_below = 0.0;
    double witness_band = 0.0;
    double margin_below = 0.0;  // max of L - F found below z1
    double margin_band = 0.0;

    bool holds() const { return below_z1 && in_band; }
};

/// Throws GeometryError unless the low-profit follower is in the inner_wait regime.
ScenarioReport check_scenario(const PayoffModel& model, std::size_t grid = 4096);

struct XiSweepStep {
    double xi = 0.0;
    ScenarioReport report;
};

struct XiSweep {
    std::vector<XiSweepStep> steps;
    double xi = 0.0;  // first value in the sweep satisfying both conditions
};

/// Doubles xi from `start` until the scenario holds; throws GeometryError
/// after `max_doublings`.
XiSweep sweep_xi(const MarketParams& market, EconParams econ, double start = 1.0, int max_doublings = 30);

struct PreemptionIntervals {
    double a1_lo = 0.0;
    double a1_hi = 0.0;
    double a2_lo = 0.0;
    double a2_hi = 0.0;

    Interval a1() const { return {a1_lo, a1_hi}; }
    Interval a2() const { return {a2_lo, a2_hi}; }
    IntervalSet as_set() const { return IntervalSet({a1(), a2()}); }
    bool contains(double z) const { return a1().contains(z) || a2().contains(z); }
};

/// Maximal runs of L >= F on a geometric grid over [z_lo, z_max], endpoints
/// refined by bisection to 1e-10 relative. Throws GeometryError (message
/// carries a grid dump) unless there are exactly two.
PreemptionIntervals find_intervals(const ValueFn& L, const ValueFn& F, double z_lo, double z_max,
                                   std::size_t grid = 4096);

/// Grid from z_h/10 (pushed down while L >= F there) to 10 z3.
PreemptionIntervals find_intervals(const PayoffModel& model, std::size_t grid = 4096);

/// (L-F)/(L-C); values within 1e-12 of [0,1] are clamped, anything further
/// out or L <= C throws GeometryError.
double alpha_at(double z, const ValueFn& L, const ValueFn& F, const ValueFn& C);
double alpha_at(double z, const PayoffModel& model);

struct BSetOptions {
    double z_max_factor = 10.0;  // region 3 is cut at z_max_factor * a2_hi
    std::size_t y_grid = 1024;   // per region
    std::size_t z_grid = 512;    // per y, before Brent refinement
};

struct BSets {
    IntervalSet b1;
    IntervalSet b2;
    IntervalSet b3;
    double z_max_bound = 0.0;
    double tail_start = 0.0;  // beyond this, L is affine and z^{-gamma} L decreasing
    bool tail_ok = false;     // tail_start <= z_max_bound, so b3 continues to infinity
};

/// Discount factor d(y, z) used in the B-set inequality.
double b_discount(double y, double z, const CharRoots& roots);

/// L(y) - sup_{z in [lo, hi]} d(y,z) L(z); y is in the B-set of the region iff this is >= 0.
double b_margin(double y, double lo, double hi, const ValueFn& L, const CharRoots& roots, std::size_t z_grid = 512);

/// Region closures are [0, a1_lo], [a1_hi, a2_lo] and [a2_hi, z_max_bound].
/// Tail facts are taken from `model`.
BSets compute_b_sets(const PayoffModel& model, const PreemptionIntervals& a, const BSetOptions& opt = {});

namespace reference {

BSets compute_b_sets(const PayoffModel& model, const PreemptionIntervals& a, const BSetOptions& opt = {});

}  // namespace reference

enum class RegionLabel { no_invest, preempt_a1, vacuum, preempt_a2, invest_b, invest_b3 };

const char* to_string(RegionLabel label);

struct EquilibriumProfile {
    PayoffModel model;
    PreemptionIntervals a;
    BSets b;

    /// Eager firm: indicator of the B-sets outside A, preemption ratio inside.
    double alpha_i(double z) const;
    /// Patient firm: zero outside A, preemption ratio inside.
    double alpha_j(double z) const;
    bool has_vacuum() const;
    /// Parts of (a1_hi, a2_lo) outside B2.
    IntervalSet vacuum() const;
};

EquilibriumProfile build_profile(const PayoffModel& model, const PreemptionIntervals& a, const BSets& b);

RegionLabel classify_demand(double z, const EquilibriumProfile& profile);

void to_json(nlohmann::json& j, const ScenarioReport& s);
void to_json(nlohmann::json& j, const PreemptionIntervals& p);
void to_json(nlohmann::json& j, const BSets& b);

}  // namespace duopoly
