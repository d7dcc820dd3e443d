#include "duopoly/leader.hpp"

#include <cmath>

#include "duopoly/errors.hpp"
#include "duopoly/gbm.hpp"

namespace duopoly {

namespace {

void require_even_odds(const EconParams& econ) {
    if (econ.p_high != 0.5) throw ConfigError("p_high: follower and leader values require p_high = 0.5");
}

// Leader value while the follower waits below `threshold`:
// (pi + xi) z/(r-alpha) - xi/(r-alpha) threshold^{1-gamma} z^gamma - I.
Segment below_threshold(double pi, double threshold, const MarketParams& m, const EconParams& e, double gamma) {
    const double k = e.xi / (m.r - m.alpha);
    return Segment{-k * std::pow(threshold, 1.0 - gamma), 0.0, (pi + e.xi) / (m.r - m.alpha), -e.inv_cost};
}

Segment shared(double pi, const MarketParams& m, const EconParams& e) {
    return Segment{0.0, 0.0, pi / (m.r - m.alpha), -e.inv_cost};
}

}  // namespace

double monopoly_term(double z, double z_lo, double z_hi, const MarketParams& market, const EconParams& econ,
                     const CharRoots& roots) {
    if (!(z_lo < z && z < z_hi)) throw DomainError("monopoly_term: need z_lo < z < z_hi");
    const TwoSidedFunctionals f = two_sided_functionals(z, z_lo, z_hi, market, roots);
    return econ.xi / (market.r - market.alpha) * (z - z_lo * f.disc_lower - z_hi * f.disc_upper);
}

Segment monopoly_segment(double z_lo, double z_hi, const MarketParams& market, const EconParams& econ,
                         const CharRoots& roots) {
    const double g = roots.gamma;
    const double b = roots.beta;
    const double k = econ.xi / (market.r - market.alpha);
    const double d_up = std::pow(z_hi / z_lo, g) - std::pow(z_hi / z_lo, b);
    const double d_lo = std::pow(z_lo / z_hi, g) - std::pow(z_lo / z_hi, b);
    Segment s;
    s.c_gamma = -k * (z_lo * std::pow(z_hi, -g) / d_lo + z_hi * std::pow(z_lo, -g) / d_up);
    s.c_beta = k * (z_lo * std::pow(z_hi, -b) / d_lo + z_hi * std::pow(z_lo, -b) / d_up);
    s.c_lin = k;
    return s;
}

double leader_low(double z, const FollowerLowSolution& f, const MarketParams& market, const EconParams& econ) {
    if (!(z > 0.0)) throw DomainError("leader_low: z must be > 0");
    const double growth = market.r - market.alpha;
    const double base = econ.pi_low * z / growth - econ.inv_cost;
    const double g = f.roots.gamma;
    auto below = [&](double threshold) { return econ.xi * z / growth * (1.0 - std::pow(z / threshold, g - 1.0)); };
    if (f.regime == FollowerRegime::always_innovate) return z < f.z3 ? base + below(f.z3) : base;
    if (z < f.z1) return base + below(f.z1);
    if (z <= f.z2) return base;
    if (z < f.z3) return base + monopoly_term(z, f.z2, f.z3, market, econ, f.roots);
    return base;
}

double leader_high(double z, const FollowerHighSolution& f, const MarketParams& market, const EconParams& econ) {
    if (!(z > 0.0)) throw DomainError("leader_high: z must be > 0");
    const double growth = market.r - market.alpha;
    const double base = econ.pi_high * z / growth - econ.inv_cost;
    if (z >= f.z_h) return base;
    return base + econ.xi * z / growth * (1.0 - std::pow(z / f.z_h, f.gamma - 1.0));
}

LeaderSolution solve_leader(const MarketParams& market, const EconParams& econ, const FollowerLowSolution& low,
                            const FollowerHighSolution& high) {
    require_even_odds(econ);
    const CharRoots& roots = low.roots;
    const double g = roots.gamma;
    LeaderSolution s;
    s.follower_low = low;
    s.follower_high = high;
    const Segment after_low = shared(econ.pi_low, market, econ);
    if (low.regime == FollowerRegime::always_innovate) {
        s.low_value = PiecewiseValue(g, roots.beta, {low.z3},
                                     {below_threshold(econ.pi_low, low.z3, market, econ, g), after_low});
    } else {
        Segment mid = monopoly_segment(low.z2, low.z3, market, econ, roots);
        mid.c_lin += after_low.c_lin;
        mid.c_const = after_low.c_const;
        s.low_value = PiecewiseValue(g, roots.beta, {low.z1, low.z2, low.z3},
                                     {below_threshold(econ.pi_low, low.z1, market, econ, g), after_low, mid, after_low});
    }
    s.high_value = PiecewiseValue(g, roots.beta, {high.z_h},
                                  {below_threshold(econ.pi_high, high.z_h, market, econ, g),
                                   shared(econ.pi_high, market, econ)});
    s.combined = PiecewiseValue::combine(0.5, s.high_value, 0.5, s.low_value);
    return s;
}

double leader_value(double z, const LeaderSolution& sol, const EconParams& econ) {
    require_even_odds(econ);
    return eval_piecewise(sol.combined, z);
}

double PayoffModel::L(double z) const { return eval_piecewise(leader.combined, z); }
double PayoffModel::F(double z) const { return eval_piecewise(follower, z); }
double PayoffModel::C(double z) const { return cournot_value(z, market, econ); }

PayoffModel build_model(const MarketParams& market, const EconParams& econ) {
    PayoffModel m;
    m.market = market;
    m.econ = econ;
    m.roots = char_roots(market);
    m.follower_low = solve_low(market, econ);
    m.follower_high = solve_high(market, econ);
    m.leader = solve_leader(market, econ, m.follower_low, m.follower_high);
    m.follower = PiecewiseValue::combine(0.5, m.follower_high.value, 0.5, m.follower_low.value);
    return m;
}

void to_json(nlohmann::json& j, const LeaderSolution& s) {
    j = {{"low", s.low_value},
         {"high", s.high_value},
         {"continuity", {{"low", max_breakpoint_jump(s.low_value)}, {"high", max_breakpoint_jump(s.high_value)}}}};
}

}  // namespace duopoly
