#include "duopoly/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "duopoly/errors.hpp"
#include "duopoly/gbm.hpp"

namespace duopoly {

namespace {

std::vector<double> geometric_grid(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    const double step = std::log(hi / lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo * std::exp(step * static_cast<double>(i));
    out.back() = hi;
    return out;
}

struct BestGap {
    double z = 0.0;
    double gap = -kInf;
};

// Max of L - F over a geometric grid on [lo, hi], polished with Brent.
BestGap max_gap(const PayoffModel& m, double lo, double hi, std::size_t n) {
    const auto zs = geometric_grid(lo, hi, n);
    std::size_t best = 0;
    double best_v = -kInf;
    for (std::size_t i = 0; i < zs.size(); ++i) {
        const double v = m.L(zs[i]) - m.F(zs[i]);
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }
    const double a = std::log(zs[best == 0 ? 0 : best - 1]);
    const double b = std::log(zs[std::min(best + 1, zs.size() - 1)]);
    BestGap out{zs[best], best_v};
    if (b > a) {
        const auto [lz, neg] = boost::math::tools::brent_find_minima(
            [&](double x) { return -(m.L(std::exp(x)) - m.F(std::exp(x))); }, a, b, 50);
        if (-neg > best_v) out = {std::exp(lz), -neg};
    }
    return out;
}

// Root of f between a and b (f(a), f(b) of opposite sign), returned on the
// side where f >= 0.
double refine_root(const ValueFn& f, double a, double b) {
    const double fa = f(a);
    auto [lo, hi] = boost::math::tools::bisect(f, a, b, boost::math::tools::eps_tolerance<double>(42));
    const double flo = f(lo);
    const double fhi = f(hi);
    if (flo >= 0.0 && fhi >= 0.0) return fa >= 0.0 ? hi : lo;
    if (flo >= 0.0) return lo;
    if (fhi >= 0.0) return hi;
    return std::abs(flo) < std::abs(fhi) ? lo : hi;
}

}  // namespace

ScenarioReport check_scenario(const PayoffModel& m, std::size_t grid) {
    const FollowerLowSolution& f = m.follower_low;
    if (f.regime != FollowerRegime::inner_wait) {
        throw GeometryError("check_scenario: requires the inner_wait follower regime");
    }
    ScenarioReport r;
    const BestGap below = max_gap(m, f.z1 * 1e-4, f.z1 * (1.0 - 1e-12), grid);
    const BestGap band = max_gap(m, f.z2 * (1.0 + 1e-12), f.z3 * (1.0 - 1e-12), grid);
    r.margin_below = below.gap;
    r.witness_below = below.z;
    r.below_z1 = below.gap > 0.0;
    r.margin_band = band.gap;
    r.witness_band = band.z;
    r.in_band = band.gap > 0.0;
    return r;
}

XiSweep sweep_xi(const MarketParams& market, EconParams econ, double start, int max_doublings) {
    if (!(start > 0.0)) throw DomainError("sweep_xi: start must be > 0");
    XiSweep out;
    double xi = start;
    for (int k = 0; k <= max_doublings; ++k, xi *= 2.0) {
        econ.xi = xi;
        const ScenarioReport r = check_scenario(build_model(market, econ));
        out.steps.push_back({xi, r});
        if (r.holds()) {
            out.xi = xi;
            return out;
        }
    }
    throw GeometryError("sweep_xi: scenario conditions still fail at xi = " + std::to_string(xi / 2.0));
}

PreemptionIntervals find_intervals(const ValueFn& L, const ValueFn& F, double z_lo, double z_max, std::size_t grid) {
    if (!(z_lo > 0.0 && z_max > z_lo) || grid < 3) throw DomainError("find_intervals: need 0 < z_lo < z_max, grid >= 3");
    const auto zs = geometric_grid(z_lo, z_max, grid);
    std::vector<char> pos(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) pos[i] = L(zs[i]) - F(zs[i]) >= 0.0;

    const ValueFn gap = [&](double z) { return L(z) - F(z); };
    std::vector<Interval> runs;
    for (std::size_t i = 0; i < zs.size();) {
        if (!pos[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < zs.size() && pos[j + 1]) ++j;
        const double lo = i == 0 ? zs[0] : refine_root(gap, zs[i - 1], zs[i]);
        const double hi = j + 1 == zs.size() ? zs.back() : refine_root(gap, zs[j], zs[j + 1]);
        runs.push_back({lo, hi});
        i = j + 1;
    }
    const bool clipped = pos.front() || pos.back();
    if (runs.size() != 2 || clipped) {
        std::ostringstream msg;
        msg << "find_intervals: expected exactly two intervals with L >= F inside (" << z_lo << ", " << z_max
            << "), found " << runs.size() << (clipped ? " (touching the scan bounds)" : "") << "; runs:";
        for (const auto& r : runs) msg << " [" << r.lo << ", " << r.hi << "]";
        msg << "; grid (z, L-F):";
        const std::size_t stride = std::max<std::size_t>(1, zs.size() / 32);
        for (std::size_t i = 0; i < zs.size(); i += stride) msg << " (" << zs[i] << ", " << gap(zs[i]) << ")";
        throw GeometryError(msg.str());
    }
    return {runs[0].lo, runs[0].hi, runs[1].lo, runs[1].hi};
}

PreemptionIntervals find_intervals(const PayoffModel& m, std::size_t grid) {
    double z_lo = m.follower_high.z_h / 10.0;
    for (int k = 0; k < 60 && m.L(z_lo) - m.F(z_lo) >= 0.0; ++k) z_lo /= 2.0;
    const ValueFn L = [&](double z) { return m.L(z); };
    const ValueFn F = [&](double z) { return m.F(z); };
    return find_intervals(L, F, z_lo, 10.0 * m.follower_low.z3, grid);
}

double alpha_at(double z, const ValueFn& L, const ValueFn& F, const ValueFn& C) {
    const double l = L(z);
    const double c = C(z);
    if (!(l > c)) throw GeometryError("alpha_at: L <= C at z = " + std::to_string(z));
    const double a = (l - F(z)) / (l - c);
    if (a < -1e-12 || a > 1.0 + 1e-12) {
        throw GeometryError("alpha_at: preemption ratio " + std::to_string(a) + " outside [0,1] at z = " +
                            std::to_string(z));
    }
    return std::clamp(a, 0.0, 1.0);
}

double alpha_at(double z, const PayoffModel& m) {
    const double l = m.L(z);
    const double c = m.C(z);
    if (!(l > c)) throw GeometryError("alpha_at: L <= C at z = " + std::to_string(z));
    const double a = (l - m.F(z)) / (l - c);
    if (a < -1e-12 || a > 1.0 + 1e-12) {
        throw GeometryError("alpha_at: preemption ratio " + std::to_string(a) + " outside [0,1] at z = " +
                            std::to_string(z));
    }
    return std::clamp(a, 0.0, 1.0);
}

double b_discount(double y, double z, const CharRoots& roots) { return discount_at_hit(y, z, roots); }

double b_margin(double y, double lo, double hi, const ValueFn& L, const CharRoots& roots, std::size_t z_grid) {
    const double ly = L(y);
    auto h = [&](double z) { return b_discount(y, z, roots) * L(z); };
    double sup = -kInf;
    double grid_lo = lo;
    if (lo <= 0.0) {
        sup = 0.0;  // z -> 0: the discount factor vanishes faster than L stays bounded
        grid_lo = hi * 1e-6;
    }
    if (y >= lo && y <= hi) sup = std::max(sup, ly);
    const auto zs = geometric_grid(grid_lo, hi, z_grid);
    std::size_t best = 0;
    double best_v = -kInf;
    for (std::size_t i = 0; i < zs.size(); ++i) {
        const double v = h(zs[i]);
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }
    sup = std::max(sup, best_v);
    auto polish = [&](double a, double b) {
        if (!(b > a)) return;
        const auto [lz, neg] =
            boost::math::tools::brent_find_minima([&](double x) { return -h(std::exp(x)); }, std::log(a), std::log(b), 50);
        sup = std::max({sup, -neg, h(a), h(b)});
    };
    const double a = zs[best == 0 ? 0 : best - 1];
    const double b = zs[std::min(best + 1, zs.size() - 1)];
    if (y > a && y < b) {
        polish(a, y);
        polish(y, b);
    } else {
        polish(a, b);
    }
    return ly - sup;
}

namespace {

struct Region {
    double lo;
    double hi;
    bool open_hi;  // the region excludes its upper end
};

bool is_member(double margin, double ly) { return margin >= -1e-12 * (1.0 + std::abs(ly)); }

template <bool Parallel>
IntervalSet region_b_set(const PayoffModel& m, Region region, const BSetOptions& opt) {
    const ValueFn L = [&](double z) { return m.L(z); };
    const double y_lo = region.lo > 0.0 ? region.lo : region.hi * 1e-3;
    const auto ys = geometric_grid(y_lo, region.hi, opt.y_grid);
    std::vector<char> member(ys.size());
    const auto n = static_cast<std::int64_t>(ys.size());
    auto one = [&](std::int64_t i) {
        const double y = ys[static_cast<std::size_t>(i)];
        member[static_cast<std::size_t>(i)] = is_member(b_margin(y, region.lo, region.hi, L, m.roots, opt.z_grid), L(y));
    };
    if constexpr (Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (std::int64_t i = 0; i < n; ++i) one(i);
    } else {
        for (std::int64_t i = 0; i < n; ++i) one(i);
    }

    const ValueFn signed_margin = [&](double y) {
        const double mg = b_margin(y, region.lo, region.hi, L, m.roots, opt.z_grid);
        return is_member(mg, L(y)) ? std::max(mg, 0.0) + 1e-300 : mg;
    };
    std::vector<Interval> out;
    for (std::size_t i = 0; i < ys.size();) {
        if (!member[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < ys.size() && member[j + 1]) ++j;
        const double lo = i == 0 ? ys[0] : refine_root(signed_margin, ys[i - 1], ys[i]);
        const double hi = j + 1 == ys.size() ? ys.back() : refine_root(signed_margin, ys[j], ys[j + 1]);
        i = j + 1;
        // runs starting at a lower end shared with A and narrower than the
        // refinement resolution are that endpoint itself, already in A
        if (region.lo > 0.0 && lo <= region.lo && hi - lo < 1e-10 * region.lo) continue;
        if (region.open_hi && hi >= region.hi) {
            // a run this close to the excluded end is below the refinement resolution
            if (hi - lo < 1e-10 * region.hi) continue;
            out.push_back({lo, std::nextafter(region.hi, 0.0)});
        } else {
            out.push_back({lo, hi});
        }
    }
    return IntervalSet(std::move(out));
}

template <bool Parallel>
BSets b_sets_impl(const PayoffModel& m, const PreemptionIntervals& a, const BSetOptions& opt) {
    if (!(a.a1_lo < a.a1_hi && a.a1_hi < a.a2_lo && a.a2_lo < a.a2_hi)) {
        throw DomainError("compute_b_sets: preemption intervals out of order");
    }
    BSets b;
    b.z_max_bound = opt.z_max_factor * a.a2_hi;
    b.b1 = region_b_set<Parallel>(m, {0.0, a.a1_lo, true}, opt);
    b.b2 = region_b_set<Parallel>(m, {a.a1_hi, a.a2_lo, true}, opt);
    b.b3 = region_b_set<Parallel>(m, {a.a2_hi, b.z_max_bound, false}, opt);

    // Above z3 and z_h, L is the line s z - I and z^{-gamma} L(z) falls for
    // z > gamma I / ((gamma - 1) s).
    const double g = m.roots.gamma;
    const double slope = m.econ.expected_profit() / (m.market.r - m.market.alpha);
    b.tail_start = std::max({m.follower_low.z3, m.follower_high.z_h, g * m.econ.inv_cost / ((g - 1.0) * slope)});
    b.tail_ok = false;
    if (b.tail_start <= b.z_max_bound && !b.b3.empty()) {
        auto ivs = b.b3.intervals();
        Interval& last = ivs.back();
        if (last.hi >= b.z_max_bound) {
            last.hi = kInf;
            b.tail_ok = true;
            b.b3 = IntervalSet(std::move(ivs));
        }
    }
    return b;
}

}  // namespace

BSets compute_b_sets(const PayoffModel& model, const PreemptionIntervals& a, const BSetOptions& opt) {
    return b_sets_impl<true>(model, a, opt);
}

namespace reference {

BSets compute_b_sets(const PayoffModel& model, const PreemptionIntervals& a, const BSetOptions& opt) {
    return b_sets_impl<false>(model, a, opt);
}

}  // namespace reference

const char* to_string(RegionLabel label) {
    switch (label) {
        case RegionLabel::no_invest: return "no_invest";
        case RegionLabel::preempt_a1: return "preempt_A1";
        case RegionLabel::vacuum: return "vacuum";
        case RegionLabel::preempt_a2: return "preempt_A2";
        case RegionLabel::invest_b: return "invest_B";
        case RegionLabel::invest_b3: return "invest_B3";
    }
    return "?";
}

double EquilibriumProfile::alpha_i(double z) const {
    if (a.contains(z)) return alpha_at(z, model);
    return b.b1.contains(z) || b.b2.contains(z) || b.b3.contains(z) ? 1.0 : 0.0;
}

double EquilibriumProfile::alpha_j(double z) const { return a.contains(z) ? alpha_at(z, model) : 0.0; }

IntervalSet EquilibriumProfile::vacuum() const {
    std::vector<Interval> out;
    double cursor = a.a1_hi;
    for (const Interval& iv : b.b2.intervals()) {
        if (iv.lo > cursor) out.push_back({cursor, iv.lo});
        cursor = std::max(cursor, iv.hi);
    }
    if (cursor < a.a2_lo) out.push_back({cursor, a.a2_lo});
    return IntervalSet(std::move(out));
}

bool EquilibriumProfile::has_vacuum() const {
    const IntervalSet v = vacuum();
    return std::any_of(v.intervals().begin(), v.intervals().end(),
                       [](const Interval& iv) { return iv.hi > iv.lo; });
}

EquilibriumProfile build_profile(const PayoffModel& model, const PreemptionIntervals& a, const BSets& b) {
    return EquilibriumProfile{model, a, b};
}

RegionLabel classify_demand(double z, const EquilibriumProfile& p) {
    if (!(z > 0.0)) throw DomainError("classify_demand: z must be > 0");
    if (z > p.a.a1_lo && z <= p.a.a1_hi) return RegionLabel::preempt_a1;
    if (z > p.a.a2_lo && z <= p.a.a2_hi) return RegionLabel::preempt_a2;
    if (p.b.b3.contains(z)) return RegionLabel::invest_b3;
    if (p.b.b1.contains(z) || p.b.b2.contains(z)) return RegionLabel::invest_b;
    if (z > p.a.a1_hi && z < p.a.a2_lo) return RegionLabel::vacuum;
    return RegionLabel::no_invest;
}

void to_json(nlohmann::json& j, const ScenarioReport& s) {
    j = {{"holds", s.holds()},
         {"below_z1", {{"holds", s.below_z1}, {"witness", s.witness_below}, {"max_L_minus_F", s.margin_below}}},
         {"in_band", {{"holds", s.in_band}, {"witness", s.witness_band}, {"max_L_minus_F", s.margin_band}}}};
}

void to_json(nlohmann::json& j, const PreemptionIntervals& p) {
    j = {{"A1", Interval{p.a1_lo, p.a1_hi}}, {"A2", Interval{p.a2_lo, p.a2_hi}}};
}

void to_json(nlohmann::json& j, const BSets& b) {
    j = {{"B1", {{"region", "B1"}, {"intervals", b.b1}}},
         {"B2", {{"region", "B2"}, {"intervals", b.b2}}},
         {"B3", {{"region", "B3"}, {"intervals", b.b3}}},
         {"z_max_bound", b.z_max_bound},
         {"tail_start", b.tail_start},
         {"tail_ok", b.tail_ok}};
}

}  // namespace duopoly
