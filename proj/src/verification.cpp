#include "duopoly/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include "duopoly/equilibrium.hpp"
#include "duopoly/errors.hpp"
#include "duopoly/follower.hpp"
#include "duopoly/game.hpp"
#include "duopoly/gbm.hpp"
#include "duopoly/leader.hpp"
#include "duopoly/monte_carlo.hpp"

namespace duopoly {

namespace {

using json = nlohmann::json;

class Timer {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// n interior points of (lo, hi) on a geometric scale.
std::vector<double> interior_points(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = lo * std::pow(hi / lo, static_cast<double>(k + 1) / static_cast<double>(n + 1));
    }
    return out;
}

std::vector<double> geometric(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(n - 1));
    }
    out.back() = hi;
    return out;
}

double rel(double a, double b) { return std::abs(a - b) / (1.0 + std::max(std::abs(a), std::abs(b))); }

PayoffModel model_of(const ModelConfig& c) { return build_model(c.market, c.econ); }

SimConfig sim_with(const SimConfig& base, std::size_t paths, double dt) {
    SimConfig s = base;
    s.n_paths = paths;
    s.dt = dt;
    return s;
}

std::string fmt(double v, int prec = 3) {
    std::ostringstream s;
    s << std::setprecision(prec) << v;
    return s.str();
}

// --- smooth pasting -------------------------------------------------------

struct Joint {
    double value_gap = 0.0;
    double slope_gap = 0.0;
};

Joint joint_at(const PiecewiseValue& v, double z) {
    return {rel(v(z), v.left_value(z)), rel(v.derivative(z), v.left_derivative(z))};
}

// --- HJB ------------------------------------------------------------------

struct Operator {
    double half_s2;
    double alpha;
    double r;
};

// Second-order central differences with a relative step; returns the
// residual and the scale |1/2 s^2 z^2 V''| + |alpha z V'| + |r V|.
std::pair<double, double> fd_operator(const std::function<double(double)>& v, double z, const Operator& op) {
    const double h = 1e-4 * z;
    const double vm = v(z - h);
    const double v0 = v(z);
    const double vp = v(z + h);
    const double d1 = (vp - vm) / (2.0 * h);
    const double d2 = (vp - 2.0 * v0 + vm) / (h * h);
    const double a = op.half_s2 * z * z * d2;
    const double b = op.alpha * z * d1;
    const double c = op.r * v0;
    return {a + b - c, std::abs(a) + std::abs(b) + std::abs(c)};
}

}  // namespace

bool VerificationReport::all_passed() const {
    return std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.passed(); });
}

// 1 -----------------------------------------------------------------------

CriterionResult check_roots(std::uint64_t seed, std::size_t n) {
    Timer timer;
    CriterionResult res{1, "Root residuals", false, 0.0, 1.0, "", json::object()};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    std::size_t bad_sign = 0;
    for (std::size_t k = 0; k < n; ++k) {
        MarketParams m;
        m.r = 0.005 + 0.995 * u(rng);
        m.alpha = 0.99 * m.r * u(rng);
        m.sigma = 0.01 + 1.99 * u(rng);
        const CharRoots roots = char_roots(m);
        worst = std::max({worst, relative_root_residual(m, roots.gamma), relative_root_residual(m, roots.beta)});
        if (!(roots.gamma > 1.0 && roots.beta < 0.0)) ++bad_sign;
    }
    res.ok = worst < 1e-12 && bad_sign == 0;
    res.details = {{"n", n}, {"max_relative_residual", worst}, {"tolerance", 1e-12}, {"sign_violations", bad_sign}};
    res.summary = "max residual " + fmt(worst) + " over " + std::to_string(n) + " draws";
    res.seconds = timer.seconds();
    return res;
}

// 2 -----------------------------------------------------------------------

CriterionResult check_pasting(const ModelConfig& config) {
    Timer timer;
    CriterionResult res{2, "Smooth pasting", false, 0.0, 1.0, "", json::object()};
    const auto low = solve_low(config.market, config.econ);
    const auto high = solve_high(config.market, config.econ);
    if (low.regime != FollowerRegime::inner_wait) throw GeometryError("smooth pasting check needs the inner_wait regime");
    json joints = json::array();
    double worst_v = 0.0;
    double worst_s = 0.0;
    auto add = [&](const char* fn, const char* at, const PiecewiseValue& v, double z) {
        const Joint j = joint_at(v, z);
        worst_v = std::max(worst_v, j.value_gap);
        worst_s = std::max(worst_s, j.slope_gap);
        joints.push_back({{"function", fn}, {"at", at}, {"z", z}, {"value_gap", j.value_gap}, {"slope_gap", j.slope_gap}});
    };
    add("F_L", "z1", low.value, low.z1);
    add("F_L", "z2", low.value, low.z2);
    add("F_L", "z3", low.value, low.z3);
    add("F_H", "z_h", high.value, high.z_h);
    res.ok = worst_v < 1e-8 && worst_s < 1e-6;
    res.details = {{"joints", joints}, {"value_tolerance", 1e-8}, {"slope_tolerance", 1e-6}};
    res.summary = "max value gap " + fmt(worst_v) + ", max slope gap " + fmt(worst_s);
    res.seconds = timer.seconds();
    return res;
}

// 3 -----------------------------------------------------------------------

CriterionResult check_hjb(const ModelConfig& config) {
    Timer timer;
    CriterionResult res{3, "HJB residuals", false, 0.0, 1.0, "", json::object()};
    const PayoffModel m = model_of(config);
    const auto& fl = m.follower_low;
    const auto& fh = m.follower_high;
    const auto& mk = m.market;
    const auto& ec = m.econ;
    const Operator op{0.5 * mk.sigma * mk.sigma, mk.alpha, mk.r};

    struct Piece {
        const char* fn;
        double lo;
        double hi;
        std::function<double(double)> v;
        double flow;  // profit rate earned on the piece: pi + xi for the leader, 0 for the follower
    };
    const auto FL = [&](double z) { return fl.value(z); };
    const auto FH = [&](double z) { return fh.value(z); };
    const auto LL = [&](double z) { return m.leader.low_value(z); };
    const auto LH = [&](double z) { return m.leader.high_value(z); };
    std::vector<Piece> pieces;
    const double floor_lo = 1e-3;
    if (fl.regime == FollowerRegime::inner_wait) {
        pieces.push_back({"F_L", fl.z1 * floor_lo, fl.z1, FL, 0.0});
        pieces.push_back({"F_L", fl.z2, fl.z3, FL, 0.0});
        pieces.push_back({"L_L", fl.z1 * floor_lo, fl.z1, LL, ec.pi_low + ec.xi});
        pieces.push_back({"L_L", fl.z2, fl.z3, LL, ec.pi_low + ec.xi});
    } else {
        pieces.push_back({"F_L", fl.z3 * floor_lo, fl.z3, FL, 0.0});
        pieces.push_back({"L_L", fl.z3 * floor_lo, fl.z3, LL, ec.pi_low + ec.xi});
    }
    pieces.push_back({"F_H", fh.z_h * floor_lo, fh.z_h, FH, 0.0});
    pieces.push_back({"L_H", fh.z_h * floor_lo, fh.z_h, LH, ec.pi_high + ec.xi});

    json out = json::array();
    bool ok = true;
    std::vector<std::string> failing;
    for (const auto& p : pieces) {
        double worst = 0.0;
        double worst_flow = 0.0;
        // stay one FD step clear of the segment ends
        for (double z : interior_points(p.lo * (1.0 + 1e-3), p.hi * (1.0 - 1e-3), 50)) {
            const auto [resid, scale] = fd_operator(p.v, z, op);
            worst = std::max(worst, std::abs(resid) / scale);
            // same operator with the profit flow earned while the segment lasts
            const double src = p.flow * z - (p.flow > 0.0 ? mk.r * ec.inv_cost : 0.0);
            worst_flow = std::max(worst_flow, std::abs(resid + src) / (scale + std::abs(src)));
        }
        const bool piece_ok = worst < 1e-4;
        ok = ok && piece_ok;
        if (!piece_ok) failing.push_back(std::string(p.fn) + " on (" + fmt(p.lo, 4) + ", " + fmt(p.hi, 4) + ")");
        out.push_back({{"function", p.fn},
                       {"segment", {p.lo, p.hi}},
                       {"max_relative_residual", worst},
                       {"passed", piece_ok},
                       {"max_relative_residual_with_profit_flow", worst_flow}});
    }
    res.ok = ok;
    res.details = {{"segments", out}, {"tolerance", 1e-4}, {"points_per_segment", 50}};
    if (ok) {
        res.summary = "all continuation segments within 1e-4";
    } else {
        std::string s = "homogeneous operator nonzero on";
        for (const auto& f : failing) s += " " + f + ";";
        s += " leader values carry the profit flow (pi+xi) z - r I";
        res.summary = s;
    }
    res.seconds = timer.seconds();
    return res;
}

// 4 -----------------------------------------------------------------------

CriterionResult check_mc_oracles(const ModelConfig& config, const SimConfig& sim) {
    Timer timer;
    CriterionResult res{4, "MC oracle equivalence", false, 0.0, 120.0, "", json::object()};
    const PayoffModel m = model_of(config);
    const auto& fl = m.follower_low;
    const auto& fh = m.follower_high;
    const auto& mk = m.market;
    const auto& ec = m.econ;
    const double growth = mk.r - mk.alpha;
    if (fl.regime != FollowerRegime::inner_wait) throw GeometryError("MC oracle check needs the inner_wait regime");

    struct Branch {
        const char* name;
        double lo;
        double hi;
    };
    const std::vector<Branch> low_branches{{"(0, z1)", fl.z1 / 8.0, fl.z1},
                                           {"[z1, z2]", fl.z1, fl.z2},
                                           {"(z2, z3)", fl.z2, fl.z3},
                                           {"[z3, inf)", fl.z3, 3.0 * fl.z3}};
    const std::vector<Branch> high_branches{{"(0, z_h)", fh.z_h / 8.0, fh.z_h}, {"[z_h, inf)", fh.z_h, 3.0 * fh.z_h}};

    json rows = json::array();
    double worst_z = 0.0;
    std::size_t n_cmp = 0;
    std::size_t n_fail = 0;
    auto compare = [&](const char* fn, const char* branch, double z, const McEstimate& e, double exact) {
        const bool agree = e.agrees_with(exact);
        const double zs = e.std_error > 0.0 ? (e.estimate - exact) / e.std_error : 0.0;
        worst_z = std::max(worst_z, std::abs(zs));
        ++n_cmp;
        if (!agree) ++n_fail;
        rows.push_back({{"function", fn},
                        {"branch", branch},
                        {"z0", z},
                        {"exact", exact},
                        {"mc", e},
                        {"z_score", zs},
                        {"agrees", agree}});
    };

    // Low-profit side: F_L, the monopoly part of L_L, and M share the follower's stop set.
    {
        std::vector<double> z0s;
        std::vector<const char*> names;
        for (const auto& b : low_branches) {
            for (double z : interior_points(b.lo, b.hi, 5)) {
                z0s.push_back(z);
                names.push_back(b.name);
            }
        }
        const PathPayoff payoffs[] = {
            discounted_reward([&](double z) { return eval_low(z, fl); }, mk.r),
            [&](const StopEvent& e) { return ec.xi * e.disc_integral; },
        };
        const auto est = mc_policy_values(z0s, low_stop_region(fl), payoffs, sim, mk, IntegralTracking::on);
        for (std::size_t k = 0; k < z0s.size(); ++k) {
            const double z = z0s[k];
            compare("F_L", names[k], z, est[k][0], eval_low(z, fl));
            McEstimate ll = est[k][1];
            const double base = ec.pi_low * z / growth - ec.inv_cost;
            ll.estimate += base;
            compare("L_L", names[k], z, ll, m.leader.low_value(z));
            if (z > fl.z2 && z < fl.z3) compare("M", names[k], z, est[k][1], monopoly_term(z, fl.z2, fl.z3, mk, ec, m.roots));
        }
    }
    // High-profit side: F_H and L_H share the copy threshold.
    {
        std::vector<double> z0s;
        std::vector<const char*> names;
        for (const auto& b : high_branches) {
            for (double z : interior_points(b.lo, b.hi, 5)) {
                z0s.push_back(z);
                names.push_back(b.name);
            }
        }
        const PathPayoff payoffs[] = {
            discounted_reward([&](double z) { return eval_high(z, fh); }, mk.r),
            [&](const StopEvent& e) { return ec.xi * e.disc_integral; },
        };
        const auto est = mc_policy_values(z0s, high_stop_region(fh), payoffs, sim, mk, IntegralTracking::on);
        for (std::size_t k = 0; k < z0s.size(); ++k) {
            const double z = z0s[k];
            compare("F_H", names[k], z, est[k][0], eval_high(z, fh));
            McEstimate lh = est[k][1];
            lh.estimate += ec.pi_high * z / growth - ec.inv_cost;
            compare("L_H", names[k], z, lh, m.leader.high_value(z));
        }
    }
    res.ok = n_fail == 0;
    res.details = {{"comparisons", rows},
                   {"n_paths", sim.n_paths},
                   {"dt", sim.dt},
                   {"max_abs_z_score", worst_z},
                   {"failures", n_fail}};
    res.summary = std::to_string(n_cmp - n_fail) + "/" + std::to_string(n_cmp) + " within 3 SE, max |z| " +
                  fmt(worst_z);
    res.seconds = timer.seconds();
    return res;
}

// 5 -----------------------------------------------------------------------

CriterionResult check_geometry(const ModelConfig& config, std::uint64_t seed, std::size_t n_random) {
    Timer timer;
    CriterionResult res{5, "Ordering and geometry", false, 0.0, 30.0, "", json::object()};
    bool ok = true;

    // reference ordering
    const PayoffModel m = model_of(config);
    const auto& fl = m.follower_low;
    const double zh = m.follower_high.z_h;
    const bool ref_order = zh < fl.z1 && fl.z1 <= fl.z2 && fl.z2 <= fl.z3;
    ok = ok && ref_order;

    // random inner_wait configurations
    std::mt19937_64 rng(seed ^ 0x5eedULL);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t accepted = 0;
    std::size_t draws = 0;
    std::size_t violations = 0;
    std::size_t solver_failures = 0;
    std::vector<std::string> methods_seen;
    json examples = json::array();
    while (accepted < n_random && draws < 1000000) {
        ++draws;
        MarketParams mk;
        mk.r = 0.02 + 0.98 * u(rng);
        mk.alpha = 0.9 * mk.r * u(rng);
        mk.sigma = 0.1 + 0.9 * u(rng);
        EconParams ec;
        ec.pi_low = 0.5 + 1.5 * u(rng);
        ec.pi_high = ec.pi_low * (1.05 + 2.95 * u(rng));
        ec.theta = 0.2 + 0.75 * u(rng);
        ec.inv_cost = 1.0 + 29.0 * u(rng);
        ec.xi = 50.0 * u(rng);
        if (classify_regime(mk, ec) != FollowerRegime::inner_wait) continue;
        ++accepted;
        try {
            const auto low = solve_low(mk, ec);
            const auto high = solve_high(mk, ec);
            const bool good = high.z_h < low.z1 && low.z1 <= low.z2 && low.z2 <= low.z3;
            if (!good) {
                ++violations;
                if (examples.size() < 5) examples.push_back({{"market", mk}, {"econ", ec}});
            }
            if (std::find(methods_seen.begin(), methods_seen.end(), low.method) == methods_seen.end()) {
                methods_seen.push_back(low.method);
            }
        } catch (const SolverError& e) {
            ++solver_failures;
            if (examples.size() < 5) examples.push_back({{"market", mk}, {"econ", ec}, {"error", e.what()}});
        }
    }
    ok = ok && accepted == n_random && violations == 0 && solver_failures == 0;

    // xi sweep and the two preemption intervals
    json scenario;
    bool two_ok = false;
    double swept_xi = 0.0;
    try {
        const XiSweep sweep = sweep_xi(config.market, config.econ, 1.0, 30);
        swept_xi = sweep.xi;
        EconParams ec = config.econ;
        ec.xi = sweep.xi;
        const PayoffModel ms = build_model(config.market, ec);
        const PreemptionIntervals a = find_intervals(ms);
        const auto& f = ms.follower_low;
        const bool a1_below = a.a1_lo < f.z1;
        const bool a2_inside = a.a2_lo > f.z2 && a.a2_hi < f.z3;
        two_ok = a1_below && a2_inside;
        json steps = json::array();
        for (const auto& s : sweep.steps) steps.push_back({{"xi", s.xi}, {"holds", s.report.holds()}});
        scenario = {{"swept_xi", sweep.xi},
                    {"config_xi", config.econ.xi},
                    {"sweep", steps},
                    {"intervals", a},
                    {"z1", f.z1},
                    {"z2", f.z2},
                    {"z3", f.z3},
                    {"A1_meets_below_z1", a1_below},
                    {"A2_inside_z2_z3", a2_inside}};
    } catch (const std::exception& e) {
        scenario = {{"error", e.what()}};
    }
    ok = ok && two_ok;

    res.ok = ok;
    res.details = {{"reference",
                    {{"z_h", zh}, {"z1", fl.z1}, {"z2", fl.z2}, {"z3", fl.z3}, {"ordered", ref_order}}},
                   {"random",
                    {{"accepted", accepted},
                     {"draws", draws},
                     {"order_violations", violations},
                     {"solver_failures", solver_failures},
                     {"solver_methods", methods_seen},
                     {"examples", examples}}},
                   {"scenario", scenario}};
    res.summary = std::to_string(accepted) + " random inner_wait configs, " + std::to_string(violations + solver_failures) +
                  " bad; swept xi " + fmt(swept_xi) + (two_ok ? ", two intervals in place" : ", interval shape wrong");
    res.seconds = timer.seconds();
    return res;
}

// 6 -----------------------------------------------------------------------

CriterionResult check_alpha_bounds(const ModelConfig& config) {
    Timer timer;
    CriterionResult res{6, "Alpha bounds", false, 0.0, 1.0, "", json::object()};
    const PayoffModel m = model_of(config);
    const PreemptionIntervals a = find_intervals(m);
    double lo = kInf;
    double hi = -kInf;
    std::size_t n = 0;
    bool ok = true;
    std::string error;
    try {
        for (const Interval iv : {a.a1(), a.a2()}) {
            for (double z : interior_points(iv.lo, iv.hi, 500)) {
                const double v = alpha_at(z, m);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
                ++n;
            }
        }
    } catch (const GeometryError& e) {
        ok = false;
        error = e.what();
    }
    json ends = json::array();
    double worst_end = 0.0;
    for (double z : {a.a1_lo, a.a1_hi, a.a2_lo, a.a2_hi}) {
        const double raw = (m.L(z) - m.F(z)) / (m.L(z) - m.C(z));
        worst_end = std::max(worst_end, std::abs(raw));
        ends.push_back({{"z", z}, {"alpha", raw}});
    }
    ok = ok && lo >= 0.0 && hi <= 1.0 && worst_end <= 1e-8;
    res.ok = ok;
    res.details = {{"intervals", a},
                   {"interior_points", n},
                   {"min_alpha", lo},
                   {"max_alpha", hi},
                   {"endpoints", ends},
                   {"endpoint_tolerance", 1e-8}};
    if (!error.empty()) res.details["error"] = error;
    res.summary = "alpha in [" + fmt(lo) + ", " + fmt(hi) + "], max |alpha| at endpoints " + fmt(worst_end);
    res.seconds = timer.seconds();
    return res;
}

// 7 -----------------------------------------------------------------------

CriterionResult check_hitting(const ModelConfig& config, const SimConfig& sim) {
    Timer timer;
    CriterionResult res{7, "Hitting probability", false, 0.0, 60.0, "", json::object()};
    const PayoffModel m = model_of(config);
    const auto& mk = m.market;
    const double lower = m.follower_low.regime == FollowerRegime::inner_wait ? m.follower_low.z1 : m.follower_high.z_h;
    const double upper = m.follower_low.z3;
    const IntervalSet stop({{0.0, lower}, {upper, kInf}});
    const auto z0s = interior_points(lower, upper, 5);
    const PathPayoff up[] = {[&](const StopEvent& e) { return !e.capped && e.z >= upper ? 1.0 : 0.0; }};
    const auto est = mc_policy_values(z0s, stop, up, sim, mk);
    json rows = json::array();
    bool ok = true;
    double worst = 0.0;
    double worst_paper = 0.0;
    for (std::size_t k = 0; k < z0s.size(); ++k) {
        const double z = z0s[k];
        const double p_log = hit_upper_first_prob(z, lower, upper, mk, HitVariant::log_drift);
        const double p_paper = hit_upper_first_prob(z, lower, upper, mk, HitVariant::paper);
        const McEstimate& e = est[k][0];
        const bool agree = e.agrees_with(p_log);
        ok = ok && agree;
        worst = std::max(worst, std::abs(e.z_score(p_log)));
        worst_paper = std::max(worst_paper, std::abs(e.z_score(p_paper)));
        rows.push_back({{"z0", z},
                        {"log_drift", p_log},
                        {"paper_variant", p_paper},
                        {"mc", e},
                        {"z_log_drift", e.z_score(p_log)},
                        {"paper_variant_gap", p_paper - e.estimate},
                        {"z_paper_variant", e.z_score(p_paper)},
                        {"agrees", agree}});
    }
    const double s2 = mk.sigma * mk.sigma;
    res.ok = ok;
    res.details = {{"band", {lower, upper}},
                   {"exponent_log_drift", 1.0 - 2.0 * mk.alpha / s2},
                   {"exponent_paper_variant", 2.0 * std::abs(mk.alpha) / s2},
                   {"points", rows},
                   {"n_paths", sim.n_paths},
                   {"dt", sim.dt}};
    res.summary = "log-drift max |z| " + fmt(worst) + "; paper variant max |z| " + fmt(worst_paper);
    res.seconds = timer.seconds();
    return res;
}

// 8 -----------------------------------------------------------------------

CriterionResult check_b_sets(const ModelConfig& config, std::uint64_t seed) {
    Timer timer;
    CriterionResult res{8, "B-set brute force", false, 0.0, 30.0, "", json::object()};
    const PayoffModel m = model_of(config);
    const PreemptionIntervals a = find_intervals(m);
    const BSets b = compute_b_sets(m, a);
    std::mt19937_64 rng(seed ^ 0xb5e7ULL);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t n_z = 10000;

    struct Region {
        const char* name;
        double lo;  // closure lower end (0 for the first region)
        double hi;
        const IntervalSet* set;
    };
    const Region regions[] = {{"B1", 0.0, a.a1_lo, &b.b1},
                              {"B2", a.a1_hi, a.a2_lo, &b.b2},
                              {"B3", a.a2_hi, b.z_max_bound, &b.b3}};
    json out = json::array();
    bool ok = true;
    for (const auto& reg : regions) {
        const double z_lo = reg.lo > 0.0 ? reg.lo : reg.hi * 1e-6;
        const auto zs = geometric(z_lo, reg.hi, n_z);
        std::vector<double> lz(zs.size());
        for (std::size_t k = 0; k < zs.size(); ++k) lz[k] = m.L(zs[k]);
        const double log_step = std::log(reg.hi / z_lo) / static_cast<double>(n_z - 1);
        const double y_lo = reg.lo > 0.0 ? reg.lo : reg.hi * 1e-3;
        std::vector<double> bounds;
        for (const auto& iv : reg.set->intervals()) {
            bounds.push_back(iv.lo);
            if (std::isfinite(iv.hi)) bounds.push_back(iv.hi);
        }
        std::size_t agree = 0;
        std::size_t near_boundary = 0;
        std::size_t disagree = 0;
        std::size_t members = 0;
        json bad = json::array();
        for (int k = 0; k < 100; ++k) {
            double y = y_lo * std::pow(reg.hi / y_lo, u(rng));
            if (y >= reg.hi) y = std::nextafter(reg.hi, 0.0);
            const double ly = m.L(y);
            double sup = reg.lo > 0.0 ? -kInf : 0.0;
            for (std::size_t i = 0; i < zs.size(); ++i) sup = std::max(sup, b_discount(y, zs[i], m.roots) * lz[i]);
            const bool brute = ly >= sup - 1e-12 * (1.0 + std::abs(ly));
            const bool in_set = reg.set->contains(y);
            members += in_set;
            if (brute == in_set) {
                ++agree;
                continue;
            }
            double dist = kInf;
            for (double bd : bounds) dist = std::min(dist, std::abs(std::log(y / bd)));
            if (dist <= 2.0 * log_step) {
                ++near_boundary;
            } else {
                ++disagree;
                if (bad.size() < 5) bad.push_back({{"y", y}, {"set", in_set}, {"brute_force", brute}, {"margin", ly - sup}});
            }
        }
        ok = ok && disagree == 0;
        out.push_back({{"region", reg.name},
                       {"closure", {reg.lo, reg.hi}},
                       {"set", *reg.set},
                       {"samples", 100},
                       {"members", members},
                       {"agree", agree},
                       {"near_boundary", near_boundary},
                       {"disagree", disagree},
                       {"grid_log_step", log_step},
                       {"disagreements", bad}});
    }
    res.ok = ok;
    res.details = {{"regions", out}, {"z_grid", n_z}, {"b_sets", b}};
    res.summary = ok ? "all 300 samples agree (boundary cases within grid resolution)" : "membership disagreements found";
    res.seconds = timer.seconds();
    return res;
}

// 9 -----------------------------------------------------------------------

CriterionResult check_deviations(const ModelConfig& config, const SimConfig& sim) {
    Timer timer;
    CriterionResult res{9, "Equilibrium deviation test", false, 0.0, 300.0, "", json::object()};
    const PayoffModel m = model_of(config);
    const PreemptionIntervals a = find_intervals(m);
    const EquilibriumProfile prof = build_profile(m, a, compute_b_sets(m, a));
    const StrategySpec si = eager_strategy(prof);
    const StrategySpec sj = patient_strategy(prof);

    const double edges[] = {a.a1_lo / 10.0, a.a1_lo, a.a1_hi, a.a2_lo, a.a2_hi, 3.0 * a.a2_hi};
    const char* region_names[] = {"below A1", "A1", "between A1 and A2", "A2", "above A2"};
    std::vector<double> z0s;
    std::vector<const char*> labels;
    for (int r = 0; r < 5; ++r) {
        for (double z : interior_points(edges[r], edges[r + 1], 4)) {
            z0s.push_back(z);
            labels.push_back(region_names[r]);
        }
    }
    const auto family = threshold_family(0.5 * a.a1_lo, 3.0 * a.a2_hi);
    const auto reports = deviation_test(si, sj, "ij", family, z0s, sim, m);

    json rows = json::array();
    std::size_t failures = 0;
    double worst_z = 0.0;
    std::string worst_desc;
    for (std::size_t k = 0; k < reports.size(); ++k) {
        const auto& r = reports[k];
        json row = r;
        row["region"] = labels[k / 2];
        rows.push_back(row);
        const auto& w = r.entries.at(r.worst);
        if (!r.holds()) {
            ++failures;
            const double zs = w.improvement.std_error > 0.0 ? w.improvement.estimate / w.improvement.std_error : kInf;
            if (zs > worst_z) {
                worst_z = zs;
                worst_desc = std::string("firm ") + r.firm + " at z0 = " + fmt(r.z0, 5) + " via " + w.name + " gains " +
                             fmt(w.improvement.estimate, 4) + " +- " + fmt(w.improvement.std_error, 2);
            }
        }
    }
    res.ok = failures == 0;
    res.details = {{"profile", {{"i", si}, {"j", sj}}},
                   {"family_size", family.size()},
                   {"n_paths", sim.n_paths},
                   {"dt", sim.dt},
                   {"reports", rows},
                   {"failing_checks", failures}};
    res.summary = res.ok ? "no deviation improves by more than 3 SE at any of 20 start levels"
                         : std::to_string(failures) + "/" + std::to_string(reports.size()) +
                               " firm/start checks beaten; worst: " + worst_desc;
    res.seconds = timer.seconds();
    return res;
}

// 10 ----------------------------------------------------------------------

CriterionResult check_counterexample(const ModelConfig& config, const SimConfig& sim) {
    Timer timer;
    CriterionResult res{10, "No symmetric equilibrium", false, 0.0, 120.0, "", json::object()};
    const PayoffModel m = model_of(config);
    const PreemptionIntervals a = find_intervals(m);
    const EquilibriumProfile prof = build_profile(m, a, compute_b_sets(m, a));
    const CounterexampleReport rep = symmetric_counterexample(prof, sim);
    bool ok = rep.found && rep.cases.size() == 3;
    for (const auto& c : rep.cases) ok = ok && c.significant();
    res.ok = ok;
    res.details = rep;
    res.details["C_z0"] = rep.found ? m.C(rep.z0) : 0.0;
    if (!rep.found) {
        res.summary = "no start level with C(z0) > sup L found";
    } else {
        std::string s = "z0 = " + fmt(rep.z0, 5) + ", gains:";
        for (const auto& c : rep.cases) {
            s += " " + fmt(c.gain.estimate, 4) + " (" +
                 (c.gain.std_error > 0.0 ? fmt(c.gain.estimate / c.gain.std_error, 3) + " SE" : "exact") + ")";
        }
        res.summary = s;
    }
    res.seconds = timer.seconds();
    return res;
}

// 11 ----------------------------------------------------------------------

CriterionResult check_indifference() {
    Timer timer;
    CriterionResult res{11, "Unilateral indifference", false, 0.0, 1.0, "", json::object()};
    double worst = 0.0;
    std::size_t n = 0;
    for (int a = 0; a < 10; ++a) {
        for (int b = 0; b < 10; ++b) {
            for (int c = 0; c < 10; ++c) {
                const double C = -5.0 + a;
                const double F = C + 0.05 + 1.3 * b;
                const double L = F + 0.05 + 1.7 * c;
                const double aj = (L - F) / (L - C);
                double lo = kInf;
                double hi = -kInf;
                for (int k = 0; k <= 100; ++k) {
                    const double ai = k / 100.0;
                    const double w = w_payoff(ai, aj, 1.0, 1.0, L, F, C).w_i;
                    lo = std::min(lo, w);
                    hi = std::max(hi, w);
                }
                worst = std::max(worst, hi - lo);
                ++n;
            }
        }
    }
    res.ok = worst <= 1e-10;
    res.details = {{"triples", n}, {"alpha_i_grid", 101}, {"max_spread", worst}, {"tolerance", 1e-10}};
    res.summary = "max spread of W_i over alpha_i " + fmt(worst) + " on " + std::to_string(n) + " triples";
    res.seconds = timer.seconds();
    return res;
}

// 12 ----------------------------------------------------------------------

CriterionResult check_vacuum(const ModelConfig& config) {
    Timer timer;
    CriterionResult res{12, "Vacuum report", false, 0.0, 0.0, "", json::object()};
    const PayoffModel m = model_of(config);
    const PreemptionIntervals a = find_intervals(m);
    const BSets b = compute_b_sets(m, a);
    const EquilibriumProfile prof = build_profile(m, a, b);
    const bool vac = prof.has_vacuum();
    const IntervalSet v = prof.vacuum();

    // Labels at sample points of each bullet must match, alpha must be a
    // probability inside A, and vacuum points must fail the B2 inequality.
    bool consistent = true;
    json bullets = json::array();
    auto sample = [&](const char* text, double lo, double hi, RegionLabel expect) {
        std::size_t mismatches = 0;
        for (double z : interior_points(lo, hi, 16)) {
            if (classify_demand(z, prof) != expect) ++mismatches;
            if (expect == RegionLabel::preempt_a1 || expect == RegionLabel::preempt_a2) {
                const double al = alpha_at(z, m);
                if (!(al >= 0.0 && al <= 1.0)) ++mismatches;
            }
            if (expect == RegionLabel::vacuum && b_margin(z, a.a1_hi, a.a2_lo, [&](double x) { return m.L(x); }, m.roots) >= 0.0) {
                ++mismatches;
            }
        }
        consistent = consistent && mismatches == 0;
        bullets.push_back({{"statement", text}, {"range", {lo, hi}}, {"label", to_string(expect)}, {"mismatches", mismatches}});
    };
    const double low_end = b.b1.empty() ? a.a1_lo : std::min(a.a1_lo, b.b1.intervals().front().lo);
    sample("no investment occurs for low demand", low_end / 100.0, low_end, RegionLabel::no_invest);
    sample("investment occurs on A1", a.a1_lo, a.a1_hi, RegionLabel::preempt_a1);
    if (vac) {
        for (const auto& iv : v.intervals()) {
            if (iv.hi > iv.lo) sample("no investment for some demand between A1 and A2", iv.lo, iv.hi, RegionLabel::vacuum);
        }
    }
    sample("investment occurs on A2", a.a2_lo, a.a2_hi, RegionLabel::preempt_a2);

    res.ok = consistent;
    res.details = {{"vacuum", vac},
                   {"b2", b.b2},
                   {"b2_proper_subset", vac},
                   {"between_A1_A2", {a.a1_hi, a.a2_lo}},
                   {"vacuum_intervals", v},
                   {"classification", vac ? bullets : json::array()},
                   {"checked_bullets", bullets}};
    std::ostringstream s;
    if (vac) {
        s << (b.b2.empty() ? "B2 is empty" : "B2 is a proper subset") << " in [" << fmt(a.a1_hi, 5) << ", "
          << fmt(a.a2_lo, 5) << "); vacuum";
        for (const auto& iv : v.intervals()) s << " [" << fmt(iv.lo, 5) << ", " << fmt(iv.hi, 5) << ")";
        s << (consistent ? "; classification consistent" : "; classification inconsistent");
    } else {
        s << "B2 covers [a1_hi, a2_lo); no vacuum";
    }
    res.summary = s.str();
    res.seconds = timer.seconds();
    return res;
}

// -------------------------------------------------------------------------

VerificationReport run_verification(const ModelConfig& config, const VerifyOptions& opt) {
    auto wanted = [&](int id) {
        return opt.only.empty() || std::find(opt.only.begin(), opt.only.end(), id) != opt.only.end();
    };
    const std::uint64_t seed = config.sim.seed;
    const double dt = opt.dt.value_or(1e-3);
    VerificationReport rep;
    auto run = [&](int id, const char* name, const std::function<CriterionResult()>& fn) {
        if (!wanted(id)) return;
        Timer timer;
        try {
            rep.criteria.push_back(fn());
        } catch (const std::exception& e) {
            CriterionResult r{id, name, false, timer.seconds(), 0.0, std::string("error: ") + e.what(), json::object()};
            r.details["error"] = e.what();
            rep.criteria.push_back(r);
        }
    };
    run(1, "Root residuals", [&] { return check_roots(seed); });
    run(2, "Smooth pasting", [&] { return check_pasting(config); });
    run(3, "HJB residuals", [&] { return check_hjb(config); });
    run(4, "MC oracle equivalence",
        [&] { return check_mc_oracles(config, sim_with(config.sim, opt.paths.value_or(100000), dt)); });
    run(5, "Ordering and geometry", [&] { return check_geometry(config, seed); });
    run(6, "Alpha bounds", [&] { return check_alpha_bounds(config); });
    run(7, "Hitting probability",
        [&] { return check_hitting(config, sim_with(config.sim, opt.paths.value_or(1000000), dt)); });
    run(8, "B-set brute force", [&] { return check_b_sets(config, seed); });
    run(9, "Equilibrium deviation test",
        [&] { return check_deviations(config, sim_with(config.sim, opt.paths.value_or(100000), dt)); });
    run(10, "No symmetric equilibrium",
        [&] { return check_counterexample(config, sim_with(config.sim, opt.paths.value_or(100000), dt)); });
    run(11, "Unilateral indifference", [&] { return check_indifference(); });
    run(12, "Vacuum report", [&] { return check_vacuum(config); });
    return rep;
}

std::string format_line(const CriterionResult& r) {
    std::ostringstream s;
    s << (r.passed() ? "PASS" : "FAIL") << "  " << std::setw(2) << r.id << "  " << std::left << std::setw(28) << r.name
      << std::right << " (" << std::fixed << std::setprecision(2) << r.seconds << " s";
    if (r.budget > 0.0) s << " of " << std::setprecision(0) << r.budget << " s";
    s << ")  " << r.summary;
    if (r.ok && !r.within_budget()) s << "  [over time budget]";
    return s.str();
}

void to_json(nlohmann::json& j, const CriterionResult& r) {
    j = {{"id", r.id},
         {"name", r.name},
         {"passed", r.passed()},
         {"check_passed", r.ok},
         {"seconds", r.seconds},
         {"budget_seconds", r.budget},
         {"within_budget", r.within_budget()},
         {"summary", r.summary},
         {"details", r.details}};
}

void to_json(nlohmann::json& j, const VerificationReport& r) {
    j = {{"all_passed", r.all_passed()}, {"criteria", r.criteria}};
}

}  // namespace duopoly
