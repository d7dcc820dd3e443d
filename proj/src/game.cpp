#include "duopoly/game.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "duopoly/errors.hpp"
#include "path_stepper.hpp"

namespace duopoly {

IntervalSet StrategySpec::active_set() const {
    std::vector<Interval> out;
    out.reserve(regions.size());
    for (const auto& r : regions) out.push_back(r.range);
    return IntervalSet(std::move(out));
}

void StrategySpec::validate() const {
    std::vector<Interval> sorted;
    for (const auto& r : regions) {
        if (!(r.range.lo >= 0.0 && r.range.hi >= r.range.lo)) throw DomainError(name + ": region with lo > hi");
        if (!(r.entry_slope >= 0.0)) throw DomainError(name + ": negative entry slope");
        sorted.push_back(r.range);
    }
    std::sort(sorted.begin(), sorted.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (std::size_t k = 1; k < sorted.size(); ++k) {
        if (sorted[k].lo <= sorted[k - 1].hi) throw DomainError(name + ": overlapping regions");
    }
}

StrategySpec StrategySpec::never(std::string name) { return StrategySpec{std::move(name), {}}; }

StrategySpec StrategySpec::invest_on(const IntervalSet& set, std::string name) {
    StrategySpec s{std::move(name), {}};
    for (const Interval& iv : set.intervals()) s.regions.push_back({iv, AlphaRule::one, 0.0});
    return s;
}

StrategySpec eager_strategy(const EquilibriumProfile& p) {
    StrategySpec s = patient_strategy(p);
    s.name = "eager";
    // B-set parts that fall inside an A-interval follow the ratio rule there.
    for (const IntervalSet* set : {&p.b.b1, &p.b.b2, &p.b.b3}) {
        for (Interval iv : set->intervals()) {
            for (const Interval& a : {p.a.a1(), p.a.a2()}) {
                if (iv.lo >= a.lo && iv.lo <= a.hi) iv.lo = std::nextafter(a.hi, kInf);
                if (iv.hi >= a.lo && iv.hi <= a.hi) iv.hi = std::nextafter(a.lo, 0.0);
            }
            if (iv.hi >= iv.lo) s.regions.push_back({iv, AlphaRule::one, 0.0});
        }
    }
    std::sort(s.regions.begin(), s.regions.end(),
              [](const StrategyRegion& a, const StrategyRegion& b) { return a.range.lo < b.range.lo; });
    return s;
}

StrategySpec patient_strategy(const EquilibriumProfile& p) {
    return StrategySpec{"patient", {{p.a.a1(), AlphaRule::ratio, 1.0}, {p.a.a2(), AlphaRule::ratio, 1.0}}};
}

AlphaState alpha_state(const StrategySpec& s, double z, const PayoffModel& model) {
    for (const auto& r : s.regions) {
        if (!r.range.contains(z)) continue;
        AlphaState st;
        st.active = true;
        st.alpha = r.rule == AlphaRule::one ? 1.0 : alpha_at(z, model);
        st.slope = st.alpha == 0.0 ? r.entry_slope : 0.0;
        return st;
    }
    return {};
}

WPair w_payoff(double ai, double aj, double dai, double daj, double L, double F, double C) {
    if (!(ai >= 0.0 && ai <= 1.0 && aj >= 0.0 && aj <= 1.0)) throw DomainError("w_payoff: alphas must lie in [0,1]");
    if (ai == 1.0 && aj == 1.0) return {C, C};
    if (ai + aj > 0.0) {
        const double den = ai + aj - ai * aj;
        return {(ai * (1.0 - aj) * L + aj * (1.0 - ai) * F + ai * aj * C) / den,
                (aj * (1.0 - ai) * L + ai * (1.0 - aj) * F + ai * aj * C) / den};
    }
    if (!(dai >= 0.0 && daj >= 0.0) || dai + daj <= 0.0) {
        throw DomainError("w_payoff: both alphas and both right derivatives are zero");
    }
    return {(dai * L + daj * F) / (dai + daj), (daj * L + dai * F) / (dai + daj)};
}

const char* to_string(Roles r) {
    switch (r) {
        case Roles::i_leads: return "i_leads";
        case Roles::j_leads: return "j_leads";
        case Roles::simultaneous: return "simultaneous";
        case Roles::coin_flip_mix: return "coin_flip_mix";
    }
    return "?";
}

GameOutcome resolve_stop(double z, const StrategySpec& i, const StrategySpec& j, const PayoffModel& m) {
    const AlphaState si = alpha_state(i, z, m);
    const AlphaState sj = alpha_state(j, z, m);
    if (!si.active && !sj.active) throw DomainError("resolve_stop: neither firm acts at z = " + std::to_string(z));
    const double L = m.L(z);
    const double F = m.F(z);
    GameOutcome out;
    if (!sj.active) {
        out.roles = Roles::i_leads;
        out.w_i = L;
        out.w_j = F;
        return out;
    }
    if (!si.active) {
        out.roles = Roles::j_leads;
        out.w_i = F;
        out.w_j = L;
        return out;
    }
    const WPair w = w_payoff(si.alpha, sj.alpha, si.slope, sj.slope, L, F, m.C(z));
    out.w_i = w.w_i;
    out.w_j = w.w_j;
    if (si.alpha == 1.0 && sj.alpha == 1.0) out.roles = Roles::simultaneous;
    else if (sj.alpha == 0.0 && si.alpha > 0.0) out.roles = Roles::i_leads;
    else if (si.alpha == 0.0 && sj.alpha > 0.0) out.roles = Roles::j_leads;
    else out.roles = Roles::coin_flip_mix;
    return out;
}

SubgameValue simulate_subgame(double z0, double t0, const StrategySpec& i, const StrategySpec& j,
                              const SimConfig& cfg, const PayoffModel& model) {
    if (!(z0 > 0.0)) throw DomainError("simulate_subgame: z0 must be > 0");
    if (!(t0 >= 0.0)) throw DomainError("simulate_subgame: t0 must be >= 0");
    i.validate();
    j.validate();
    SubgameValue out;
    const IntervalSet stop = i.active_set().unite(j.active_set());
    if (stop.empty()) {
        out.never_stops = true;
        out.v_i.n_paths = out.v_j.n_paths = cfg.n_paths;
        out.warnings.push_back("neither firm ever invests; both values are 0");
        return out;
    }
    const double r = model.market.r;
    const PathPayoff pays[] = {
        [&](const StopEvent& e) { return e.capped ? 0.0 : std::exp(-r * e.tau) * resolve_stop(e.z, i, j, model).w_i; },
        [&](const StopEvent& e) { return e.capped ? 0.0 : std::exp(-r * e.tau) * resolve_stop(e.z, i, j, model).w_j; },
    };
    const double zs[] = {z0};
    const auto res = mc_policy_values(zs, stop, pays, cfg, model.market);
    out.v_i = res[0][0];
    out.v_j = res[0][1];
    if (out.v_i.cap_fraction > 0.01) {
        std::ostringstream msg;
        msg << "cap fraction " << out.v_i.cap_fraction << " exceeds 1% at horizon " << cfg.horizon;
        out.warnings.push_back(msg.str());
    }
    return out;
}

namespace {

// One (z0, pair) combination: either decided at time zero or waiting in a gap.
struct Cell {
    bool immediate = false;
    bool never = false;
    std::size_t gap = 0;
    WPair now;    // immediate payoffs
    WPair upper;  // payoffs when leaving the gap through its upper end
    WPair lower;
    double hi_z = kInf;
    double lo_z = 0.0;
};

struct GapKey {
    double up;
    double down;
    bool operator<(const GapKey& o) const { return up < o.up || (up == o.up && down < o.down); }
};

struct Plan {
    std::vector<double> z0s;
    std::size_t n_pairs = 0;
    std::vector<Cell> cells;  // [z0 * n_pairs + pair]
    std::vector<GapKey> gaps;
    // gaps ordered by up, with suffix minimum of down, for the stop test
    std::vector<double> sorted_up;
    std::vector<double> suffix_min_down;
};

WPair pair_at(double z, const ProfilePair& p, const PayoffModel& m) {
    const GameOutcome o = resolve_stop(z, p.i, p.j, m);
    return {o.w_i, o.w_j};
}

Plan make_plan(std::span<const double> z0s, std::span<const ProfilePair> pairs, const PayoffModel& m) {
    if (pairs.empty()) throw DomainError("evaluate_pairs: no strategy pairs");
    Plan plan;
    plan.z0s.assign(z0s.begin(), z0s.end());
    plan.n_pairs = pairs.size();
    std::map<GapKey, std::size_t> index;
    std::vector<IntervalSet> stops;
    for (const auto& p : pairs) {
        p.i.validate();
        p.j.validate();
        stops.push_back(p.i.active_set().unite(p.j.active_set()));
    }
    for (double z0 : z0s) {
        if (!(z0 > 0.0)) throw DomainError("evaluate_pairs: z0 must be > 0");
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            Cell c;
            const IntervalSet& stop = stops[k];
            if (stop.empty()) {
                c.never = true;
            } else if (stop.contains(z0)) {
                c.immediate = true;
                c.now = pair_at(z0, pairs[k], m);
            } else {
                const Gap g = stop.gap_around(z0);
                c.hi_z = g.hi;
                c.lo_z = g.lo;
                const GapKey key{std::isfinite(g.hi) ? std::log(g.hi / z0) : kInf,
                                 g.lo > 0.0 ? std::log(g.lo / z0) : -kInf};
                auto [it, inserted] = index.emplace(key, plan.gaps.size());
                if (inserted) plan.gaps.push_back(key);
                c.gap = it->second;
                if (std::isfinite(g.hi)) c.upper = pair_at(g.hi, pairs[k], m);
                if (g.lo > 0.0) c.lower = pair_at(g.lo, pairs[k], m);
            }
            plan.cells.push_back(c);
        }
    }
    std::vector<GapKey> by_up = plan.gaps;
    std::sort(by_up.begin(), by_up.end());
    plan.sorted_up.resize(by_up.size());
    plan.suffix_min_down.assign(by_up.size() + 1, kInf);
    for (std::size_t k = by_up.size(); k-- > 0;) {
        plan.sorted_up[k] = by_up[k].up;
        plan.suffix_min_down[k] = std::min(plan.suffix_min_down[k + 1], by_up[k].down);
    }
    return plan;
}

struct Record {
    double level;
    std::uint32_t step;
};

// Running-maximum and running-minimum records of one log path, kept until
// every gap in the plan has been left or the horizon is reached.
struct PathRecords {
    std::vector<Record> up;    // increasing levels
    std::vector<Record> down;  // decreasing levels

    void build(detail::PathStepper& s, const Plan& plan, std::size_t n_steps) {
        up.clear();
        down.clear();
        double run_max = 0.0;
        double run_min = 0.0;
        const double reach = s.reach();
        auto all_left = [&] {
            const auto k = static_cast<std::size_t>(
                std::upper_bound(plan.sorted_up.begin(), plan.sorted_up.end(), run_max) - plan.sorted_up.begin());
            return plan.suffix_min_down[k] >= run_min;
        };
        if (all_left()) return;
        for (std::size_t k = 0; k < n_steps; ++k) {
            s.advance();
            bool moved = false;
            if (std::max(s.x(), s.x_prev()) > run_max - reach) {
                const double m = s.step_max();
                if (m > run_max) {
                    run_max = m;
                    up.push_back({m, static_cast<std::uint32_t>(k)});
                    moved = true;
                }
            }
            if (std::min(s.x(), s.x_prev()) < run_min + reach) {
                const double m = s.step_min();
                if (m < run_min) {
                    run_min = m;
                    down.push_back({m, static_cast<std::uint32_t>(k)});
                    moved = true;
                }
            }
            if (moved && all_left()) return;
        }
    }

    const Record* first_above(double level) const {
        auto it = std::lower_bound(up.begin(), up.end(), level,
                                   [](const Record& r, double v) { return r.level < v; });
        return it == up.end() ? nullptr : &*it;
    }
    const Record* first_below(double level) const {
        auto it = std::lower_bound(down.begin(), down.end(), level,
                                   [](const Record& r, double v) { return r.level > v; });
        return it == down.end() ? nullptr : &*it;
    }
};

struct Exit {
    bool capped = true;
    bool upper = false;
    double disc = 0.0;   // e^{-r tau}
    double level = 0.0;  // log level of the crossing record (grid value in grid mode)
};

double crossing_time(std::uint32_t step, const SimConfig& cfg) {
    const double k = static_cast<double>(step);
    return cfg.monitoring == Monitoring::bridge ? (k + 0.5) * cfg.dt : (k + 1.0) * cfg.dt;
}

struct Acc {
    std::vector<detail::Moments> v_i, v_j, d_i, d_j;
    std::vector<double> capped;

    explicit Acc(std::size_t n) : v_i(n), v_j(n), d_i(n), d_j(n), capped(n, 0.0) {}

    void merge(const Acc& o) {
        for (std::size_t k = 0; k < v_i.size(); ++k) {
            v_i[k].merge(o.v_i[k]);
            v_j[k].merge(o.v_j[k]);
            d_i[k].merge(o.d_i[k]);
            d_j[k].merge(o.d_j[k]);
            capped[k] += o.capped[k];
        }
    }
};

WPair exit_payoff(const Cell& c, const Exit& e, double z0, std::span<const ProfilePair> pairs, std::size_t k,
                  const SimConfig& cfg, const PayoffModel& m) {
    if (e.capped) return {0.0, 0.0};
    WPair w;
    if (cfg.monitoring == Monitoring::bridge) {
        w = e.upper ? c.upper : c.lower;
    } else {
        double z = z0 * std::exp(e.level);
        z = e.upper ? std::max(z, c.hi_z) : std::min(z, c.lo_z);
        w = pair_at(z, pairs[k], m);
    }
    return {e.disc * w.w_i, e.disc * w.w_j};
}

// Adds one path's payoffs for every (z0, pair); pair 0 is the base for differences.
void accumulate(const Plan& plan, std::span<const Exit> exits_by_cell, std::span<const ProfilePair> pairs,
                const SimConfig& cfg, const PayoffModel& m, Acc& acc) {
    const std::size_t np = plan.n_pairs;
    for (std::size_t zi = 0; zi < plan.z0s.size(); ++zi) {
        WPair base{};
        for (std::size_t k = 0; k < np; ++k) {
            const std::size_t idx = zi * np + k;
            const Cell& c = plan.cells[idx];
            WPair w{};
            if (c.immediate) {
                w = c.now;
            } else if (!c.never) {
                const Exit& e = exits_by_cell[idx];
                w = exit_payoff(c, e, plan.z0s[zi], pairs, k, cfg, m);
                if (e.capped) acc.capped[idx] += 1.0;
            } else {
                acc.capped[idx] += 1.0;
            }
            if (k == 0) base = w;
            acc.v_i[idx].add(w.w_i);
            acc.v_j[idx].add(w.w_j);
            acc.d_i[idx].add(w.w_i - base.w_i);
            acc.d_j[idx].add(w.w_j - base.w_j);
        }
    }
}

std::vector<std::vector<PairValues>> finish(const Plan& plan, const Acc& acc, std::size_t n_paths) {
    std::vector<std::vector<PairValues>> out(plan.z0s.size(), std::vector<PairValues>(plan.n_pairs));
    for (std::size_t zi = 0; zi < plan.z0s.size(); ++zi) {
        for (std::size_t k = 0; k < plan.n_pairs; ++k) {
            const std::size_t idx = zi * plan.n_pairs + k;
            PairValues& pv = out[zi][k];
            const double cap = acc.capped[idx] / static_cast<double>(n_paths);
            auto fill = [&](McEstimate& e, const detail::Moments& mo) {
                e.estimate = mo.mean;
                e.std_error = mo.std_error();
                e.n_paths = n_paths;
                e.cap_fraction = cap;
            };
            fill(pv.v_i, acc.v_i[idx]);
            fill(pv.v_j, acc.v_j[idx]);
            fill(pv.diff_i, acc.d_i[idx]);
            fill(pv.diff_j, acc.d_j[idx]);
        }
    }
    return out;
}

}  // namespace

std::vector<std::vector<PairValues>> evaluate_pairs(std::span<const double> z0s, std::span<const ProfilePair> pairs,
                                                    const SimConfig& cfg, const PayoffModel& model) {
    cfg.validate();
    const Plan plan = make_plan(z0s, pairs, model);
    const std::size_t n_cells = plan.cells.size();
    const std::size_t n_steps = cfg.n_steps();
    const double r = model.market.r;
    const std::size_t n_chunks = (cfg.n_paths + detail::kChunkPaths - 1) / detail::kChunkPaths;
    std::vector<Acc> chunks(n_chunks, Acc(0));

#pragma omp parallel
    {
        PathRecords rec;
        std::vector<Exit> gap_exit(plan.gaps.size());
        std::vector<Exit> cell_exit(n_cells);
#pragma omp for schedule(dynamic, 1)
        for (std::int64_t ch = 0; ch < static_cast<std::int64_t>(n_chunks); ++ch) {
            Acc acc(n_cells);
            const std::size_t first = static_cast<std::size_t>(ch) * detail::kChunkPaths;
            const std::size_t last = std::min(first + detail::kChunkPaths, cfg.n_paths);
            for (std::size_t p = first; p < last; ++p) {
                detail::PathStepper s(cfg, model.market, p);
                rec.build(s, plan, n_steps);
                for (std::size_t g = 0; g < plan.gaps.size(); ++g) {
                    const Record* hi = rec.first_above(plan.gaps[g].up);
                    const Record* lo = rec.first_below(plan.gaps[g].down);
                    Exit e;
                    if (hi && (!lo || hi->step <= lo->step)) {
                        e = {false, true, std::exp(-r * crossing_time(hi->step, cfg)), hi->level};
                    } else if (lo) {
                        e = {false, false, std::exp(-r * crossing_time(lo->step, cfg)), lo->level};
                    }
                    gap_exit[g] = e;
                }
                for (std::size_t c = 0; c < n_cells; ++c) {
                    const Cell& cell = plan.cells[c];
                    if (!cell.immediate && !cell.never) cell_exit[c] = gap_exit[cell.gap];
                }
                accumulate(plan, cell_exit, pairs, cfg, model, acc);
            }
            chunks[static_cast<std::size_t>(ch)] = std::move(acc);
        }
    }

    Acc total(n_cells);
    for (const Acc& a : chunks) total.merge(a);
    return finish(plan, total, cfg.n_paths);
}

namespace reference {

std::vector<std::vector<PairValues>> evaluate_pairs(std::span<const double> z0s, std::span<const ProfilePair> pairs,
                                                    const SimConfig& cfg, const PayoffModel& model) {
    cfg.validate();
    const Plan plan = make_plan(z0s, pairs, model);
    const std::size_t n_cells = plan.cells.size();
    const std::size_t n_steps = cfg.n_steps();
    const double r = model.market.r;
    Acc total(n_cells);
    std::vector<Exit> cell_exit(n_cells);
    for (std::size_t p = 0; p < cfg.n_paths; ++p) {
        for (std::size_t c = 0; c < n_cells; ++c) {
            const Cell& cell = plan.cells[c];
            if (cell.immediate || cell.never) continue;
            const GapKey& g = plan.gaps[cell.gap];
            detail::PathStepper s(cfg, model.market, p);
            Exit e;
            for (std::size_t k = 0; k < n_steps; ++k) {
                s.advance();
                const double mx = s.step_max();
                const double mn = s.step_min();
                if (mx >= g.up) {
                    e = {false, true, std::exp(-r * s.crossing_time()), mx};
                    break;
                }
                if (mn <= g.down) {
                    e = {false, false, std::exp(-r * s.crossing_time()), mn};
                    break;
                }
            }
            cell_exit[c] = e;
        }
        accumulate(plan, cell_exit, pairs, cfg, model, total);
    }
    return finish(plan, total, cfg.n_paths);
}

}  // namespace reference

std::vector<StrategySpec> threshold_family(double c_lo, double c_hi, std::size_t n_up, std::size_t n_down,
                                           std::size_t n_band) {
    if (!(c_lo > 0.0 && c_hi > c_lo)) throw DomainError("threshold_family: need 0 < c_lo < c_hi");
    auto grid = [&](std::size_t n) {
        std::vector<double> out(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double t = n == 1 ? 0.5 : static_cast<double>(k) / static_cast<double>(n - 1);
            out[k] = c_lo * std::pow(c_hi / c_lo, t);
        }
        return out;
    };
    std::vector<StrategySpec> out;
    auto label = [](const char* kind, double c) {
        std::ostringstream s;
        s.precision(6);
        s << kind << "@" << c;
        return s.str();
    };
    for (double c : grid(n_up)) out.push_back(StrategySpec::invest_on(IntervalSet({{c, kInf}}), label("up", c)));
    for (double c : grid(n_down)) out.push_back(StrategySpec::invest_on(IntervalSet({{0.0, c}}), label("down", c)));
    for (double c : grid(n_band)) {
        out.push_back(StrategySpec::invest_on(IntervalSet({{c, 1.5 * c}}), label("band", c)));
    }
    return out;
}

double DeviationReport::max_improvement() const {
    double best = -kInf;
    for (const auto& e : entries) best = std::max(best, e.improvement.estimate);
    return best;
}

bool DeviationReport::holds(double k) const {
    for (const auto& e : entries) {
        const double tol = k * e.improvement.std_error + 1e-12 * (1.0 + std::abs(base.estimate));
        if (e.improvement.estimate > tol) return false;
    }
    return true;
}

std::vector<DeviationReport> deviation_test(const StrategySpec& i, const StrategySpec& j, const std::string& firms,
                                            std::span<const StrategySpec> family, std::span<const double> z0s,
                                            const SimConfig& cfg, const PayoffModel& model) {
    const bool do_i = firms.find('i') != std::string::npos;
    const bool do_j = firms.find('j') != std::string::npos;
    if (!do_i && !do_j) throw DomainError("deviation_test: firms must name i, j or both");
    std::vector<ProfilePair> pairs{{i, j}};
    if (do_i) {
        for (const auto& d : family) pairs.push_back({d, j});
    }
    if (do_j) {
        for (const auto& d : family) pairs.push_back({i, d});
    }
    const auto vals = evaluate_pairs(z0s, pairs, cfg, model);

    std::vector<DeviationReport> out;
    for (std::size_t zi = 0; zi < z0s.size(); ++zi) {
        std::size_t offset = 1;
        for (char firm : {'i', 'j'}) {
            if ((firm == 'i' && !do_i) || (firm == 'j' && !do_j)) continue;
            DeviationReport rep;
            rep.z0 = z0s[zi];
            rep.firm = firm;
            rep.base = firm == 'i' ? vals[zi][0].v_i : vals[zi][0].v_j;
            double worst_z = -kInf;
            for (std::size_t k = 0; k < family.size(); ++k) {
                const PairValues& pv = vals[zi][offset + k];
                DeviationEntry e{family[k].name, firm == 'i' ? pv.v_i : pv.v_j, firm == 'i' ? pv.diff_i : pv.diff_j};
                const double tol = 1e-12 * (1.0 + std::abs(rep.base.estimate));
                const double zs = e.improvement.std_error > 0.0 ? e.improvement.estimate / e.improvement.std_error
                                  : e.improvement.estimate > tol                ? kInf
                                                                                : 0.0;
                if (zs > worst_z) {
                    worst_z = zs;
                    rep.worst = k;
                }
                rep.entries.push_back(std::move(e));
            }
            offset += family.size();
            out.push_back(std::move(rep));
        }
    }
    return out;
}

namespace {

double sup_leader_up_to(const PayoffModel& m, double hi) {
    const std::size_t n = 20000;
    const double lo = hi * 1e-6;
    double best = -kInf;
    for (std::size_t k = 0; k < n; ++k) {
        const double z = lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(n - 1));
        best = std::max(best, m.L(z));
    }
    // exact values at the kinks of L
    for (double z : m.leader.combined.breakpoints()) {
        if (z <= hi) best = std::max({best, m.L(z), m.leader.combined.left_value(z)});
    }
    return best;
}

}  // namespace

CounterexampleReport symmetric_counterexample(const EquilibriumProfile& profile, const SimConfig& cfg,
                                              double search_factor) {
    const PayoffModel& m = profile.model;
    CounterexampleReport rep;
    rep.sup_l = sup_leader_up_to(m, profile.a.a2_hi);
    double z0 = profile.a.a2_hi;
    while (z0 <= search_factor * profile.a.a2_hi && !(m.C(z0) > rep.sup_l)) z0 *= 1.01;
    if (!(m.C(z0) > rep.sup_l)) return rep;
    rep.found = true;
    rep.z0 = z0;
    const double zs[] = {z0};

    auto run = [&](const std::string& cand_name, const StrategySpec& cand, const std::string& dev_name,
                   const StrategySpec& dev) {
        const ProfilePair pairs[] = {{cand, cand}, {dev, cand}};
        const auto v = evaluate_pairs(zs, pairs, cfg, m);
        CounterexampleCase c;
        c.candidate = cand_name;
        c.deviation = dev_name;
        c.candidate_value = v[0][0].v_i;
        c.deviation_value = v[0][1].v_i;
        c.gain = v[0][1].diff_i;
        rep.cases.push_back(c);
    };

    const StrategySpec always = StrategySpec::invest_on(IntervalSet({{0.0, kInf}}), "invest_now");
    run("never_invest", StrategySpec::never(), "invest_now", always);

    // Joint stop where F > L: both invest once demand moves 25% either way.
    const double lo = z0 / 1.25;
    const double hi = z0 * 1.25;
    const StrategySpec band = StrategySpec::invest_on(IntervalSet({{0.0, lo}, {hi, kInf}}), "joint_stop_F_gt_L");
    if (!(m.F(lo) > m.L(lo) && m.F(hi) > m.L(hi))) throw GeometryError("symmetric_counterexample: F <= L at joint stop");
    run(band.name, band, "never_where_F_gt_L", StrategySpec::never("never_where_F_gt_L"));

    // Joint stop where F <= L: both invest once demand falls to the point of A2
    // with the largest L - F.
    double c = profile.a.a2_lo;
    double best = -kInf;
    for (int k = 0; k <= 400; ++k) {
        const double z = profile.a.a2_lo + (profile.a.a2_hi - profile.a.a2_lo) * k / 400.0;
        if (m.L(z) - m.F(z) > best) {
            best = m.L(z) - m.F(z);
            c = z;
        }
    }
    const StrategySpec down = StrategySpec::invest_on(IntervalSet({{0.0, c}}), "joint_stop_F_le_L");
    StrategySpec now_or_down = StrategySpec::invest_on(IntervalSet({{0.0, c}, {z0, z0}}), "invest_now");
    run(down.name, down, now_or_down.name, now_or_down);
    return rep;
}

void to_json(nlohmann::json& j, const StrategySpec& s) {
    nlohmann::json regions = nlohmann::json::array();
    for (const auto& r : s.regions) {
        regions.push_back({{"range", r.range}, {"rule", r.rule == AlphaRule::one ? "one" : "ratio"},
                           {"entry_slope", r.entry_slope}});
    }
    j = {{"name", s.name}, {"regions", regions}};
}

void to_json(nlohmann::json& j, const SubgameValue& v) {
    j = {{"V_i", v.v_i}, {"V_j", v.v_j}, {"never_stops", v.never_stops}, {"warnings", v.warnings}};
}

void to_json(nlohmann::json& j, const DeviationReport& r) {
    const auto& w = r.entries.at(r.worst);
    j = {{"z0", r.z0},
         {"firm", std::string(1, r.firm)},
         {"base", r.base},
         {"holds", r.holds()},
         {"max_improvement", r.max_improvement()},
         {"worst", {{"name", w.name}, {"improvement", w.improvement}}},
         {"n_deviations", r.entries.size()}};
}

void to_json(nlohmann::json& j, const CounterexampleReport& r) {
    nlohmann::json cases = nlohmann::json::array();
    for (const auto& c : r.cases) {
        cases.push_back({{"candidate", c.candidate},
                         {"deviation", c.deviation},
                         {"candidate_value", c.candidate_value},
                         {"deviation_value", c.deviation_value},
                         {"gain", c.gain},
                         {"significant", c.significant()}});
    }
    j = {{"found", r.found}, {"z0", r.z0}, {"sup_L_up_to_a2_hi", r.sup_l}, {"cases", cases}};
}

}  // namespace duopoly
