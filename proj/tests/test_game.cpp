#include <cmath>
#include <vector>

#include "doctest.h"

#include "duopoly/equilibrium.hpp"
#include "duopoly/errors.hpp"
#include "duopoly/game.hpp"
#include "duopoly/monte_carlo.hpp"
#include "oracle.hpp"

using namespace duopoly;
using doctest::Approx;

namespace {

const EquilibriumProfile& profile() {
    static const EquilibriumProfile p = [] {
        const auto c = oracle::reference();
        const PayoffModel m = build_model(c.market, c.econ);
        const PreemptionIntervals a = find_intervals(m);
        return build_profile(m, a, compute_b_sets(m, a));
    }();
    return p;
}

SimConfig sim(std::size_t paths) {
    SimConfig s;
    s.n_paths = paths;
    s.dt = 1e-3;
    s.seed = 5;
    return s;
}

}  // namespace

TEST_CASE("simultaneous-move payoffs") {
    const WPair half = w_payoff(0.5, 0.5, 0, 0, 4.0, 2.0, 0.0);
    CHECK(half.w_i == Approx(2.0));
    CHECK(half.w_j == Approx(2.0));

    const WPair both = w_payoff(1.0, 1.0, 0, 0, 4.0, 2.0, 1.0);
    CHECK(both.w_i == 1.0);
    CHECK(both.w_j == 1.0);

    const WPair lead = w_payoff(1.0, 0.0, 0, 0, 4.0, 2.0, 1.0);
    CHECK(lead.w_i == 4.0);
    CHECK(lead.w_j == 2.0);

    const WPair lopsided = w_payoff(0.8, 0.2, 0, 0, 10.0, 4.0, 1.0);
    const double den = 0.8 + 0.2 - 0.16;
    CHECK(lopsided.w_i == Approx((0.8 * 0.8 * 10.0 + 0.2 * 0.2 * 4.0 + 0.16) / den));
    CHECK(lopsided.w_j == Approx((0.2 * 0.2 * 10.0 + 0.8 * 0.8 * 4.0 + 0.16) / den));

    const WPair slopes = w_payoff(0.0, 0.0, 3.0, 1.0, 8.0, 4.0, 0.0);
    CHECK(slopes.w_i == Approx(7.0));
    CHECK(slopes.w_j == Approx(5.0));
    const WPair equal = w_payoff(0.0, 0.0, 1.0, 1.0, 8.0, 4.0, 0.0);
    CHECK(equal.w_i == Approx(6.0));

    CHECK_THROWS_AS(w_payoff(0.0, 0.0, 0.0, 0.0, 8.0, 4.0, 0.0), DomainError);
    CHECK_THROWS_AS(w_payoff(1.2, 0.0, 0.0, 0.0, 8.0, 4.0, 0.0), DomainError);
}

TEST_CASE("simultaneous-move payoffs are symmetric") {
    for (double ai : {0.0, 0.3, 0.7, 1.0}) {
        for (double aj : {0.0, 0.2, 0.9, 1.0}) {
            if (ai == 0.0 && aj == 0.0) continue;
            const WPair a = w_payoff(ai, aj, 0, 0, 7.0, 3.0, -1.0);
            const WPair b = w_payoff(aj, ai, 0, 0, 7.0, 3.0, -1.0);
            CHECK(a.w_i == Approx(b.w_j));
            CHECK(a.w_j == Approx(b.w_i));
        }
    }
    for (double a = 0.05; a <= 1.0; a += 0.05) {
        const WPair w = w_payoff(a, a, 0, 0, 7.0, 3.0, -1.0);
        CHECK(w.w_i == w.w_j);
        CHECK(w.w_i == Approx(((1 - a) * 10.0 - a) / (2 - a)));
    }
}

TEST_CASE("the preemption ratio makes the other firm indifferent") {
    const double L = 9.0, F = 5.0, C = 1.0;
    const double aj = (L - F) / (L - C);
    for (double ai = 0.01; ai <= 1.0; ai += 0.01) {
        CHECK(w_payoff(ai, aj, 0, 0, L, F, C).w_i == Approx(F).epsilon(1e-12));
    }
}

TEST_CASE("profile strategies") {
    const auto& p = profile();
    const StrategySpec i = eager_strategy(p);
    const StrategySpec j = patient_strategy(p);
    CHECK_NOTHROW(i.validate());
    CHECK_NOTHROW(j.validate());
    CHECK(j.active_set() == p.a.as_set());
    CHECK(i.active_set().contains(16.0));
    CHECK_FALSE(j.active_set().contains(16.0));
    CHECK_FALSE(i.active_set().contains(8.0));

    const PayoffModel& m = p.model;
    for (double z : {0.5, 3.0, 12.5, 16.0, 40.0}) {
        CHECK(alpha_state(i, z, m).alpha == Approx(p.alpha_i(z)));
        CHECK(alpha_state(j, z, m).alpha == Approx(p.alpha_j(z)));
    }

    const GameOutcome b3 = resolve_stop(16.0, i, j, m);
    CHECK(b3.roles == Roles::i_leads);
    CHECK(b3.w_i == Approx(m.L(16.0)));
    CHECK(b3.w_j == Approx(m.F(16.0)));

    const GameOutcome mix = resolve_stop(3.0, i, j, m);
    CHECK(mix.roles == Roles::coin_flip_mix);
    CHECK(mix.w_i == Approx(m.F(3.0)));
    CHECK(mix.w_j == Approx(m.F(3.0)));

    CHECK_THROWS_AS(resolve_stop(8.0, i, j, m), DomainError);
}

TEST_CASE("strategy validation") {
    StrategySpec s;
    s.regions = {{{1.0, 3.0}, AlphaRule::one, 1.0}, {{2.0, 4.0}, AlphaRule::one, 1.0}};
    CHECK_THROWS_AS(s.validate(), DomainError);
    s.regions = {{{1.0, 3.0}, AlphaRule::one, -1.0}};
    CHECK_THROWS_AS(s.validate(), DomainError);
    CHECK(StrategySpec::never().active_set().empty());
}

TEST_CASE("subgame with a single threshold has a closed form") {
    const auto& p = profile();
    const PayoffModel& m = p.model;
    const double c = 20.0;
    const double z0 = 14.5;
    const StrategySpec i = StrategySpec::invest_on(IntervalSet({{c, kInf}}), "up");
    const SubgameValue v = simulate_subgame(z0, 0.0, i, StrategySpec::never(), sim(20000), m);
    const double d = std::pow(z0 / c, m.roots.gamma);
    CHECK(v.v_i.agrees_with(d * m.L(c), 4.0));
    CHECK(v.v_j.agrees_with(d * m.F(c), 4.0));

    const SubgameValue t = simulate_subgame(z0, 7.0, i, StrategySpec::never(), sim(20000), m);
    CHECK(t.v_i.estimate == v.v_i.estimate);
}

TEST_CASE("degenerate subgames") {
    const PayoffModel& m = profile().model;
    const SubgameValue none = simulate_subgame(3.0, 0.0, StrategySpec::never(), StrategySpec::never(), sim(100), m);
    CHECK(none.never_stops);
    CHECK(none.v_i.estimate == 0.0);
    CHECK_FALSE(none.warnings.empty());

    const StrategySpec now = StrategySpec::invest_on(IntervalSet({{0.0, kInf}}), "now");
    const SubgameValue both = simulate_subgame(3.0, 0.0, now, now, sim(100), m);
    CHECK(both.v_i.estimate == Approx(m.C(3.0)));
    CHECK(both.v_j.estimate == Approx(m.C(3.0)));
}

TEST_CASE("pair evaluation: parallel and serial agree, differences are paired") {
    const auto& p = profile();
    const StrategySpec i = eager_strategy(p);
    const StrategySpec j = patient_strategy(p);
    const auto family = threshold_family(0.5 * p.a.a1_lo, 3.0 * p.a.a2_hi, 3, 2, 2);
    CHECK(family.size() == 7);
    CHECK(family.front().name.rfind("up@", 0) == 0);
    std::vector<ProfilePair> pairs = {{i, j}};
    for (const auto& f : family) pairs.push_back({f, j});
    const std::vector<double> z0s = {0.1, 3.0, 8.0, 14.0, 16.0};
    const SimConfig s = sim(800);
    const auto par = evaluate_pairs(z0s, pairs, s, p.model);
    const auto ser = reference::evaluate_pairs(z0s, pairs, s, p.model);
    for (std::size_t k = 0; k < z0s.size(); ++k) {
        for (std::size_t q = 0; q < pairs.size(); ++q) {
            CAPTURE(k);
            CAPTURE(q);
            CHECK(par[k][q].v_i.estimate == Approx(ser[k][q].v_i.estimate).epsilon(1e-10));
            CHECK(par[k][q].v_j.estimate == Approx(ser[k][q].v_j.estimate).epsilon(1e-10));
            CHECK(par[k][q].diff_i.estimate == Approx(ser[k][q].diff_i.estimate).epsilon(1e-10));
            CHECK(par[k][q].diff_i.estimate ==
                  Approx(par[k][q].v_i.estimate - par[k][0].v_i.estimate).epsilon(1e-9));
        }
        CHECK(par[k][0].diff_i.estimate == 0.0);
    }
}

TEST_CASE("the patient firm has no profitable threshold deviation") {
    const auto& p = profile();
    const StrategySpec i = eager_strategy(p);
    const StrategySpec j = patient_strategy(p);
    const auto family = threshold_family(0.5 * p.a.a1_lo, 3.0 * p.a.a2_hi, 8, 6, 6);
    const std::vector<double> z0s = {0.05, 8.0, 14.0};
    const auto reports = deviation_test(i, j, "j", family, z0s, sim(5000), p.model);
    REQUIRE(reports.size() == z0s.size());
    for (const auto& r : reports) {
        CAPTURE(r.z0);
        CHECK(r.firm == 'j');
        CHECK(r.entries.size() == family.size());
        CHECK(r.holds());
    }
}

TEST_CASE("start in A2: immediate mixed investment, equal values") {
    const auto& p = profile();
    const double z0 = 0.5 * (p.a.a2_lo + p.a.a2_hi);
    const SubgameValue v = simulate_subgame(z0, 0.0, eager_strategy(p), patient_strategy(p), sim(100), p.model);
    CHECK(v.v_i.estimate == Approx(v.v_j.estimate));
    CHECK(v.v_i.estimate == Approx(p.model.F(z0)));
    CHECK(v.v_i.std_error == 0.0);
}

TEST_CASE("start below every action region") {
    const auto& p = profile();
    const PayoffModel& m = p.model;
    const double z0 = 0.5 * p.a.a1_lo;
    // first action is entry into A1 at its lower end, where alpha = 0 for both
    // firms and the equal-slope rule splits L and F evenly
    const double w = 0.5 * (m.L(p.a.a1_lo) + m.F(p.a.a1_lo));
    const double want = std::pow(z0 / p.a.a1_lo, m.roots.gamma) * w;
    const SubgameValue v = simulate_subgame(z0, 0.0, eager_strategy(p), patient_strategy(p), sim(20000), m);
    CHECK(v.v_i.agrees_with(want, 3.0));
    CHECK(v.v_j.agrees_with(want, 3.0));
}

TEST_CASE("no symmetric equilibrium") {
    const auto& p = profile();
    const CounterexampleReport r = symmetric_counterexample(p, sim(4000));
    REQUIRE(r.found);
    CHECK(r.z0 > p.a.a2_hi);
    CHECK(p.model.C(r.z0) > r.sup_l);
    REQUIRE(r.cases.size() == 3);
    for (const auto& c : r.cases) {
        CAPTURE(c.candidate);
        CHECK(c.significant());
    }
}
