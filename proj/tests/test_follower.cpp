#include <cmath>

#include "doctest.h"

#include "duopoly/errors.hpp"
#include "duopoly/follower.hpp"
#include "oracle.hpp"

using namespace duopoly;
using doctest::Approx;

TEST_CASE("low-profit follower thresholds") {
    const auto c = oracle::reference();
    const FollowerLowSolution s = solve_low(c.market, c.econ);
    REQUIRE(s.regime == FollowerRegime::inner_wait);
    CHECK(s.roots.gamma == Approx(oracle::gamma).epsilon(1e-12));
    CHECK(s.roots.beta == Approx(oracle::beta).epsilon(1e-12));
    CHECK(s.z1 == Approx(oracle::z1).epsilon(1e-10));
    CHECK(s.z2 == Approx(oracle::z2).epsilon(1e-9));
    CHECK(s.z3 == Approx(oracle::z3).epsilon(1e-9));
    CHECK(s.a0_coef == Approx(oracle::a0).epsilon(1e-9));
    CHECK(s.b0_coef == Approx(oracle::b0).epsilon(1e-8));
    CHECK(s.c0_coef == Approx(oracle::c0).epsilon(1e-8));
    CHECK(s.residuals.max() < 1e-10);
    CHECK(s.z1 <= s.z2);
    CHECK(s.z2 <= s.z3);

    for (const auto& row : oracle::rows) {
        CHECK(eval_low(row.z, s) == Approx(row.F_L).epsilon(1e-9));
    }
}

TEST_CASE("high-profit follower") {
    const auto c = oracle::reference();
    const FollowerHighSolution h = solve_high(c.market, c.econ);
    CHECK(h.z_h == Approx(oracle::z_h).epsilon(1e-12));
    for (const auto& row : oracle::rows) CHECK(eval_high(row.z, h) == Approx(row.F_H).epsilon(1e-9));
    const FollowerLowSolution s = solve_low(c.market, c.econ);
    CHECK(h.z_h < s.z1);
    for (const auto& row : oracle::rows) CHECK(follower_value(row.z, s, h, c.econ) == Approx(row.F).epsilon(1e-9));
}

TEST_CASE("value matching and smooth pasting at every threshold") {
    const auto c = oracle::reference();
    const FollowerLowSolution s = solve_low(c.market, c.econ);
    const FollowerHighSolution h = solve_high(c.market, c.econ);
    for (double z : {s.z1, s.z2, s.z3}) {
        CHECK(s.value.left_value(z) == Approx(s.value(z)).epsilon(1e-10));
        CHECK(s.value.left_derivative(z) == Approx(s.value.derivative(z)).epsilon(1e-8));
    }
    CHECK(h.value.left_value(h.z_h) == Approx(h.value(h.z_h)).epsilon(1e-10));
    CHECK(h.value.left_derivative(h.z_h) == Approx(h.value.derivative(h.z_h)).epsilon(1e-8));
}

TEST_CASE("follower values solve the homogeneous equation while waiting") {
    const auto c = oracle::reference();
    const FollowerLowSolution s = solve_low(c.market, c.econ);
    const FollowerHighSolution h = solve_high(c.market, c.econ);
    auto fl = [&](double z) { return eval_low(z, s); };
    auto fh = [&](double z) { return eval_high(z, h); };
    for (double t = 0.05; t < 1.0; t += 0.1) {
        const auto [r1, k1] = oracle::generator(fl, t * s.z1, c.market);
        CHECK(std::abs(r1) / k1 < 1e-5);
        const auto [r2, k2] = oracle::generator(fl, s.z2 + t * (s.z3 - s.z2), c.market);
        CHECK(std::abs(r2) / k2 < 1e-5);
        const auto [r3, k3] = oracle::generator(fh, t * h.z_h, c.market);
        CHECK(std::abs(r3) / k3 < 1e-5);
    }
}

TEST_CASE("follower dominates its immediate rewards") {
    const auto c = oracle::reference();
    const FollowerLowSolution s = solve_low(c.market, c.econ);
    const DerivedCoeffs d = s.coeffs;
    for (double z = 0.1; z < 40.0; z *= 1.07) {
        const double v = eval_low(z, s);
        CHECK(v >= d.a1 * z - d.k1 - 1e-9 * (1 + std::abs(v)));
        CHECK(v >= d.a2 * z - d.k2 - 1e-9 * (1 + std::abs(v)));
        CHECK(v >= 0.0);
    }
}

TEST_CASE("follower policy") {
    const auto c = oracle::reference();
    const FollowerLowSolution s = solve_low(c.market, c.econ);
    const FollowerHighSolution h = solve_high(c.market, c.econ);
    CHECK(follower_policy(1.0, ProfitOutcome::low, s, h) == FollowerAction::wait);
    CHECK(follower_policy(8.0, ProfitOutcome::low, s, h) == FollowerAction::copy);
    CHECK(follower_policy(12.0, ProfitOutcome::low, s, h) == FollowerAction::wait);
    CHECK(follower_policy(20.0, ProfitOutcome::low, s, h) == FollowerAction::innovate);
    CHECK(follower_policy(1.0, ProfitOutcome::high, s, h) == FollowerAction::wait);
    CHECK(follower_policy(3.0, ProfitOutcome::high, s, h) == FollowerAction::copy);
    CHECK(low_stop_region(s).size() == 2);
    CHECK(high_stop_region(h).size() == 1);
}

TEST_CASE("always-innovate regime") {
    const ModelConfig c = load_config(DUOPOLY_CONFIG_DIR "/always_innovate.cfg");
    CHECK(classify_regime(c.market, c.econ) == FollowerRegime::always_innovate);
    const FollowerLowSolution s = solve_low(c.market, c.econ);
    CHECK(s.roots.gamma == Approx(2.0));
    CHECK(s.roots.beta == Approx(-1.0));
    CHECK(s.z3 == Approx(40.0 / 3.0).epsilon(1e-13));
    CHECK(s.b0_coef == Approx(0.05625).epsilon(1e-13));
    CHECK(std::isnan(s.z1));
    CHECK(std::isnan(s.z2));
    CHECK(s.method == "closed_form");
    CHECK(eval_low(5.0, s) == Approx(0.05625 * 25.0));
    CHECK(eval_low(20.0, s) == Approx(1.5 * 20.0 - 10.0));
    CHECK(low_stop_region(s).size() == 1);
}

TEST_CASE("regime boundary goes to always-innovate") {
    MarketParams m{0.0, 1.0, 1.0};  // gamma = 2
    EconParams e;
    e.pi_low = 1.0;
    e.pi_high = 3.0;  // a2/a1 = 2, ratio 4
    e.inv_cost = 10.0;
    e.theta = 0.75;  // K2/K1 = 4
    e.xi = 1.0;
    CHECK(regime_ratio(m, e) == Approx(4.0));
    CHECK(classify_regime(m, e) == FollowerRegime::always_innovate);
    e.theta = 0.76;
    CHECK(classify_regime(m, e) == FollowerRegime::inner_wait);
}

TEST_CASE("uneven odds are rejected") {
    auto c = oracle::reference();
    c.econ.p_high = 0.3;
    CHECK_THROWS_AS(solve_low(c.market, c.econ), ConfigError);
}
