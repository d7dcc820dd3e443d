#include <cmath>
#include <vector>

#include <omp.h>

#include "doctest.h"

#include "duopoly/gbm.hpp"
#include "duopoly/leader.hpp"
#include "duopoly/monte_carlo.hpp"
#include "oracle.hpp"

using namespace duopoly;
using doctest::Approx;

namespace {

SimConfig quick(std::size_t paths = 20000, double dt = 1e-2) {
    SimConfig s;
    s.n_paths = paths;
    s.dt = dt;
    s.horizon = 15.0;
    s.seed = 99;
    return s;
}

const MarketParams kMarket{0.1, 0.8, 1.0};

}  // namespace

TEST_CASE("simulated paths have the GBM mean") {
    SimConfig s = quick(100000, 0.05);
    s.horizon = 1.0;
    const PathEnsemble e = simulate_paths(2.0, s, kMarket);
    REQUIRE(e.n_steps == 20);
    double sum = 0.0;
    double sq = 0.0;
    for (std::size_t i = 0; i < e.n_paths; ++i) {
        const double zt = e.path(i).back();
        CHECK(e.path(i).front() == 2.0);
        sum += zt;
        sq += zt * zt;
    }
    const double mean = sum / e.n_paths;
    const double se = std::sqrt((sq / e.n_paths - mean * mean) / e.n_paths);
    CHECK(std::abs(mean - 2.0 * std::exp(kMarket.alpha)) < 3.0 * se);
}

TEST_CASE("discount to a barrier") {
    const CharRoots c = char_roots(kMarket);
    const IntervalSet stop({{5.0, kInf}});
    const PathPayoff one = discounted_reward([](double) { return 1.0; }, kMarket.r);
    for (const Monitoring mode : {Monitoring::bridge, Monitoring::grid}) {
        SimConfig s = quick();
        s.monitoring = mode;
        if (mode == Monitoring::grid) s.dt = 1e-3;
        const McEstimate v = mc_policy_value(2.0, stop, one, s, kMarket);
        CAPTURE(v.estimate);
        CHECK(v.agrees_with(discount_at_hit(2.0, 5.0, c), 4.0));
    }
}

TEST_CASE("two-sided exit and the discounted demand integral") {
    const CharRoots c = char_roots(kMarket);
    const double lo = 1.0;
    const double hi = 6.0;
    const double z0 = 2.5;
    const IntervalSet stop({{0.0, lo}, {hi, kInf}});
    const std::vector<PathPayoff> payoffs = {
        [&](const StopEvent& e) { return !e.capped && e.z >= hi ? 1.0 : 0.0; },
        [&](const StopEvent& e) { return !e.capped && e.z <= lo ? std::exp(-kMarket.r * e.tau) : 0.0; },
        [&](const StopEvent& e) { return e.disc_integral; },
    };
    const auto v = mc_policy_values(std::vector<double>{z0}, stop, payoffs, quick(), kMarket, IntegralTracking::on);
    const TwoSidedFunctionals f = two_sided_functionals(z0, lo, hi, kMarket, c);
    CHECK(v[0][0].agrees_with(f.p_upper_first, 4.0));
    CHECK(v[0][1].agrees_with(f.disc_lower, 4.0));
    EconParams unit;
    unit.xi = 1.0;
    CHECK(v[0][2].agrees_with(monopoly_term(z0, lo, hi, kMarket, unit, c), 4.0));
}

TEST_CASE("starting inside the stop set pays immediately") {
    const IntervalSet stop({{5.0, kInf}});
    const PathPayoff reward = discounted_reward([](double z) { return z; }, kMarket.r);
    const McEstimate v = mc_policy_value(7.0, stop, reward, quick(100), kMarket);
    CHECK(v.estimate == 7.0);
    CHECK(v.std_error == 0.0);
}

TEST_CASE("horizon cap") {
    SimConfig s = quick(2000);
    s.horizon = 0.05;
    const PathPayoff one = discounted_reward([](double) { return 1.0; }, kMarket.r);
    const McEstimate v = mc_policy_value(1.0, IntervalSet({{50.0, kInf}}), one, s, kMarket);
    CHECK(v.cap_fraction == 1.0);
    CHECK(v.estimate == 0.0);
}

TEST_CASE("parallel kernel matches the serial reference") {
    const IntervalSet stop({{0.0, 0.5}, {3.0, 4.0}, {9.0, kInf}});
    const std::vector<double> z0s = {0.7, 2.0, 3.5, 5.0, 8.9};
    const std::vector<PathPayoff> payoffs = {
        discounted_reward([](double z) { return z - 1.0; }, kMarket.r),
        [](const StopEvent& e) { return e.disc_integral; },
    };
    for (const Monitoring mode : {Monitoring::bridge, Monitoring::grid}) {
        SimConfig s = quick(3000);
        s.monitoring = mode;
        const auto par = mc_policy_values(z0s, stop, payoffs, s, kMarket, IntegralTracking::on);
        const auto ser = reference::mc_policy_values(z0s, stop, payoffs, s, kMarket, IntegralTracking::on);
        for (std::size_t k = 0; k < z0s.size(); ++k) {
            for (std::size_t p = 0; p < payoffs.size(); ++p) {
                CHECK(par[k][p].estimate == doctest::Approx(ser[k][p].estimate).epsilon(1e-10));
                CHECK(par[k][p].std_error == doctest::Approx(ser[k][p].std_error).epsilon(1e-8));
                CHECK(par[k][p].cap_fraction == ser[k][p].cap_fraction);
            }
        }
    }
}

TEST_CASE("results do not depend on the thread count") {
    const IntervalSet stop({{0.0, 0.5}, {4.0, kInf}});
    const std::vector<PathPayoff> payoffs = {discounted_reward([](double z) { return z; }, kMarket.r)};
    const std::vector<double> z0s = {1.0, 2.0};
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto one = mc_policy_values(z0s, stop, payoffs, quick(5000), kMarket);
    omp_set_num_threads(4);
    const auto four = mc_policy_values(z0s, stop, payoffs, quick(5000), kMarket);
    omp_set_num_threads(saved);
    for (std::size_t k = 0; k < z0s.size(); ++k) {
        CHECK(one[k][0].estimate == four[k][0].estimate);
        CHECK(one[k][0].std_error == four[k][0].std_error);
    }
}

TEST_CASE("standard error shrinks by root two when paths double") {
    const IntervalSet stop({{0.0, 0.5}, {4.0, kInf}});
    const PathPayoff one = discounted_reward([](double) { return 1.0; }, kMarket.r);
    for (std::size_t n : {2000, 8000, 32000}) {
        const McEstimate a = mc_policy_value(1.5, stop, one, quick(n), kMarket);
        const McEstimate b = mc_policy_value(1.5, stop, one, quick(2 * n), kMarket);
        const double ratio = b.std_error / a.std_error;
        CHECK(ratio == Approx(1.0 / std::sqrt(2.0)).epsilon(0.2));
    }
}

TEST_CASE("same seed, same answer") {
    const IntervalSet stop({{3.0, kInf}});
    const PathPayoff one = discounted_reward([](double) { return 1.0; }, kMarket.r);
    const McEstimate a = mc_policy_value(1.0, stop, one, quick(2000), kMarket);
    const McEstimate b = mc_policy_value(1.0, stop, one, quick(2000), kMarket);
    CHECK(a.estimate == b.estimate);
    SimConfig other = quick(2000);
    other.seed = 100;
    CHECK(mc_policy_value(1.0, stop, one, other, kMarket).estimate != a.estimate);
}

TEST_CASE("hitting probability in a narrow band against simulation") {
    const MarketParams m{0.02, 0.2, 1.0};
    const double lo = 8.0;
    const double hi = 14.0;
    SimConfig s = quick(200000, 1e-2);
    s.horizon = 40.0;
    const IntervalSet stop({{0.0, lo}, {hi, kInf}});
    const PathPayoff upper = [&](const StopEvent& e) { return !e.capped && e.z >= hi ? 1.0 : 0.0; };
    const McEstimate v = mc_policy_value(10.0, stop, upper, s, m);
    CHECK(v.cap_fraction < 1e-3);
    CHECK(v.agrees_with(hit_upper_first_prob(10.0, lo, hi, m), 3.0));
    CHECK_FALSE(v.agrees_with(hit_upper_first_prob(10.0, lo, hi, m, HitVariant::paper), 3.0));
}
