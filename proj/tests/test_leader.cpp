#include <cmath>
#include <utility>

#include "doctest.h"

#include "duopoly/leader.hpp"
#include "oracle.hpp"

using namespace duopoly;
using doctest::Approx;

TEST_CASE("leader values against the frozen solution") {
    const auto c = oracle::reference();
    const PayoffModel m = build_model(c.market, c.econ);
    for (const auto& row : oracle::rows) {
        CAPTURE(row.z);
        CHECK(m.leader.low_value(row.z) == Approx(row.L_L).epsilon(1e-9));
        CHECK(m.leader.high_value(row.z) == Approx(row.L_H).epsilon(1e-9));
        CHECK(m.L(row.z) == Approx(row.L).epsilon(1e-9));
        CHECK(m.F(row.z) == Approx(row.F).epsilon(1e-9));
        CHECK(m.C(row.z) == Approx(row.C).epsilon(1e-10));
        CHECK(leader_value(row.z, m.leader, c.econ) == Approx(row.L).epsilon(1e-9));
    }
}

TEST_CASE("leader equals Cournot once the follower has acted") {
    const auto c = oracle::reference();
    const PayoffModel m = build_model(c.market, c.econ);
    for (double z : {15.0, 30.0, 100.0}) {
        CHECK(m.L(z) == Approx(m.C(z)).epsilon(1e-12));
        CHECK(m.F(z) >= m.C(z));
    }
    const double z = 0.5 * (m.follower_low.z1 + m.follower_low.z2);
    CHECK(m.leader.low_value(z) == Approx(c.econ.pi_low * z / 0.9 - 10.0 - 0.0).epsilon(1e-12));
}

TEST_CASE("leader values are continuous") {
    const auto c = oracle::reference();
    const PayoffModel m = build_model(c.market, c.econ);
    CHECK(max_breakpoint_jump(m.leader.low_value) < 1e-10);
    CHECK(max_breakpoint_jump(m.leader.high_value) < 1e-10);
    CHECK(max_breakpoint_jump(m.leader.combined) < 1e-10);
}

TEST_CASE("leader values solve the equation with the monopoly flow") {
    const auto c = oracle::reference();
    const PayoffModel m = build_model(c.market, c.econ);
    const auto& fl = m.follower_low;
    auto ll = [&](double z) { return m.leader.low_value(z); };
    auto lh = [&](double z) { return m.leader.high_value(z); };
    const double I = c.econ.inv_cost;
    for (double t = 0.05; t < 1.0; t += 0.1) {
        for (double z : {t * fl.z1, fl.z2 + t * (fl.z3 - fl.z2)}) {
            const auto [res, scale] = oracle::generator(ll, z, c.market);
            const double src = (c.econ.pi_low + c.econ.xi) * z - c.market.r * I;
            CHECK(std::abs(res + src) / (scale + std::abs(src)) < 1e-5);
        }
        const double z = t * m.follower_high.z_h;
        const auto [res, scale] = oracle::generator(lh, z, c.market);
        const double src = (c.econ.pi_high + c.econ.xi) * z - c.market.r * I;
        CHECK(std::abs(res + src) / (scale + std::abs(src)) < 1e-5);
    }
}

TEST_CASE("monopoly term vanishes at the band ends") {
    const auto c = oracle::reference();
    const CharRoots roots = char_roots(c.market);
    CHECK(std::abs(monopoly_term(2.0 * (1 + 1e-13), 2.0, 9.0, c.market, c.econ, roots)) < 1e-8);
    CHECK(std::abs(monopoly_term(9.0 * (1 - 1e-13), 2.0, 9.0, c.market, c.econ, roots)) < 1e-8);
    CHECK(monopoly_term(4.0, 2.0, 9.0, c.market, c.econ, roots) > 0.0);
    const Segment s = monopoly_segment(2.0, 9.0, c.market, c.econ, roots);
    const double z = 4.0;
    CHECK(s.c_gamma * std::pow(z, roots.gamma) + s.c_beta * std::pow(z, roots.beta) + s.c_lin * z + s.c_const ==
          Approx(monopoly_term(z, 2.0, 9.0, c.market, c.econ, roots)).epsilon(1e-10));
}

TEST_CASE("monopoly benefit is linear in xi") {
    auto c = oracle::reference();
    const CharRoots roots = char_roots(c.market);
    const double base = monopoly_term(4.0, 2.0, 9.0, c.market, c.econ, roots);
    c.econ.xi *= 3.0;
    CHECK(monopoly_term(4.0, 2.0, 9.0, c.market, c.econ, roots) == Approx(3.0 * base).epsilon(1e-13));
}

TEST_CASE("without a monopoly benefit the follower position is worth at least as much") {
    auto c = oracle::reference();
    c.econ.xi = 0.0;
    const PayoffModel m = build_model(c.market, c.econ);
    for (double z = 0.01; z < 100.0; z *= 1.02) {
        CAPTURE(z);
        CHECK(m.L(z) <= m.F(z) + 1e-10 * (1.0 + std::abs(m.F(z))));
    }
}

TEST_CASE("leader value below the copy threshold: concave pieces, convex kink at z_h") {
    const auto c = oracle::reference();
    const PayoffModel m = build_model(c.market, c.econ);
    const double zh = m.follower_high.z_h;
    const double z1 = m.follower_low.z1;
    for (const auto [lo, hi] : {std::pair{0.0, zh}, std::pair{zh, z1}}) {
        for (double t = 0.02; t < 0.99; t += 0.02) {
            const double z = lo + t * (hi - lo);
            const double h = 1e-4 * z;
            CHECK(m.L(z + h) - 2.0 * m.L(z) + m.L(z - h) < 0.0);
        }
    }
    const auto& l = m.leader.combined;
    CHECK(l.derivative(zh) > l.left_derivative(zh));
}
