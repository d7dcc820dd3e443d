#include <cmath>
#include <random>

#include "doctest.h"

#include "duopoly/errors.hpp"
#include "duopoly/params.hpp"

using namespace duopoly;

namespace {

const char* kReference = R"(# reference market
alpha = 0.1
sigma = 0.8
r = 1
pi_low = 1
pi_high = 2
theta = 0.7
inv_cost = 10
xi = 64
)";

}  // namespace

TEST_CASE("roots of the characteristic quadratic") {
    SUBCASE("integer roots") {
        const CharRoots c = char_roots({0.0, 1.0, 1.0});
        CHECK(c.gamma == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(c.beta == doctest::Approx(-1.0).epsilon(1e-14));
    }
    SUBCASE("against the quadratic formula") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int k = 0; k < 500; ++k) {
            MarketParams m;
            m.r = 0.01 + u(rng);
            m.alpha = 0.99 * m.r * u(rng);
            m.sigma = 0.05 + 2.0 * u(rng);
            const double a = 0.5 * m.sigma * m.sigma;
            const double b = m.alpha - a;
            const double disc = std::sqrt(b * b + 4.0 * a * m.r);
            const CharRoots c = char_roots(m);
            CHECK(c.gamma == doctest::Approx((-b + disc) / (2.0 * a)).epsilon(1e-12));
            CHECK(c.beta == doctest::Approx((-b - disc) / (2.0 * a)).epsilon(1e-12));
            CHECK(c.gamma > 1.0);
            CHECK(c.beta < 0.0);
            CHECK(relative_root_residual(m, c.gamma) < 1e-12);
            CHECK(relative_root_residual(m, c.beta) < 1e-12);
        }
    }
}

TEST_CASE("derived coefficients") {
    const ModelConfig c = parse_config(kReference);
    const DerivedCoeffs d = derive_coeffs(c.market, c.econ);
    CHECK(d.a1 == doctest::Approx(1.0 / 0.9));
    CHECK(d.a2 == doctest::Approx(1.5 / 0.9));
    CHECK(d.k1 == doctest::Approx(3.0));
    CHECK(d.k2 == doctest::Approx(10.0));
    CHECK(cournot_value(3.0, c.market, c.econ) == doctest::Approx(-5.0));
}

TEST_CASE("config parsing") {
    const ModelConfig c = parse_config(kReference);
    CHECK(c.market.sigma == 0.8);
    CHECK(c.econ.xi == 64.0);
    CHECK(c.econ.p_high == 0.5);
    CHECK(c.sim.monitoring == Monitoring::bridge);

    SUBCASE("round trip") {
        const ModelConfig back = parse_config(format_config(c));
        CHECK(back.market.alpha == c.market.alpha);
        CHECK(back.econ.theta == c.econ.theta);
        CHECK(back.sim.seed == c.sim.seed);
        CHECK(back.sim.dt == c.sim.dt);
    }

    auto fails_on = [](const std::string& text, const std::string& key) {
        try {
            parse_config(text);
        } catch (const ConfigError& e) {
            return std::string(e.what()).rfind(key, 0) == 0;
        }
        return false;
    };
    const std::string base(kReference);
    CHECK(fails_on(base + "colour = red\n", "colour"));
    CHECK(fails_on(base + "alpha = 0.2\n", "alpha"));
    CHECK(fails_on(base + "seed = -3\n", "seed"));
    CHECK(fails_on(base + "monitoring = sometimes\n", "monitoring"));
    CHECK(fails_on("alpha=0.1\nsigma=0.8\nr=1\npi_low=1\npi_high=2\ntheta=0.7\n", "inv_cost"));
    CHECK(fails_on("alpha=0.1\nsigma=0\nr=1\npi_low=1\npi_high=2\ntheta=0.7\ninv_cost=1\n", "sigma"));
    CHECK(fails_on("alpha=1\nsigma=0.8\nr=1\npi_low=1\npi_high=2\ntheta=0.7\ninv_cost=1\n", "r"));
    CHECK(fails_on("alpha=0.1\nsigma=0.8\nr=1\npi_low=1\npi_high=2\ntheta=1.5\ninv_cost=1\n", "theta"));
    CHECK(fails_on("alpha=0.1\nsigma=abc\nr=1\npi_low=1\npi_high=2\ntheta=0.5\ninv_cost=1\n", "sigma"));
    CHECK_THROWS_AS(parse_config("just some words\n"), ConfigError);
}

TEST_CASE("shipped configs load") {
    CHECK_NOTHROW(load_config(DUOPOLY_CONFIG_DIR "/reference.cfg"));
    CHECK_NOTHROW(load_config(DUOPOLY_CONFIG_DIR "/always_innovate.cfg"));
    CHECK_THROWS_AS(load_config(DUOPOLY_CONFIG_DIR "/missing.cfg"), ConfigError);
}
