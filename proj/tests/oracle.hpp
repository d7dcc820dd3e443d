#pragma once

#include <cmath>
#include <functional>

#include "duopoly/params.hpp"

// Reference market and numbers frozen from an independent Python solution
// (scipy root finding, brute-force grids), 12 significant digits.
namespace oracle {

inline duopoly::ModelConfig reference() {
    duopoly::ModelConfig c;
    c.market = {0.1, 0.8, 1.0};
    c.econ.pi_low = 1.0;
    c.econ.pi_high = 2.0;
    c.econ.theta = 0.7;
    c.econ.inv_cost = 10.0;
    c.econ.xi = 64.0;
    return c;
}

inline constexpr double gamma = 2.14462869177799;
inline constexpr double beta = -1.45712869177799;
inline constexpr double z1 = 5.05884354410687;
inline constexpr double z2 = 11.1535963573287;
inline constexpr double z3 = 14.1226391785912;
inline constexpr double z_h = 2.52942177205344;
inline constexpr double a0 = 0.0810080390936741;
inline constexpr double b0 = 0.0410647473691693;
inline constexpr double c0 = -72.2906445797141;

inline constexpr double a1_lo = 0.141130376136;
inline constexpr double a1_hi = 4.88002929179;
inline constexpr double a2_lo = 11.9740304015;
inline constexpr double a2_hi = 13.2036580895;
inline constexpr double b3_start = 15.2996530623;

struct Row {
    double z, L, F, C, F_L, F_H, L_L, L_H;
};

inline constexpr Row rows[] = {
    {0.5, 22.3518924066, 0.0496641267883, -9.16666666667, 0.018320214483, 0.0810080390937, 23.5965474234,
     21.1072373897},
    {3.0, 43.0152992094, 2.260646285, -5.0, 0.85462590334, 3.66666666667, 89.3639317521, -3.33333333333},
    {8.0, 3.33333333333, 10.3333333333, 3.33333333333, 5.88888888889, 14.7777777778, -1.11111111111,
     7.77777777778},
    {12.5, 19.3855424552, 17.9230839377, 10.8333333333, 11.0683900977, 24.7777777778, 20.9933071325,
     17.7777777778},
    {20.0, 23.3333333333, 32.3888888889, 23.3333333333, 23.3333333333, 41.4444444444, 12.2222222222,
     34.4444444444},
};

/// 1/2 sigma^2 z^2 v'' + alpha z v' - r v by central differences, with the
/// magnitude of the largest term as scale.
inline std::pair<double, double> generator(const std::function<double(double)>& v, double z,
                                           const duopoly::MarketParams& m) {
    const double h = 1e-4 * z;
    const double f0 = v(z);
    const double fp = v(z + h);
    const double fm = v(z - h);
    const double d1 = (fp - fm) / (2.0 * h);
    const double d2 = (fp - 2.0 * f0 + fm) / (h * h);
    const double t2 = 0.5 * m.sigma * m.sigma * z * z * d2;
    const double t1 = m.alpha * z * d1;
    const double t0 = m.r * f0;
    return {t2 + t1 - t0, std::max({std::abs(t2), std::abs(t1), std::abs(t0), 1e-12})};
}

}  // namespace oracle
