#include "duopoly/gbm.hpp"

#include <cmath>

#include "duopoly/errors.hpp"

namespace duopoly {

double discount_at_hit(double z, double target, const CharRoots& roots) {
    if (!(z > 0.0) || !(target > 0.0)) throw DomainError("discount_at_hit: z and target must be > 0");
    if (z == target) return 1.0;
    return std::pow(z / target, z < target ? roots.gamma : roots.beta);
}

namespace {

void check_band(double z, double lower, double upper, const char* who) {
    if (!(lower > 0.0 && lower < z && z < upper)) {
        throw DomainError(std::string(who) + ": need 0 < lower < z < upper");
    }
}

// (1 - (lower/z)^k) / ((upper/z)^k - (lower/z)^k), written with expm1 so that
// k -> 0 degrades gracefully to the logarithmic scale function.
double scale_ratio(double k, double z, double lower, double upper) {
    const double a = std::log(upper / z);
    const double b = std::log(lower / z);
    if (std::abs(k) < 1e-14) return -b / (a - b);
    const double num = -std::expm1(k * b);
    const double den = std::expm1(k * a) - std::expm1(k * b);
    return num / den;
}

}  // namespace

double hit_upper_first_prob(double z, double lower, double upper, const MarketParams& m, HitVariant variant) {
    check_band(z, lower, upper, "hit_upper_first_prob");
    const double s2 = m.sigma * m.sigma;
    const double k = variant == HitVariant::paper ? 2.0 * std::abs(m.alpha) / s2 : 1.0 - 2.0 * m.alpha / s2;
    return scale_ratio(k, z, lower, upper);
}

TwoSidedFunctionals two_sided_functionals(double z, double lower, double upper, const MarketParams& m,
                                          const CharRoots& roots) {
    check_band(z, lower, upper, "two_sided_functionals");
    const double g = roots.gamma;
    const double b = roots.beta;
    TwoSidedFunctionals out;
    out.p_upper_first = hit_upper_first_prob(z, lower, upper, m, HitVariant::log_drift);
    const double up_num = std::pow(z / lower, g) - std::pow(z / lower, b);
    const double up_den = std::pow(upper / lower, g) - std::pow(upper / lower, b);
    out.disc_upper = up_num / up_den;
    const double lo_num = std::pow(z / upper, g) - std::pow(z / upper, b);
    const double lo_den = std::pow(lower / upper, g) - std::pow(lower / upper, b);
    out.disc_lower = lo_num / lo_den;
    return out;
}

}  // namespace duopoly
