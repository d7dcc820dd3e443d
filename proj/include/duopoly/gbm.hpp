#pragma once

#include "duopoly/params.hpp"

namespace duopoly {

/// E[exp(-r tau_target) | Z_0 = z] for the first hitting time of `target`:
/// (z/target)^gamma below the target, (z/target)^beta above it, 1 at it.
double discount_at_hit(double z, double target, const CharRoots& roots);

enum class HitVariant {
    paper,      // exponent 2|alpha|/sigma^2, as printed in the source model
    log_drift,  // scale function of the GBM: exponent 1 - 2 alpha / sigma^2
};

/// P(Z started at z hits `upper` before `lower`). Requires 0 < lower < z < upper.
double hit_upper_first_prob(double z, double lower, double upper, const MarketParams& market,
                            HitVariant variant = HitVariant::log_drift);

struct TwoSidedFunctionals {
    double p_upper_first = 0.0;
    double disc_lower = 0.0;  // E[e^{-r tau}; exit through lower]
    double disc_upper = 0.0;  // E[e^{-r tau}; exit through upper]
};

/// Exit functionals of the band (lower, upper); the discounted parts are the
/// r-harmonic functions in span{z^gamma, z^beta} with 0/1 boundary data.
TwoSidedFunctionals two_sided_functionals(double z, double lower, double upper, const MarketParams& market,
                                          const CharRoots& roots);

}  // namespace duopoly
