#include "duopoly/follower.hpp"

#include <array>
#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "duopoly/errors.hpp"

namespace duopoly {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kSolveTol = 1e-12;
constexpr double kAcceptTol = 1e-10;
constexpr int kMaxIter = 200;

void require_even_odds(const EconParams& econ) {
    if (econ.p_high != 0.5) throw ConfigError("p_high: follower and leader values require p_high = 0.5");
}

struct Line {
    double a = 0.0;
    double k = 0.0;
};

// Coefficients (B, C) of B z^g - C z^b touching the line a z - K at z with
// matching slope.
std::array<double, 2> tangent_coeffs(double z, Line line, const CharRoots& roots) {
    const double g = roots.gamma;
    const double b = roots.beta;
    const double bc = (line.a * (1.0 - b) * z + b * line.k) / ((g - b) * std::pow(z, g));
    const double cc = (line.a * (1.0 - g) * z + g * line.k) / ((g - b) * std::pow(z, b));
    return {bc, cc};
}

struct Trial {
    double b0 = 0.0;
    double c0 = 0.0;
    std::array<double, 2> res{};
};

// (B0, C0) from value matching at both ends; residuals are the relative
// slope mismatches at z2 and z3.
Trial pasting_trial(double z2, double z3, const CharRoots& roots, const DerivedCoeffs& d) {
    const double g = roots.gamma;
    const double b = roots.beta;
    const double rho = z3 / z2;
    const double v2 = d.a1 * z2 - d.k1;
    const double v3 = d.a2 * z3 - d.k2;
    const double rg = std::pow(rho, g);
    const double rb = std::pow(rho, b);
    const double q = (v3 - v2 * rg) / (rg - rb);
    const double p = v2 + q;
    Trial t;
    t.b0 = p / std::pow(z2, g);
    t.c0 = q / std::pow(z2, b);
    t.res = {(g * p - b * q) / (d.a1 * z2) - 1.0, (g * p * rg - b * q * rb) / (d.a2 * z3) - 1.0};
    return t;
}

double norm_inf(const std::array<double, 2>& v) { return std::max(std::abs(v[0]), std::abs(v[1])); }

struct NewtonResult {
    bool converged = false;
    double z2 = 0.0;
    double z3 = 0.0;
    int iterations = 0;
};

// Damped Newton in (ln z2, ln z3) with a central-difference Jacobian.
NewtonResult newton_pasting(double z2, double z3, const CharRoots& roots, const DerivedCoeffs& d) {
    std::array<double, 2> u = {std::log(z2), std::log(z3)};
    auto eval = [&](const std::array<double, 2>& x) {
        if (!(x[1] > x[0]) || !std::isfinite(x[0]) || !std::isfinite(x[1])) {
            return std::array<double, 2>{kInf, kInf};
        }
        return pasting_trial(std::exp(x[0]), std::exp(x[1]), roots, d).res;
    };
    NewtonResult out;
    std::array<double, 2> f = eval(u);
    for (int it = 1; it <= kMaxIter; ++it) {
        out.iterations = it;
        if (!std::isfinite(norm_inf(f))) return out;
        if (norm_inf(f) < 0.01 * kSolveTol) break;
        std::array<std::array<double, 2>, 2> jac{};
        for (int c = 0; c < 2; ++c) {
            const double h = 1e-6;
            auto up = u;
            auto dn = u;
            up[c] += h;
            dn[c] -= h;
            const auto fu = eval(up);
            const auto fd = eval(dn);
            jac[0][c] = (fu[0] - fd[0]) / (2.0 * h);
            jac[1][c] = (fu[1] - fd[1]) / (2.0 * h);
        }
        const double det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if (!std::isfinite(det) || det == 0.0) return out;
        const std::array<double, 2> step = {(f[0] * jac[1][1] - f[1] * jac[0][1]) / det,
                                            (f[1] * jac[0][0] - f[0] * jac[1][0]) / det};
        double lambda = 1.0;
        bool accepted = false;
        for (int half = 0; half < 40; ++half, lambda *= 0.5) {
            const std::array<double, 2> trial = {u[0] - lambda * step[0], u[1] - lambda * step[1]};
            const auto ft = eval(trial);
            if (norm_inf(ft) < norm_inf(f)) {
                u = trial;
                f = ft;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        if (std::max(std::abs(step[0]), std::abs(step[1])) * lambda < 1e-15) break;
    }
    out.z2 = std::exp(u[0]);
    out.z3 = std::exp(u[1]);
    out.converged = norm_inf(f) <= kSolveTol;
    return out;
}

// Gap between the curve tangent to the innovation line at z3 and the copy
// line, minimised over z < z3; zero at the solution, with z2 the minimiser.
struct GapMin {
    double value = 0.0;
    double at = 0.0;
};

GapMin copy_line_gap(double z3, const CharRoots& roots, const DerivedCoeffs& d) {
    const auto [bc, cc] = tangent_coeffs(z3, Line{d.a2, d.k2}, roots);
    auto gap = [&](double lz) {
        const double z = std::exp(lz);
        const double v = bc * std::pow(z, roots.gamma) - cc * std::pow(z, roots.beta) - (d.a1 * z - d.k1);
        return std::isfinite(v) ? v : std::numeric_limits<double>::max();
    };
    std::uintmax_t iters = 500;
    const auto [lz, v] = boost::math::tools::brent_find_minima(gap, std::log(z3) - 30.0, std::log(z3), 52, iters);
    return {v, std::exp(lz)};
}

NewtonResult bracket_pasting(const CharRoots& roots, const DerivedCoeffs& d) {
    const double z3_lo = roots.gamma / (roots.gamma - 1.0) * d.k2 / d.a2;
    if (!(copy_line_gap(z3_lo, roots, d).value < 0.0)) {
        throw SolverError("solve_low: no sign change at the innovation-only threshold");
    }
    double z3_hi = 2.0 * z3_lo;
    int grow = 0;
    while (!(copy_line_gap(z3_hi, roots, d).value > 0.0)) {
        if (++grow > 60) throw SolverError("solve_low: could not bracket the upper threshold");
        z3_hi *= 2.0;
    }
    std::uintmax_t max_iter = kMaxIter;
    const auto [a, b] = boost::math::tools::toms748_solve(
        [&](double z3) { return copy_line_gap(z3, roots, d).value; }, z3_lo, z3_hi,
        boost::math::tools::eps_tolerance<double>(50), max_iter);
    const double z3 = 0.5 * (a + b);
    NewtonResult out = newton_pasting(copy_line_gap(z3, roots, d).at, z3, roots, d);
    out.iterations += static_cast<int>(max_iter);
    return out;
}

double rel(double lhs, double rhs, double scale) { return std::abs(lhs - rhs) / scale; }

PastingResiduals residuals_at(const FollowerLowSolution& s) {
    const double g = s.roots.gamma;
    const double b = s.roots.beta;
    auto v = [&](double z) { return s.b0_coef * std::pow(z, g) - s.c0_coef * std::pow(z, b); };
    auto dv = [&](double z) { return g * s.b0_coef * std::pow(z, g - 1.0) - b * s.c0_coef * std::pow(z, b - 1.0); };
    const DerivedCoeffs& d = s.coeffs;
    PastingResiduals r;
    if (s.regime == FollowerRegime::inner_wait) {
        r.value_z2 = rel(v(s.z2), d.a1 * s.z2 - d.k1, d.a1 * s.z2 + d.k1);
        r.slope_z2 = rel(dv(s.z2), d.a1, d.a1);
    }
    r.value_z3 = rel(v(s.z3), d.a2 * s.z3 - d.k2, d.a2 * s.z3 + d.k2);
    r.slope_z3 = rel(dv(s.z3), d.a2, d.a2);
    return r;
}

}  // namespace

const char* to_string(FollowerRegime r) {
    return r == FollowerRegime::inner_wait ? "inner_wait" : "always_innovate";
}

const char* to_string(FollowerAction a) {
    switch (a) {
        case FollowerAction::wait: return "wait";
        case FollowerAction::copy: return "copy";
        case FollowerAction::innovate: return "innovate";
    }
    return "?";
}

double PastingResiduals::max() const {
    return std::max({value_z2, slope_z2, value_z3, slope_z3});
}

double regime_ratio(const MarketParams& market, const EconParams& econ) {
    const CharRoots roots = char_roots(market);
    const DerivedCoeffs d = derive_coeffs(market, econ);
    return std::pow(d.a2 / d.a1, roots.gamma / (roots.gamma - 1.0));
}

FollowerRegime classify_regime(const MarketParams& market, const EconParams& econ) {
    const DerivedCoeffs d = derive_coeffs(market, econ);
    return regime_ratio(market, econ) < d.k2 / d.k1 ? FollowerRegime::inner_wait : FollowerRegime::always_innovate;
}

CopyThreshold copy_threshold(const MarketParams& market, const EconParams& econ) {
    const CharRoots roots = char_roots(market);
    const DerivedCoeffs d = derive_coeffs(market, econ);
    const double g = roots.gamma;
    CopyThreshold out;
    out.z1 = g / (g - 1.0) * d.k1 / d.a1;
    out.a0 = d.k1 / ((g - 1.0) * std::pow(out.z1, g));
    return out;
}

FollowerLowSolution solve_low(const MarketParams& market, const EconParams& econ) {
    market.validate();
    econ.validate();
    require_even_odds(econ);

    FollowerLowSolution s;
    s.roots = char_roots(market);
    s.coeffs = derive_coeffs(market, econ);
    s.regime = classify_regime(market, econ);
    const double g = s.roots.gamma;
    const DerivedCoeffs& d = s.coeffs;

    if (s.regime == FollowerRegime::always_innovate) {
        s.z1 = s.z2 = s.a0_coef = s.c0_coef = kNaN;
        s.z3 = g / (g - 1.0) * d.k2 / d.a2;
        s.b0_coef = d.k2 / ((g - 1.0) * std::pow(s.z3, g));
        s.value = PiecewiseValue(g, s.roots.beta, {s.z3}, {Segment{s.b0_coef, 0, 0, 0}, Segment{0, 0, d.a2, -d.k2}});
        s.method = "closed_form";
        s.residuals = residuals_at(s);
        return s;
    }

    const CopyThreshold ct = copy_threshold(market, econ);
    s.z1 = ct.z1;
    s.a0_coef = ct.a0;

    auto ordered = [&](const NewtonResult& n) {
        return n.converged && n.z2 >= s.z1 * (1.0 - 1e-12) && n.z3 > n.z2;
    };
    NewtonResult n = newton_pasting(1.5 * s.z1, g / (g - 1.0) * d.k2 / d.a2, s.roots, d);
    s.method = "newton";
    if (!ordered(n)) {
        n = bracket_pasting(s.roots, d);
        s.method = "bracket";
    }
    s.iterations = n.iterations;
    if (!n.converged) throw SolverError("solve_low: pasting system did not converge");
    if (!ordered(n)) {
        throw SolverError("solve_low: thresholds violate z1 <= z2 <= z3 (inconsistent parameters)");
    }
    s.z2 = n.z2;
    s.z3 = n.z3;
    const Trial t = pasting_trial(s.z2, s.z3, s.roots, d);
    s.b0_coef = t.b0;
    s.c0_coef = t.c0;
    s.value = PiecewiseValue(g, s.roots.beta, {s.z1, s.z2, s.z3},
                             {Segment{s.a0_coef, 0, 0, 0}, Segment{0, 0, d.a1, -d.k1},
                              Segment{s.b0_coef, -s.c0_coef, 0, 0}, Segment{0, 0, d.a2, -d.k2}});
    s.residuals = residuals_at(s);
    if (!(s.residuals.max() < kAcceptTol)) {
        throw SolverError("solve_low: pasting residual " + std::to_string(s.residuals.max()) + " above tolerance");
    }
    return s;
}

double eval_low(double z, const FollowerLowSolution& s) {
    if (!(z > 0.0)) throw DomainError("eval_low: z must be > 0");
    const double g = s.roots.gamma;
    const DerivedCoeffs& d = s.coeffs;
    if (s.regime == FollowerRegime::always_innovate) {
        return z < s.z3 ? s.b0_coef * std::pow(z, g) : d.a2 * z - d.k2;
    }
    if (z < s.z1) return s.a0_coef * std::pow(z, g);
    if (z <= s.z2) return d.a1 * z - d.k1;
    if (z < s.z3) return s.b0_coef * std::pow(z, g) - s.c0_coef * std::pow(z, s.roots.beta);
    return d.a2 * z - d.k2;
}

FollowerHighSolution solve_high(const MarketParams& market, const EconParams& econ) {
    market.validate();
    econ.validate();
    require_even_odds(econ);
    const CharRoots roots = char_roots(market);
    const double g = roots.gamma;
    FollowerHighSolution s;
    s.growth = market.r - market.alpha;
    s.copy_cost = (1.0 - econ.theta) * econ.inv_cost;
    s.pi_high = econ.pi_high;
    s.gamma = g;
    s.z_h = g / (g - 1.0) * s.growth * s.copy_cost / econ.pi_high;
    const double c = s.copy_cost / (g - 1.0) / std::pow(s.z_h, g);
    s.value = PiecewiseValue(g, roots.beta, {s.z_h},
                             {Segment{c, 0, 0, 0}, Segment{0, 0, econ.pi_high / s.growth, -s.copy_cost}});
    return s;
}

double eval_high(double z, const FollowerHighSolution& s) {
    if (!(z > 0.0)) throw DomainError("eval_high: z must be > 0");
    if (z < s.z_h) return s.copy_cost / (s.gamma - 1.0) * std::pow(z / s.z_h, s.gamma);
    return s.pi_high * z / s.growth - s.copy_cost;
}

double follower_value(double z, const FollowerLowSolution& low, const FollowerHighSolution& high,
                      const EconParams& econ) {
    require_even_odds(econ);
    return 0.5 * eval_high(z, high) + 0.5 * eval_low(z, low);
}

FollowerAction follower_policy(double z, ProfitOutcome outcome, const FollowerLowSolution& low,
                               const FollowerHighSolution& high) {
    if (!(z > 0.0)) throw DomainError("follower_policy: z must be > 0");
    if (outcome == ProfitOutcome::high) return z >= high.z_h ? FollowerAction::copy : FollowerAction::wait;
    if (z >= low.z3) return FollowerAction::innovate;
    if (low.regime == FollowerRegime::inner_wait && z >= low.z1 && z <= low.z2) return FollowerAction::copy;
    return FollowerAction::wait;
}

IntervalSet low_stop_region(const FollowerLowSolution& s) {
    if (s.regime == FollowerRegime::always_innovate) return IntervalSet({{s.z3, kInf}});
    return IntervalSet({{s.z1, s.z2}, {s.z3, kInf}});
}

IntervalSet high_stop_region(const FollowerHighSolution& s) { return IntervalSet({{s.z_h, kInf}}); }

namespace {

nlohmann::json number_or_null(double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); }

}  // namespace

void to_json(nlohmann::json& j, const FollowerLowSolution& s) {
    j = {
        {"regime", to_string(s.regime)},
        {"z1", number_or_null(s.z1)},
        {"z2", number_or_null(s.z2)},
        {"z3", s.z3},
        {"a0", number_or_null(s.a0_coef)},
        {"b0", s.b0_coef},
        {"c0", number_or_null(s.c0_coef)},
        {"method", s.method},
        {"iterations", s.iterations},
        {"pasting_residuals",
         {{"value_z2", s.residuals.value_z2},
          {"slope_z2", s.residuals.slope_z2},
          {"value_z3", s.residuals.value_z3},
          {"slope_z3", s.residuals.slope_z3}}},
    };
}

void to_json(nlohmann::json& j, const FollowerHighSolution& s) {
    const double at = s.copy_cost / (s.gamma - 1.0);
    const double above = s.pi_high * s.z_h / s.growth - s.copy_cost;
    j = {{"z_h", s.z_h}, {"value_at_z_h", at}, {"pasting_residuals", {{"value_z_h", std::abs(above - at) / (1.0 + at)}}}};
}

}  // namespace duopoly
