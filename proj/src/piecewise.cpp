#include "duopoly/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "duopoly/errors.hpp"

namespace duopoly {

PiecewiseValue::PiecewiseValue(double gamma, double beta, std::vector<double> breakpoints,
                               std::vector<Segment> segments)
    : gamma_(gamma), beta_(beta), breakpoints_(std::move(breakpoints)), segments_(std::move(segments)) {
    if (segments_.size() != breakpoints_.size() + 1) {
        throw DomainError("PiecewiseValue: need exactly one more segment than breakpoints");
    }
    for (std::size_t k = 0; k < breakpoints_.size(); ++k) {
        if (!(breakpoints_[k] > 0.0) || (k > 0 && !(breakpoints_[k] > breakpoints_[k - 1]))) {
            throw DomainError("PiecewiseValue: breakpoints must be positive and strictly ascending");
        }
    }
}

std::size_t PiecewiseValue::segment_index(double z) const {
    return static_cast<std::size_t>(std::upper_bound(breakpoints_.begin(), breakpoints_.end(), z) -
                                    breakpoints_.begin());
}

double PiecewiseValue::eval_segment(std::size_t k, double z) const {
    const Segment& s = segments_[k];
    double v = s.c_lin * z + s.c_const;
    if (s.c_gamma != 0.0) v += s.c_gamma * std::pow(z, gamma_);
    if (s.c_beta != 0.0) v += s.c_beta * std::pow(z, beta_);
    return v;
}

double PiecewiseValue::eval_segment_derivative(std::size_t k, double z) const {
    const Segment& s = segments_[k];
    double d = s.c_lin;
    if (s.c_gamma != 0.0) d += s.c_gamma * gamma_ * std::pow(z, gamma_ - 1.0);
    if (s.c_beta != 0.0) d += s.c_beta * beta_ * std::pow(z, beta_ - 1.0);
    return d;
}

double PiecewiseValue::operator()(double z) const { return eval_segment(segment_index(z), z); }

double PiecewiseValue::derivative(double z) const { return eval_segment_derivative(segment_index(z), z); }

double PiecewiseValue::left_derivative(double z) const {
    const auto k = static_cast<std::size_t>(std::lower_bound(breakpoints_.begin(), breakpoints_.end(), z) -
                                            breakpoints_.begin());
    return eval_segment_derivative(k, z);
}

double PiecewiseValue::left_value(double z) const {
    const auto k = static_cast<std::size_t>(std::lower_bound(breakpoints_.begin(), breakpoints_.end(), z) -
                                            breakpoints_.begin());
    return eval_segment(k, z);
}

PiecewiseValue PiecewiseValue::combine(double w_a, const PiecewiseValue& a, double w_b, const PiecewiseValue& b) {
    if (a.gamma_ != b.gamma_ || a.beta_ != b.beta_) {
        throw DomainError("PiecewiseValue::combine: exponent mismatch");
    }
    std::vector<double> bps;
    std::set_union(a.breakpoints_.begin(), a.breakpoints_.end(), b.breakpoints_.begin(), b.breakpoints_.end(),
                   std::back_inserter(bps));
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

    std::vector<Segment> segs;
    segs.reserve(bps.size() + 1);
    for (std::size_t k = 0; k <= bps.size(); ++k) {
        // Any point inside segment k identifies the source segments.
        const double probe = k < bps.size() ? (k == 0 ? 0.5 * bps[0] : 0.5 * (bps[k - 1] + bps[k]))
                                            : (bps.empty() ? 1.0 : 2.0 * bps.back());
        const Segment& sa = a.segments_[a.segment_index(probe)];
        const Segment& sb = b.segments_[b.segment_index(probe)];
        segs.push_back(Segment{w_a * sa.c_gamma + w_b * sb.c_gamma, w_a * sa.c_beta + w_b * sb.c_beta,
                               w_a * sa.c_lin + w_b * sb.c_lin, w_a * sa.c_const + w_b * sb.c_const});
    }
    return PiecewiseValue(a.gamma_, a.beta_, std::move(bps), std::move(segs));
}

double eval_piecewise(const PiecewiseValue& v, double z) {
    if (!(z > 0.0)) throw DomainError("eval_piecewise: z must be > 0, got " + std::to_string(z));
    return v(z);
}

double max_breakpoint_jump(const PiecewiseValue& v) {
    double worst = 0.0;
    for (double bp : v.breakpoints()) {
        const double left = v.left_value(bp);
        const double right = v(bp);
        worst = std::max(worst, std::abs(right - left) / (1.0 + std::max(std::abs(left), std::abs(right))));
    }
    return worst;
}

void to_json(nlohmann::json& j, const Segment& s) {
    j = {{"c_gamma", s.c_gamma}, {"c_beta", s.c_beta}, {"c_lin", s.c_lin}, {"c_const", s.c_const}};
}

void to_json(nlohmann::json& j, const PiecewiseValue& v) {
    j = {{"gamma", v.gamma()}, {"beta", v.beta()}, {"breakpoints", v.breakpoints()}, {"segments", v.segments()}};
}

}  // namespace duopoly
