#pragma once

#include <span>
#include <vector>

#include "json.hpp"

namespace duopoly {

/// c_gamma z^gamma + c_beta z^beta + c_lin z + c_const
struct Segment {
    double c_gamma = 0.0;
    double c_beta = 0.0;
    double c_lin = 0.0;
    double c_const = 0.0;
};

/// A value function on (0, inf) made of segments in the common basis
/// {z^gamma, z^beta, z, 1}. Segment k covers [breakpoint[k-1], breakpoint[k]);
/// a point exactly at a breakpoint belongs to the segment on its right.
class PiecewiseValue {
public:
    PiecewiseValue() = default;
    PiecewiseValue(double gamma, double beta, std::vector<double> breakpoints, std::vector<Segment> segments);

    double operator()(double z) const;
    /// Analytic derivative of the segment containing z (right derivative at breakpoints).
    double derivative(double z) const;
    /// Analytic derivative of the segment left of z (left derivative at breakpoints).
    double left_derivative(double z) const;
    /// Value from the segment left of z; equals operator() away from breakpoints.
    double left_value(double z) const;

    std::size_t segment_index(double z) const;
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<Segment>& segments() const { return segments_; }
    double gamma() const { return gamma_; }
    double beta() const { return beta_; }

    /// Pointwise w_a * a + w_b * b on the union of both breakpoint sets.
    static PiecewiseValue combine(double w_a, const PiecewiseValue& a, double w_b, const PiecewiseValue& b);

private:
    double eval_segment(std::size_t k, double z) const;
    double eval_segment_derivative(std::size_t k, double z) const;

    double gamma_ = 0.0;
    double beta_ = 0.0;
    std::vector<double> breakpoints_;
    std::vector<Segment> segments_;
};

/// Evaluates v at z > 0; throws DomainError for z <= 0.
double eval_piecewise(const PiecewiseValue& v, double z);

/// Largest relative jump |right - left| / (1 + max(|left|, |right|)) over all breakpoints.
double max_breakpoint_jump(const PiecewiseValue& v);

void to_json(nlohmann::json& j, const Segment& s);
void to_json(nlohmann::json& j, const PiecewiseValue& v);

}  // namespace duopoly
