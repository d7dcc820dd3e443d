#pragma once

#include <limits>
#include <vector>

#include "json.hpp"

namespace duopoly {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closed demand interval [lo, hi]; hi may be +inf, lo may be 0.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double z) const { return z >= lo && z <= hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Gap of the complement of an IntervalSet around a point: (lo, hi),
/// lo = 0 when nothing lies below, hi = +inf when nothing lies above.
struct Gap {
    double lo = 0.0;
    double hi = kInf;
};

/// Finite union of closed intervals kept sorted and disjoint; touching
/// or overlapping inputs are merged.
class IntervalSet {
public:
    IntervalSet() = default;
    explicit IntervalSet(std::vector<Interval> intervals);

    bool contains(double z) const;
    bool empty() const { return intervals_.empty(); }
    std::size_t size() const { return intervals_.size(); }
    const std::vector<Interval>& intervals() const { return intervals_; }

    /// The complement component containing z; z must not lie in the set.
    Gap gap_around(double z) const;

    IntervalSet unite(const IntervalSet& other) const;

    friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

private:
    std::vector<Interval> intervals_;
};

void to_json(nlohmann::json& j, const Interval& i);
void to_json(nlohmann::json& j, const IntervalSet& s);

}  // namespace duopoly
