#include "duopoly/intervals.hpp"

#include <algorithm>

#include "duopoly/errors.hpp"

namespace duopoly {

IntervalSet::IntervalSet(std::vector<Interval> intervals) {
    for (const auto& iv : intervals) {
        if (!(iv.lo >= 0.0) || !(iv.hi >= iv.lo)) throw DomainError("IntervalSet: need 0 <= lo <= hi");
    }
    std::sort(intervals.begin(), intervals.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (const auto& iv : intervals) {
        if (!intervals_.empty() && iv.lo <= intervals_.back().hi) {
            intervals_.back().hi = std::max(intervals_.back().hi, iv.hi);
        } else {
            intervals_.push_back(iv);
        }
    }
}

bool IntervalSet::contains(double z) const {
    auto it = std::upper_bound(intervals_.begin(), intervals_.end(), z,
                               [](double v, const Interval& iv) { return v < iv.lo; });
    if (it == intervals_.begin()) return false;
    return std::prev(it)->contains(z);
}

Gap IntervalSet::gap_around(double z) const {
    if (contains(z)) throw DomainError("IntervalSet::gap_around: point lies inside the set");
    auto it = std::upper_bound(intervals_.begin(), intervals_.end(), z,
                               [](double v, const Interval& iv) { return v < iv.lo; });
    Gap g;
    g.hi = it == intervals_.end() ? kInf : it->lo;
    g.lo = it == intervals_.begin() ? 0.0 : std::prev(it)->hi;
    return g;
}

IntervalSet IntervalSet::unite(const IntervalSet& other) const {
    std::vector<Interval> all = intervals_;
    all.insert(all.end(), other.intervals_.begin(), other.intervals_.end());
    return IntervalSet(std::move(all));
}

void to_json(nlohmann::json& j, const Interval& i) {
    j = nlohmann::json::array({i.lo, i.hi == kInf ? nlohmann::json("inf") : nlohmann::json(i.hi)});
}

void to_json(nlohmann::json& j, const IntervalSet& s) {
    j = nlohmann::json::array();
    for (const auto& iv : s.intervals()) j.push_back(iv);
}

}  // namespace duopoly
