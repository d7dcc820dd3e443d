#include "doctest.h"

#include "duopoly/intervals.hpp"

using namespace duopoly;

TEST_CASE("interval sets merge and report gaps") {
    const IntervalSet s({{5.0, 6.0}, {1.0, 2.0}, {2.0, 3.0}, {10.0, kInf}});
    REQUIRE(s.size() == 3);
    CHECK(s.intervals()[0] == Interval{1.0, 3.0});
    CHECK(s.contains(1.0));
    CHECK(s.contains(3.0));
    CHECK_FALSE(s.contains(4.0));
    CHECK(s.contains(1e300));

    const Gap below = s.gap_around(0.5);
    CHECK(below.lo == 0.0);
    CHECK(below.hi == 1.0);
    const Gap mid = s.gap_around(4.0);
    CHECK(mid.lo == 3.0);
    CHECK(mid.hi == 5.0);

    const IntervalSet u = s.unite(IntervalSet({{2.5, 5.5}}));
    CHECK(u.size() == 2);
    CHECK(u.intervals()[0] == Interval{1.0, 6.0});

    const Gap everywhere = IntervalSet().gap_around(3.0);
    CHECK(everywhere.lo == 0.0);
    CHECK(everywhere.hi == kInf);
}
