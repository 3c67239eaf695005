// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "baire/errors.hpp"
#include "baire/interval.hpp"

using baire::Interval;
using baire::Rational;

TEST_CASE("interval construction validates shape") {
    CHECK_THROWS_AS(Interval::make(Rational(2), true, Rational(1), true), baire::InputError);
    CHECK_THROWS_AS(Interval::make(Rational(1), false, Rational(1), false), baire::InputError);
    Interval p = Interval::point(Rational(1));
    CHECK(p.is_point());
    Interval w = Interval::whole();
    CHECK(!w.lo);
    CHECK(!w.hi);
    // Closed flags on infinite ends are dropped rather than trusted.
    Interval h = Interval::make(std::nullopt, true, Rational(0), true);
    CHECK(!h.lo_closed);
}

TEST_CASE("membership honors end flags") {
    Interval i = Interval::make(Rational(0), true, Rational(1), false); // [0,1)
    CHECK(i.contains(Rational(0)));
    CHECK(i.contains(Rational(1, 2)));
    CHECK(!i.contains(Rational(1)));
    CHECK(!i.contains(Rational(-1, 100)));
    Interval ray = Interval::make(Rational(3), false, std::nullopt, false); // (3,inf)
    CHECK(!ray.contains(Rational(3)));
    CHECK(ray.contains(Rational(1000000)));
}

TEST_CASE("distance to closure") {
    Interval u = Interval::closed(Rational(0), Rational(1));
    CHECK(u.distance(Rational(2)) == Rational(1));
    CHECK(u.distance(Rational(-3, 2)) == Rational(3, 2));
    CHECK(u.distance(Rational(1, 2)) == Rational(0));
    // Open ends do not change the distance (closure distance).
    Interval o = Interval::open(Rational(0), Rational(1));
    CHECK(o.distance(Rational(1)) == Rational(0));
}

TEST_CASE("merge and overlap case analysis") {
    Interval a = Interval::make(Rational(0), true, Rational(1), false);  // [0,1)
    Interval b = Interval::closed(Rational(1), Rational(2));             // [1,2]
    CHECK(!baire::overlaps(a, b));
    CHECK(baire::mergeable(a, b));
    Interval m = baire::merge(a, b);
    CHECK(m == Interval::closed(Rational(0), Rational(2)));

    Interval c = Interval::open(Rational(0), Rational(1));
    Interval d = Interval::open(Rational(1), Rational(2));
    CHECK(!baire::mergeable(c, d)); // the union misses the point 1

    CHECK(baire::gap(Interval::closed(Rational(0), Rational(1)),
                     Interval::closed(Rational(3), Rational(4))) == Rational(2));
    CHECK(baire::gap(a, b) == Rational(0));
}

TEST_CASE("intersection tightens both ends") {
    auto i = baire::intersect(Interval::closed(Rational(0), Rational(2)),
                              Interval::closed(Rational(1), Rational(3)));
    REQUIRE(i.has_value());
    CHECK(*i == Interval::closed(Rational(1), Rational(2)));
    CHECK(!baire::intersect(Interval::make(Rational(0), true, Rational(1), false),
                            Interval::closed(Rational(1), Rational(2))));
    CHECK(!baire::intersect(Interval::closed(Rational(0), Rational(1)),
                            Interval::closed(Rational(2), Rational(3))));
}

TEST_CASE("containment respects open versus closed ends") {
    Interval outer = Interval::open(Rational(0), Rational(1));
    CHECK(baire::contains_interval(outer, Interval::open(Rational(0), Rational(1))));
    CHECK(!baire::contains_interval(outer, Interval::closed(Rational(0), Rational(1, 2))));
    CHECK(baire::contains_interval(Interval::whole(), outer));
    CHECK(!baire::contains_interval(outer, Interval::whole()));
}

TEST_CASE("open-set and closed-set predicates") {
    CHECK(Interval::open(Rational(0), Rational(1)).is_open_set());
    CHECK(Interval::whole().is_open_set());
    CHECK(Interval::whole().is_closed_set());
    CHECK(Interval::closed(Rational(0), Rational(1)).is_closed_set());
    CHECK(!Interval::make(Rational(0), true, Rational(1), false).is_open_set());
    CHECK(!Interval::make(Rational(0), true, Rational(1), false).is_closed_set());
}
