// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>

#include "baire/rational.hpp"

namespace baire {

/* One interval of the real line with rational or infinite endpoints.
 * nullopt endpoint = unbounded on that side (the closed flag is then false).
 * Degenerate intervals (lo == hi, both closed) represent single points;
 * no other empty or degenerate shape is constructible. */
struct Interval {
    std::optional<Rational> lo;
    std::optional<Rational> hi;
    bool lo_closed = false;
    bool hi_closed = false;

    static Interval make(std::optional<Rational> lo, bool lo_closed,
                         std::optional<Rational> hi, bool hi_closed);
    static Interval point(const Rational& p) { return make(p, true, p, true); }
    static Interval whole() { return make(std::nullopt, false, std::nullopt, false); }
    static Interval closed(const Rational& a, const Rational& b) { return make(a, true, b, true); }
    static Interval open(const Rational& a, const Rational& b) { return make(a, false, b, false); }

    bool is_point() const { return lo && hi && *lo == *hi; }
    bool bounded() const { return lo && hi; }

    bool operator==(const Interval&) const = default;

    bool contains(const Rational& x) const;
    // Distance from x to the closure (0 iff x lies in the closure).
    Rational distance(const Rational& x) const;
    Rational length_or_cap() const; // kDeltaMax when unbounded

    Interval closure() const;
    bool is_open_set() const;   // open as a subset of the line
    bool is_closed_set() const;

    std::string str() const;
};

// True when a ∩ b is nonempty.
bool overlaps(const Interval& a, const Interval& b);
// True when a ∪ b is again an interval (overlap, or touching with a closed side).
bool mergeable(const Interval& a, const Interval& b);
Interval merge(const Interval& a, const Interval& b);
std::optional<Interval> intersect(const Interval& a, const Interval& b);
// Infimum distance between the two sets (0 when they overlap or touch).
Rational gap(const Interval& a, const Interval& b);
// b ⊆ a, exact.
bool contains_interval(const Interval& a, const Interval& b);

// Ordering of left endpoints (-inf first), used to keep part lists sorted.
bool lo_before(const Interval& a, const Interval& b);

} // namespace baire
