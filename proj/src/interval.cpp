// SPDX-License-Identifier: Apache-2.0
#include "baire/interval.hpp"

namespace baire {

Interval Interval::make(std::optional<Rational> lo, bool lo_closed,
                        std::optional<Rational> hi, bool hi_closed) {
    Interval iv;
    iv.lo = std::move(lo);
    iv.hi = std::move(hi);
    iv.lo_closed = iv.lo.has_value() && lo_closed;
    iv.hi_closed = iv.hi.has_value() && hi_closed;
    if (iv.lo && iv.hi) {
        if (*iv.lo > *iv.hi) throw InputError("interval with lo > hi");
        if (*iv.lo == *iv.hi && !(iv.lo_closed && iv.hi_closed))
            throw InputError("degenerate interval must be closed on both sides");
    }
    return iv;
}

bool Interval::contains(const Rational& x) const {
    if (lo) {
        if (x < *lo || (x == *lo && !lo_closed)) return false;
    }
    if (hi) {
        if (x > *hi || (x == *hi && !hi_closed)) return false;
    }
    return true;
}

Rational Interval::distance(const Rational& x) const {
    if (lo && x < *lo) return *lo - x;
    if (hi && x > *hi) return x - *hi;
    return Rational(0);
}

Rational Interval::length_or_cap() const {
    if (!bounded()) return kDeltaMax;
    return *hi - *lo;
}

Interval Interval::closure() const {
    return make(lo, true, hi, true);
}

bool Interval::is_open_set() const {
    return (!lo || !lo_closed) && (!hi || !hi_closed);
}

bool Interval::is_closed_set() const {
    return (!lo || lo_closed) && (!hi || hi_closed);
}

std::string Interval::str() const {
    std::string out = lo_closed ? "[" : "(";
    out += lo ? lo->str() : "-inf";
    out += ",";
    out += hi ? hi->str() : "+inf";
    out += hi_closed ? "]" : ")";
    return out;
}

namespace {

/* Compare upper bound of a with lower bound of b: returns
 * -1 if a ends strictly before b starts (positive gap),
 *  0 if they touch at one point (shared endpoint, at least as limits),
 * +1 if they properly overlap. */
int hi_vs_lo(const Interval& a, const Interval& b) {
    if (!a.hi || !b.lo) return 1;
    if (*a.hi < *b.lo) return -1;
    if (*a.hi > *b.lo) return 1;
    return 0;
}

} // namespace

bool lo_before(const Interval& a, const Interval& b) {
    if (!a.lo) return b.lo.has_value();
    if (!b.lo) return false;
    if (*a.lo != *b.lo) return *a.lo < *b.lo;
    return a.lo_closed && !b.lo_closed;
}

bool overlaps(const Interval& a, const Interval& b) {
    const Interval& l = lo_before(a, b) ? a : b;
    const Interval& r = lo_before(a, b) ? b : a;
    int c = hi_vs_lo(l, r);
    if (c < 0) return false;
    if (c > 0) return true;
    return l.hi_closed && r.lo_closed;
}

bool mergeable(const Interval& a, const Interval& b) {
    const Interval& l = lo_before(a, b) ? a : b;
    const Interval& r = lo_before(a, b) ? b : a;
    int c = hi_vs_lo(l, r);
    if (c < 0) return false;
    if (c > 0) return true;
    return l.hi_closed || r.lo_closed;
}

Interval merge(const Interval& a, const Interval& b) {
    const Interval& l = lo_before(a, b) ? a : b;
    const Interval& r = lo_before(a, b) ? b : a;
    std::optional<Rational> hi;
    bool hic = false;
    if (l.hi && r.hi) {
        if (*l.hi > *r.hi) {
            hi = l.hi; hic = l.hi_closed;
        } else if (*r.hi > *l.hi) {
            hi = r.hi; hic = r.hi_closed;
        } else {
            hi = l.hi; hic = l.hi_closed || r.hi_closed;
        }
    }
    return Interval::make(l.lo, l.lo_closed, hi, hic);
}

std::optional<Interval> intersect(const Interval& a, const Interval& b) {
    std::optional<Rational> lo;
    bool loc = false;
    if (a.lo && b.lo) {
        if (*a.lo > *b.lo) { lo = a.lo; loc = a.lo_closed; }
        else if (*b.lo > *a.lo) { lo = b.lo; loc = b.lo_closed; }
        else { lo = a.lo; loc = a.lo_closed && b.lo_closed; }
    } else if (a.lo) { lo = a.lo; loc = a.lo_closed; }
    else if (b.lo) { lo = b.lo; loc = b.lo_closed; }

    std::optional<Rational> hi;
    bool hic = false;
    if (a.hi && b.hi) {
        if (*a.hi < *b.hi) { hi = a.hi; hic = a.hi_closed; }
        else if (*b.hi < *a.hi) { hi = b.hi; hic = b.hi_closed; }
        else { hi = a.hi; hic = a.hi_closed && b.hi_closed; }
    } else if (a.hi) { hi = a.hi; hic = a.hi_closed; }
    else if (b.hi) { hi = b.hi; hic = b.hi_closed; }

    if (lo && hi) {
        if (*lo > *hi) return std::nullopt;
        if (*lo == *hi && !(loc && hic)) return std::nullopt;
    }
    return Interval::make(lo, loc, hi, hic);
}

Rational gap(const Interval& a, const Interval& b) {
    if (overlaps(a, b)) return Rational(0);
    const Interval& l = lo_before(a, b) ? a : b;
    const Interval& r = lo_before(a, b) ? b : a;
    if (!l.hi || !r.lo) return Rational(0);
    Rational g = *r.lo - *l.hi;
    return g.sign() < 0 ? Rational(0) : g;
}

bool contains_interval(const Interval& a, const Interval& b) {
    if (a.lo) {
        if (!b.lo) return false;
        if (*b.lo < *a.lo) return false;
        if (*b.lo == *a.lo && b.lo_closed && !a.lo_closed) return false;
    }
    if (a.hi) {
        if (!b.hi) return false;
        if (*b.hi > *a.hi) return false;
        if (*b.hi == *a.hi && b.hi_closed && !a.hi_closed) return false;
    }
    return true;
}

} // namespace baire
