// SPDX-License-Identifier: Apache-2.0
#include "baire/rset.hpp"

#include <algorithm>
#include <sstream>

#include "baire/enumeration.hpp"
#include "baire/errors.hpp"

namespace baire {

namespace {

const Interval kUnitOpen = Interval::open(Rational(0), Rational(1));

std::vector<Interval> normalize_parts(std::vector<Interval> parts) {
    std::sort(parts.begin(), parts.end(),
              [](const Interval& a, const Interval& b) { return lo_before(a, b); });
    std::vector<Interval> out;
    for (const auto& p : parts) {
        if (!out.empty() && mergeable(out.back(), p))
            out.back() = merge(out.back(), p);
        else
            out.push_back(p);
    }
    return out;
}

std::vector<Interval> parts_complement(const std::vector<Interval>& parts) {
    if (parts.empty())
        return {Interval::whole()};
    std::vector<Interval> out;
    std::optional<Rational> cur_lo;
    bool cur_closed = false;
    bool started = false; // a left-open gap from -inf exists before the first part
    for (const auto& p : parts) {
        std::optional<Rational> gap_hi = p.lo;
        bool gap_hi_closed = !p.lo_closed;
        bool gap_nonempty = true;
        if (!p.lo)
            gap_nonempty = false; // part starts at -inf
        else if (started && cur_lo && *cur_lo == *gap_hi && !(cur_closed && gap_hi_closed))
            gap_nonempty = false;
        if (gap_nonempty) {
            if (!started)
                out.push_back(Interval::make(std::nullopt, false, gap_hi, gap_hi_closed));
            else
                out.push_back(Interval::make(cur_lo, cur_closed, gap_hi, gap_hi_closed));
        }
        started = true;
        if (!p.hi)
            return out; // part reaches +inf, nothing after
        cur_lo = p.hi;
        cur_closed = !p.hi_closed;
    }
    out.push_back(Interval::make(cur_lo, cur_closed, std::nullopt, false));
    return out;
}

std::vector<Interval> parts_intersect(const std::vector<Interval>& a,
                                      const std::vector<Interval>& b) {
    std::vector<Interval> out;
    for (const auto& pa : a)
        for (const auto& pb : b)
            if (auto iv = intersect(pa, pb))
                out.push_back(*iv);
    return normalize_parts(std::move(out));
}

std::vector<Interval> parts_union(std::vector<Interval> a, const std::vector<Interval>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return normalize_parts(std::move(a));
}

std::vector<Interval> parts_difference(const std::vector<Interval>& a,
                                       const std::vector<Interval>& b) {
    return parts_intersect(a, parts_complement(b));
}

bool parts_member(const std::vector<Interval>& parts, const Rational& x) {
    for (const auto& p : parts)
        if (p.contains(x))
            return true;
    return false;
}

bool all_points(const std::vector<Interval>& parts) {
    return std::all_of(parts.begin(), parts.end(),
                       [](const Interval& p) { return p.is_point(); });
}

/* Base ∪ (Q ∩ E) for pure Base, E.  Returns the exact result or throws. */
RSet combine_with_rationals(const std::vector<Interval>& base,
                            const std::vector<Interval>& e, std::size_t trunc) {
    std::vector<Interval> need =
        parts_difference(parts_intersect(e, {kUnitOpen}), base);
    if (need.empty())
        return RSet::from_parts(base);
    if (all_points(need)) // finitely many rationals to adjoin
        return RSet::from_parts(parts_union(std::move(need), base));
    // Representable as Base ∪ Q exactly when no rational of (0,1) escapes E∪Base.
    std::vector<Interval> escaped = parts_difference(
        parts_difference({kUnitOpen}, e), base);
    if (escaped.empty())
        return RSet::with_enum(base, Polarity::add, trunc);
    throw UnrepresentableResult(
        "result adjoins rationals of a proper subinterval of (0,1) and leaves the set algebra");
}

/* Base \ (Q ∩ E) for pure Base, E. */
RSet remove_rationals(const std::vector<Interval>& base,
                      const std::vector<Interval>& e, std::size_t trunc) {
    std::vector<Interval> holes =
        parts_intersect(parts_intersect(base, e), {kUnitOpen});
    if (holes.empty())
        return RSet::from_parts(base);
    if (all_points(holes))
        return RSet::from_parts(parts_difference(base, holes));
    // Representable as Base \ Q exactly when every rational of Base∩(0,1) is removed.
    std::vector<Interval> kept = parts_difference(
        parts_intersect(base, {kUnitOpen}), e);
    if (kept.empty())
        return RSet::with_enum(base, Polarity::subtract, trunc);
    throw UnrepresentableResult(
        "result removes rationals of a proper subinterval of (0,1) and leaves the set algebra");
}

std::size_t merge_trunc(const RSet& a, const RSet& b) {
    std::size_t t = 0;
    if (a.enum_part())
        t = std::max(t, a.enum_part()->trunc);
    if (b.enum_part())
        t = std::max(t, b.enum_part()->trunc);
    return t ? t : 1000;
}

std::string endpoint_str(const std::optional<Rational>& v, bool lo) {
    if (!v)
        return lo ? "-inf" : "+inf";
    return v->str();
}

} // namespace

RSet RSet::from_parts(std::vector<Interval> parts) {
    RSet s;
    s.parts_ = normalize_parts(std::move(parts));
    return s;
}

RSet RSet::from_points(const std::vector<Rational>& pts) {
    std::vector<Interval> parts;
    parts.reserve(pts.size());
    for (const auto& p : pts)
        parts.push_back(Interval::point(p));
    return from_parts(std::move(parts));
}

RSet RSet::enum_prefix(std::size_t n, bool tail) {
    auto& en = Enumeration::instance();
    en.ensure(n);
    if (!tail) {
        std::vector<Interval> parts;
        parts.reserve(n);
        for (std::size_t i = 1; i <= n; ++i)
            parts.push_back(Interval::point(en.value(i)));
        return from_parts(std::move(parts));
    }
    return with_enum({}, Polarity::add, n);
}

RSet RSet::with_enum(std::vector<Interval> parts, Polarity pol, std::size_t trunc) {
    RSet s;
    s.parts_ = normalize_parts(std::move(parts));
    if (trunc)
        Enumeration::instance().ensure(trunc);
    if (pol == Polarity::add) {
        // Drop the enumeration when the rationals it adds beyond the parts
        // are none or finitely many (fold those in).
        std::vector<Interval> extra = parts_difference({kUnitOpen}, s.parts_);
        if (extra.empty())
            return s;
        if (all_points(extra)) {
            s.parts_ = parts_union(std::move(extra), s.parts_);
            return s;
        }
    } else {
        std::vector<Interval> hit = parts_intersect(s.parts_, {kUnitOpen});
        if (hit.empty())
            return s;
        if (all_points(hit)) {
            s.parts_ = parts_difference(s.parts_, hit);
            return s;
        }
    }
    s.enum_ = EnumPart{pol, trunc};
    return s;
}

bool RSet::member(const Rational& x) const {
    bool in_parts = parts_member(parts_, x);
    if (!enum_)
        return in_parts;
    bool in_unit = Rational(0) < x && x < Rational(1); // rational of (0,1) ⇒ in Q
    if (enum_->polarity == Polarity::add)
        return in_parts || in_unit;
    return in_parts && !in_unit;
}

RSet::FloatMember RSet::member(double x) const {
    FloatMember r;
    r.snapped = Rational::snap(x);
    r.value = member(r.snapped);
    const Rational tau = kSnapTau;
    for (const auto& p : parts_) {
        if (p.lo && abs(r.snapped - *p.lo) <= tau)
            r.ambiguous = true;
        if (p.hi && abs(r.snapped - *p.hi) <= tau)
            r.ambiguous = true;
    }
    // Inside the enumeration zone a float cannot tell rationals from
    // irrationals, so membership in a tail-bearing set is ambiguous there.
    if (enum_ && r.snapped > -tau && r.snapped < Rational(1) + tau)
        r.ambiguous = true;
    return r;
}

Rational RSet::distance(const Rational& x) const {
    Rational best = kDeltaMax;
    for (const auto& p : parts_)
        best = min(best, p.distance(x));
    if (enum_ && enum_->polarity == Polarity::add)
        best = min(best, Interval::closed(Rational(0), Rational(1)).distance(x));
    return best;
}

std::vector<Rational> RSet::enum_points() const {
    if (!enum_)
        return {};
    auto& en = Enumeration::instance();
    std::vector<Rational> out;
    for (std::size_t i = 1; i <= enum_->trunc; ++i) {
        Rational v = en.value(i);
        if (!parts_member(parts_, v))
            out.push_back(v);
    }
    return out;
}

std::vector<Interval> closure_parts(const RSet& s) {
    std::vector<Interval> out;
    out.reserve(s.parts().size() + 1);
    for (const auto& p : s.parts())
        out.push_back(p.closure());
    if (s.enum_part() && s.enum_part()->polarity == Polarity::add)
        out.push_back(Interval::closed(Rational(0), Rational(1)));
    return normalize_parts(std::move(out));
}

RSet RSet::closure() const {
    return from_parts(closure_parts(*this));
}

ClassTags RSet::classify() const {
    ClassTags t;
    if (!enum_) {
        t.f_sigma = true;
        t.g_delta = true;
        t.open = true; // vacuously for the empty set
        t.closed = true;
        for (const auto& p : parts_) {
            if (!p.is_open_set())
                t.open = false;
            if (!p.is_closed_set())
                t.closed = false;
        }
        return t;
    }
    /* Normalization guarantees the enumeration contributes (add) or removes
     * (subtract) a dense-in-itself rational crowd of some positive-length
     * zone, so the set is neither open nor closed; the Baire category
     * argument for Q pins one side of the ambiguous pair. */
    if (enum_->polarity == Polarity::add) {
        t.f_sigma = true; // parts ∪ countable set
        t.g_delta = false;
    } else {
        t.g_delta = true; // parts ∩ co-countable G_delta
        t.f_sigma = false;
    }
    return t;
}

bool RSet::has_irrational_points() const {
    for (const auto& p : parts_)
        if (!p.is_point())
            return true;
    return false;
}

bool RSet::operator==(const RSet& o) const {
    if (parts_ != o.parts_)
        return false;
    if (enum_.has_value() != o.enum_.has_value())
        return false;
    if (!enum_)
        return true;
    return enum_->polarity == o.enum_->polarity; // trunc is a sampling hint
}

std::vector<std::string> ClassTags::labels() const {
    std::vector<std::string> out;
    if (open)
        out.push_back("open");
    if (closed)
        out.push_back("closed");
    if (f_sigma)
        out.push_back("F_sigma");
    if (g_delta)
        out.push_back("G_delta");
    if (ambiguous1())
        out.push_back("ambiguous_1");
    return out;
}

std::string RSet::str() const {
    if (is_empty())
        return "{}";
    std::ostringstream os;
    bool first = true;
    for (const auto& p : parts_) {
        if (!first)
            os << " u ";
        os << p.str();
        first = false;
    }
    if (enum_) {
        if (enum_->polarity == Polarity::add)
            os << (first ? "" : " u ") << "Q(0,1)";
        else
            os << " \\ Q(0,1)";
    }
    return os.str();
}

RSet set_union(const RSet& a, const RSet& b) {
    const std::size_t tr = merge_trunc(a, b);
    const bool ae = a.enum_.has_value(), be = b.enum_.has_value();
    if (!ae && !be)
        return RSet::from_parts(parts_union(a.parts_, b.parts_));
    if (ae && be) {
        // add/add and add/sub unions both collapse to parts-union ∪ Q; sub/sub to \ Q.
        Polarity pol = (a.enum_->polarity == Polarity::subtract &&
                        b.enum_->polarity == Polarity::subtract)
                           ? Polarity::subtract
                           : Polarity::add;
        return RSet::with_enum(parts_union(a.parts_, b.parts_), pol, tr);
    }
    const RSet& e = ae ? a : b; // enum-bearing side
    const RSet& p = ae ? b : a; // pure side
    std::vector<Interval> u = parts_union(e.parts_, p.parts_);
    if (e.enum_->polarity == Polarity::add)
        return RSet::with_enum(std::move(u), Polarity::add, tr);
    // (I \ Q) ∪ J = (I∪J) \ (Q ∩ ((0,1)\J))
    return remove_rationals(u, parts_complement(p.parts_), tr);
}

RSet set_intersect(const RSet& a, const RSet& b) {
    const std::size_t tr = merge_trunc(a, b);
    const bool ae = a.enum_.has_value(), be = b.enum_.has_value();
    std::vector<Interval> i = parts_intersect(a.parts_, b.parts_);
    if (!ae && !be)
        return RSet::from_parts(std::move(i));
    if (ae && be) {
        // add∩add keeps Q; any subtract side removes it.
        Polarity pol = (a.enum_->polarity == Polarity::add &&
                        b.enum_->polarity == Polarity::add)
                           ? Polarity::add
                           : Polarity::subtract;
        return RSet::with_enum(std::move(i), pol, tr);
    }
    const RSet& e = ae ? a : b;
    const RSet& p = ae ? b : a;
    if (e.enum_->polarity == Polarity::subtract)
        return RSet::with_enum(std::move(i), Polarity::subtract, tr);
    // (I ∪ Q) ∩ J = (I∩J) ∪ (Q ∩ J)
    return combine_with_rationals(i, p.parts_, tr);
}

RSet set_difference(const RSet& a, const RSet& b) {
    const std::size_t tr = merge_trunc(a, b);
    const bool ae = a.enum_.has_value(), be = b.enum_.has_value();
    std::vector<Interval> d = parts_difference(a.parts_, b.parts_);
    if (!ae && !be)
        return RSet::from_parts(std::move(d));
    if (!ae) { // pure \ enum-bearing
        if (b.enum_->polarity == Polarity::add)
            return RSet::with_enum(std::move(d), Polarity::subtract, tr);
        // J \ (I \ Q) = (J\I) ∪ (Q ∩ J)
        return combine_with_rationals(d, a.parts_, tr);
    }
    if (a.enum_->polarity == Polarity::subtract) {
        // (I\Q) \ anything ⊆ I \ Q; subtracting parts or either enum form
        // still removes all of Q, so the result is (I\B-parts) \ Q.
        return RSet::with_enum(std::move(d), Polarity::subtract, tr);
    }
    // a is add-form: (I ∪ Q) \ b
    if (be) {
        if (b.enum_->polarity == Polarity::add)
            return RSet::with_enum(std::move(d), Polarity::subtract, tr);
        // (I∪Q) \ (J\Q) = (I\J) ∪ Q
        return RSet::with_enum(std::move(d), Polarity::add, tr);
    }
    // (I ∪ Q) \ J = (I\J) ∪ (Q ∩ ((0,1)\J))
    return combine_with_rationals(d, parts_complement(b.parts_), tr);
}

RSet set_complement(const RSet& a) {
    return set_difference(RSet::whole(), a);
}

bool subset(const RSet& inner, const RSet& outer) {
    return set_difference(inner, outer).is_empty();
}

Rational set_distance(const RSet& a, const RSet& b) {
    auto ca = closure_parts(a);
    auto cb = closure_parts(b);
    if (ca.empty() || cb.empty())
        return kDeltaMax;
    Rational best = kDeltaMax;
    for (const auto& pa : ca)
        for (const auto& pb : cb)
            best = min(best, gap(pa, pb));
    return best;
}

RSet swell(const RSet& s, const Rational& r, bool open_ends) {
    if (r < Rational(0) || (open_ends && r.is_zero()))
        throw InputError("swell radius must be positive");
    std::vector<Interval> out;
    for (const auto& p : closure_parts(s)) {
        std::optional<Rational> lo = p.lo, hi = p.hi;
        if (lo)
            lo = *lo - r;
        if (hi)
            hi = *hi + r;
        out.push_back(Interval::make(lo, lo.has_value() && !open_ends, hi,
                                     hi.has_value() && !open_ends));
    }
    return RSet::from_parts(std::move(out));
}

DiscreteFamily min_gap(std::vector<RSet> members, bool with_envelopes) {
    DiscreteFamily fam;
    fam.members = std::move(members);
    for (std::size_t i = 0; i < fam.members.size(); ++i) {
        for (std::size_t j = i + 1; j < fam.members.size(); ++j) {
            if (fam.members[i].is_empty() || fam.members[j].is_empty())
                continue;
            Rational d = set_distance(fam.members[i], fam.members[j]);
            if (d.is_zero())
                throw NotDiscrete("members " + std::to_string(i) + " and " +
                                  std::to_string(j) + " have zero gap");
            fam.gap = min(fam.gap, d);
        }
    }
    if (with_envelopes) {
        fam.envelopes.emplace();
        const Rational r = fam.gap / Rational(3);
        for (const auto& m : fam.members)
            fam.envelopes->push_back(m.is_empty() ? RSet::empty()
                                                  : swell(m, r, /*open_ends=*/true));
    }
    return fam;
}

void to_json(nlohmann::json& j, const RSet& s) {
    j = nlohmann::json::object();
    auto arr = nlohmann::json::array();
    for (const auto& p : s.parts()) {
        arr.push_back({{"lo", endpoint_str(p.lo, true)},
                       {"hi", endpoint_str(p.hi, false)},
                       {"lo_closed", p.lo_closed},
                       {"hi_closed", p.hi_closed}});
    }
    j["intervals"] = std::move(arr);
    if (s.enum_part()) {
        j["enum"] = {{"name", "rationals"},
                     {"N", s.enum_part()->trunc},
                     {"tail_tag", "rationals"},
                     {"polarity", s.enum_part()->polarity == Polarity::add
                                      ? "add"
                                      : "subtract"}};
    } else {
        j["enum"] = nullptr;
    }
    if (!s.provenance().empty())
        j["provenance"] = s.provenance();
}

namespace {

std::optional<Rational> endpoint_from_json(const nlohmann::json& v) {
    if (v.is_null())
        return std::nullopt;
    std::string s = v.get<std::string>();
    if (s == "-inf" || s == "inf" || s == "+inf")
        return std::nullopt;
    auto r = Rational::parse(s);
    if (!r)
        throw InputError("bad interval endpoint: " + s);
    return *r;
}

} // namespace

void from_json(const nlohmann::json& j, RSet& s) {
    std::vector<Interval> parts;
    if (j.contains("intervals")) {
        for (const auto& e : j.at("intervals")) {
            auto lo = endpoint_from_json(e.at("lo"));
            auto hi = endpoint_from_json(e.at("hi"));
            parts.push_back(Interval::make(lo, e.value("lo_closed", false), hi,
                                           e.value("hi_closed", false)));
        }
    }
    if (j.contains("enum") && !j.at("enum").is_null()) {
        const auto& en = j.at("enum");
        if (en.value("name", "rationals") != std::string("rationals"))
            throw InputError("unknown enumeration name");
        std::size_t n = en.value("N", std::size_t{1000});
        bool tail = en.contains("tail_tag") && !en.at("tail_tag").is_null();
        if (!tail) {
            RSet pts = RSet::enum_prefix(n, false);
            for (const auto& p : pts.parts())
                parts.push_back(p);
            s = RSet::from_parts(std::move(parts));
        } else {
            Polarity pol = en.value("polarity", "add") == std::string("subtract")
                               ? Polarity::subtract
                               : Polarity::add;
            s = RSet::with_enum(std::move(parts), pol, n);
        }
    } else {
        s = RSet::from_parts(std::move(parts));
    }
    if (j.contains("provenance"))
        s.set_provenance(j.at("provenance").get<std::string>());
}

void to_json(nlohmann::json& j, const DiscreteFamily& f) {
    j = nlohmann::json::object();
    j["members"] = f.members;
    j["gap"] = f.gap.str();
    if (f.envelopes)
        j["envelopes"] = *f.envelopes;
}

void from_json(const nlohmann::json& j, DiscreteFamily& f) {
    f.members = j.at("members").get<std::vector<RSet>>();
    auto g = Rational::parse(j.at("gap").get<std::string>());
    if (!g)
        throw InputError("bad gap value");
    f.gap = *g;
    if (j.contains("envelopes") && !j.at("envelopes").is_null())
        f.envelopes = j.at("envelopes").get<std::vector<RSet>>();
}

} // namespace baire
