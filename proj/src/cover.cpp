// SPDX-License-Identifier: MIT
#include "baire/cover.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "baire/enumeration.hpp"
#include "baire/errors.hpp"
#include "baire/ast.hpp"
#include "baire/parser.hpp"
#include "baire/sampling.hpp"

namespace baire {

namespace {

Rational floor_div(const Rational& r) {
    // Largest integer <= r; magnitudes here are small (mesh counts).
    const double d = std::floor(r.to_double());
    Rational c(static_cast<std::int64_t>(d));
    while (c > r)
        c = c - Rational(1);
    while (c + Rational(1) <= r)
        c = c + Rational(1);
    return c;
}

RSet union_all(const std::vector<RSet>& sets) {
    RSet u = RSet::empty();
    for (const auto& s : sets)
        u = set_union(u, s);
    return u;
}

} // namespace

// ---------------------------------------------------------------------------
// Flattened cover index for fast gauge evaluation.
// ---------------------------------------------------------------------------

struct CoverGaugeIndex {
    struct Part {
        std::optional<Rational> lo, hi; // closed ends; nullopt = unbounded
        std::size_t member = 0;
    };
    struct Level {
        std::vector<Part> parts; // sorted left to right, pairwise disjoint

        // Member id owning the part that contains x, or npos.  Parts are
        // sorted by position, which need not match the member order.
        std::size_t find(const Rational& x) const {
            std::size_t lo = 0, hi = parts.size();
            while (lo < hi) { // first part with lo-end > x
                std::size_t mid = (lo + hi) / 2;
                const auto& p = parts[mid];
                if (p.lo && *p.lo > x)
                    hi = mid;
                else
                    lo = mid + 1;
            }
            if (lo == 0)
                return npos;
            const auto& p = parts[lo - 1];
            if (!p.hi || x <= *p.hi)
                return p.member;
            return npos;
        }

        static Rational dist_to(const Part& p, const Rational& x) {
            if (p.lo && x < *p.lo)
                return *p.lo - x;
            if (p.hi && x > *p.hi)
                return x - *p.hi;
            return Rational(0);
        }

        // Distance from x to the nearest part of a member != skip (npos: any).
        Rational distance(const Rational& x, std::size_t skip) const {
            Rational best = kDeltaMax;
            std::size_t at = 0, n = parts.size();
            {
                std::size_t lo = 0, hi = n;
                while (lo < hi) {
                    std::size_t mid = (lo + hi) / 2;
                    if (parts[mid].lo && *parts[mid].lo > x)
                        hi = mid;
                    else
                        lo = mid + 1;
                }
                at = lo; // parts[at-1].lo <= x < parts[at].lo
            }
            for (std::size_t i = at; i-- > 0;) {
                if (parts[i].member == skip)
                    continue;
                best = min(best, dist_to(parts[i], x));
                break; // parts left of here are only farther
            }
            for (std::size_t i = at; i < n; ++i) {
                if (parts[i].member == skip)
                    continue;
                best = min(best, dist_to(parts[i], x));
                break;
            }
            return best;
        }

        static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    };

    SigmaDiscreteCover cover; // retained for U(x) reconstruction
    std::vector<Level> levels;
    bool monotone = false;    // chained prefix coverage grows with the level
    std::size_t prefix = 0;   // binary-searchable prefix length

    static std::shared_ptr<const CoverGaugeIndex> build(const SigmaDiscreteCover& c) {
        auto ix = std::make_shared<CoverGaugeIndex>();
        ix->cover = c;
        ix->monotone = !c.links.empty();
        ix->prefix = ix->monotone ? (c.chained ? std::min(c.chained, c.levels.size())
                                               : c.levels.size())
                                  : 0;
        ix->levels.reserve(c.levels.size());
        for (const auto& fam : c.levels) {
            Level lvl;
            for (std::size_t m = 0; m < fam.members.size(); ++m) {
                if (fam.members[m].enum_part())
                    throw InputError("cover members must be interval sets");
                for (const auto& iv : closure_parts(fam.members[m]))
                    lvl.parts.push_back(Part{iv.lo, iv.hi, m});
            }
            std::sort(lvl.parts.begin(), lvl.parts.end(), [](const Part& a, const Part& b) {
                if (!a.lo)
                    return bool(b.lo);
                if (!b.lo)
                    return false;
                return *a.lo < *b.lo;
            });
            ix->levels.push_back(std::move(lvl));
        }
        return ix;
    }

    // Least level containing x; npos when none.
    std::size_t level_of(const Rational& x, std::size_t* member_out) const {
        const std::size_t n = levels.size();
        if (prefix) { // coverage is monotone across the chained prefix
            std::size_t lo = 0, hi = prefix;
            while (lo < hi) {
                std::size_t mid = (lo + hi) / 2;
                if (levels[mid].find(x) != Level::npos)
                    hi = mid;
                else
                    lo = mid + 1;
            }
            if (lo < prefix) {
                *member_out = levels[lo].find(x);
                return lo;
            }
        }
        for (std::size_t i = prefix; i < n; ++i) {
            std::size_t m = levels[i].find(x);
            if (m != Level::npos) {
                *member_out = m;
                return i;
            }
        }
        return Level::npos;
    }

    bool is_remainder(std::size_t li) const { return cover.chained && li >= cover.chained; }

    Rational delta(const Rational& x) const {
        std::size_t member = Level::npos;
        std::size_t li = level_of(x, &member);
        if (li != Level::npos) {
            Rational d = levels[li].distance(x, member);
            // Remainder members shrink below the distance to every chained
            // level, so no pair can reach across a seam into them.
            if (is_remainder(li))
                for (std::size_t p = 0; p < cover.chained && p < levels.size(); ++p)
                    d = min(d, levels[p].distance(x, Level::npos));
            if (d.sign() <= 0)
                throw NotCovered("zero gauge at " + x.str() + ": level " +
                                 std::to_string(li + 1) + " touches another member");
            return min(d, kDeltaMax);
        }
        if (cover.uncovered.member(x)) {
            // Truncation sliver (mesh covers): the distance to the nearest
            // member of any level is a sound (smaller) gauge there.
            Rational best = kDeltaMax;
            for (const auto& lvl : levels)
                best = min(best, lvl.distance(x, Level::npos));
            if (best.sign() <= 0)
                throw NotCovered("sliver point " + x.str() + " touches a member");
            return best;
        }
        throw NotCovered("x = " + x.str() + " lies outside every level of the cover");
    }

    RSet neighborhood(const Rational& x) const {
        std::size_t member = Level::npos;
        std::size_t li = level_of(x, &member);
        if (li == Level::npos || is_remainder(li)) {
            const Rational d = delta(x); // open ball matches the capped gauge
            return RSet(Interval::make(x - d, false, x + d, false));
        }
        const auto& fam = cover.levels[li];
        RSet others = RSet::empty();
        for (std::size_t m = 0; m < fam.members.size(); ++m)
            if (m != member)
                others = set_union(others, fam.members[m]);
        return set_complement(others);
    }
};

// ---------------------------------------------------------------------------
// SigmaDiscreteCover
// ---------------------------------------------------------------------------

void SigmaDiscreteCover::validate(bool require_full_cover) const {
    if (!window.bounded())
        throw InputError("cover window must be bounded");
    RSet all = RSet::empty();
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const auto& fam = levels[i];
        // Re-certify discreteness and the stored gap.
        DiscreteFamily again = min_gap(fam.members, false);
        if (again.gap != fam.gap)
            throw InputError("level " + std::to_string(i + 1) + " gap certificate stale");
        for (const auto& m : fam.members) {
            if (m.is_empty())
                throw InputError("empty member at level " + std::to_string(i + 1));
            if (!m.classify().closed)
                throw InputError("non-closed member at level " + std::to_string(i + 1));
            all = set_union(all, m);
        }
        if (i < piece_ids.size() && !piece_ids[i].empty() &&
            piece_ids[i].size() != fam.members.size())
            throw InputError("piece id bookkeeping mismatch at level " + std::to_string(i + 1));
    }
    for (std::size_t i = 0; i + 1 < levels.size() && i < links.size(); ++i) {
        for (std::size_t j = 0; j < links[i].size(); ++j) {
            std::size_t tgt = links[i][j];
            if (tgt >= levels[i + 1].members.size())
                throw InputError("dangling link at level " + std::to_string(i + 1));
            if (!subset(levels[i].members[j], levels[i + 1].members[tgt]))
                throw InputError("link containment fails at level " + std::to_string(i + 1) +
                                 " member " + std::to_string(j));
        }
    }
    RSet missing = set_difference(RSet(window), all);
    if (!(missing == uncovered))
        throw InputError("uncovered sliver certificate stale");
    if (require_full_cover && !uncovered.is_empty())
        throw InputError("cover misses " + uncovered.str() + " of its window");
}

// ---------------------------------------------------------------------------
// refine_cover
// ---------------------------------------------------------------------------

SigmaDiscreteCover refine_cover(const std::vector<RSet>& pieces, const Interval& window,
                                std::size_t n_levels) {
    if (pieces.empty())
        throw InputError("refine_cover needs at least one piece");
    if (n_levels == 0)
        throw InputError("refine_cover needs at least one level");
    if (!window.bounded())
        throw InputError("refine_cover window must be bounded");

    for (std::size_t k = 0; k < pieces.size(); ++k) {
        if (pieces[k].enum_part())
            throw InputError("cover pieces must be interval sets");
        if (pieces[k].is_empty())
            throw InputError("piece " + std::to_string(k) + " is empty");
        if (!pieces[k].classify().closed) {
            // The missing boundary points sit at distance zero from the piece
            // yet in no shrink of it: no level can separate the pair.
            RSet defect = set_difference(pieces[k].closure(), pieces[k]);
            throw RefinementFailure("piece " + std::to_string(k) + " = " + pieces[k].str() +
                                    " is not closed: " + defect.str() +
                                    " lies at distance 0 from it and in no level's shrink");
        }
    }

    const std::size_t m = pieces.size();
    std::vector<RSet> prefix(m); // prefix[k] = union of pieces[0..k-1]
    prefix[0] = RSet::empty();
    for (std::size_t k = 1; k < m; ++k)
        prefix[k] = set_union(prefix[k - 1], pieces[k - 1]);

    SigmaDiscreteCover cover;
    cover.window = window;
    cover.provenance =
        "refine_cover(" + std::to_string(m) + " pieces, " + std::to_string(n_levels) + " levels)";

    // Per level n: piece k shrunk away from the earlier pieces by 1/n.
    std::vector<std::map<std::size_t, std::size_t>> index_of_piece(n_levels);
    for (std::size_t n = 1; n <= n_levels; ++n) {
        std::vector<RSet> members;
        std::vector<std::size_t> ids;
        const Rational r(1, static_cast<std::int64_t>(n));
        for (std::size_t k = 0; k < std::min(n, m); ++k) {
            RSet b = (k == 0) ? pieces[0] : set_difference(pieces[k], swell(prefix[k], r, true));
            if (b.is_empty())
                continue;
            index_of_piece[n - 1][k] = members.size();
            members.push_back(std::move(b));
            ids.push_back(k);
        }
        cover.levels.push_back(min_gap(std::move(members), false));
        cover.piece_ids.push_back(std::move(ids));
    }

    // Chain: the level-n shrink of piece k sits inside its level-(n+1) shrink.
    cover.links.resize(n_levels - 1);
    for (std::size_t i = 0; i + 1 < n_levels; ++i) {
        cover.links[i].resize(cover.levels[i].members.size());
        for (std::size_t j = 0; j < cover.piece_ids[i].size(); ++j) {
            auto it = index_of_piece[i + 1].find(cover.piece_ids[i][j]);
            if (it == index_of_piece[i + 1].end())
                throw RefinementFailure("piece " + std::to_string(cover.piece_ids[i][j]) +
                                        " vanished between levels " + std::to_string(i + 1) +
                                        " and " + std::to_string(i + 2));
            cover.links[i][j] = it->second;
        }
    }
    cover.chained = n_levels;

    // Close up what the truncation leaves unreached so the levels cover the
    // window; alternate parts so each appended family keeps a positive gap.
    RSet last_level = union_all(cover.levels.back().members);
    RSet sliver = set_difference(RSet(window), last_level);
    if (!sliver.is_empty()) {
        std::vector<RSet> even, odd;
        std::size_t i = 0;
        for (const auto& part : closure_parts(sliver))
            ((i++ % 2 == 0) ? even : odd).emplace_back(part);
        for (auto* side : {&even, &odd}) {
            if (side->empty())
                continue;
            cover.levels.push_back(min_gap(std::move(*side), false));
            cover.piece_ids.emplace_back();
        }
        cover.provenance += " + remainder";
    }
    cover.uncovered = RSet::empty();
    return cover;
}

// ---------------------------------------------------------------------------
// Gauge
// ---------------------------------------------------------------------------

Gauge Gauge::from_formula(Func delta, Claim claim) {
    Gauge g;
    g.form_ = Form::from_formula;
    g.claim_ = claim;
    g.formula_ = std::make_shared<const Func>(std::move(delta));
    g.provenance_ = "from_formula(" + g.formula_->describe() + ")";
    return g;
}

Gauge Gauge::from_formula_patched(Func delta,
                                  std::vector<std::pair<Rational, Rational>> at_points,
                                  Claim claim) {
    Gauge g = from_formula(std::move(delta), claim);
    for (const auto& [p, v] : at_points)
        if (v.sign() <= 0)
            throw InputError("patched gauge value at " + p.str() + " must be positive");
    g.overrides_ = std::move(at_points);
    g.provenance_ += " patched at " + std::to_string(g.overrides_.size()) + " points";
    return g;
}

Gauge Gauge::jumpsum_special(std::size_t n_jumps, const Rational& eps) {
    if (n_jumps < 1 || n_jumps > 62)
        throw InputError("jumpsum parameter must lie in 1..62");
    if (eps.sign() <= 0)
        throw InputError("eps must be positive");
    Gauge g;
    g.form_ = Form::jumpsum_special;
    g.claim_ = Claim::baire_one;
    auto& en = Enumeration::instance();
    en.ensure(n_jumps);
    // Jumps of size 2^-n >= eps/2; pairs straddling one of these points never
    // satisfy the antecedent, and the remaining jump mass sums below eps.
    for (std::size_t n = 1; n <= n_jumps; ++n)
        if (Rational(2, static_cast<std::int64_t>(1) << n) >= eps)
            g.jump_points_.push_back(en.value(n));
    std::sort(g.jump_points_.begin(), g.jump_points_.end());
    g.provenance_ = "jumpsum_special(N=" + std::to_string(n_jumps) + ", eps=" + eps.str() +
                    ", big_jumps=" + std::to_string(g.jump_points_.size()) + ")";
    return g;
}

Gauge Gauge::composite(std::vector<Gauge> parts, std::function<std::size_t(const Rational&)> pick,
                       std::string provenance) {
    if (parts.size() < 2 || !pick)
        throw InputError("composite gauge needs a base, at least one branch, and a selector");
    Gauge g;
    g.form_ = Form::composite;
    g.claim_ = Claim::baire_one;
    g.parts_ = std::move(parts);
    g.pick_ = std::move(pick);
    g.provenance_ = std::move(provenance);
    return g;
}

Rational Gauge::operator()(const Rational& x) const {
    Rational v = kDeltaMax;
    switch (form_) {
    case Form::from_cover:
        v = cover_->delta(x);
        break;
    case Form::from_formula: {
        bool patched = false;
        for (const auto& [p, pv] : overrides_)
            if (p == x) {
                v = pv;
                patched = true;
                break;
            }
        if (!patched) {
            EvalResult r = formula_->evaluate(x);
            v = r.exact() ? r.rational() : Rational::snap(r.to_double());
        }
        break;
    }
    case Form::jumpsum_special: {
        if (jump_points_.empty())
            break;
        auto it = std::lower_bound(jump_points_.begin(), jump_points_.end(), x);
        Rational best = kDeltaMax;
        if (it != jump_points_.end() && *it == x) {
            // At a jump point: half the distance to the other jump points.
            if (it != jump_points_.begin())
                best = min(best, x - *std::prev(it));
            if (std::next(it) != jump_points_.end())
                best = min(best, *std::next(it) - x);
        } else {
            if (it != jump_points_.end())
                best = min(best, *it - x);
            if (it != jump_points_.begin())
                best = min(best, x - *std::prev(it));
        }
        if (best != kDeltaMax)
            v = best / Rational(2);
        break;
    }
    case Form::composite: {
        std::size_t i = pick_(x);
        if (i < 1 || i >= parts_.size())
            throw InputError("composite gauge selector out of range");
        v = min(parts_[0](x), parts_[i](x));
        break;
    }
    }
    v = min(v, kDeltaMax);
    if (v.sign() <= 0)
        throw InputError("gauge is not positive at x = " + x.str());
    return v;
}

double Gauge::at(double x) const { return operator()(Rational::snap(x)).to_double(); }

RSet Gauge::superlevel(const Rational& t) const {
    if (t.sign() < 0)
        throw InputError("superlevel threshold must be nonnegative");
    if (t >= kDeltaMax)
        return RSet::empty();
    switch (form_) {
    case Form::from_cover: {
        // Cell by cell: where n(x) and A(x) are fixed, delta is the distance
        // to the fixed union M of the other members (for remainder cells also
        // to each chained level), so {delta > t} is the cell minus the closed
        // t-swellings.
        const auto& cov = cover_->cover;
        auto widen = [&t](const RSet& s) {
            return t.sign() == 0 ? s.closure() : swell(s, t, false);
        };
        std::vector<RSet> level_unions;
        level_unions.reserve(cov.levels.size());
        for (const auto& fam : cov.levels)
            level_unions.push_back(union_all(fam.members));
        RSet out = RSet::empty();
        RSet covered = RSet::empty();
        for (std::size_t li = 0; li < cov.levels.size(); ++li) {
            const auto& fam = cov.levels[li];
            for (std::size_t mi = 0; mi < fam.members.size(); ++mi) {
                RSet cell = set_difference(fam.members[mi], covered);
                if (cell.is_empty())
                    continue;
                RSet others = set_difference(level_unions[li], fam.members[mi]);
                if (!others.is_empty())
                    cell = set_difference(cell, widen(others));
                if (cover_->is_remainder(li))
                    for (std::size_t p = 0; p < cov.chained; ++p)
                        if (!level_unions[p].is_empty())
                            cell = set_difference(cell, widen(level_unions[p]));
                out = set_union(out, cell);
            }
            covered = set_union(covered, level_unions[li]);
        }
        // Sliver fallback (mesh covers): distance to any level's members.
        RSet sliver = set_intersect(cov.uncovered, RSet(cov.window));
        if (!sliver.is_empty()) {
            RSet keep = sliver;
            for (const auto& u : level_unions)
                if (!u.is_empty())
                    keep = set_difference(keep, widen(u));
            out = set_union(out, keep);
        }
        return out;
    }
    case Form::from_formula: {
        RSet v(Interval::make(t, false, std::nullopt, false));
        Preimage pre = preimage(*formula_, v);
        if (!pre.uncertain.empty())
            throw ThresholdUnresolvable("formula gauge threshold at t = " + t.str() +
                                        " leaves uncertainty bands");
        RSet out = pre.set;
        for (const auto& [p, pv] : overrides_)
            out = pv > t ? set_union(out, RSet::point(p))
                         : set_difference(out, RSet::point(p));
        return out;
    }
    case Form::jumpsum_special: {
        if (jump_points_.empty())
            return RSet::whole();
        RSet near = RSet::empty();
        const Rational r = t * Rational(2);
        std::vector<Interval> balls;
        for (const auto& p : jump_points_)
            balls.push_back(r.sign() == 0 ? Interval::point(p)
                                          : Interval::closed(p - r, p + r));
        near = RSet::from_parts(std::move(balls));
        RSet out = set_complement(near);
        // Jump points whose own value (half the gap to the others) clears t.
        std::vector<Rational> keep;
        for (const auto& p : jump_points_)
            if (operator()(p) > t)
                keep.push_back(p);
        return set_union(out, RSet::from_points(keep));
    }
    case Form::composite:
        break;
    }
    throw ThresholdUnresolvable("no certified threshold set for a composite gauge");
}

// ---------------------------------------------------------------------------
// gauge_from_cover
// ---------------------------------------------------------------------------

std::pair<NeighborhoodMap, Gauge> gauge_from_cover(const SigmaDiscreteCover& c) {
    auto ix = CoverGaugeIndex::build(c);
    Gauge g;
    g.form_ = Gauge::Form::from_cover;
    g.claim_ = Gauge::Claim::baire_one;
    g.cover_ = ix;
    g.provenance_ = "from_cover(" + c.provenance + ")";
    NeighborhoodMap map;
    map.provenance = g.provenance_;
    map.at = [ix](const Rational& x) { return ix->neighborhood(x); };
    return {std::move(map), std::move(g)};
}

// ---------------------------------------------------------------------------
// cover_from_gauge
// ---------------------------------------------------------------------------

namespace {

// Max image diameter over seeded samples of one closed member.
struct MemberProbe {
    double diam = 0.0;
    std::size_t samples = 0;
};

MemberProbe probe_member(const Func& f, const RSet& member,
                         const std::vector<Rational>& specials, SplitMix64& rng) {
    MemberProbe out;
    double vmin = 0, vmax = 0;
    bool have = false;
    auto feed = [&](const Rational& p) {
        try {
            const double v = f.evaluate(p).to_double();
            if (!have) {
                vmin = vmax = v;
                have = true;
            } else {
                vmin = std::min(vmin, v);
                vmax = std::max(vmax, v);
            }
            ++out.samples;
        } catch (const OutsideCover&) {
        } catch (const DomainError&) {
        }
    };
    for (const auto& part : member.parts()) {
        if (!part.lo || !part.hi)
            throw InputError("gauge-cover members must be bounded");
        feed(*part.lo);
        if (part.is_point())
            continue;
        feed(*part.hi);
        feed((*part.lo + *part.hi) / Rational(2));
        for (const auto& s : specials)
            if (part.contains(s))
                feed(s);
        for (int i = 0; i < 5; ++i)
            feed(dyadic_pick(rng, *part.lo, *part.hi, 24));
    }
    if (have)
        out.diam = vmax - vmin;
    return out;
}

} // namespace

GaugeCover cover_from_gauge(const Func& f, const Gauge& delta, const Rational& eps,
                            std::size_t n_levels, std::uint64_t seed) {
    if (eps.sign() <= 0)
        throw InputError("eps must be positive");
    if (n_levels == 0)
        throw InputError("cover_from_gauge needs at least one level");
    const Interval& win = f.window();
    const Rational lo = *win.lo, hi = *win.hi;
    const Rational len = hi - lo;

    GaugeCover out;
    out.cover.window = win;
    out.cover.provenance = "cover_from_gauge(" + delta.provenance() + ", eps=" + eps.str() + ")";
    out.certificate.seed = seed;
    out.certificate.bound =
        eps * Rational(3, 4) + Rational(1, static_cast<std::int64_t>(1) << 30);
    out.certificate.truncation =
        "levels n <= " + std::to_string(n_levels) + ", mesh < 1/(3n)";

    const std::vector<Rational> specials = f.special_points();
    SplitMix64 rng(derive_seed(seed, 0xC07E2ULL));
    RSet all_members; // accumulate every member for the sliver bookkeeping
    for (std::size_t n = 1; n <= n_levels; ++n) {
        RSet dn = delta.superlevel(Rational(1, static_cast<std::int64_t>(n)));
        RSet dn_cl = set_intersect(dn, RSet(win)).closure();
        if (dn_cl.is_empty())
            continue;
        // Closed mesh cells of equal length < 1/(3n) tiling the window.
        const Rational three_n(static_cast<std::int64_t>(3 * n));
        const Rational cells_r = floor_div(three_n * len) + Rational(1);
        const auto cells = static_cast<std::int64_t>(cells_r.to_double());
        std::vector<RSet> even, odd;
        for (std::int64_t i = 0; i < cells; ++i) {
            Interval cell = Interval::closed(lo + len * Rational(i) / cells_r,
                                             lo + len * Rational(i + 1) / cells_r);
            RSet member = set_intersect(RSet(cell), dn_cl);
            if (member.is_empty())
                continue;
            (i % 2 == 0 ? even : odd).push_back(std::move(member));
        }
        for (auto* side : {&even, &odd}) {
            if (side->empty())
                continue;
            for (const auto& member : *side) {
                MemberProbe probe = probe_member(f, member, specials, rng);
                out.certificate.max_observed_diameter =
                    std::max(out.certificate.max_observed_diameter, probe.diam);
                out.certificate.pairs_tested += probe.samples * (probe.samples - 1) / 2;
                all_members = set_union(all_members, member);
            }
            out.cover.levels.push_back(min_gap(std::move(*side), false));
            out.cover.piece_ids.emplace_back();
        }
    }
    out.cover.uncovered = set_difference(RSet(win), all_members);
    out.certificate.passed =
        out.certificate.max_observed_diameter <= out.certificate.bound.to_double();
    return out;
}

// ---------------------------------------------------------------------------
// gauge_for_epsilon
// ---------------------------------------------------------------------------

namespace {

/* Seeded soundness campaign for |x-y| < min{delta(x), delta(y)} =>
 * |f(x)-f(y)| < eps; the antecedent check is exact.  Returns the number of
 * antecedent-true pairs; throws on a violation (our own constructions must
 * not produce one). */
std::size_t validate_gauge(const Func& f, const Gauge& g, const Rational& eps,
                           std::size_t pairs, std::uint64_t seed) {
    const Interval& win = f.window();
    const Rational lo = *win.lo, hi = *win.hi;
    SplitMix64 rng(derive_seed(seed, 0xDE17AULL));
    std::vector<Rational> anchors = f.special_points();
    std::size_t antecedent_true = 0;
    for (std::size_t i = 0; i < pairs; ++i) {
        Rational x;
        const std::uint64_t kind = rng.bounded(10);
        if (kind < 3 && !anchors.empty()) {
            // Adversarial: probe near the structure points.
            const Rational& a = anchors[rng.bounded(anchors.size())];
            const double off = std::ldexp(rng.next_unit() * 2 - 1, -int(2 + rng.bounded(30)));
            x = Rational::snap(a.to_double() + off);
            if (!win.contains(x))
                x = dyadic_pick(rng, lo, hi, 26);
        } else {
            x = dyadic_pick(rng, lo, hi, 26);
        }
        Rational dx;
        try {
            dx = g(x);
        } catch (const NotCovered&) {
            continue;
        }
        const double step = std::min(dx.to_double(), (hi - lo).to_double());
        const double u = rng.next_unit() * 0.999 + 5e-4;
        Rational y = Rational::snap(x.to_double() + (rng.bounded(2) ? step * u : -step * u));
        if (!win.contains(y) || y == x)
            continue;
        Rational dy;
        try {
            dy = g(y);
        } catch (const NotCovered&) {
            continue;
        }
        Rational gap = y > x ? y - x : x - y;
        if (!(gap < min(dx, dy)))
            continue;
        ++antecedent_true;
        const double fx = f.evaluate(x).to_double();
        const double fy = f.evaluate(y).to_double();
        if (!(std::abs(fx - fy) < eps.to_double()))
            throw InputError("gauge violation: x=" + x.str() + " y=" + y.str() +
                             " |f(x)-f(y)|=" + std::to_string(std::abs(fx - fy)) +
                             " >= eps=" + eps.str());
    }
    return antecedent_true;
}

// Split the bounded cell until the expression's image diameter certificate
// (Lipschitz bound times length) drops below the target.
void split_cell(const AstPtr& e, const Rational& a, const Rational& b, const Rational& target,
                int depth, std::vector<Interval>& out) {
    Analysis an = analyze(e, a.to_double(), b.to_double());
    const double len = (b - a).to_double();
    if (an.lip && *an.lip * len < target.to_double()) {
        out.push_back(Interval::closed(a, b));
        return;
    }
    if (depth > 24)
        throw RefinementFailure("no image-diameter certificate for a piece over [" + a.str() +
                                ", " + b.str() + "]");
    const Rational mid = (a + b) / Rational(2);
    split_cell(e, a, mid, target, depth + 1, out);
    split_cell(e, mid, b, target, depth + 1, out);
}

Gauge cover_gauge_for(const std::vector<RSet>& pieces, const Interval& win,
                      const Rational& min_len) {
    std::size_t levels = kDefaultLevels;
    if (min_len.sign() > 0) {
        // Enough levels that every piece keeps a member (no piece is fully
        // eaten by the shrink, which the sliver soundness argument needs).
        const double need = 4.0 / min_len.to_double();
        if (need > double(levels))
            levels = std::min<std::size_t>(4096, std::size_t(need) + 1);
    }
    SigmaDiscreteCover cover = refine_cover(pieces, win, levels);
    return gauge_from_cover(cover).second;
}

} // namespace

Gauge gauge_for_epsilon(const Func& f, const Rational& eps) {
    if (eps.sign() <= 0)
        throw InputError("eps must be positive");
    const Interval& win = f.window();
    const Rational target = eps * Rational(3, 4);

    Gauge g = [&]() -> Gauge {
        switch (f.kind()) {
        case Func::Kind::builtin: {
            const std::string& name = f.builtin_name();
            if (name == "jumpsum")
                return Gauge::jumpsum_special(f.builtin_param(), eps);
            if (name == "step") {
                // Canonical closed cover: constant on each piece.
                std::vector<RSet> pieces;
                pieces.emplace_back(Interval::make(std::nullopt, false, Rational(0), true));
                for (std::int64_t j = 1; j <= 64; ++j)
                    pieces.emplace_back(
                        Interval::make(Rational(1, j), true, std::nullopt, false));
                return cover_gauge_for(pieces, win, Rational(0));
            }
            throw InputError("no canonical closed cover for builtin '" + name + "'");
        }
        case Func::Kind::expr: {
            Analysis an = analyze(f.expr_ast(), win.lo->to_double(), win.hi->to_double());
            if (!an.lip)
                throw InputError("no Lipschitz certificate for the expression on the window");
            // Uniform-continuity modulus: |x-y| < eps/(2L) forces the bound.
            Rational denom = Rational::snap(std::max(1e-9, *an.lip * 2));
            Rational c = min(eps / denom, kDeltaMax);
            Func delta = Func::expr(parse_expr(c.str()), win);
            return Gauge::from_formula(std::move(delta), Gauge::Claim::continuous);
        }
        case Func::Kind::piecewise: {
            std::vector<RSet> pieces;
            Rational min_len = kDeltaMax;
            for (const auto& piece : f.pieces()) {
                RSet clipped = set_intersect(piece.domain, RSet(win));
                for (const auto& part : closure_parts(clipped)) {
                    if (part.is_point()) {
                        pieces.emplace_back(part);
                        continue;
                    }
                    std::vector<Interval> cells;
                    split_cell(piece.expr, *part.lo, *part.hi, target, 0, cells);
                    for (const auto& cell : cells) {
                        min_len = min(min_len, *cell.hi - *cell.lo);
                        pieces.emplace_back(cell);
                    }
                }
            }
            return cover_gauge_for(pieces, win, min_len);
        }
        case Func::Kind::limit:
            throw InputError("gauge_for_epsilon needs a piecewise realization, not a limit");
        }
        throw InputError("unreachable");
    }();

    validate_gauge(f, g, eps, 100000, 7);
    return g;
}

// ---------------------------------------------------------------------------
// reduction_partition
// ---------------------------------------------------------------------------

void ReductionPartition::validate() const {
    if (input.size() != output.size())
        throw InputError("reduction partition size mismatch");
    RSet in_union = union_all(input);
    RSet out_union = union_all(output);
    if (!(in_union == out_union))
        throw InputError("reduction partition does not preserve the union");
    for (std::size_t i = 0; i < output.size(); ++i) {
        if (!subset(output[i], input[i]))
            throw InputError("B_" + std::to_string(i + 1) + " escapes A_" + std::to_string(i + 1));
        for (std::size_t j = i + 1; j < output.size(); ++j)
            if (!set_intersect(output[i], output[j]).is_empty())
                throw InputError("B_" + std::to_string(i + 1) + " meets B_" + std::to_string(j + 1));
        ClassTags tags = output[i].classify();
        if (!output[i].is_empty() && !(tags.f_sigma && tags.g_delta))
            throw UnrepresentableResult("B_" + std::to_string(i + 1) +
                                        " is not ambiguous: " + output[i].str());
    }
}

ReductionPartition reduction_partition(const std::vector<RSet>& a) {
    if (a.empty())
        throw InputError("reduction needs at least one set");
    ReductionPartition r;
    r.input = a;
    RSet claimed = RSet::empty();
    for (const auto& an : a) {
        if (!an.classify().f_sigma)
            throw InputError("reduction input is not F_sigma: " + an.str());
        r.output.push_back(set_difference(an, claimed));
        claimed = set_union(claimed, an);
    }
    r.validate();
    return r;
}

// ---------------------------------------------------------------------------
// variable_gauge
// ---------------------------------------------------------------------------

EpsilonSpec EpsilonSpec::constant(const Rational& c) {
    if (c.sign() <= 0)
        throw InputError("epsilon must be positive");
    EpsilonSpec s;
    s.constant_value = c;
    return s;
}

EpsilonSpec EpsilonSpec::function(Func f) {
    EpsilonSpec s;
    s.fn = std::move(f);
    return s;
}

std::pair<NeighborhoodMap, Gauge> variable_gauge(const Func& f, const EpsilonSpec& eps) {
    const Interval& win = f.window();
    RSet window_set{win};

    // A_n = f^{-1}(eps^{-1}((2^-n, inf))), computed exactly; a constant
    // epsilon degenerates to A_n in {empty, R}.
    std::vector<RSet> a;
    std::size_t used = 0;
    for (std::size_t n = 1; n <= kDefaultLevels; ++n) {
        const Rational thr(1, static_cast<std::int64_t>(1) << n);
        RSet an;
        if (eps.constant_value) {
            an = *eps.constant_value > thr ? RSet::whole() : RSet::empty();
        } else if (eps.fn) {
            RSet vn = preimage_general(*eps.fn,
                                       RSet(Interval::make(thr, false, std::nullopt, false)))
                          .set;
            an = preimage_general(f, vn).set;
        } else {
            throw InputError("epsilon spec is empty");
        }
        a.push_back(std::move(an));
        used = n;
        RSet covered = union_all(a);
        if (subset(window_set, covered))
            break;
        if (n == kDefaultLevels)
            throw InputError("epsilon is not bounded below by 2^-" + std::to_string(n) +
                             " on the window image");
    }

    ReductionPartition parts = reduction_partition(a);

    // Closed decompositions of the B_n feed the leveled cover; interleave the
    // decomposition depths so every B_n is represented early.
    struct PieceRef {
        RSet piece;
        std::size_t owner;
    };
    std::vector<PieceRef> pieces;
    Rational min_len = kDeltaMax;
    constexpr int kDecomp = 12;
    for (int k = 1; k <= kDecomp; ++k) {
        for (std::size_t n = 0; n < parts.output.size(); ++n) {
            const RSet clipped = set_intersect(parts.output[n], window_set);
            for (const auto& part : clipped.parts()) {
                Rational plo = part.lo ? *part.lo : *win.lo;
                Rational phi = part.hi ? *part.hi : *win.hi;
                if (part.is_point()) {
                    if (k == 1)
                        pieces.push_back({RSet(part), n});
                    continue;
                }
                const Rational w = (phi - plo) / Rational(static_cast<std::int64_t>(1) << k);
                Rational lo2 = part.lo_closed ? plo : plo + w;
                Rational hi2 = part.hi_closed ? phi : phi - w;
                if (lo2 > hi2)
                    continue;
                if (part.lo_closed && part.hi_closed && k > 1)
                    continue; // already closed; one copy suffices
                Interval cell = Interval::closed(lo2, hi2);
                min_len = min(min_len, hi2 - lo2);
                pieces.push_back({RSet(cell), n});
            }
        }
    }
    if (pieces.empty())
        throw InputError("no closed decomposition pieces inside the window");

    std::vector<RSet> piece_sets;
    piece_sets.reserve(pieces.size());
    for (auto& p : pieces)
        piece_sets.push_back(p.piece);
    std::size_t levels = kDefaultLevels;
    if (min_len != kDeltaMax && min_len.sign() > 0) {
        const double need = 4.0 / min_len.to_double();
        if (need > double(levels))
            levels = std::min<std::size_t>(4096, std::size_t(need) + 1);
    }
    SigmaDiscreteCover cover = refine_cover(piece_sets, win, levels);
    auto [map_v, delta_v] = gauge_from_cover(cover);

    // Per-branch gauges for the thresholds 2^-n with B_n nonempty, each
    // capped by half the distance to the other cells' decomposition pieces
    // so no antecedent-true pair straddles a cell boundary.
    std::vector<RSet> owner_union(parts.output.size(), RSet::empty());
    for (const auto& p : pieces)
        owner_union[p.owner] = set_union(owner_union[p.owner], p.piece);
    auto branch_of = std::make_shared<std::vector<std::size_t>>(parts.output.size(), 0);
    std::vector<Gauge> gauges;
    gauges.push_back(delta_v);
    for (std::size_t n = 0; n < parts.output.size(); ++n) {
        if (parts.output[n].is_empty())
            continue;
        Gauge branch = gauge_for_epsilon(f, Rational(1, static_cast<std::int64_t>(1) << (n + 1)));
        RSet others = RSet::empty();
        for (std::size_t o = 0; o < owner_union.size(); ++o)
            if (o != n)
                others = set_union(others, owner_union[o]);
        if (!others.is_empty()) {
            AstPtr blocker_ast = make_node(
                NodeKind::div, {make_dist(others, make_var("x")), make_const(Rational(2))});
            Gauge blocker = Gauge::from_formula(Func::expr(blocker_ast, win),
                                                Gauge::Claim::baire_one);
            branch = Gauge::composite({std::move(blocker), std::move(branch)},
                                      [](const Rational&) { return std::size_t(1); },
                                      "cell " + std::to_string(n + 1) + " branch");
        }
        (*branch_of)[n] = gauges.size();
        gauges.push_back(std::move(branch));
    }

    auto b_sets = std::make_shared<std::vector<RSet>>(parts.output);
    auto pick = [b_sets, branch_of](const Rational& x) -> std::size_t {
        for (std::size_t n = 0; n < b_sets->size(); ++n)
            if ((*b_sets)[n].member(x))
                return (*branch_of)[n];
        throw NotCovered("x = " + x.str() + " lies in no partition cell");
    };
    std::string prov = "variable_gauge(" + f.describe() + ", levels<=2^-" +
                       std::to_string(used) + ")";
    Gauge composite = Gauge::composite(gauges, pick, prov);

    auto map_v_ptr = std::make_shared<NeighborhoodMap>(std::move(map_v));
    auto gauges_ptr = std::make_shared<std::vector<Gauge>>(std::move(gauges));
    NeighborhoodMap map;
    map.provenance = prov;
    map.at = [map_v_ptr, gauges_ptr, b_sets, branch_of](const Rational& x) {
        std::size_t branch = 0;
        for (std::size_t n = 0; n < b_sets->size(); ++n)
            if ((*b_sets)[n].member(x)) {
                branch = (*branch_of)[n];
                break;
            }
        if (branch == 0)
            throw NotCovered("x = " + x.str() + " lies in no partition cell");
        const Rational d = (*gauges_ptr)[branch](x);
        RSet ball(Interval::make(x - d, false, x + d, false));
        return set_intersect(map_v_ptr->at(x), ball);
    };
    return {std::move(map), std::move(composite)};
}

/* ---------------------------------------------------------------- JSON -- */

void to_json(nlohmann::json& j, const SigmaDiscreteCover& c) {
    j = nlohmann::json::object();
    auto lv = nlohmann::json::array();
    for (const auto& fam : c.levels) {
        nlohmann::json f;
        to_json(f, fam);
        lv.push_back(std::move(f));
    }
    j["levels"] = std::move(lv);
    j["links"] = c.links;
    j["piece_ids"] = c.piece_ids;
    j["chained"] = c.chained;
    nlohmann::json win;
    to_json(win, RSet(c.window));
    j["window"] = std::move(win);
    nlohmann::json unc;
    to_json(unc, c.uncovered);
    j["uncovered"] = std::move(unc);
    j["provenance"] = c.provenance;
}

void to_json(nlohmann::json& j, const CoverCertificate& c) {
    j = nlohmann::json::object();
    j["pairs_tested"] = c.pairs_tested;
    j["max_observed_diameter"] = c.max_observed_diameter;
    j["seed"] = c.seed;
    j["bound"] = c.bound.str();
    j["passed"] = c.passed;
    j["truncation"] = c.truncation;
}

void to_json(nlohmann::json& j, const GaugeCover& g) {
    j = nlohmann::json::object();
    nlohmann::json cov;
    to_json(cov, g.cover);
    j["cover"] = std::move(cov);
    nlohmann::json cert;
    to_json(cert, g.certificate);
    j["certificate"] = std::move(cert);
}

void to_json(nlohmann::json& j, const ReductionPartition& p) {
    j = nlohmann::json::object();
    auto dump = [](const std::vector<RSet>& v) {
        auto arr = nlohmann::json::array();
        for (const auto& s : v) {
            nlohmann::json e;
            to_json(e, s);
            arr.push_back(std::move(e));
        }
        return arr;
    };
    j["input"] = dump(p.input);
    j["output"] = dump(p.output);
}

} // namespace baire
