// SPDX-License-Identifier: Apache-2.0
#include "baire/approx.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>

#include "baire/errors.hpp"
#include "baire/sampling.hpp"

namespace baire {

namespace {

AstPtr node(NodeKind k, AstPtr a, AstPtr b) {
    return make_node(k, {std::move(a), std::move(b)});
}

AstPtr cst(const Rational& r) {
    return make_const(r);
}

AstPtr n_plus(std::int64_t k) {
    return node(NodeKind::add, make_var("n"), cst(Rational(k)));
}

bool value_pos(const Value& v) {
    if (value_is_rational(v))
        return std::get<Rational>(v).sign() > 0;
    return value_to_double(v) > 0.0;
}

// v < r (exact when v is rational).
bool value_lt(const Value& v, const Rational& r) {
    if (value_is_rational(v))
        return std::get<Rational>(v) < r;
    return value_to_double(v) < r.to_double();
}

bool value_eq(const Value& a, const Value& b) {
    if (value_is_rational(a) && value_is_rational(b))
        return std::get<Rational>(a) == std::get<Rational>(b);
    return value_close(a, b, kSnapTau);
}

Rational to_rational(const Value& v) {
    if (value_is_rational(v))
        return std::get<Rational>(v);
    return Rational::snap(value_to_double(v));
}

} // namespace

/* ------------------------------------------------------------------ */
/* extension from a functionally open set                              */

void ExtensionProblem::validate(std::uint64_t seed) const {
    if (!phi)
        throw InputError("extension problem without phi");
    if (!continuity_safe(phi))
        throw InputError("phi is not continuity-safe");
    if (uses_var(phi, "n"))
        throw InputError("phi must depend on x only");
    if (!g_seq.generator)
        throw InputError("extension problem without an approximant generator");
    if (!continuity_safe(g_seq.generator))
        throw InputError("approximant generator is not continuity-safe");
    if (!window.bounded() || !(*window.lo < *window.hi))
        throw InputError("window must be a nondegenerate compact interval");
    if (g_set.is_empty())
        throw InputError("the open set is empty");
    if (!g_set.classify().open)
        throw InputError("g_set is not open: " + g_set.str());
    if (!g_set.enum_points().empty())
        throw InputError("g_set must be interval-only");

    // Sample lattice: a coarse grid, the set's finite endpoints (never
    // members of an open set, so phi must vanish there exactly), and seeded
    // picks.  Exactness off the set is decided in the rational channel.
    std::vector<Rational> xs = dyadic_grid(*window.lo, *window.hi, 6);
    for (const auto& part : g_set.parts()) {
        if (part.lo)
            xs.push_back(*part.lo);
        if (part.hi)
            xs.push_back(*part.hi);
    }
    SplitMix64 rng(derive_seed(seed, 0x0e));
    while (xs.size() < 512)
        xs.push_back(dyadic_pick(rng, *window.lo, *window.hi, 24));

    for (const auto& x : xs) {
        if (!window.contains(x))
            continue;
        Value v = eval_at(phi, x);
        double d = value_to_double(v);
        if (d < 0.0 || d > 1.0)
            throw InputError("phi leaves [0,1] at x = " + x.str());
        if (g_set.member(x)) {
            if (!value_pos(v))
                throw InputError("phi vanishes on the open set at x = " + x.str());
        } else {
            if (!value_is_rational(v) || std::get<Rational>(v).sign() != 0)
                throw InputError("phi is not exactly zero off the open set at x = " + x.str());
        }
    }
}

Extension extend_from_open(const ExtensionProblem& p) {
    p.validate();
    const AstPtr zero = cst(Rational(0));
    const AstPtr one = cst(Rational(1));

    // psi1 = clamp(1 - (n+3)*phi, 0, 1): positive exactly on {phi < 1/(n+3)},
    // equal to 1 exactly on {phi = 0}.
    AstPtr psi1 = make_node(
        NodeKind::clamp,
        {node(NodeKind::sub, one, node(NodeKind::mul, n_plus(3), p.phi)), zero, one});
    // psi2 = clamp((n+1)*(n+2)*phi - (n+1), 0, 1): positive exactly on
    // {phi > 1/(n+2)}, equal to 1 exactly on {phi >= 1/(n+1)}.
    AstPtr psi2 = make_node(
        NodeKind::clamp,
        {node(NodeKind::sub, node(NodeKind::mul, node(NodeKind::mul, n_plus(1), n_plus(2)), p.phi),
              n_plus(1)),
         zero, one});

    // The straight-line homotopy turns the first carrier's branch into the
    // constant y0, so the whole case split collapses to one expression:
    // f_n = psi2*g_n + (1 - psi2)*y0.
    AstPtr gen = node(NodeKind::add, node(NodeKind::mul, psi2, p.g_seq.generator),
                      node(NodeKind::mul, node(NodeKind::sub, one, psi2), cst(p.y0)));

    // Carrier sweep: every sample must land in a cutoff support or in the
    // default band between them.  Impossible for phi in [0,1]; kept as a
    // guard against a phi that validation's lattice missed.
    SplitMix64 rng(derive_seed(0x5eed, 0xca));
    for (std::int64_t n : {1, 2, 5, 16}) {
        EvalEnv env;
        env.n = Value{Rational(n)};
        for (std::size_t i = 0; i < 256; ++i) {
            Rational x = dyadic_pick(rng, *p.window.lo, *p.window.hi, 24);
            env.x = Value{x};
            if (value_pos(eval_ast(psi1, env)) || value_pos(eval_ast(psi2, env)))
                continue;
            Value ph = eval_at(p.phi, x);
            bool in_band = !value_lt(ph, Rational(1, n + 3)) && value_lt(ph, Rational(1, n + 1));
            if (!in_band)
                throw CarrierGap("x = " + x.str() + " escapes both carriers at n = " +
                                 std::to_string(n));
        }
    }

    RSet g_set = p.g_set;
    FuncSeq g_seq = p.g_seq;
    Rational y0 = p.y0;
    LimitEval hint = [g_set, g_seq, y0](const Value& xv) -> Value {
        Rational x = to_rational(xv);
        if (!g_set.member(x))
            return Value{y0};
        if (g_seq.limit_hint)
            return g_seq.limit_hint(Value{x});
        EvalEnv env;
        env.x = Value{x};
        env.n = Value{Rational(std::int64_t(kNEval))};
        return eval_ast(g_seq.generator, env);
    };

    Extension out;
    out.seq = FuncSeq{std::move(gen), SeqMode::pointwise, std::move(hint)};
    out.psi1 = std::move(psi1);
    out.psi2 = std::move(psi2);
    out.window = p.window;
    return out;
}

Func Extension::term(std::size_t n) const {
    if (n == 0)
        throw InputError("term index is 1-based");
    return Func::expr(substitute_n(seq.generator, Rational(std::int64_t(n))), window);
}

/* ------------------------------------------------------------------ */
/* term sequences                                                      */

TermSeq::TermSeq(SeqMode mode, Interval window, std::function<Func(std::size_t)> make)
    : mode_(mode), window_(window), make_(std::move(make)) {
    if (!make_)
        throw InputError("term sequence without a generator");
}

TermSeq TermSeq::from_formula(const FuncSeq& seq, const Interval& window) {
    if (!seq.generator)
        throw InputError("sequence has no generator expression");
    if (!continuity_safe(seq.generator))
        throw InputError("sequence generator is not continuity-safe");
    AstPtr gen = seq.generator;
    Interval win = window;
    return TermSeq(seq.mode, window, [gen, win](std::size_t n) {
        return Func::expr(substitute_n(gen, Rational(std::int64_t(n))), win);
    });
}

Func TermSeq::term(std::size_t n) const {
    if (n == 0)
        throw InputError("term index is 1-based");
    return make_(n);
}

namespace {

// Value of the first of pieces[0..m) whose domain contains x, snapped when
// the expression leaves the rational channel.
Rational prefix_value(const std::vector<PieceFn>& pieces, std::size_t m, const Rational& x) {
    for (std::size_t j = 0; j < m; ++j)
        if (pieces[j].domain.member(x))
            return to_rational(eval_at(pieces[j].expr, x));
    throw InputError("gap endpoint x = " + x.str() + " lies in no piece");
}

} // namespace

std::vector<PieceFn> step_stable_pieces(std::size_t count) {
    if (count == 0)
        throw InputError("piece count must be positive");
    std::vector<PieceFn> out;
    out.reserve(count);
    const RSet left(Interval::make(std::nullopt, false, Rational(0), true));
    for (std::size_t n = 1; n <= count; ++n) {
        RSet dom = set_union(
            left, RSet(Interval::make(Rational(1, std::int64_t(n)), true, std::nullopt, false)));
        // One expression exact on both parts: 0 left of zero, 1 from 1/n on.
        AstPtr e = make_node(NodeKind::clamp,
                             {node(NodeKind::mul, cst(Rational(std::int64_t(n))), make_var("x")),
                              cst(Rational(0)), cst(Rational(1))});
        out.push_back(PieceFn{std::move(dom), std::move(e)});
    }
    return out;
}

TermSeq stable_sequence(std::vector<PieceFn> pieces, const Interval& window, std::uint64_t seed) {
    if (pieces.empty())
        throw InputError("stable sequence needs at least one piece");
    if (!window.bounded())
        throw InputError("window must be compact");
    RSet covered;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const PieceFn& p = pieces[i];
        if (p.domain.is_empty())
            throw InputError("piece " + std::to_string(i) + " has an empty domain");
        if (!p.domain.enum_points().empty())
            throw InputError("piece domains must be interval-only");
        if (!p.domain.classify().closed)
            throw InputError("piece domain is not closed: " + p.domain.str());
        if (!p.expr || !continuity_safe(p.expr) || uses_var(p.expr, "n"))
            throw InputError("piece " + std::to_string(i) + " needs a continuity-safe x-expression");
        // Later pieces must agree with the earlier prefix on overlaps, else
        // the terms would not stabilize to a single function.
        RSet overlap = set_intersect(set_intersect(p.domain, covered), RSet(window));
        if (!overlap.is_empty()) {
            SplitMix64 rng(derive_seed(seed, i));
            std::vector<Rational> pts;
            for (const auto& part : overlap.parts()) {
                pts.push_back(*part.lo);
                pts.push_back(*part.hi);
                for (std::size_t t = 0; t < 128 / overlap.parts().size() + 1; ++t)
                    pts.push_back(dyadic_pick(rng, *part.lo, *part.hi, 20));
            }
            for (const auto& x : pts) {
                Value mine = eval_at(p.expr, x);
                Value owner = Value{prefix_value(pieces, i, x)};
                if (!value_close(mine, owner, kSnapTau))
                    throw InputError("piece " + std::to_string(i) +
                                     " disagrees with the prefix at x = " + x.str());
            }
        }
        covered = set_union(covered, p.domain);
    }

    auto shared = std::make_shared<const std::vector<PieceFn>>(std::move(pieces));
    Interval win = window;
    auto make = [shared, win](std::size_t n) -> Func {
        const std::vector<PieceFn>& ps = *shared;
        const std::size_t m = std::min(n, ps.size());
        RSet cov;
        for (std::size_t j = 0; j < m; ++j)
            cov = set_union(cov, ps[j].domain);
        std::vector<PieceFn> out(ps.begin(), ps.begin() + std::ptrdiff_t(m));
        const RSet gaps = set_complement(cov);
        for (const auto& gp : gaps.parts()) {
            if (gp.lo && gp.hi) {
                const Rational a = *gp.lo;
                const Rational b = *gp.hi;
                const Rational va = prefix_value(ps, m, a);
                const Rational vb = prefix_value(ps, m, b);
                // Linear bridge through (a, va) and (b, vb).
                AstPtr fill = node(NodeKind::add, cst(va),
                                   node(NodeKind::mul, node(NodeKind::sub, make_var("x"), cst(a)),
                                        cst((vb - va) / (b - a))));
                out.push_back(PieceFn{RSet(Interval::closed(a, b)), std::move(fill)});
            } else if (gp.hi) {
                out.push_back(PieceFn{RSet(Interval::make(std::nullopt, false, *gp.hi, true)),
                                      cst(prefix_value(ps, m, *gp.hi))});
            } else if (gp.lo) {
                out.push_back(PieceFn{RSet(Interval::make(*gp.lo, true, std::nullopt, false)),
                                      cst(prefix_value(ps, m, *gp.lo))});
            } else {
                throw InputError("pieces cover nothing");
            }
        }
        return Func::piecewise(std::move(out), win);
    };
    return TermSeq(SeqMode::stable, window, std::move(make));
}

TermSeq stable_sequence(const Func& f) {
    switch (f.kind()) {
    case Func::Kind::piecewise:
        return stable_sequence(f.pieces(), f.window());
    case Func::Kind::builtin:
        if (f.builtin_name() == "step")
            return stable_sequence(step_stable_pieces(), f.window());
        throw InputError("no canonical piece list for builtin '" + f.builtin_name() + "'");
    default:
        throw InputError("stable sequences need a piecewise source");
    }
}

/* ------------------------------------------------------------------ */
/* stabilization scan                                                  */

StabilityReport stable_check(const TermSeq& seq, const Func& f, std::size_t samples,
                             std::size_t horizon, std::uint64_t seed) {
    if (horizon == 0)
        throw InputError("horizon must be positive");
    const Interval& win = seq.window();
    std::set<Rational> xs;
    for (const auto& s : f.special_points())
        if (win.contains(s))
            xs.insert(s);
    for (const auto& g : dyadic_grid(*win.lo, *win.hi, 5))
        if (xs.size() < samples)
            xs.insert(g);
    SplitMix64 rng(derive_seed(seed, 0x57));
    for (std::size_t guard = 0; xs.size() < samples && guard < 8 * samples; ++guard)
        xs.insert(dyadic_pick(rng, *win.lo, *win.hi, 5));

    std::vector<Func> terms;
    terms.reserve(horizon);
    for (std::size_t m = 1; m <= horizon; ++m)
        terms.push_back(seq.term(m));

    StabilityReport rep;
    rep.horizon = horizon;
    for (const auto& x : xs) {
        Value fv;
        try {
            fv = f.evaluate(x).value;
        } catch (const OutsideCover&) {
            continue; // f makes no claim at x
        }
        std::size_t k = 1; // least index from which all terms match f(x)
        for (std::size_t m = horizon; m >= 1; --m) {
            if (!value_eq(terms[m - 1].evaluate(x).value, fv)) {
                k = m + 1;
                break;
            }
        }
        StabilizationSample s;
        s.x = x;
        s.stabilized = k <= horizon;
        s.index = s.stabilized ? k : 0;
        if (s.stabilized) {
            ++rep.stabilized_count;
            rep.max_index = std::max(rep.max_index, k);
        }
        rep.points.push_back(std::move(s));
    }
    return rep;
}

/* ------------------------------------------------------------------ */
/* exact piecewise-linear calculus                                     */

namespace {

using Seg = std::pair<Rational, Rational>;

PiecewiseLinear pl_const(const Rational& c) {
    return {{}, {Seg{c, Rational(0)}}};
}

// Representative interior point of segment i under the given breaks.
Rational seg_probe(const std::vector<Rational>& breaks, std::size_t i) {
    if (breaks.empty())
        return Rational(0);
    if (i == 0)
        return breaks.front() - Rational(1);
    if (i == breaks.size())
        return breaks.back() + Rational(1);
    return (breaks[i - 1] + breaks[i]) / Rational(2);
}

std::size_t seg_index(const std::vector<Rational>& breaks, const Rational& x) {
    std::size_t i = 0;
    while (i < breaks.size() && breaks[i] < x)
        ++i;
    return i;
}

// Same function over a finer (superset) break vector.
PiecewiseLinear refit(const PiecewiseLinear& p, const std::vector<Rational>& breaks) {
    PiecewiseLinear out;
    out.breaks = breaks;
    out.segs.reserve(breaks.size() + 1);
    for (std::size_t i = 0; i <= breaks.size(); ++i)
        out.segs.push_back(p.segs[seg_index(p.breaks, seg_probe(breaks, i))]);
    return out;
}

std::vector<Rational> merge_breaks(const std::vector<Rational>& a, const std::vector<Rational>& b) {
    std::vector<Rational> out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Drop breaks between identical adjacent segments.
PiecewiseLinear normalize(PiecewiseLinear p) {
    for (std::size_t i = 0; i < p.breaks.size();) {
        if (p.segs[i] == p.segs[i + 1]) {
            p.breaks.erase(p.breaks.begin() + std::ptrdiff_t(i));
            p.segs.erase(p.segs.begin() + std::ptrdiff_t(i + 1));
        } else {
            ++i;
        }
    }
    return p;
}

PiecewiseLinear pl_combine(const PiecewiseLinear& a, const PiecewiseLinear& b, bool subtract) {
    std::vector<Rational> breaks = merge_breaks(a.breaks, b.breaks);
    PiecewiseLinear fa = refit(a, breaks);
    PiecewiseLinear fb = refit(b, breaks);
    PiecewiseLinear out;
    out.breaks = std::move(breaks);
    out.segs.reserve(fa.segs.size());
    for (std::size_t i = 0; i < fa.segs.size(); ++i) {
        if (subtract)
            out.segs.push_back({fa.segs[i].first - fb.segs[i].first,
                                fa.segs[i].second - fb.segs[i].second});
        else
            out.segs.push_back({fa.segs[i].first + fb.segs[i].first,
                                fa.segs[i].second + fb.segs[i].second});
    }
    return normalize(std::move(out));
}

PiecewiseLinear pl_scale(PiecewiseLinear p, const Rational& c) {
    for (auto& s : p.segs) {
        s.first = s.first * c;
        s.second = s.second * c;
    }
    return normalize(std::move(p));
}

PiecewiseLinear pl_min_max(const PiecewiseLinear& a, const PiecewiseLinear& b, bool take_min) {
    std::vector<Rational> breaks = merge_breaks(a.breaks, b.breaks);
    PiecewiseLinear fa = refit(a, breaks);
    PiecewiseLinear fb = refit(b, breaks);
    // Crossing roots strictly inside a segment become new breakpoints.
    std::vector<Rational> roots;
    for (std::size_t i = 0; i < fa.segs.size(); ++i) {
        const Rational da = fa.segs[i].first - fb.segs[i].first;
        const Rational db = fa.segs[i].second - fb.segs[i].second;
        if (db.sign() == 0)
            continue;
        const Rational r = -da / db;
        const bool above = i == 0 || breaks[i - 1] < r;
        const bool below = i == breaks.size() || r < breaks[i];
        if (above && below)
            roots.push_back(r);
    }
    std::sort(roots.begin(), roots.end());
    breaks = merge_breaks(breaks, roots);
    fa = refit(fa, breaks);
    fb = refit(fb, breaks);
    PiecewiseLinear out;
    out.breaks = breaks;
    out.segs.reserve(fa.segs.size());
    for (std::size_t i = 0; i < fa.segs.size(); ++i) {
        const Rational t = seg_probe(breaks, i);
        const bool a_le = fa.segs[i].first + fa.segs[i].second * t <=
                          fb.segs[i].first + fb.segs[i].second * t;
        out.segs.push_back((a_le == take_min) ? fa.segs[i] : fb.segs[i]);
    }
    return normalize(std::move(out));
}

std::optional<Rational> pl_constant_value(const PiecewiseLinear& p) {
    if (p.breaks.empty() && p.segs[0].second.sign() == 0)
        return p.segs[0].first;
    return std::nullopt;
}

std::optional<PiecewiseLinear> lin_rec(const AstPtr& e) {
    switch (e->kind) {
    case NodeKind::constant:
        return pl_const(e->value);
    case NodeKind::variable:
        if (e->name == "x")
            return PiecewiseLinear{{}, {Seg{Rational(0), Rational(1)}}};
        return std::nullopt; // n must be substituted first
    case NodeKind::add:
    case NodeKind::sub: {
        auto a = lin_rec(e->kids[0]);
        auto b = lin_rec(e->kids[1]);
        if (!a || !b)
            return std::nullopt;
        return pl_combine(*a, *b, e->kind == NodeKind::sub);
    }
    case NodeKind::neg: {
        auto a = lin_rec(e->kids[0]);
        if (!a)
            return std::nullopt;
        return pl_scale(std::move(*a), Rational(-1));
    }
    case NodeKind::mul: {
        auto a = lin_rec(e->kids[0]);
        auto b = lin_rec(e->kids[1]);
        if (!a || !b)
            return std::nullopt;
        if (auto c = pl_constant_value(*a))
            return pl_scale(std::move(*b), *c);
        if (auto c = pl_constant_value(*b))
            return pl_scale(std::move(*a), *c);
        return std::nullopt; // genuinely bilinear
    }
    case NodeKind::div: {
        auto a = lin_rec(e->kids[0]);
        auto b = lin_rec(e->kids[1]);
        if (!a || !b)
            return std::nullopt;
        auto c = pl_constant_value(*b);
        if (!c || c->sign() == 0)
            return std::nullopt;
        return pl_scale(std::move(*a), Rational(1) / *c);
    }
    case NodeKind::min:
    case NodeKind::max: {
        auto a = lin_rec(e->kids[0]);
        auto b = lin_rec(e->kids[1]);
        if (!a || !b)
            return std::nullopt;
        return pl_min_max(*a, *b, e->kind == NodeKind::min);
    }
    case NodeKind::abs: {
        auto a = lin_rec(e->kids[0]);
        if (!a)
            return std::nullopt;
        return pl_min_max(*a, pl_scale(*a, Rational(-1)), /*take_min=*/false);
    }
    case NodeKind::clamp: {
        auto v = lin_rec(e->kids[0]);
        auto lo = lin_rec(e->kids[1]);
        auto hi = lin_rec(e->kids[2]);
        if (!v || !lo || !hi)
            return std::nullopt;
        return pl_min_max(*lo, pl_min_max(*v, *hi, /*take_min=*/true), /*take_min=*/false);
    }
    default:
        return std::nullopt; // pow, sin, cos, exp, dist, call
    }
}

} // namespace

Rational PiecewiseLinear::at(const Rational& x) const {
    const Seg& s = segs[seg_index(breaks, x)];
    return s.first + s.second * x;
}

std::optional<PiecewiseLinear> linearize(const AstPtr& e) {
    if (!e)
        return std::nullopt;
    try {
        return lin_rec(e);
    } catch (const OverflowError&) {
        return std::nullopt; // exact coefficients left int64; refuse honestly
    }
}

namespace {

RSet pl_zero_set(const PiecewiseLinear& p) {
    RSet out;
    for (std::size_t i = 0; i < p.segs.size(); ++i) {
        std::optional<Rational> lo = i > 0 ? std::optional<Rational>(p.breaks[i - 1]) : std::nullopt;
        std::optional<Rational> hi =
            i < p.breaks.size() ? std::optional<Rational>(p.breaks[i]) : std::nullopt;
        const auto& [a, b] = p.segs[i];
        if (b.sign() == 0) {
            if (a.sign() == 0)
                out = set_union(out, RSet(Interval::make(lo, lo.has_value(), hi, hi.has_value())));
            continue;
        }
        const Rational r = -a / b;
        if ((!lo || *lo <= r) && (!hi || r <= *hi))
            out = set_union(out, RSet::point(r));
    }
    return out;
}

} // namespace

RSet equality_set(const AstPtr& a, const AstPtr& b, const RSet& region) {
    if (region.is_empty())
        return RSet::empty();
    if (ast_equal(a, b))
        return region;
    auto la = linearize(a);
    auto lb = linearize(b);
    if (la && lb)
        return set_intersect(pl_zero_set(pl_combine(*la, *lb, /*subtract=*/true)), region);
    // Non-linear pair: a strict-sign range certificate empties the set; the
    // analysis box covers the region (clipped to a huge finite span).
    double lo = -1e15, hi = 1e15;
    if (region.parts().front().lo)
        lo = region.parts().front().lo->to_double();
    if (region.parts().back().hi)
        hi = region.parts().back().hi->to_double();
    Analysis an = analyze(make_node(NodeKind::sub, {a, b}), lo, hi);
    if (an.range && (an.range->first > 0.0 || an.range->second < 0.0))
        return RSet::empty();
    throw Unresolvable("equality set not certifiable on " + region.str());
}

/* ------------------------------------------------------------------ */
/* stabilization sets                                                  */

namespace {

// Priority-resolved (region, expression) decomposition of a term.
std::vector<std::pair<RSet, AstPtr>> term_regions(const Func& f) {
    switch (f.kind()) {
    case Func::Kind::expr:
        return {{RSet::whole(), f.expr_ast()}};
    case Func::Kind::piecewise: {
        std::vector<std::pair<RSet, AstPtr>> out;
        RSet prior;
        for (const auto& p : f.pieces()) {
            RSet r = set_difference(p.domain, prior);
            if (!r.is_empty())
                out.push_back({std::move(r), p.expr});
            prior = set_union(prior, p.domain);
        }
        if (!set_complement(prior).is_empty())
            throw Unresolvable("term is undefined on part of the line");
        return out;
    }
    default:
        throw Unresolvable("stabilization sets need expression or piecewise terms");
    }
}

} // namespace

const RSet& StabilizationSets::x(std::size_t k, std::size_t n) const {
    auto it = x_kn.find({std::max(k, n), std::min(k, n)});
    if (it == x_kn.end())
        throw InputError("stabilization pair outside the computed horizon");
    return it->second;
}

bool StabilizationSets::monotone() const {
    for (std::size_t i = 0; i + 1 < x_n.size(); ++i)
        if (!subset(x_n[i], x_n[i + 1]))
            return false;
    return true;
}

StabilizationSets pieces_from_stable(const TermSeq& seq, std::size_t horizon) {
    if (horizon == 0)
        throw InputError("horizon must be positive");
    std::vector<std::vector<std::pair<RSet, AstPtr>>> regs;
    regs.reserve(horizon);
    for (std::size_t m = 1; m <= horizon; ++m)
        regs.push_back(term_regions(seq.term(m)));

    StabilizationSets out;
    out.horizon = horizon;
    out.truncation = "X_n intersects X_kn over k = n.." + std::to_string(horizon) +
                     " (tail truncated at " + std::to_string(horizon) + ")";
    for (std::size_t n = 1; n <= horizon; ++n) {
        RSet xn = RSet::whole();
        for (std::size_t k = n; k <= horizon; ++k) {
            RSet xkn;
            if (k == n) {
                xkn = RSet::whole();
            } else {
                for (const auto& [ra, ea] : regs[k - 1]) {
                    for (const auto& [rb, eb] : regs[n - 1]) {
                        RSet inter = set_intersect(ra, rb);
                        if (inter.is_empty())
                            continue;
                        xkn = set_union(xkn, equality_set(ea, eb, inter));
                    }
                }
                xn = set_intersect(xn, xkn);
            }
            out.x_kn.emplace(std::make_pair(k, n), std::move(xkn));
        }
        out.x_n.push_back(std::move(xn));
    }
    return out;
}

/* ------------------------------------------------------------------ */
/* serialization                                                       */

void to_json(nlohmann::json& j, const StabilityReport& r) {
    j = nlohmann::json::object();
    j["horizon"] = r.horizon;
    j["samples"] = r.points.size();
    j["stabilized"] = r.stabilized_count;
    j["max_index"] = r.max_index;
    auto pts = nlohmann::json::array();
    for (const auto& p : r.points)
        pts.push_back({{"x", p.x.str()}, {"stabilized", p.stabilized}, {"index", p.index}});
    j["points"] = std::move(pts);
}

void to_json(nlohmann::json& j, const StabilizationSets& s) {
    j = nlohmann::json::object();
    j["horizon"] = s.horizon;
    j["truncation"] = s.truncation;
    auto xn = nlohmann::json::array();
    for (std::size_t i = 0; i < s.x_n.size(); ++i) {
        nlohmann::json e;
        e["n"] = i + 1;
        e["set"] = s.x_n[i];
        e["tags"] = s.x_n[i].classify().labels();
        xn.push_back(std::move(e));
    }
    j["x_n"] = std::move(xn);
    auto xkn = nlohmann::json::array();
    for (const auto& [key, set] : s.x_kn) {
        nlohmann::json e;
        e["k"] = key.first;
        e["n"] = key.second;
        e["set"] = set;
        e["closed"] = set.classify().closed;
        xkn.push_back(std::move(e));
    }
    j["x_kn"] = std::move(xkn);
}

/* ------------------------------------------------------------------ */
/* continuity spot check                                               */

LipschitzReport lipschitz_spot_check(const Func& f, std::size_t samples, std::uint64_t seed) {
    LipschitzReport rep;
    const Interval& win = f.window();
    const double wlo = win.lo->to_double();
    const double whi = win.hi->to_double();

    double lip = 0.0;
    switch (f.kind()) {
    case Func::Kind::expr: {
        Analysis an = analyze(f.expr_ast(), wlo, whi);
        if (!an.lip) {
            rep.detail = "no Lipschitz certificate for the expression";
            return rep;
        }
        lip = *an.lip;
        break;
    }
    case Func::Kind::piecewise: {
        for (const auto& p : f.pieces()) {
            if (set_intersect(p.domain, RSet(win)).is_empty())
                continue;
            Analysis an = analyze(p.expr, wlo, whi);
            if (!an.lip) {
                rep.detail = "a piece has no Lipschitz certificate";
                return rep;
            }
            lip = std::max(lip, *an.lip);
        }
        break;
    }
    default:
        rep.detail = "no expression to analyze";
        return rep;
    }
    rep.lip = lip;

    SplitMix64 rng(derive_seed(seed, 0x11));
    bool ok = true;
    for (std::size_t i = 0; i < samples; ++i) {
        const Rational h = Rational(1) / Rational(std::int64_t(1) << (6 + rng.bounded(10)));
        const Rational x = dyadic_pick(rng, *win.lo, *win.hi - h, 12);
        const double d = std::fabs(f.evaluate(x + h).to_double() - f.evaluate(x).to_double());
        const double bound = lip * h.to_double() * (1.0 + 1e-9) + 1e-12;
        rep.worst_ratio = std::max(rep.worst_ratio, d / bound);
        if (d > bound)
            ok = false;
        ++rep.tested;
    }
    rep.passed = ok;
    return rep;
}

} // namespace baire
