// SPDX-License-Identifier: Apache-2.0
#include "baire/func.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>

#include "baire/enumeration.hpp"
#include "baire/errors.hpp"
#include "baire/sampling.hpp"

namespace baire {

namespace {

// Double images of the enumeration prefix, value-sorted, for float-channel
// hit tests: a double within 2^-40 of a prefix value counts as that point.
std::vector<std::pair<double, std::size_t>> projected_prefix(std::size_t trunc) {
    auto& en = Enumeration::instance();
    en.ensure(trunc);
    std::vector<std::pair<double, std::size_t>> out;
    out.reserve(trunc);
    for (std::size_t n = 1; n <= trunc; ++n)
        out.emplace_back(en.value(n).to_double(), n);
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<std::size_t> float_hit(const std::vector<std::pair<double, std::size_t>>& proj,
                                     double x) {
    const double tol = std::ldexp(1.0, -kSnapPow);
    auto it = std::lower_bound(proj.begin(), proj.end(), std::make_pair(x - tol, std::size_t{0}));
    std::optional<std::size_t> best;
    double best_d = tol;
    for (; it != proj.end() && it->first <= x + tol; ++it) {
        double d = std::abs(it->first - x);
        if (d < best_d || (d == best_d && best && it->second < *best)) {
            best_d = d;
            best = it->second;
        }
    }
    return best;
}

const std::vector<std::pair<double, std::size_t>>& projection_for(std::size_t trunc) {
    static std::map<std::size_t, std::vector<std::pair<double, std::size_t>>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(trunc);
    if (it == cache.end())
        it = cache.emplace(trunc, projected_prefix(trunc)).first;
    return it->second;
}

} // namespace

Func Func::piecewise(std::vector<PieceFn> pieces, Interval window) {
    if (!window.bounded())
        throw InputError("working window must be bounded");
    Func f;
    f.kind_ = Kind::piecewise;
    f.pieces_ = std::move(pieces);
    f.window_ = window;
    return f;
}

Func Func::limit(FuncSeq seq, Interval window) {
    if (!window.bounded())
        throw InputError("working window must be bounded");
    if (!seq.generator)
        throw InputError("limit variant needs a generator expression");
    Func f;
    f.kind_ = Kind::limit;
    f.seq_ = std::move(seq);
    f.window_ = window;
    return f;
}

Func Func::builtin(const std::string& name, std::size_t param, Interval window,
                   std::size_t trunc) {
    if (!window.bounded())
        throw InputError("working window must be bounded");
    if (trunc == 0)
        throw InputError("enumeration truncation must be positive");
    Func f;
    f.kind_ = Kind::builtin;
    f.bname_ = name;
    f.window_ = window;
    f.trunc_ = trunc;
    if (name == "jumpsum") {
        if (param < 1 || param > 62)
            throw InputError("jumpsum parameter must lie in 1..62 (weights 2^-n stay exact)");
        f.bparam_ = param;
        auto& en = Enumeration::instance();
        en.ensure(param);
        std::vector<std::pair<Rational, std::size_t>> pts;
        for (std::size_t n = 1; n <= param; ++n)
            pts.emplace_back(en.value(n), n);
        std::sort(pts.begin(), pts.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        Rational acc(0);
        for (const auto& [v, n] : pts) {
            acc = acc + Rational(1, std::int64_t(1) << n);
            f.jump_vals_.push_back(v);
            f.jump_sums_.push_back(acc);
        }
    } else if (name == "riemann" || name == "dirichlet") {
        if (param != 0)
            throw InputError(name + " takes no parameter");
        Enumeration::instance().ensure(trunc);
    } else if (name == "step") {
        if (param != 0)
            throw InputError("step takes no parameter");
    } else {
        throw InputError("unknown builtin '" + name + "'");
    }
    return f;
}

Func Func::expr(AstPtr e, Interval window) {
    if (!window.bounded())
        throw InputError("working window must be bounded");
    if (!e)
        throw InputError("expr variant needs an expression");
    Func f;
    f.kind_ = Kind::expr;
    f.expr_ = std::move(e);
    f.window_ = window;
    return f;
}

Func Func::from_program(const Program& prog, const std::string& name, Interval window,
                        std::size_t trunc) {
    if (const FuncDef* d = prog.find_func(name)) {
        std::vector<PieceFn> ps;
        for (const auto& p : d->pieces)
            ps.push_back(PieceFn{p.domain, p.expr});
        return piecewise(std::move(ps), window);
    }
    if (const LimitDef* d = prog.find_limit(name))
        return limit(FuncSeq{d->seq_expr, d->mode, {}}, window);
    if (const BuiltinDef* d = prog.find_builtin(name)) {
        std::size_t param = d->param ? std::size_t(*d->param) : 0;
        Func f = builtin(d->builtin, param, window, trunc);
        return f;
    }
    throw InputError("no function named '" + name + "' in the program");
}

const std::vector<PieceFn>& Func::pieces() const {
    if (kind_ != Kind::piecewise)
        throw InputError("not a piecewise function");
    return pieces_;
}

const FuncSeq& Func::seq() const {
    if (kind_ != Kind::limit)
        throw InputError("not a limit function");
    return *seq_;
}

const std::string& Func::builtin_name() const {
    if (kind_ != Kind::builtin)
        throw InputError("not a builtin function");
    return bname_;
}

std::size_t Func::builtin_param() const {
    if (kind_ != Kind::builtin)
        throw InputError("not a builtin function");
    return bparam_;
}

const AstPtr& Func::expr_ast() const {
    if (kind_ != Kind::expr)
        throw InputError("not an expression function");
    return expr_;
}

EvalResult Func::eval_builtin(const Rational& x, bool exact_channel) const {
    auto& en = Enumeration::instance();
    if (bname_ == "step")
        return {Value{Rational(x.sign() <= 0 ? 0 : 1)}, std::nullopt};
    if (bname_ == "jumpsum") {
        // Value jumps at each r_n (n <= N) and is right-continuous from the
        // jump onward: f(x) = sum of 2^-n over r_n <= x.
        auto it = std::upper_bound(jump_vals_.begin(), jump_vals_.end(), x);
        if (it == jump_vals_.begin())
            return {Value{Rational(0)}, std::nullopt};
        return {Value{jump_sums_[std::size_t(it - jump_vals_.begin()) - 1]}, std::nullopt};
    }
    if (bname_ == "riemann") {
        auto idx = en.index_of(x);
        if (idx && *idx <= trunc_)
            return {Value{Rational(1, std::int64_t(*idx))}, std::nullopt};
        return {Value{Rational(0)}, std::nullopt};
    }
    // dirichlet: the exact channel consults the tail (every rational of (0,1)
    // is a member); the float channel decides by the truncated prefix.
    if (exact_channel) {
        bool in = Rational(0) < x && x < Rational(1);
        return {Value{Rational(in ? 1 : 0)}, std::nullopt};
    }
    auto idx = en.index_of(x);
    return {Value{Rational(idx && *idx <= trunc_ ? 1 : 0)}, std::nullopt};
}

EvalResult Func::evaluate(const Rational& x) const {
    switch (kind_) {
    case Kind::expr:
        return {eval_at(expr_, x), std::nullopt};
    case Kind::piecewise: {
        for (const auto& p : pieces_)
            if (p.domain.member(x))
                return {eval_at(p.expr, x), std::nullopt};
        throw OutsideCover("no piece covers x = " + x.str());
    }
    case Kind::builtin:
        return eval_builtin(x, /*exact_channel=*/true);
    case Kind::limit: {
        if (seq_->limit_hint)
            return {seq_->limit_hint(Value{x}), std::nullopt};
        EvalEnv env;
        env.x = Value{x};
        env.n = Value{Rational(std::int64_t(kNEval))};
        Value v = eval_ast(seq_->generator, env);
        switch (seq_->mode) {
        case SeqMode::pointwise:
            return {v, "nonconverged: pointwise-mode value sampled at n=" + std::to_string(kNEval)};
        case SeqMode::uniform: {
            env.n = Value{Rational(std::int64_t(kNEval / 2))};
            Value half = eval_ast(seq_->generator, env);
            double tail = std::abs(value_to_double(v) - value_to_double(half));
            return {v, "uniform tail estimate |f_" + std::to_string(kNEval) + " - f_" +
                           std::to_string(kNEval / 2) + "| = " + std::to_string(tail)};
        }
        case SeqMode::stable: {
            env.n = Value{Rational(std::int64_t(kNEval - 1))};
            Value prev = eval_ast(seq_->generator, env);
            if (value_close(v, prev, kSnapTau))
                return {v, std::nullopt};
            return {v, "not stabilized within n=" + std::to_string(kNEval)};
        }
        }
        return {v, std::nullopt};
    }
    }
    throw InputError("corrupt function variant");
}

EvalResult Func::evaluate(double x) const {
    if (!std::isfinite(x))
        throw DomainError("evaluation at a non-finite point");
    if (kind_ == Kind::builtin && (bname_ == "riemann" || bname_ == "dirichlet")) {
        // Float-channel hit test against the projected prefix: a non-hit
        // double stands in for an irrational point.
        const auto& proj = projection_for(trunc_);
        auto idx = float_hit(proj, x);
        if (bname_ == "dirichlet")
            return {Value{Rational(idx ? 1 : 0)}, std::nullopt};
        if (idx)
            return {Value{Rational(1, std::int64_t(*idx))}, std::nullopt};
        return {Value{Rational(0)}, std::nullopt};
    }
    Rational snapped = Rational::snap(x);
    if (kind_ == Kind::builtin)
        return eval_builtin(snapped, /*exact_channel=*/false);
    return evaluate(snapped);
}

void Func::validate(std::uint64_t seed) const {
    if (kind_ == Kind::piecewise) {
        if (pieces_.empty())
            throw InputError("piecewise function with no pieces");
        RSet covered = RSet::empty();
        for (const auto& p : pieces_) {
            if (!p.domain.classify().closed)
                throw InputError("piece domain is not closed: " + p.domain.str());
            covered = set_union(covered, p.domain);
        }
        RSet win(window_);
        RSet gap = set_difference(win, covered);
        if (!gap.is_empty())
            throw InputError("window not covered by piece domains near " + gap.str());
        // Overlap agreement at 10^3 seeded points per overlapping pair.
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            for (std::size_t j = i + 1; j < pieces_.size(); ++j) {
                RSet inter = set_intersect(pieces_[i].domain, pieces_[j].domain);
                inter = set_intersect(inter, win);
                if (inter.is_empty())
                    continue;
                SplitMix64 rng(derive_seed(seed, i * 131 + j));
                std::vector<Rational> pts;
                for (const auto& part : inter.parts()) {
                    if (part.is_point()) {
                        pts.push_back(*part.lo);
                        continue;
                    }
                    pts.push_back(*part.lo);
                    pts.push_back(*part.hi);
                    while (pts.size() < 1000 / inter.parts().size() + 2)
                        pts.push_back(dyadic_pick(rng, *part.lo, *part.hi, 20));
                }
                for (const auto& x : pts) {
                    Value a = eval_at(pieces_[i].expr, x);
                    Value b = eval_at(pieces_[j].expr, x);
                    if (!value_close(a, b, kSnapTau))
                        throw InputError("overlapping pieces disagree at x = " + x.str());
                }
            }
        }
    }
    if (kind_ == Kind::limit) {
        // Instantiated terms must evaluate across the window.
        Rational mid = (*window_.lo + *window_.hi) / Rational(2);
        for (std::int64_t n : {1, 2, 3, 8}) {
            EvalEnv env;
            env.x = Value{mid};
            env.n = Value{Rational(n)};
            (void)eval_ast(seq_->generator, env);
        }
    }
    if (kind_ == Kind::expr)
        (void)eval_at(expr_, (*window_.lo + *window_.hi) / Rational(2));
}

std::vector<Rational> Func::special_points() const {
    std::vector<Rational> out;
    switch (kind_) {
    case Kind::piecewise:
        for (const auto& p : pieces_)
            for (const auto& part : p.domain.parts()) {
                if (part.lo)
                    out.push_back(*part.lo);
                if (part.hi)
                    out.push_back(*part.hi);
            }
        break;
    case Kind::builtin:
        if (bname_ == "step") {
            out.push_back(Rational(0));
        } else if (bname_ == "jumpsum") {
            out = jump_vals_;
        } else {
            auto& en = Enumeration::instance();
            std::size_t cap = std::min<std::size_t>(trunc_, 64);
            for (std::size_t n = 1; n <= cap; ++n)
                out.push_back(en.value(n));
        }
        break;
    default:
        break;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::string Func::describe() const {
    switch (kind_) {
    case Kind::piecewise:
        return "piecewise(" + std::to_string(pieces_.size()) + " pieces)";
    case Kind::limit:
        return "limit(mode=" + seq_mode_name(seq_->mode) + ")";
    case Kind::builtin:
        return bparam_ ? bname_ + "(" + std::to_string(bparam_) + ")" : bname_;
    case Kind::expr:
        return "expr(" + print_ast(expr_) + ")";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Preimage.
// ---------------------------------------------------------------------------

namespace {

// e == a*x + b with exact rational coefficients, when that shape is derivable.
std::optional<std::pair<Rational, Rational>> affine_form(const AstPtr& e) {
    using P = std::pair<Rational, Rational>;
    try {
        switch (e->kind) {
        case NodeKind::constant:
            return P{Rational(0), e->value};
        case NodeKind::variable:
            return e->name == "x" ? std::optional<P>{P{Rational(1), Rational(0)}} : std::nullopt;
        case NodeKind::add: {
            auto a = affine_form(e->kids[0]), b = affine_form(e->kids[1]);
            if (!a || !b)
                return std::nullopt;
            return P{a->first + b->first, a->second + b->second};
        }
        case NodeKind::sub: {
            auto a = affine_form(e->kids[0]), b = affine_form(e->kids[1]);
            if (!a || !b)
                return std::nullopt;
            return P{a->first - b->first, a->second - b->second};
        }
        case NodeKind::neg: {
            auto a = affine_form(e->kids[0]);
            if (!a)
                return std::nullopt;
            return P{-a->first, -a->second};
        }
        case NodeKind::mul: {
            auto a = affine_form(e->kids[0]), b = affine_form(e->kids[1]);
            if (!a || !b)
                return std::nullopt;
            if (a->first.sign() == 0)
                return P{a->second * b->first, a->second * b->second};
            if (b->first.sign() == 0)
                return P{b->second * a->first, b->second * a->second};
            return std::nullopt;
        }
        case NodeKind::div: {
            auto a = affine_form(e->kids[0]), b = affine_form(e->kids[1]);
            if (!a || !b || b->first.sign() != 0 || b->second.sign() == 0)
                return std::nullopt;
            return P{a->first / b->second, a->second / b->second};
        }
        case NodeKind::pow: {
            auto a = affine_form(e->kids[0]), k = affine_form(e->kids[1]);
            if (!a || !k || k->first.sign() != 0 || !k->second.is_integer())
                return std::nullopt;
            if (k->second == Rational(1))
                return a;
            if (k->second.sign() == 0)
                return P{Rational(0), Rational(1)};
            return std::nullopt;
        }
        default:
            return std::nullopt;
        }
    } catch (const OverflowError&) {
        return std::nullopt;
    }
}

// Solve c < a*x + b < d (one side may be absent) as an open interval.
std::optional<Interval> solve_affine_band(const Rational& a, const Rational& b,
                                          const std::optional<Rational>& c, bool c_closed,
                                          const std::optional<Rational>& d, bool d_closed) {
    auto inv = [&](const Rational& y) { return (y - b) / a; };
    std::optional<Rational> lo, hi;
    bool lo_cl = false, hi_cl = false;
    if (a.sign() > 0) {
        if (c) {
            lo = inv(*c);
            lo_cl = c_closed;
        }
        if (d) {
            hi = inv(*d);
            hi_cl = d_closed;
        }
    } else {
        if (d) {
            lo = inv(*d);
            lo_cl = d_closed;
        }
        if (c) {
            hi = inv(*c);
            hi_cl = c_closed;
        }
    }
    if (lo && hi && (*lo > *hi || (*lo == *hi && !(lo_cl && hi_cl))))
        return std::nullopt;
    return Interval::make(lo, lo_cl, hi, hi_cl);
}

bool value_in_set(const Value& v, const RSet& s) {
    if (value_is_rational(v))
        return s.member(std::get<Rational>(v));
    return s.member(value_to_double(v)).value;
}

struct ScanOut {
    std::vector<Interval> kept;
    std::vector<Interval> bands;
    bool used_float = false;
};

/* Certified root localization of e - c over [p, q] for every threshold c in
 * `thresholds`: a segment is discarded once |e(p) - c| > L (q - p) for every c
 * (no crossing of any threshold inside), bisected to width <= 2^-40 around
 * sign changes, and split otherwise.  Depth overrun throws Unresolvable. */
void localize(const AstPtr& e, const Rational& p, const Rational& q,
              const std::vector<Rational>& thresholds, double lip, int depth,
              std::vector<std::pair<Rational, Rational>>& brackets, bool& used_float) {
    if (depth > 48 || brackets.size() > 4096)
        throw Unresolvable("root localization stalled on [" + p.str() + ", " + q.str() +
                           "] (plateau at a threshold value?)");
    Value vp = eval_at(e, p);
    Value vq = eval_at(e, q);
    if (!value_is_rational(vp) || !value_is_rational(vq))
        used_float = true;
    const double fp = value_to_double(vp);
    const double fq = value_to_double(vq);
    const double len = (q - p).to_double();
    const double margin = 1e-14 + lip * len * 1e-9; // float-path slack
    bool maybe = false;
    bool crossing = false;
    for (const Rational& c : thresholds) {
        const double cd = c.to_double();
        if ((fp - cd) * (fq - cd) < 0)
            crossing = true;
        if (std::abs(fp - cd) <= lip * len + margin)
            maybe = true;
    }
    if (!maybe && !crossing)
        return; // certified: no threshold reachable inside the segment
    // Terminate an eighth below the snap width: adjacent flagged cells merge
    // into one band, which must still come out no wider than kSnapTau.
    if ((q - p) * Rational(8) <= kSnapTau) {
        brackets.emplace_back(p, q);
        return;
    }
    Rational mid = (p + q) / Rational(2);
    localize(e, p, mid, thresholds, lip, depth + 1, brackets, used_float);
    localize(e, mid, q, thresholds, lip, depth + 1, brackets, used_float);
}

// Non-affine piece: resolve e^{-1}(V) over one bounded cell.
ScanOut scan_cell(const AstPtr& e, const Interval& cell, const RSet& v) {
    ScanOut out;
    const Rational p = *cell.lo, q = *cell.hi;
    if (cell.is_point()) {
        if (value_in_set(eval_at(e, p), v))
            out.kept.push_back(cell);
        return out;
    }
    Analysis an = analyze(e, p.to_double(), q.to_double());
    if (!an.lip)
        throw Unresolvable("no Lipschitz certificate for piece expression " + print_ast(e));
    std::vector<Rational> thresholds;
    for (const auto& part : v.parts()) {
        if (part.lo)
            thresholds.push_back(*part.lo);
        if (part.hi)
            thresholds.push_back(*part.hi);
    }
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    std::vector<std::pair<Rational, Rational>> brackets;
    localize(e, p, q, thresholds, *an.lip, 0, brackets, out.used_float);
    std::sort(brackets.begin(), brackets.end());
    // Merge touching brackets.
    std::vector<std::pair<Rational, Rational>> merged;
    for (const auto& b : brackets) {
        if (!merged.empty() && b.first <= merged.back().second)
            merged.back().second = max(merged.back().second, b.second);
        else
            merged.push_back(b);
    }
    // Between brackets the membership status is constant; decide by midpoint.
    Rational cursor = p;
    bool cursor_closed = cell.lo_closed;
    auto emit = [&](const Rational& upto, bool upto_closed) {
        if (cursor > upto || (cursor == upto && !(cursor_closed && upto_closed)))
            return;
        Rational mid = (cursor + upto) / Rational(2);
        if (value_in_set(eval_at(e, mid), v))
            out.kept.push_back(Interval::make(cursor, cursor_closed, upto, upto_closed));
        cursor = upto;
    };
    for (const auto& b : merged) {
        emit(b.first, true);
        out.bands.push_back(Interval::closed(b.first, b.second));
        cursor = b.second;
        cursor_closed = true;
    }
    emit(q, cell.hi_closed);
    return out;
}

RSet builtin_preimage(const Func& f, const RSet& v, std::optional<std::string>& note) {
    const std::string& name = f.builtin_name();
    auto& en = Enumeration::instance();
    if (name == "step") {
        std::vector<Interval> parts;
        if (v.member(Rational(0)))
            parts.push_back(Interval::make(std::nullopt, false, Rational(0), true));
        if (v.member(Rational(1)))
            parts.push_back(Interval::make(Rational(0), false, std::nullopt, false));
        return RSet::from_parts(std::move(parts));
    }
    if (name == "dirichlet") {
        const bool in0 = v.member(Rational(0));
        const bool in1 = v.member(Rational(1));
        if (in0 && in1)
            return RSet::whole();
        if (!in0 && !in1)
            return RSet::empty();
        if (in1)
            return RSet::with_enum({}, Polarity::add, f.trunc());
        return RSet::with_enum({Interval::whole()}, Polarity::subtract, f.trunc());
    }
    if (name == "riemann") {
        const bool in0 = v.member(Rational(0));
        std::vector<Rational> wrong_side;
        for (std::size_t n = 1; n <= f.trunc(); ++n) {
            const bool invn = v.member(Rational(1, std::int64_t(n)));
            if (in0 != invn)
                wrong_side.push_back(en.value(n));
        }
        RSet exceptions = RSet::from_points(wrong_side);
        if (!in0)
            return exceptions;
        note = "riemann preimage realized on the truncated enumeration (N=" +
               std::to_string(f.trunc()) + ")";
        return set_difference(RSet::whole(), exceptions);
    }
    // jumpsum: a right-continuous step function; constancy intervals carry the
    // partial sums, so the preimage is a finite union of those intervals.
    std::vector<Interval> parts;
    std::size_t N = f.builtin_param();
    en.ensure(N);
    std::vector<std::pair<Rational, std::size_t>> pts;
    for (std::size_t n = 1; n <= N; ++n)
        pts.emplace_back(en.value(n), n);
    std::sort(pts.begin(), pts.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Rational> jvals, jsums;
    Rational acc(0);
    for (const auto& [val, n] : pts) {
        acc = acc + Rational(1, std::int64_t(1) << n);
        jvals.push_back(val);
        jsums.push_back(acc);
    }
    if (v.member(Rational(0)))
        parts.push_back(Interval::make(std::nullopt, false, jvals.front(), false));
    for (std::size_t i = 0; i < jvals.size(); ++i) {
        if (!v.member(jsums[i]))
            continue;
        if (i + 1 < jvals.size())
            parts.push_back(Interval::make(jvals[i], true, jvals[i + 1], false));
        else
            parts.push_back(Interval::make(jvals[i], true, std::nullopt, false));
    }
    return RSet::from_parts(std::move(parts));
}

} // namespace

namespace {

Preimage preimage_core(const Func& f, const RSet& v, bool require_open) {
    if (f.kind() == Func::Kind::limit)
        throw InputError("preimage of a limit variant is not supported");
    if (require_open && !v.is_empty() && !v.classify().open)
        throw InputError("preimage target must be an open set");
    if (v.enum_part() && f.kind() != Func::Kind::builtin)
        throw InputError("preimage target with an enumeration part needs a builtin");

    Preimage out;
    if (v.is_empty()) {
        out.set = RSet::empty();
        out.tags = out.set.classify();
        return out;
    }

    if (f.kind() == Func::Kind::builtin) {
        out.set = builtin_preimage(f, v, out.note);
        out.tags = out.set.classify();
        return out;
    }

    // Piecewise / expr: per-piece resolution.
    std::vector<PieceFn> pieces;
    if (f.kind() == Func::Kind::expr)
        pieces.push_back(PieceFn{RSet::whole(), f.expr_ast()});
    else
        pieces = f.pieces();

    RSet acc = RSet::empty();
    bool any_float = false;
    bool window_clipped = false;
    for (const auto& piece : pieces) {
        const AstPtr& e = piece.expr;
        if (!uses_var(e, "x")) {
            if (value_in_set(eval_at(e, Rational(0)), v))
                acc = set_union(acc, piece.domain);
            continue;
        }
        if (auto ab = affine_form(e)) {
            const auto& [a, b] = *ab;
            if (a.sign() == 0) {
                if (v.member(b))
                    acc = set_union(acc, piece.domain);
                continue;
            }
            std::vector<Interval> solved;
            for (const auto& band : v.parts())
                if (auto iv = solve_affine_band(a, b, band.lo, band.lo_closed, band.hi,
                                                band.hi_closed))
                    solved.push_back(*iv);
            acc = set_union(acc, set_intersect(RSet::from_parts(std::move(solved)), piece.domain));
            continue;
        }
        // General continuous piece: certified scan over the window portion.
        window_clipped = true;
        RSet cells = set_intersect(piece.domain, RSet(f.window()));
        for (const auto& cell : cells.parts()) {
            ScanOut sc = scan_cell(e, cell, v);
            any_float = any_float || sc.used_float;
            acc = set_union(acc, RSet::from_parts(std::move(sc.kept)));
            out.uncertain.insert(out.uncertain.end(), sc.bands.begin(), sc.bands.end());
        }
    }
    out.set = std::move(acc);
    out.tags = out.set.classify();
    std::string note;
    if (window_clipped)
        note = "non-affine pieces resolved within the window only";
    if (any_float)
        note += std::string(note.empty() ? "" : "; ") + "float-certified thresholds present";
    if (!note.empty())
        out.note = note;
    return out;
}

} // namespace

Preimage preimage(const Func& f, const RSet& v) { return preimage_core(f, v, true); }

Preimage preimage_general(const Func& f, const RSet& v) { return preimage_core(f, v, false); }

// ---------------------------------------------------------------------------
// Oscillation.
// ---------------------------------------------------------------------------

OscillationEstimate oscillation(const Func& f, const Rational& x, int depth,
                                std::size_t samples, std::uint64_t seed) {
    if (depth < 1)
        throw InputError("oscillation depth must be >= 1");
    OscillationEstimate est;
    est.x = x;
    est.radii.resize(std::size_t(depth));
    est.est.resize(std::size_t(depth));

    const bool enum_backed =
        f.kind() == Func::Kind::builtin && f.builtin_name() != "step";
    const double xd = x.to_double();
    double vmin = 0, vmax = 0;
    bool have = false;
    auto take = [&](double val) {
        if (!have) {
            vmin = vmax = val;
            have = true;
        } else {
            vmin = std::min(vmin, val);
            vmax = std::max(vmax, val);
        }
    };
    auto feed = [&](double p) {
        if (!std::isfinite(p))
            return;
        // Stay inside the working window so piecewise cover holes do not
        // abort the estimate.
        double wlo = f.window().lo->to_double();
        double whi = f.window().hi->to_double();
        if (p < wlo || p > whi)
            return;
        try {
            take(f.evaluate(p).to_double());
            // Every sample is a dyadic rational; for enumeration-backed
            // builtins the exact channel supplies the tail-member value at
            // the same point (mixed sampling: a non-hit double stands in for
            // an irrational, the snapped rational witnesses the tail).
            if (enum_backed)
                take(f.evaluate(Rational::snap(p)).to_double());
        } catch (const OutsideCover&) {
            return;
        } catch (const DomainError&) {
            return;
        }
    };

    auto& en = Enumeration::instance();
    std::vector<Rational> specials = f.special_points();

    for (int k = depth; k >= 1; --k) {
        const double w = std::ldexp(1.0, -k);
        const double lo = xd - w, hi = xd + w;
        SplitMix64 rng(derive_seed(seed, std::uint64_t(k)));
        feed(xd);
        feed(xd - w / 2);
        feed(xd + w / 2);
        feed(xd - w * (1.0 - 1.0 / 512));
        feed(xd + w * (1.0 - 1.0 / 512));
        for (std::size_t i = 0; i < samples; ++i)
            feed(lo + (hi - lo) * rng.next_unit());
        for (const auto& s : specials) {
            const double sd = s.to_double();
            if (sd > lo && sd < hi)
                feed(sd);
        }
        if (enum_backed) {
            // Adversarial: enumerated points inside the window, plus the
            // smallest indices (largest riemann values) among them.
            Rational rlo = Rational::snap(lo), rhi = Rational::snap(hi);
            for (std::size_t idx : en.indices_in(f.trunc(), rlo, rhi, 8))
                feed(en.value(idx).to_double());
            for (std::size_t idx : en.smallest_indices_in(f.trunc(), rlo, rhi, 4))
                feed(en.value(idx).to_double());
        }
        est.radii[std::size_t(k - 1)] = w;
        est.est[std::size_t(k - 1)] = have ? vmax - vmin : 0.0;
    }
    const double tau = kSnapTau.to_double();
    est.monotone = true;
    for (int k = 1; k < depth; ++k)
        if (est.est[std::size_t(k)] > est.est[std::size_t(k - 1)] + tau)
            est.monotone = false;
    return est;
}

// ---------------------------------------------------------------------------
// Barely-continuity scan.
// ---------------------------------------------------------------------------

namespace {

// Restriction oscillation estimate at x: spread of f over points of F near x,
// taken at the deepest radius that still captures a second restriction point.
double restriction_estimate(const Func& f, const RSet& F, const Rational& x,
                            std::uint64_t seed) {
    auto& en = Enumeration::instance();
    const bool enum_backed =
        f.kind() == Func::Kind::builtin && f.builtin_name() != "step";
    double best = 0.0;
    for (int k = 1; k <= 16; ++k) {
        // Exact window bounds: x has a moderate denominator (enumeration
        // values, part endpoints, level-24 picks), so x +- 2^-k plus one
        // more level-30 pick below stays inside int64.
        const Rational w(1, std::int64_t(1) << k);
        Rational rlo = x - w, rhi = x + w;
        double vmin = 0, vmax = 0;
        bool have = false;
        std::size_t others = 0;
        auto take = [&](double val) {
            if (!have) {
                vmin = vmax = val;
                have = true;
            } else {
                vmin = std::min(vmin, val);
                vmax = std::max(vmax, val);
            }
        };
        // Mixed sampling at rational points of F: the float channel realizes
        // the truncated function, the exact channel adds the tail-member
        // value for enumeration-backed builtins.
        auto feed = [&](const Rational& p, bool is_x) {
            if (!F.member(p))
                return;
            try {
                take(f.evaluate(p.to_double()).to_double());
                if (enum_backed)
                    take(f.evaluate(p).to_double());
            } catch (const OutsideCover&) {
                return;
            } catch (const DomainError&) {
                return;
            }
            if (!is_x)
                ++others;
        };
        feed(x, true);
        if (F.enum_part() && F.enum_part()->polarity == Polarity::add) {
            for (std::size_t idx : en.indices_in(F.enum_part()->trunc, rlo, rhi, 16))
                if (en.value(idx) != x)
                    feed(en.value(idx), false);
            for (std::size_t idx : en.smallest_indices_in(F.enum_part()->trunc, rlo, rhi, 4))
                if (en.value(idx) != x)
                    feed(en.value(idx), false);
        }
        SplitMix64 rng(derive_seed(seed, std::uint64_t(k)));
        std::vector<Interval> spans(F.parts().begin(), F.parts().end());
        if (F.enum_part() && F.enum_part()->polarity == Polarity::add)
            spans.push_back(Interval::open(Rational(0), Rational(1))); // tail zone
        for (const auto& part : spans) {
            Interval clipped = part;
            if (!clipped.lo || *clipped.lo < rlo)
                clipped.lo = rlo;
            if (!clipped.hi || *clipped.hi > rhi)
                clipped.hi = rhi;
            if (*clipped.lo > *clipped.hi)
                continue;
            if (part.lo && part.lo == clipped.lo && *part.lo != x)
                feed(*part.lo, false);
            if (part.hi && part.hi == clipped.hi && *part.hi != x)
                feed(*part.hi, false);
            for (int i = 0; i < 12; ++i) {
                Rational p = dyadic_pick(rng, *clipped.lo, *clipped.hi, 30);
                if (p != x)
                    feed(p, false);
            }
        }
        if (others == 0)
            return best; // window isolates x inside F: estimate settles
        best = vmax - vmin;
    }
    return best;
}

} // namespace

ScanVerdict barely_continuity_scan(const Func& f, const RSet& F, const Rational& eps,
                                   std::size_t budget, std::uint64_t seed) {
    if (F.is_empty())
        throw InputError("scan target set is empty");
    if (eps.sign() <= 0)
        throw InputError("eps must be positive");
    ScanVerdict verdict;
    verdict.label = F.enum_part() ? "truncated-subspace" : "exact-subsets";

    const Interval& win = f.window();
    std::vector<Rational> candidates;
    auto push = [&](const Rational& p) {
        if (candidates.size() >= budget)
            return;
        if (!win.contains(p))
            return;
        if (!F.member(p))
            return;
        candidates.push_back(p);
    };

    if (F.enum_part() && F.enum_part()->polarity == Polarity::add) {
        auto& en = Enumeration::instance();
        std::size_t cap = std::min(F.enum_part()->trunc, budget);
        for (std::size_t n = 1; n <= cap; ++n)
            push(en.value(n)); // index order: small indices first
    }
    SplitMix64 rng(derive_seed(seed, 0xF00DULL));
    for (const auto& part : F.parts()) {
        Interval clipped = part;
        if (!clipped.lo || *clipped.lo < *win.lo)
            clipped.lo = *win.lo;
        if (!clipped.hi || *clipped.hi > *win.hi)
            clipped.hi = *win.hi;
        if (*clipped.lo > *clipped.hi)
            continue;
        push(*clipped.lo);
        push(*clipped.hi);
        std::size_t quota = budget / std::max<std::size_t>(1, F.parts().size());
        for (std::size_t i = 0; i < quota && candidates.size() < budget; ++i)
            push(dyadic_pick(rng, *clipped.lo, *clipped.hi, 24));
    }

    const double eps_d = eps.to_double();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        ++verdict.tested;
        double est = restriction_estimate(f, F, candidates[i], derive_seed(seed, i + 1));
        if (est < eps_d) {
            verdict.found = true;
            verdict.witness = candidates[i];
            verdict.est = est;
            return verdict;
        }
    }
    return verdict;
}

} // namespace baire
