// SPDX-License-Identifier: Apache-2.0
#include "baire/ast.hpp"

#include <algorithm>
#include <cmath>

#include "baire/errors.hpp"

namespace baire {

double value_to_double(const Value& v) {
    if (std::holds_alternative<Rational>(v))
        return std::get<Rational>(v).to_double();
    return std::get<double>(v);
}

bool value_is_rational(const Value& v) { return std::holds_alternative<Rational>(v); }

bool value_close(const Value& a, const Value& b, const Rational& tol) {
    if (value_is_rational(a) && value_is_rational(b))
        return std::get<Rational>(a) == std::get<Rational>(b);
    return std::fabs(value_to_double(a) - value_to_double(b)) <= tol.to_double();
}

AstPtr make_const(const Rational& r) {
    auto n = std::make_shared<Ast>();
    n->kind = NodeKind::constant;
    n->value = r;
    return n;
}

AstPtr make_var(const std::string& name) {
    auto n = std::make_shared<Ast>();
    n->kind = NodeKind::variable;
    n->name = name;
    return n;
}

AstPtr make_node(NodeKind k, std::vector<AstPtr> kids) {
    auto n = std::make_shared<Ast>();
    n->kind = k;
    n->kids = std::move(kids);
    return n;
}

AstPtr make_dist(RSet s, AstPtr arg) {
    auto n = std::make_shared<Ast>();
    n->kind = NodeKind::dist;
    n->set = std::move(s);
    n->kids = {std::move(arg)};
    return n;
}

AstPtr make_call(std::string name, AstPtr arg) {
    auto n = std::make_shared<Ast>();
    n->kind = NodeKind::call;
    n->name = std::move(name);
    n->kids = {std::move(arg)};
    return n;
}

namespace {

/* Exact when both sides are rational and int64 suffices; overflow falls back
 * to binary64 so long campaigns degrade gracefully instead of aborting. */
template <typename RatOp, typename DblOp>
Value arith(const Value& a, const Value& b, RatOp rop, DblOp dop) {
    if (value_is_rational(a) && value_is_rational(b)) {
        try {
            return rop(std::get<Rational>(a), std::get<Rational>(b));
        } catch (const OverflowError&) {
            // fall through to double
        }
    }
    return dop(value_to_double(a), value_to_double(b));
}

Value eval_pow(const Value& base, const Value& expv) {
    if (value_is_rational(expv) && std::get<Rational>(expv).is_integer()) {
        std::int64_t k = std::get<Rational>(expv).num();
        if (value_is_rational(base)) {
            const Rational& b = std::get<Rational>(base);
            if (b.is_zero() && k < 0)
                throw DomainError("zero to a negative power");
            try {
                return b.pow(k);
            } catch (const OverflowError&) {
                // fall through to double
            }
        }
        double b = value_to_double(base);
        if (b == 0.0 && k < 0)
            throw DomainError("zero to a negative power");
        return std::pow(b, (double)k);
    }
    double b = value_to_double(base), e = value_to_double(expv);
    if (b < 0.0)
        throw DomainError("negative base with non-integer exponent");
    if (b == 0.0 && e <= 0.0)
        throw DomainError("zero to a non-positive non-integer power");
    return std::pow(b, e);
}

Value eval_min(const Value& a, const Value& b) {
    if (value_is_rational(a) && value_is_rational(b))
        return min(std::get<Rational>(a), std::get<Rational>(b));
    return std::min(value_to_double(a), value_to_double(b));
}

Value eval_max(const Value& a, const Value& b) {
    if (value_is_rational(a) && value_is_rational(b))
        return max(std::get<Rational>(a), std::get<Rational>(b));
    return std::max(value_to_double(a), value_to_double(b));
}

int prec_of(NodeKind k) {
    switch (k) {
    case NodeKind::add:
    case NodeKind::sub:
        return 1;
    case NodeKind::mul:
    case NodeKind::div:
        return 2;
    case NodeKind::neg:
        return 3;
    case NodeKind::pow:
        return 4;
    default:
        return 5;
    }
}

void print_rec(const AstPtr& e, int parent_prec, std::string& out) {
    int p = prec_of(e->kind);
    // A negative constant prints with a leading '-', so give it the same
    // precedence as a neg node; otherwise "2^-1" would reparse as a different
    // tree than it prints back.
    if (e->kind == NodeKind::constant && e->value.sign() < 0)
        p = prec_of(NodeKind::neg);
    const bool wrap = p < parent_prec;
    if (wrap)
        out += '(';
    switch (e->kind) {
    case NodeKind::constant:
        out += e->value.str();
        break;
    case NodeKind::variable:
        out += e->name;
        break;
    case NodeKind::add:
    case NodeKind::sub:
    case NodeKind::mul:
    case NodeKind::div: {
        // Division is spaced: a tight "9/2" is one rational token under
        // maximal munch, so "9/2^x" would relex as (9/2)^x.
        const char* op = e->kind == NodeKind::add   ? " + "
                         : e->kind == NodeKind::sub ? " - "
                         : e->kind == NodeKind::mul ? "*"
                                                    : " / ";
        print_rec(e->kids[0], p, out);
        out += op;
        print_rec(e->kids[1], p + 1, out); // left-assoc: parenthesize equal-prec right child
        break;
    }
    case NodeKind::pow:
        print_rec(e->kids[0], p + 1, out); // right-assoc
        out += '^';
        print_rec(e->kids[1], p, out);
        break;
    case NodeKind::neg:
        out += '-';
        print_rec(e->kids[0], p, out);
        break;
    case NodeKind::min:
    case NodeKind::max:
    case NodeKind::abs:
    case NodeKind::sin:
    case NodeKind::cos:
    case NodeKind::exp:
    case NodeKind::clamp: {
        const char* name = e->kind == NodeKind::min   ? "min"
                           : e->kind == NodeKind::max ? "max"
                           : e->kind == NodeKind::abs ? "abs"
                           : e->kind == NodeKind::sin ? "sin"
                           : e->kind == NodeKind::cos ? "cos"
                           : e->kind == NodeKind::exp ? "exp"
                                                      : "clamp";
        out += name;
        out += '(';
        for (std::size_t i = 0; i < e->kids.size(); ++i) {
            if (i)
                out += ", ";
            print_rec(e->kids[i], 0, out);
        }
        out += ')';
        break;
    }
    case NodeKind::dist:
        out += "dist(";
        out += e->set.str();
        out += ", ";
        print_rec(e->kids[0], 0, out);
        out += ')';
        break;
    case NodeKind::call:
        out += e->name;
        out += '(';
        print_rec(e->kids[0], 0, out);
        out += ')';
        break;
    }
    if (wrap)
        out += ')';
}

} // namespace

Value eval_ast(const AstPtr& e, const EvalEnv& env) {
    switch (e->kind) {
    case NodeKind::constant:
        return e->value;
    case NodeKind::variable:
        if (e->name == "x")
            return env.x;
        if (e->name == "n") {
            if (!env.n)
                throw DomainError("variable n outside a sequence context");
            return *env.n;
        }
        throw DomainError("unbound variable " + e->name);
    case NodeKind::add:
        return arith(eval_ast(e->kids[0], env), eval_ast(e->kids[1], env),
                     [](const Rational& a, const Rational& b) { return a + b; },
                     [](double a, double b) { return a + b; });
    case NodeKind::sub:
        return arith(eval_ast(e->kids[0], env), eval_ast(e->kids[1], env),
                     [](const Rational& a, const Rational& b) { return a - b; },
                     [](double a, double b) { return a - b; });
    case NodeKind::mul:
        return arith(eval_ast(e->kids[0], env), eval_ast(e->kids[1], env),
                     [](const Rational& a, const Rational& b) { return a * b; },
                     [](double a, double b) { return a * b; });
    case NodeKind::div: {
        Value a = eval_ast(e->kids[0], env);
        Value b = eval_ast(e->kids[1], env);
        if (value_is_rational(b) ? std::get<Rational>(b).is_zero()
                                 : value_to_double(b) == 0.0)
            throw DomainError("division by zero");
        return arith(a, b,
                     [](const Rational& x, const Rational& y) { return x / y; },
                     [](double x, double y) { return x / y; });
    }
    case NodeKind::pow:
        return eval_pow(eval_ast(e->kids[0], env), eval_ast(e->kids[1], env));
    case NodeKind::neg: {
        Value v = eval_ast(e->kids[0], env);
        if (value_is_rational(v)) {
            try {
                return -std::get<Rational>(v);
            } catch (const OverflowError&) {
            }
        }
        return -value_to_double(v);
    }
    case NodeKind::min:
        return eval_min(eval_ast(e->kids[0], env), eval_ast(e->kids[1], env));
    case NodeKind::max:
        return eval_max(eval_ast(e->kids[0], env), eval_ast(e->kids[1], env));
    case NodeKind::abs: {
        Value v = eval_ast(e->kids[0], env);
        if (value_is_rational(v))
            return std::get<Rational>(v).abs();
        return std::fabs(value_to_double(v));
    }
    case NodeKind::sin:
        return std::sin(value_to_double(eval_ast(e->kids[0], env)));
    case NodeKind::cos:
        return std::cos(value_to_double(eval_ast(e->kids[0], env)));
    case NodeKind::exp:
        return std::exp(value_to_double(eval_ast(e->kids[0], env)));
    case NodeKind::clamp: {
        Value v = eval_ast(e->kids[0], env);
        Value lo = eval_ast(e->kids[1], env);
        Value hi = eval_ast(e->kids[2], env);
        return eval_max(lo, eval_min(v, hi));
    }
    case NodeKind::dist: {
        Value v = eval_ast(e->kids[0], env);
        if (value_is_rational(v))
            return e->set.distance(std::get<Rational>(v));
        return e->set.distance(Rational::snap(value_to_double(v))).to_double();
    }
    case NodeKind::call: {
        if (!env.calls)
            throw DomainError("call to " + e->name + " with no resolver");
        return (*env.calls)(e->name, eval_ast(e->kids[0], env));
    }
    }
    throw Error("unreachable ast kind");
}

Value eval_at(const AstPtr& e, const Rational& x) {
    EvalEnv env{Value{x}, std::nullopt, nullptr};
    return eval_ast(e, env);
}

std::string print_ast(const AstPtr& e) {
    std::string out;
    print_rec(e, 0, out);
    return out;
}

bool ast_equal(const AstPtr& a, const AstPtr& b) {
    if (a->kind != b->kind || a->kids.size() != b->kids.size())
        return false;
    switch (a->kind) {
    case NodeKind::constant:
        if (!(a->value == b->value))
            return false;
        break;
    case NodeKind::variable:
    case NodeKind::call:
        if (a->name != b->name)
            return false;
        break;
    case NodeKind::dist:
        if (!(a->set == b->set))
            return false;
        break;
    default:
        break;
    }
    for (std::size_t i = 0; i < a->kids.size(); ++i)
        if (!ast_equal(a->kids[i], b->kids[i]))
            return false;
    return true;
}

bool continuity_safe(const AstPtr& e) {
    if (e->kind == NodeKind::call)
        return false;
    return std::all_of(e->kids.begin(), e->kids.end(),
                       [](const AstPtr& k) { return continuity_safe(k); });
}

bool uses_var(const AstPtr& e, const std::string& name) {
    if (e->kind == NodeKind::variable)
        return e->name == name;
    return std::any_of(e->kids.begin(), e->kids.end(),
                       [&](const AstPtr& k) { return uses_var(k, name); });
}

AstPtr substitute_n(const AstPtr& e, const Rational& n) {
    if (e->kind == NodeKind::variable && e->name == "n")
        return make_const(n);
    if (e->kids.empty())
        return e;
    auto copy = std::make_shared<Ast>(*e);
    for (auto& k : copy->kids)
        k = substitute_n(k, n);
    return copy;
}

namespace {

using Rng = std::pair<double, double>;

Analysis combine_linear(const Analysis& a, const Analysis& b, bool is_sub) {
    Analysis out;
    if (a.range && b.range)
        out.range = is_sub ? Rng{a.range->first - b.range->second,
                                 a.range->second - b.range->first}
                           : Rng{a.range->first + b.range->first,
                                 a.range->second + b.range->second};
    if (a.lip && b.lip)
        out.lip = *a.lip + *b.lip;
    return out;
}

double sup_abs(const Rng& r) { return std::max(std::fabs(r.first), std::fabs(r.second)); }

} // namespace

Analysis analyze(const AstPtr& e, double wlo, double whi) {
    switch (e->kind) {
    case NodeKind::constant: {
        double c = e->value.to_double();
        return {Rng{c, c}, 0.0};
    }
    case NodeKind::variable:
        if (e->name == "x")
            return {Rng{wlo, whi}, 1.0};
        return {std::nullopt, std::nullopt}; // n must be substituted first
    case NodeKind::add:
    case NodeKind::sub:
        return combine_linear(analyze(e->kids[0], wlo, whi), analyze(e->kids[1], wlo, whi),
                              e->kind == NodeKind::sub);
    case NodeKind::neg: {
        Analysis a = analyze(e->kids[0], wlo, whi);
        Analysis out;
        if (a.range)
            out.range = Rng{-a.range->second, -a.range->first};
        out.lip = a.lip;
        return out;
    }
    case NodeKind::mul: {
        Analysis a = analyze(e->kids[0], wlo, whi);
        Analysis b = analyze(e->kids[1], wlo, whi);
        Analysis out;
        if (a.range && b.range) {
            const double c[] = {a.range->first * b.range->first,
                                a.range->first * b.range->second,
                                a.range->second * b.range->first,
                                a.range->second * b.range->second};
            out.range = Rng{*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
            if (a.lip && b.lip)
                out.lip = *a.lip * sup_abs(*b.range) + *b.lip * sup_abs(*a.range);
        }
        return out;
    }
    case NodeKind::div: {
        Analysis a = analyze(e->kids[0], wlo, whi);
        Analysis b = analyze(e->kids[1], wlo, whi);
        Analysis out;
        if (a.range && b.range &&
            (b.range->first > 0.0 || b.range->second < 0.0)) {
            const double c[] = {a.range->first / b.range->first,
                                a.range->first / b.range->second,
                                a.range->second / b.range->first,
                                a.range->second / b.range->second};
            out.range = Rng{*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
            double inf_den = std::min(std::fabs(b.range->first), std::fabs(b.range->second));
            if (a.lip && b.lip)
                out.lip = (*a.lip * sup_abs(*b.range) + *b.lip * sup_abs(*a.range)) /
                          (inf_den * inf_den);
        }
        return out;
    }
    case NodeKind::pow: {
        // Only constant integer exponents are analyzable.
        if (e->kids[1]->kind != NodeKind::constant || !e->kids[1]->value.is_integer())
            return {std::nullopt, std::nullopt};
        std::int64_t k = e->kids[1]->value.num();
        if (k < 0 || k > 64)
            return {std::nullopt, std::nullopt};
        Analysis acc{Rng{1.0, 1.0}, 0.0};
        Analysis base = analyze(e->kids[0], wlo, whi);
        for (std::int64_t i = 0; i < k; ++i) {
            Analysis out;
            if (acc.range && base.range) {
                const double c[] = {acc.range->first * base.range->first,
                                    acc.range->first * base.range->second,
                                    acc.range->second * base.range->first,
                                    acc.range->second * base.range->second};
                out.range = Rng{*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
                if (acc.lip && base.lip)
                    out.lip = *acc.lip * sup_abs(*base.range) + *base.lip * sup_abs(*acc.range);
            }
            acc = out;
        }
        return acc;
    }
    case NodeKind::min:
    case NodeKind::max: {
        Analysis a = analyze(e->kids[0], wlo, whi);
        Analysis b = analyze(e->kids[1], wlo, whi);
        Analysis out;
        if (a.range && b.range) {
            if (e->kind == NodeKind::min)
                out.range = Rng{std::min(a.range->first, b.range->first),
                                std::min(a.range->second, b.range->second)};
            else
                out.range = Rng{std::max(a.range->first, b.range->first),
                                std::max(a.range->second, b.range->second)};
        }
        if (a.lip && b.lip)
            out.lip = std::max(*a.lip, *b.lip);
        return out;
    }
    case NodeKind::abs: {
        Analysis a = analyze(e->kids[0], wlo, whi);
        Analysis out;
        if (a.range) {
            if (a.range->first >= 0.0)
                out.range = a.range;
            else if (a.range->second <= 0.0)
                out.range = Rng{-a.range->second, -a.range->first};
            else
                out.range = Rng{0.0, sup_abs(*a.range)};
        }
        out.lip = a.lip;
        return out;
    }
    case NodeKind::sin:
    case NodeKind::cos: {
        Analysis a = analyze(e->kids[0], wlo, whi);
        return {Rng{-1.0, 1.0}, a.lip};
    }
    case NodeKind::exp: {
        Analysis a = analyze(e->kids[0], wlo, whi);
        Analysis out;
        if (a.range) {
            out.range = Rng{std::exp(a.range->first), std::exp(a.range->second)};
            if (a.lip)
                out.lip = *a.lip * out.range->second;
        }
        return out;
    }
    case NodeKind::clamp: {
        Analysis v = analyze(e->kids[0], wlo, whi);
        Analysis lo = analyze(e->kids[1], wlo, whi);
        Analysis hi = analyze(e->kids[2], wlo, whi);
        Analysis out;
        if (v.range && lo.range && hi.range)
            out.range = Rng{std::min({v.range->first, lo.range->first, hi.range->first}),
                            std::max({v.range->second, lo.range->second, hi.range->second})};
        if (v.lip && lo.lip && hi.lip)
            out.lip = *v.lip + *lo.lip + *hi.lip;
        return out;
    }
    case NodeKind::dist: {
        Analysis a = analyze(e->kids[0], wlo, whi);
        Analysis out;
        out.range = Rng{0.0, kDeltaMax.to_double()};
        out.lip = a.lip; // distance to a set is 1-Lipschitz
        return out;
    }
    case NodeKind::call:
        return {std::nullopt, std::nullopt};
    }
    return {std::nullopt, std::nullopt};
}

} // namespace baire
