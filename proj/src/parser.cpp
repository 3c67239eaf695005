// SPDX-License-Identifier: Apache-2.0
#include "baire/parser.hpp"

#include <algorithm>

#include "baire/errors.hpp"
#include "baire/lexer.hpp"

namespace baire {

std::string seq_mode_name(SeqMode m) {
    switch (m) {
    case SeqMode::pointwise:
        return "pointwise";
    case SeqMode::stable:
        return "stable";
    case SeqMode::uniform:
        return "uniform";
    }
    return "?";
}

namespace {

constexpr std::size_t kDefaultEnumTrunc = 1000;

class Parser {
  public:
    explicit Parser(std::string_view src) : toks_(tokenize(src)) {}

    AstPtr expr();
    RSet rset();
    Program program();

    void expect_eof() {
        if (!at(TokKind::eof))
            fail("end of input");
    }

  private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;

    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    const Token& get() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
    bool at(TokKind k) const { return peek().kind == k; }
    bool at(TokKind k, std::string_view lex) const {
        return peek().kind == k && peek().lexeme == lex;
    }
    bool accept(TokKind k, std::string_view lex) {
        if (!at(k, lex))
            return false;
        ++pos_;
        return true;
    }
    void expect(TokKind k, std::string_view lex, const char* what) {
        if (!accept(k, lex))
            fail(what);
    }
    [[noreturn]] void fail(const std::string& expected) const {
        const Token& t = peek();
        std::string found = t.kind == TokKind::eof ? "end of input" : "'" + t.lexeme + "'";
        throw ParseError("expected " + expected + " at byte " + std::to_string(t.offset) +
                         ", found " + found);
    }

    Rational number_token() {
        if (!at(TokKind::number))
            fail("a number");
        const Token& t = peek();
        auto r = Rational::parse(t.lexeme);
        if (!r)
            throw ParseError("invalid rational literal '" + t.lexeme + "' at byte " +
                             std::to_string(t.offset));
        get();
        return *r;
    }

    Rational signed_number() {
        bool neg = accept(TokKind::op, "-");
        Rational v = number_token();
        return neg ? -v : v;
    }

    AstPtr sum();
    AstPtr term();
    AstPtr unary();
    AstPtr power();
    AstPtr primary();

    std::optional<Rational> endpoint(bool lo_side);
    Interval interval_literal();
    bool q01_ahead() const {
        return at(TokKind::ident, "Q") && peek(1).kind == TokKind::paren &&
               peek(1).lexeme == "(";
    }
    void consume_q01();

    PieceDef piece();
    FuncDef func_form();
    LimitDef limit_form();
    BuiltinDef builtin_form();
};

AstPtr Parser::expr() { return sum(); }

AstPtr Parser::sum() {
    AstPtr left = term();
    for (;;) {
        if (accept(TokKind::op, "+"))
            left = make_node(NodeKind::add, {left, term()});
        else if (accept(TokKind::op, "-"))
            left = make_node(NodeKind::sub, {left, term()});
        else
            return left;
    }
}

AstPtr Parser::term() {
    AstPtr left = unary();
    for (;;) {
        if (accept(TokKind::op, "*"))
            left = make_node(NodeKind::mul, {left, unary()});
        else if (accept(TokKind::op, "/"))
            left = make_node(NodeKind::div, {left, unary()});
        else
            return left;
    }
}

AstPtr Parser::unary() {
    if (accept(TokKind::op, "-"))
        return make_node(NodeKind::neg, {unary()});
    return power();
}

AstPtr Parser::power() {
    AstPtr base = primary();
    if (accept(TokKind::op, "^"))
        return make_node(NodeKind::pow, {base, unary()}); // right-assoc, allows 2^-3
    return base;
}

AstPtr Parser::primary() {
    if (at(TokKind::number))
        return make_const(number_token());
    if (accept(TokKind::paren, "(")) {
        AstPtr inner = sum();
        expect(TokKind::paren, ")", "')'");
        return inner;
    }
    if (!at(TokKind::ident))
        fail("a number, variable, function call or '('");
    std::string name = get().lexeme;
    if (name == "x" || name == "n")
        return make_var(name);

    struct Fixed {
        const char* name;
        NodeKind kind;
        std::size_t arity;
    };
    static const Fixed fixed[] = {{"min", NodeKind::min, 2}, {"max", NodeKind::max, 2},
                                  {"abs", NodeKind::abs, 1}, {"sin", NodeKind::sin, 1},
                                  {"cos", NodeKind::cos, 1}, {"exp", NodeKind::exp, 1},
                                  {"clamp", NodeKind::clamp, 3}};
    for (const Fixed& f : fixed) {
        if (name != f.name)
            continue;
        expect(TokKind::paren, "(", "'(' after function name");
        std::vector<AstPtr> kids;
        for (std::size_t i = 0; i < f.arity; ++i) {
            if (i)
                expect(TokKind::comma, ",", "','");
            kids.push_back(sum());
        }
        expect(TokKind::paren, ")", "')'");
        return make_node(f.kind, std::move(kids));
    }
    if (name == "dist") {
        expect(TokKind::paren, "(", "'(' after dist");
        RSet s = rset();
        AstPtr arg = accept(TokKind::comma, ",") ? sum() : make_var("x");
        expect(TokKind::paren, ")", "')'");
        return make_dist(std::move(s), std::move(arg));
    }
    if (at(TokKind::paren, "(")) { // call to a named function
        get();
        AstPtr arg = sum();
        expect(TokKind::paren, ")", "')'");
        return make_call(std::move(name), std::move(arg));
    }
    throw ParseError("unknown variable '" + name + "' at byte " +
                     std::to_string(peek().offset) + " (only x and n are bound)");
}

std::optional<Rational> Parser::endpoint(bool lo_side) {
    bool negate = false;
    if (accept(TokKind::op, "-"))
        negate = true;
    else if (accept(TokKind::op, "+"))
        negate = false;
    if (accept(TokKind::ident, "inf")) {
        if (lo_side && !negate)
            fail("'-inf' on the lower endpoint");
        if (!lo_side && negate)
            fail("'+inf' on the upper endpoint");
        return std::nullopt;
    }
    Rational v = number_token();
    return negate ? -v : v;
}

Interval Parser::interval_literal() {
    bool lo_closed;
    if (accept(TokKind::paren, "["))
        lo_closed = true;
    else if (accept(TokKind::paren, "("))
        lo_closed = false;
    else {
        fail("'[' or '('");
    }
    auto lo = endpoint(true);
    expect(TokKind::comma, ",", "','");
    auto hi = endpoint(false);
    bool hi_closed;
    if (accept(TokKind::paren, "]"))
        hi_closed = true;
    else if (accept(TokKind::paren, ")"))
        hi_closed = false;
    else {
        fail("']' or ')'");
    }
    if (!lo && lo_closed)
        throw ParseError("an infinite endpoint must be open");
    if (!hi && hi_closed)
        throw ParseError("an infinite endpoint must be open");
    if (lo && hi && (*lo > *hi || (*lo == *hi && !(lo_closed && hi_closed))))
        throw ParseError("empty interval literal");
    return Interval::make(lo, lo_closed, hi, hi_closed);
}

void Parser::consume_q01() {
    expect(TokKind::ident, "Q", "'Q'");
    expect(TokKind::paren, "(", "'('");
    if (!(number_token() == Rational(0)))
        fail("'0'");
    expect(TokKind::comma, ",", "','");
    if (!(number_token() == Rational(1)))
        fail("'1'");
    expect(TokKind::paren, ")", "')'");
}

RSet Parser::rset() {
    if (at(TokKind::paren, "{") && peek(1).kind == TokKind::paren && peek(1).lexeme == "}") {
        pos_ += 2;
        return RSet::empty();
    }
    std::vector<Interval> parts;
    bool add_tail = false;
    std::size_t trunc = kDefaultEnumTrunc;
    for (;;) {
        if (accept(TokKind::paren, "{")) {
            // Finite point set: {a, b, ...}.
            parts.push_back(Interval::point(signed_number()));
            while (accept(TokKind::comma, ","))
                parts.push_back(Interval::point(signed_number()));
            expect(TokKind::paren, "}", "'}' or ','");
        } else if (q01_ahead()) {
            consume_q01();
            add_tail = true;
        } else if (at(TokKind::ident, "rationals")) {
            get();
            expect(TokKind::paren, "(", "'('");
            Rational nval = number_token();
            if (!nval.is_integer() || nval.sign() <= 0)
                fail("a positive integer truncation");
            trunc = (std::size_t)nval.num();
            bool tail = false;
            if (accept(TokKind::comma, ",")) {
                expect(TokKind::ident, "tail", "'tail'");
                tail = true;
            }
            expect(TokKind::paren, ")", "')'");
            if (tail) {
                add_tail = true;
            } else {
                RSet pts = RSet::enum_prefix(trunc, false);
                parts.insert(parts.end(), pts.parts().begin(), pts.parts().end());
            }
        } else {
            parts.push_back(interval_literal());
        }
        if (!accept(TokKind::ident, "u"))
            break;
    }
    bool sub_tail = false;
    if (accept(TokKind::op, "\\")) {
        consume_q01();
        sub_tail = true;
    }
    if (add_tail && sub_tail)
        throw ParseError("a set cannot both adjoin and remove the rational tail");
    if (add_tail)
        return RSet::with_enum(std::move(parts), Polarity::add, trunc);
    if (sub_tail)
        return RSet::with_enum(std::move(parts), Polarity::subtract, trunc);
    return RSet::from_parts(std::move(parts));
}

PieceDef Parser::piece() {
    expect(TokKind::keyword, "piece", "'piece'");
    expect(TokKind::keyword, "on", "'on'");
    PieceDef p;
    p.domain = rset();
    expect(TokKind::op, ":", "':'");
    p.expr = sum();
    expect(TokKind::op, ";", "';' after the piece expression");
    if (!continuity_safe(p.expr))
        throw ParseError("piece expression uses a primitive outside the continuity-safe subset");
    if (uses_var(p.expr, "n"))
        throw ParseError("piece expressions are functions of x alone; n is bound only in seq terms");
    return p;
}

FuncDef Parser::func_form() {
    FuncDef f;
    if (!at(TokKind::ident))
        fail("a function name");
    f.name = get().lexeme;
    expect(TokKind::paren, "{", "'{'");
    while (at(TokKind::keyword, "piece"))
        f.pieces.push_back(piece());
    expect(TokKind::paren, "}", "'}' or 'piece'");
    if (f.pieces.empty())
        throw ParseError("func " + f.name + " has no pieces");
    return f;
}

LimitDef Parser::limit_form() {
    LimitDef l;
    if (!at(TokKind::ident))
        fail("a sequence name");
    l.name = get().lexeme;
    expect(TokKind::paren, "{", "'{'");
    expect(TokKind::keyword, "seq", "'seq'");
    expect(TokKind::paren, "(", "'('");
    expect(TokKind::ident, "n", "'n'");
    expect(TokKind::paren, ")", "')'");
    expect(TokKind::op, ":", "':'");
    l.seq_expr = sum();
    expect(TokKind::op, ";", "';'");
    expect(TokKind::keyword, "mode", "'mode'");
    expect(TokKind::op, ":", "':'");
    if (accept(TokKind::keyword, "pointwise"))
        l.mode = SeqMode::pointwise;
    else if (accept(TokKind::keyword, "stable"))
        l.mode = SeqMode::stable;
    else if (accept(TokKind::keyword, "uniform"))
        l.mode = SeqMode::uniform;
    else
        fail("'pointwise', 'stable' or 'uniform'");
    accept(TokKind::op, ";");
    expect(TokKind::paren, "}", "'}'");
    if (!continuity_safe(l.seq_expr))
        throw ParseError("limit terms must stay in the continuity-safe subset");
    return l;
}

BuiltinDef Parser::builtin_form() {
    BuiltinDef b;
    if (!at(TokKind::ident))
        fail("a name");
    b.name = get().lexeme;
    expect(TokKind::op, "=", "'='");
    if (!at(TokKind::ident))
        fail("a builtin name");
    b.builtin = get().lexeme;
    static const char* known[] = {"riemann", "dirichlet", "jumpsum", "step"};
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return b.builtin == k; }) == std::end(known))
        throw ParseError("unknown builtin '" + b.builtin + "'");
    if (accept(TokKind::paren, "(")) {
        Rational v = number_token();
        if (!v.is_integer() || v.sign() <= 0)
            fail("a positive integer parameter");
        b.param = v.num();
        expect(TokKind::paren, ")", "')'");
    }
    accept(TokKind::op, ";");
    return b;
}

Program Parser::program() {
    Program prog;
    std::vector<std::string> seen;
    auto claim = [&](const std::string& name) {
        if (std::find(seen.begin(), seen.end(), name) != seen.end())
            throw ParseError("duplicate name '" + name + "'");
        seen.push_back(name);
    };
    auto x_only = [](const AstPtr& e, const char* form) {
        if (uses_var(e, "n"))
            throw ParseError(std::string(form) +
                             " expressions are functions of x alone; n is bound only in seq terms");
    };
    while (!at(TokKind::eof)) {
        if (accept(TokKind::keyword, "func")) {
            prog.funcs.push_back(func_form());
            claim(prog.funcs.back().name);
        } else if (accept(TokKind::keyword, "limit")) {
            prog.limits.push_back(limit_form());
            claim(prog.limits.back().name);
        } else if (accept(TokKind::keyword, "gauge")) {
            GaugeDef g;
            if (!at(TokKind::ident))
                fail("a gauge name");
            g.name = get().lexeme;
            expect(TokKind::op, ":", "':'");
            g.expr = sum();
            accept(TokKind::op, ";");
            x_only(g.expr, "gauge");
            claim(g.name);
            prog.gauges.push_back(std::move(g));
        } else if (accept(TokKind::keyword, "eps")) {
            EpsDef e;
            if (!at(TokKind::ident))
                fail("an eps name");
            e.name = get().lexeme;
            expect(TokKind::op, ":", "':'");
            e.expr = sum();
            accept(TokKind::op, ";");
            x_only(e.expr, "eps");
            claim(e.name);
            prog.epses.push_back(std::move(e));
        } else if (accept(TokKind::keyword, "builtin")) {
            prog.builtins.push_back(builtin_form());
            claim(prog.builtins.back().name);
        } else {
            fail("'func', 'limit', 'gauge', 'eps' or 'builtin'");
        }
    }
    return prog;
}

template <typename T>
const T* find_by_name(const std::vector<T>& v, std::string_view name) {
    for (const auto& e : v)
        if (e.name == name)
            return &e;
    return nullptr;
}

} // namespace

const FuncDef* Program::find_func(std::string_view name) const {
    return find_by_name(funcs, name);
}
const LimitDef* Program::find_limit(std::string_view name) const {
    return find_by_name(limits, name);
}
const GaugeDef* Program::find_gauge(std::string_view name) const {
    return find_by_name(gauges, name);
}
const EpsDef* Program::find_eps(std::string_view name) const {
    return find_by_name(epses, name);
}
const BuiltinDef* Program::find_builtin(std::string_view name) const {
    return find_by_name(builtins, name);
}

AstPtr parse_expr(std::string_view src) {
    Parser p(src);
    AstPtr e = p.expr();
    p.expect_eof();
    return e;
}

RSet parse_rset(std::string_view src) {
    Parser p(src);
    RSet s = p.rset();
    p.expect_eof();
    return s;
}

Program parse_program(std::string_view src) {
    Parser p(src);
    return p.program();
}

} // namespace baire
